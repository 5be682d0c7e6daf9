#include "lazykb/grounder.hpp"

#include <algorithm>
#include <cstdlib>
#include <unordered_map>

#include "lazykb/error.hpp"
#include "lazykb/evaluate.hpp"

namespace lazykb {

std::string GroundAtom::to_string(const Vocabulary& vocab) const {
  std::string out = vocab[symbol].name;
  if (!args.empty() || kind == Kind::pred) {
    out += '(';
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (i) out += ',';
      out += args[i].to_string();
    }
    out += ')';
  }
  if (kind == Kind::fun_cell) out += "=" + value.to_string();
  return out;
}

std::optional<int> GroundProblem::variable(const Vocabulary& vocab, const GroundAtom& atom) const {
  for (const auto& b : blocks) {
    if (b.symbol != atom.symbol) continue;
    const auto& sorts = vocab.arg_sorts(b.symbol);
    std::size_t idx = 0;
    for (std::size_t i = 0; i < sorts.size(); ++i) {
      const TypeExtension* ext = known.type(sorts[i]);
      auto k = ext->index_of(atom.args.at(i));
      if (!k) return std::nullopt;
      idx = idx * ext->size() + *k;
    }
    std::size_t off = 0;
    if (atom.kind == GroundAtom::Kind::fun_cell) {
      auto k = known.type(vocab.ret_sort(b.symbol))->index_of(atom.value);
      if (!k) return std::nullopt;
      off = *k;
    }
    return b.base + static_cast<int>(idx * b.range + off);
  }
  return std::nullopt;
}

namespace {

// Propositional formula arena. Node 0 is false, node 1 is true; literal
// nodes hold a positive variable.
using GRef = int;
constexpr GRef kFalse = 0;
constexpr GRef kTrue = 1;

struct GNode {
  enum Op { constant, lit, and_, or_, not_ } op;
  int var = 0;
  std::vector<GRef> kids;
};

class Arena {
 public:
  Arena() { reset(); }

  void reset() {
    nodes_.clear();
    nodes_.push_back({GNode::constant, 0, {}});
    nodes_.push_back({GNode::constant, 1, {}});
    lit_cache_.clear();
  }

  const GNode& operator[](GRef r) const { return nodes_[static_cast<std::size_t>(r)]; }
  std::size_t size() const { return nodes_.size(); }

  static GRef constant(bool b) { return b ? kTrue : kFalse; }

  GRef lit(int var) {
    auto [it, fresh] = lit_cache_.try_emplace(var, 0);
    if (fresh) {
      it->second = static_cast<GRef>(nodes_.size());
      nodes_.push_back({GNode::lit, var, {}});
    }
    return it->second;
  }

  GRef negate(GRef a) {
    if (a == kTrue) return kFalse;
    if (a == kFalse) return kTrue;
    if ((*this)[a].op == GNode::not_) return (*this)[a].kids[0];
    nodes_.push_back({GNode::not_, 0, {a}});
    return static_cast<GRef>(nodes_.size() - 1);
  }

  GRef conj(std::vector<GRef> kids) { return junction(GNode::and_, std::move(kids)); }
  GRef disj(std::vector<GRef> kids) { return junction(GNode::or_, std::move(kids)); }
  GRef conj2(GRef a, GRef b) { return conj({a, b}); }
  GRef disj2(GRef a, GRef b) { return disj({a, b}); }

 private:
  GRef junction(GNode::Op op, std::vector<GRef> kids) {
    GRef absorbing = op == GNode::and_ ? kFalse : kTrue;
    GRef neutral = op == GNode::and_ ? kTrue : kFalse;
    std::vector<GRef> flat;
    flat.reserve(kids.size());
    for (GRef k : kids) {
      if (k == absorbing) return absorbing;
      if (k == neutral) continue;
      if ((*this)[k].op == op) {
        for (GRef kk : (*this)[k].kids) flat.push_back(kk);
      } else {
        flat.push_back(k);
      }
    }
    std::sort(flat.begin(), flat.end());
    flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
    if (flat.empty()) return neutral;
    if (flat.size() == 1) return flat[0];
    nodes_.push_back({op, 0, std::move(flat)});
    return static_cast<GRef>(nodes_.size() - 1);
  }

  std::vector<GNode> nodes_;
  std::unordered_map<int, GRef> lit_cache_;
};

struct Case {
  GRef cond;
  Value value;
};
using Cases = std::vector<Case>;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

struct Grounder::Impl {
  const Vocabulary& vocab;
  GroundOptions options;
  GroundProblem problem;
  std::vector<char> unknown;
  std::vector<int> block_of;  // symbol -> index into problem.blocks, or -1
  Arena arena;
  int next_var = 0;
  std::vector<std::vector<int>> pending;  // clauses of the current formula

  // Atoms forced by unit clauses so far; used to fold later definitions.
  std::unordered_map<int, bool> fixed;
  bool use_fixed = false;

  // Heads of the stratum being unfolded, mapped to the layer being read.
  // Entries are a variable, kLayerFalse or kLayerTrue.
  using LayerTable = std::vector<int>;
  static constexpr int kLayerFalse = 0;
  static constexpr int kLayerTrue = -1;
  std::unordered_map<SymbolId, const LayerTable*> layers;

  std::unordered_map<const Expr*, bool> known_memo;
  std::map<std::pair<GRef, bool>, int> aux_memo;

  Impl(const Vocabulary& v, Structure s, GroundOptions o) : vocab(v), options(o) {
    problem.known = std::move(s);
    problem.known.resize(vocab.size());
    unknown.assign(vocab.size(), 0);
    block_of.assign(vocab.size(), -1);
    for (SymbolId id = 0; id < vocab.size(); ++id) {
      const SymbolDecl& d = vocab[id];
      if (d.kind == SymbolKind::type) {
        if (!problem.known.type(id)) throw DomainError("type '" + d.name + "' has no extension");
        continue;
      }
    }
    for (SymbolId id = 0; id < vocab.size(); ++id) {
      if (vocab[id].kind != SymbolKind::type && !problem.known.interprets(id)) allocate(id);
    }
    next_var = problem.atom_count();
    problem.cnf.num_vars = next_var;
  }

  StructureInterpretation interp() const { return StructureInterpretation(vocab, problem.known); }

  const TypeExtension& sort(SymbolId s) const { return *problem.known.type(s); }

  void allocate(SymbolId id) {
    const SymbolDecl& d = vocab[id];
    unknown[id] = 1;
    SymbolAtoms b;
    b.symbol = id;
    b.base = problem.atom_count() + 1;
    b.domain = domain_size(vocab, problem.known, id);
    b.range = d.is_function() ? sort(vocab.ret_sort(id)).size() : 1;
    block_of[id] = static_cast<int>(problem.blocks.size());
    problem.blocks.push_back(b);
    const TypeExtension* ret = d.is_function() ? &sort(vocab.ret_sort(id)) : nullptr;
    for_each_argument_tuple(vocab, problem.known, id, [&](const Tuple& t) {
      if (!ret) {
        problem.atoms.push_back({GroundAtom::Kind::pred, id, t, Value()});
      } else {
        for (const auto& v : ret->values()) problem.atoms.push_back({GroundAtom::Kind::fun_cell, id, t, v});
      }
    });
  }

  std::optional<std::size_t> flat_index(SymbolId id, std::span<const Value> t) const {
    const auto& sorts = vocab.arg_sorts(id);
    if (t.size() != sorts.size()) return std::nullopt;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      const TypeExtension& ext = sort(sorts[i]);
      auto k = ext.index_of(t[i]);
      if (!k) return std::nullopt;
      idx = idx * ext.size() + *k;
    }
    return idx;
  }

  GRef var_ref(int var) {
    if (use_fixed) {
      auto it = fixed.find(var);
      if (it != fixed.end()) return Arena::constant(it->second);
    }
    return arena.lit(var);
  }

  GRef pred_ref(SymbolId id, std::span<const Value> t) {
    const SymbolDecl& d = vocab[id];
    if (d.kind == SymbolKind::type) return Arena::constant(t.size() == 1 && sort(id).contains(t[0]));
    auto layer = layers.find(id);
    if (layer == layers.end() && !unknown[id]) return Arena::constant(interp().holds(id, t));
    auto idx = flat_index(id, t);
    if (!idx) return kFalse;
    if (layer != layers.end()) {
      int v = (*layer->second)[*idx];
      if (v == kLayerFalse || v == kLayerTrue) return Arena::constant(v == kLayerTrue);
      return arena.lit(v);
    }
    return var_ref(problem.blocks[static_cast<std::size_t>(block_of[id])].base + static_cast<int>(*idx));
  }

  int cell_var(SymbolId id, std::span<const Value> t, std::size_t value_index) const {
    auto idx = flat_index(id, t);
    if (!idx)
      throw DomainError("argument " + to_string(t, true) + " is outside the domain of '" + vocab[id].name + "'");
    const SymbolAtoms& b = problem.blocks[static_cast<std::size_t>(block_of[id])];
    return b.base + static_cast<int>(*idx * b.range + value_index);
  }

  // --- knownness ---------------------------------------------------------

  bool symbol_known(SymbolId s) const {
    if (s == kNoSymbol) return true;
    if (layers.count(s)) return false;
    return !unknown[s];
  }

  bool known(const Expr& e) {
    auto it = known_memo.find(&e);
    if (it != known_memo.end()) return it->second;
    bool k = symbol_known(e.symbol);
    for (const auto& a : e.args) k = known(*a) && k;
    for (const auto& g : e.generators) {
      k = symbol_known(g.domain_id) && k;
      for (const auto& f : g.filters) k = known(*f) && k;
    }
    known_memo.emplace(&e, k);
    return k;
  }

  // --- formulas ------------------------------------------------------------

  static void for_combinations(const std::vector<Cases>& args, const std::function<void(GRef, const Tuple&)>& fn,
                               Arena& arena) {
    Tuple t(args.size());
    std::vector<GRef> conds(args.size());
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
      if (i == args.size()) {
        fn(arena.conj(conds), t);
        return;
      }
      for (const auto& c : args[i]) {
        conds[i] = c.cond;
        t[i] = c.value;
        rec(i + 1);
      }
    };
    rec(0);
  }

  Cases merge(Cases cases) {
    std::map<Value, std::vector<GRef>> by_value;
    for (auto& c : cases) {
      if (c.cond == kFalse) continue;
      by_value[c.value].push_back(c.cond);
    }
    Cases out;
    for (auto& [v, conds] : by_value) out.push_back({arena.disj(std::move(conds)), v});
    return out;
  }

  Cases term(const Expr& e, Env& env) {
    if (known(e)) {
      auto in = interp();
      return {{kTrue, evaluate_term(e, in, env)}};
    }
    switch (e.kind) {
      case ExprKind::arith: {
        Cases l = term(*e.args[0], env);
        Cases r = term(*e.args[1], env);
        Cases out;
        for (const auto& a : l)
          for (const auto& b : r) out.push_back({arena.conj2(a.cond, b.cond), apply_arith(e.arith, a.value, b.value)});
        return merge(std::move(out));
      }
      case ExprKind::apply: {
        std::vector<Cases> args;
        for (const auto& a : e.args) args.push_back(term(*a, env));
        Cases out;
        if (!unknown[e.symbol]) {
          auto in = interp();
          for_combinations(
              args, [&](GRef cond, const Tuple& t) { out.push_back({cond, in.apply(e.symbol, t)}); }, arena);
        } else {
          const TypeExtension& ret = sort(vocab.ret_sort(e.symbol));
          for_combinations(
              args,
              [&](GRef cond, const Tuple& t) {
                for (std::size_t k = 0; k < ret.size(); ++k)
                  out.push_back({arena.conj2(cond, var_ref(cell_var(e.symbol, t, k))), ret.values()[k]});
              },
              arena);
        }
        return merge(std::move(out));
      }
      default:
        break;
    }
    throw Error("cannot ground term " + to_string(e));
  }

  GRef formula(const Expr& e, Env& env) {
    if (known(e)) {
      auto in = interp();
      return Arena::constant(evaluate_formula(e, in, env));
    }
    switch (e.kind) {
      case ExprKind::and_: {
        GRef a = formula(*e.args[0], env);
        if (a == kFalse) return kFalse;
        return arena.conj2(a, formula(*e.args[1], env));
      }
      case ExprKind::or_: {
        GRef a = formula(*e.args[0], env);
        if (a == kTrue) return kTrue;
        return arena.disj2(a, formula(*e.args[1], env));
      }
      case ExprKind::not_:
        return arena.negate(formula(*e.args[0], env));
      case ExprKind::all:
        return quantifier(e, 0, env, true);
      case ExprKind::any:
        return quantifier(e, 0, env, false);
      case ExprKind::compare: {
        Cases l = term(*e.args[0], env);
        Cases r = term(*e.args[1], env);
        std::vector<GRef> holds_pairs, fails_pairs;
        for (const auto& a : l)
          for (const auto& b : r)
            (apply_compare(e.cmp, a.value, b.value) ? holds_pairs : fails_pairs).push_back(arena.conj2(a.cond, b.cond));
        // Cases are exclusive and exhaustive, so either side determines the result.
        if (holds_pairs.size() <= fails_pairs.size()) return arena.disj(std::move(holds_pairs));
        return arena.negate(arena.disj(std::move(fails_pairs)));
      }
      case ExprKind::member:
      case ExprKind::apply: {
        if (std::all_of(e.args.begin(), e.args.end(), [&](const ExprPtr& a) { return known(*a); })) {
          auto in = interp();
          Tuple t;
          t.reserve(e.args.size());
          for (const auto& a : e.args) t.push_back(evaluate_term(*a, in, env));
          return pred_ref(e.symbol, t);
        }
        std::vector<Cases> args;
        for (const auto& a : e.args) args.push_back(term(*a, env));
        std::vector<GRef> options_;
        for_combinations(
            args, [&](GRef cond, const Tuple& t) { options_.push_back(arena.conj2(cond, pred_ref(e.symbol, t))); },
            arena);
        return arena.disj(std::move(options_));
      }
      default:
        break;
    }
    throw Error("cannot ground formula " + to_string(e));
  }

  // Calls fn(guard) for every binding of generator g; guard is the condition
  // under which the binding is in the domain and passes its filters.
  // fn returns false to stop.
  void bindings(const Generator& g, Env& env, const std::function<bool(GRef)>& fn) {
    auto bind = [&](std::span<const Value> t, GRef guard) {
      for (std::size_t i = 0; i < g.slots.size(); ++i) env[static_cast<std::size_t>(g.slots[i])] = t[i];
      std::vector<GRef> conds{guard};
      for (const auto& f : g.filters) {
        GRef c = formula(*f, env);
        if (c == kFalse) return true;
        conds.push_back(c);
      }
      return fn(arena.conj(std::move(conds)));
    };
    if (symbol_known(g.domain_id)) {
      auto in = interp();
      std::vector<Tuple> tuples;
      in.for_each(g.domain_id, [&](std::span<const Value> t) {
        tuples.emplace_back(t.begin(), t.end());
        return true;
      });
      for (const auto& t : tuples)
        if (!bind(t, kTrue)) return;
      return;
    }
    std::vector<Tuple> tuples;
    for_each_argument_tuple(vocab, problem.known, g.domain_id, [&](const Tuple& t) { tuples.push_back(t); });
    for (const auto& t : tuples) {
      GRef guard = pred_ref(g.domain_id, t);
      if (guard == kFalse) continue;
      if (!bind(t, guard)) return;
    }
  }

  GRef quantifier(const Expr& e, std::size_t gi, Env& env, bool universal) {
    if (gi == e.generators.size()) return formula(*e.args[0], env);
    std::vector<GRef> parts;
    bool decided = false;
    bindings(e.generators[gi], env, [&](GRef guard) {
      GRef inner = quantifier(e, gi + 1, env, universal);
      GRef part = universal ? arena.disj2(arena.negate(guard), inner) : arena.conj2(guard, inner);
      if (part == (universal ? kFalse : kTrue)) {
        decided = true;
        return false;
      }
      parts.push_back(part);
      return true;
    });
    if (decided) return universal ? kFalse : kTrue;
    return universal ? arena.conj(std::move(parts)) : arena.disj(std::move(parts));
  }

  // --- clausification ----------------------------------------------------

  void emit(std::vector<int> clause) {
    std::sort(clause.begin(), clause.end(), [](int a, int b) {
      return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
    });
    clause.erase(std::unique(clause.begin(), clause.end()), clause.end());
    for (std::size_t i = 1; i < clause.size(); ++i)
      if (clause[i] == -clause[i - 1]) return;
    if (clause.empty()) {
      if (problem.trivially_false) return;
      problem.trivially_false = true;
    }
    if (clause.size() == 1 && std::abs(clause[0]) <= problem.atom_count()) {
      fixed[std::abs(clause[0])] = clause[0] > 0;
    }
    problem.cnf.clauses.push_back(std::move(clause));
  }

  bool conjunctive(GRef f, bool positive) const {
    auto op = arena[f].op;
    return (op == GNode::and_ && positive) || (op == GNode::or_ && !positive);
  }

  // Appends to `clause` literals whose disjunction implies f (under the
  // polarity); returns false when the clause is already satisfied.
  bool disjunction(GRef f, bool positive, std::vector<int>& clause) {
    const GNode& n = arena[f];
    switch (n.op) {
      case GNode::constant:
        return (n.var == 1) != positive;
      case GNode::lit:
        clause.push_back(positive ? n.var : -n.var);
        return true;
      case GNode::not_:
        return disjunction(n.kids[0], !positive, clause);
      default:
        break;
    }
    if (!conjunctive(f, positive)) {
      std::vector<GRef> kids = n.kids;
      for (GRef k : kids)
        if (!disjunction(k, positive, clause)) return false;
      return true;
    }
    // Auxiliary a with a -> f (one-sided definition suffices for satisfiability).
    auto key = std::make_pair(f, positive);
    auto it = aux_memo.find(key);
    if (it == aux_memo.end()) {
      int a = ++next_var;
      it = aux_memo.emplace(key, a).first;
      std::vector<GRef> kids = n.kids;
      for (GRef k : kids) {
        std::vector<int> c{-a};
        if (disjunction(k, positive, c)) emit(std::move(c));
      }
    }
    clause.push_back(it->second);
    return true;
  }

  void assert_ref(GRef f, bool positive = true) {
    if (conjunctive(f, positive)) {
      std::vector<GRef> kids = arena[f].kids;
      for (GRef k : kids) assert_ref(k, positive);
      return;
    }
    if (arena[f].op == GNode::not_) return assert_ref(arena[f].kids[0], !positive);
    std::vector<int> clause;
    if (disjunction(f, positive, clause)) emit(std::move(clause));
  }

  void finish_formula() {
    arena.reset();
    aux_memo.clear();
    problem.cnf.num_vars = next_var;
  }

  // Streams universally quantified and conjunctive structure straight into
  // clauses instead of building one large formula.
  void assert_expr(const Expr& e, Env& env) {
    if (known(e)) {
      auto in = interp();
      if (!evaluate_formula(e, in, env)) emit({});
      return;
    }
    if (e.kind == ExprKind::and_) {
      assert_expr(*e.args[0], env);
      assert_expr(*e.args[1], env);
      return;
    }
    if (e.kind == ExprKind::all) {
      assert_all(e, 0, env);
      return;
    }
    assert_ref(formula(e, env));
    finish_formula();
  }

  void assert_all(const Expr& e, std::size_t gi, Env& env) {
    if (gi == e.generators.size()) {
      assert_expr(*e.args[0], env);
      return;
    }
    const Generator& g = e.generators[gi];
    bool streamable = symbol_known(g.domain_id);
    for (const auto& f : g.filters) streamable = streamable && known(*f);
    if (!streamable) {
      assert_ref(quantifier(e, gi, env, true));
      finish_formula();
      return;
    }
    auto in = interp();
    std::vector<Tuple> tuples;
    in.for_each(g.domain_id, [&](std::span<const Value> t) {
      tuples.emplace_back(t.begin(), t.end());
      return true;
    });
    for (const auto& t : tuples) {
      for (std::size_t i = 0; i < g.slots.size(); ++i) env[static_cast<std::size_t>(g.slots[i])] = t[i];
      bool pass = true;
      for (const auto& f : g.filters)
        if (!evaluate_formula(*f, in, env)) {
          pass = false;
          break;
        }
      if (pass) assert_all(e, gi + 1, env);
    }
  }

  // --- definitions -------------------------------------------------------

  GRef rule_bodies(const Definition& d, const Tuple& t) {
    std::vector<GRef> bodies;
    for (const auto& rule : d.rules) {
      Env env(rule.body.slot_count);
      std::copy(t.begin(), t.end(), env.begin());
      GRef b = formula(*rule.body.expr, env);
      if (b == kTrue) return kTrue;
      bodies.push_back(b);
    }
    return arena.disj(std::move(bodies));
  }

  void equivalence(int head_var, GRef body) {
    GRef h = arena.lit(head_var);
    assert_ref(arena.disj2(arena.negate(h), body));
    assert_ref(arena.disj2(h, arena.negate(body)));
    finish_formula();
  }

  void complete(const Definition& d) {
    const SymbolAtoms& b = problem.blocks[static_cast<std::size_t>(block_of[d.head])];
    std::size_t idx = 0;
    for_each_argument_tuple(vocab, problem.known, d.head, [&](const Tuple& t) {
      equivalence(b.base + static_cast<int>(idx++), rule_bodies(d, t));
    });
  }

  // Layer i + 1 of every head reads layer i of all heads of the stratum;
  // layer 0 is empty. Bodies that fold to a constant get no variable, and
  // unfolding stops early once a layer repeats the previous one exactly.
  void unfold(std::span<const Definition* const> stratum) {
    std::size_t head_atoms = 0;
    for (const Definition* d : stratum) head_atoms += domain_size(vocab, problem.known, d->head);
    std::size_t depth = options.unfold_depth.value_or(head_atoms);
    for (const Definition* d : stratum) problem.defined_levels[d->head] = depth;

    std::vector<LayerTable> reading(stratum.size());
    for (std::size_t k = 0; k < stratum.size(); ++k)
      reading[k].assign(domain_size(vocab, problem.known, stratum[k]->head), kLayerFalse);
    for (std::size_t layer = 1; layer <= depth; ++layer) {
      for (std::size_t k = 0; k < stratum.size(); ++k) layers[stratum[k]->head] = &reading[k];
      known_memo.clear();
      std::vector<LayerTable> writing(stratum.size());
      for (std::size_t k = 0; k < stratum.size(); ++k) {
        for_each_argument_tuple(vocab, problem.known, stratum[k]->head, [&](const Tuple& t) {
          GRef body = rule_bodies(*stratum[k], t);
          if (body == kFalse || body == kTrue) {
            writing[k].push_back(body == kTrue ? kLayerTrue : kLayerFalse);
          } else {
            int v = ++next_var;
            writing[k].push_back(v);
            equivalence(v, body);
          }
          finish_formula();
        });
      }
      bool repeated = writing == reading;
      reading = std::move(writing);
      if (repeated) break;
    }
    layers.clear();
    known_memo.clear();
    for (std::size_t k = 0; k < stratum.size(); ++k) {
      const SymbolAtoms& b = problem.blocks[static_cast<std::size_t>(block_of[stratum[k]->head])];
      for (std::size_t i = 0; i < reading[k].size(); ++i) {
        int head = b.base + static_cast<int>(i);
        int v = reading[k][i];
        if (v == kLayerFalse) {
          emit({-head});
        } else if (v == kLayerTrue) {
          emit({head});
        } else {
          emit({-head, v});
          emit({head, -v});
        }
      }
    }
    problem.cnf.num_vars = next_var;
  }

  bool add_definitions(std::span<const Definition* const> stratum, bool recursive) {
    bool params_known = true;
    std::set<SymbolId> heads;
    for (const Definition* d : stratum) heads.insert(d->head);
    for (const Definition* d : stratum)
      for (SymbolId p : d->parameters)
        if (!heads.count(p) && unknown[p]) params_known = false;

    if (params_known) {
      std::vector<Relation> rels = lfp_evaluate(stratum, vocab, problem.known, options.fixpoint);
      for (std::size_t k = 0; k < stratum.size(); ++k) {
        SymbolId h = stratum[k]->head;
        if (unknown[h]) throw Error("definition head '" + vocab[h].name + "' was already allocated as unknown");
        problem.known.set(h, std::move(rels[k]));
      }
      known_memo.clear();
      return true;
    }

    for (const Definition* d : stratum) {
      if (!unknown[d->head]) throw Error("definition head '" + vocab[d->head].name + "' is not unknown");
      if (recursive) {
        for (const auto& rule : d->rules) {
          Occurrences occ = occurrences(*rule.body.expr);
          for (SymbolId s : occ.negative)
            if (heads.count(s))
              throw UnsupportedError("negation of the recursively defined symbol '" + vocab[s].name +
                                     "' is outside the supported fragment");
        }
      }
    }
    use_fixed = true;
    if (recursive) {
      unfold(stratum);
    } else {
      for (const Definition* d : stratum) complete(*d);
    }
    use_fixed = false;
    return false;
  }

  void function_consistency(SymbolId f) {
    if (!unknown[f]) return;
    const SymbolAtoms& b = problem.blocks[static_cast<std::size_t>(block_of[f])];
    for (std::size_t t = 0; t < b.domain; ++t) {
      int first = b.base + static_cast<int>(t * b.range);
      std::vector<int> alo;
      for (std::size_t k = 0; k < b.range; ++k) alo.push_back(first + static_cast<int>(k));
      emit(alo);
      for (std::size_t i = 0; i < b.range; ++i)
        for (std::size_t j = i + 1; j < b.range; ++j)
          emit({-(first + static_cast<int>(i)), -(first + static_cast<int>(j))});
    }
  }

  // A forced function cell forces the other cells of its tuple false.
  void close_fixed() {
    std::vector<std::pair<int, bool>> extra;
    for (const auto& [var, val] : fixed) {
      if (!val) continue;
      const GroundAtom& a = problem.atoms[static_cast<std::size_t>(var - 1)];
      if (a.kind != GroundAtom::Kind::fun_cell) continue;
      const SymbolAtoms& b = problem.blocks[static_cast<std::size_t>(block_of[a.symbol])];
      int first = var - (var - b.base) % static_cast<int>(b.range);
      for (std::size_t k = 0; k < b.range; ++k)
        if (first + static_cast<int>(k) != var) extra.push_back({first + static_cast<int>(k), false});
    }
    for (const auto& [v, val] : extra) fixed.emplace(v, val);
  }
};

Grounder::Grounder(const Vocabulary& vocab, Structure structure, GroundOptions options)
    : impl_(std::make_unique<Impl>(vocab, std::move(structure), options)) {}

Grounder::~Grounder() = default;

void Grounder::add_constraint(const TypedFormula& f) {
  Env env(f.slot_count);
  impl_->known_memo.clear();
  impl_->assert_expr(*f.expr, env);
  impl_->finish_formula();
}

void Grounder::add_function_consistency(SymbolId function) {
  impl_->function_consistency(function);
  impl_->problem.cnf.num_vars = impl_->next_var;
}

bool Grounder::add_definitions(std::span<const Definition* const> stratum, bool recursive) {
  impl_->close_fixed();
  return impl_->add_definitions(stratum, recursive);
}

bool Grounder::is_unknown(SymbolId id) const { return impl_->unknown.at(id) != 0; }
const GroundProblem& Grounder::problem() const { return impl_->problem; }

GroundProblem Grounder::take() {
  impl_->problem.cnf.num_vars = impl_->next_var;
  return std::move(impl_->problem);
}

GroundProblem ground_theory(const Vocabulary& vocab, const Structure& structure,
                            std::span<const TypedFormula> constraints, std::span<const Definition> definitions,
                            GroundOptions options) {
  std::vector<Stratum> strata = stratify(definitions, vocab);

  // Fold every stratum whose parameters are known before allocating atoms,
  // so folded heads never become unknown.
  Structure working = structure;
  working.resize(vocab.size());
  std::vector<std::size_t> unfolded;
  std::vector<char> unknown_head(vocab.size(), 0);
  for (std::size_t s = 0; s < strata.size(); ++s) {
    std::vector<const Definition*> members;
    std::set<SymbolId> heads;
    for (std::size_t m : strata[s].members) {
      members.push_back(&definitions[m]);
      heads.insert(definitions[m].head);
    }
    bool params_known = true;
    for (const Definition* d : members)
      for (SymbolId p : d->parameters)
        if (!heads.count(p) && (!working.interprets(p) || unknown_head[p])) params_known = false;
    if (params_known) {
      std::vector<Relation> rels = lfp_evaluate(members, vocab, working, options.fixpoint);
      for (std::size_t k = 0; k < members.size(); ++k) working.set(members[k]->head, std::move(rels[k]));
    } else {
      for (SymbolId h : heads) unknown_head[h] = 1;
      unfolded.push_back(s);
    }
  }

  Grounder g(vocab, std::move(working), options);
  for (const auto& c : constraints) g.add_constraint(c);
  for (SymbolId id = 0; id < vocab.size(); ++id)
    if (vocab[id].is_function() && g.is_unknown(id)) g.add_function_consistency(id);
  for (std::size_t s : unfolded) {
    std::vector<const Definition*> members;
    for (std::size_t m : strata[s].members) members.push_back(&definitions[m]);
    g.add_definitions(members, strata[s].recursive);
  }
  return g.take();
}

std::vector<std::vector<int>> ground_constraint(const TypedFormula& f, const Vocabulary& vocab,
                                                const Structure& structure) {
  Grounder g(vocab, structure);
  g.add_constraint(f);
  return g.take().cnf.clauses;
}

std::vector<std::vector<int>> ground_function_consistency(SymbolId function, const Vocabulary& vocab,
                                                          const Structure& structure) {
  Grounder g(vocab, structure);
  g.add_function_consistency(function);
  return g.take().cnf.clauses;
}

Structure decode_model(const Vocabulary& vocab, const GroundProblem& problem, const sat::Assignment& model) {
  Structure out = problem.known;
  for (const auto& b : problem.blocks) {
    const SymbolDecl& d = vocab[b.symbol];
    if (d.is_function()) {
      FunctionTable table;
      for (std::size_t t = 0; t < b.domain; ++t) {
        const GroundAtom* chosen = nullptr;
        for (std::size_t k = 0; k < b.range; ++k) {
          auto var = static_cast<std::size_t>(b.base) + t * b.range + k;
          if (model.at(var)) {
            if (chosen) throw Error("model assigns two values to " + chosen->to_string(vocab));
            chosen = &problem.atoms[var - 1];
          }
        }
        if (!chosen) throw Error("model assigns no value to a cell of '" + d.name + "'");
        table.emplace(chosen->args, chosen->value);
      }
      out.set(b.symbol, std::move(table));
    } else {
      Relation rel;
      for (std::size_t t = 0; t < b.domain; ++t) {
        auto var = static_cast<std::size_t>(b.base) + t;
        if (model.at(var)) rel.insert(problem.atoms[var - 1].args);
      }
      out.set(b.symbol, std::move(rel));
    }
  }
  return out;
}

}  // namespace lazykb
