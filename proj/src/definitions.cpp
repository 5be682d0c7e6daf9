#include "lazykb/definitions.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <unordered_map>

#include "lazykb/error.hpp"

namespace lazykb {

Definition compile_definition(SymbolId head, std::span<const std::string> lambdas, const Vocabulary& vocab,
                              const Structure* structure) {
  const SymbolDecl& decl = vocab[head];
  if (decl.kind != SymbolKind::predicate) throw TypeError("defined symbol '" + decl.name + "' must be a predicate");
  Definition defn;
  defn.head = head;
  std::vector<Binding> params;
  for (const auto& text : lambdas) {
    LambdaRule rule = parse_lambda(text);
    if (rule.params.size() != decl.arg_sorts.size())
      throw TypeError("arity mismatch: rule for '" + decl.name + "' binds " + std::to_string(rule.params.size()) +
                      " parameter(s) but the head has arity " + std::to_string(decl.arg_sorts.size()));
    params.clear();
    for (std::size_t i = 0; i < rule.params.size(); ++i) params.push_back({rule.params[i], vocab.arg_sorts(head)[i]});
    DefinitionRule r;
    r.source = text;
    r.body = infer_types(*rule.body, vocab, structure, params);
    r.body.source = text;
    Occurrences occ = occurrences(*r.body.expr);
    for (SymbolId s : occ.positive)
      if (s != head && vocab[s].kind != SymbolKind::type) defn.parameters.insert(s);
    for (SymbolId s : occ.negative)
      if (s != head && vocab[s].kind != SymbolKind::type) defn.parameters.insert(s);
    defn.rules.push_back(std::move(r));
  }
  return defn;
}

namespace {

void collect(const Expr& e, bool positive, Occurrences& out) {
  auto mark = [&](SymbolId s, bool pos) {
    if (s == kNoSymbol) return;
    (pos ? out.positive : out.negative).insert(s);
  };
  switch (e.kind) {
    case ExprKind::and_:
    case ExprKind::or_:
      collect(*e.args[0], positive, out);
      collect(*e.args[1], positive, out);
      return;
    case ExprKind::not_:
      collect(*e.args[0], !positive, out);
      return;
    case ExprKind::all:
    case ExprKind::any: {
      // all(b for x in D if f) == forall x: not D(x) or not f or b
      bool guard = e.kind == ExprKind::all ? !positive : positive;
      for (const auto& g : e.generators) {
        mark(g.domain_id, guard);
        for (const auto& f : g.filters) collect(*f, guard, out);
      }
      collect(*e.args[0], positive, out);
      return;
    }
    case ExprKind::member:
      mark(e.symbol, positive);
      for (const auto& a : e.args) collect(*a, positive, out);
      return;
    case ExprKind::apply:
      if (e.type.kind == TermType::boolean) {
        mark(e.symbol, positive);
      } else {
        mark(e.symbol, true);
        mark(e.symbol, false);
      }
      for (const auto& a : e.args) {
        collect(*a, true, out);
        collect(*a, false, out);
      }
      return;
    case ExprKind::compare:
    case ExprKind::arith:
      for (const auto& a : e.args) {
        collect(*a, true, out);
        collect(*a, false, out);
      }
      return;
    case ExprKind::var:
    case ExprKind::literal:
      return;
  }
}

}  // namespace

Occurrences occurrences(const Expr& e) {
  Occurrences out;
  collect(e, true, out);
  return out;
}

std::vector<Stratum> stratify(std::span<const Definition> definitions, const Vocabulary& vocab) {
  const std::size_t n = definitions.size();
  std::unordered_map<SymbolId, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(definitions[i].head, i);

  struct Edge {
    std::size_t to;
    bool negative;
  };
  std::vector<std::vector<Edge>> edges(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::pair<std::size_t, bool>> seen;
    for (const auto& rule : definitions[i].rules) {
      Occurrences occ = occurrences(*rule.body.expr);
      for (SymbolId s : occ.positive)
        if (auto it = index.find(s); it != index.end()) seen.insert({it->second, false});
      for (SymbolId s : occ.negative)
        if (auto it = index.find(s); it != index.end()) seen.insert({it->second, true});
    }
    for (auto [to, neg] : seen) edges[i].push_back({to, neg});
  }

  // Tarjan; components come out dependencies-first.
  std::vector<int> order(n, -1), low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::size_t> component(n, 0);
  std::vector<std::vector<std::size_t>> components;
  int counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    order[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const Edge& e : edges[v]) {
      if (order[e.to] < 0) {
        visit(e.to);
        low[v] = std::min(low[v], low[e.to]);
      } else if (on_stack[e.to]) {
        low[v] = std::min(low[v], order[e.to]);
      }
    }
    if (low[v] == order[v]) {
      std::vector<std::size_t> comp;
      for (;;) {
        std::size_t w = stack.back();
        stack.pop_back();
        on_stack[w] = false;
        component[w] = components.size();
        comp.push_back(w);
        if (w == v) break;
      }
      std::sort(comp.begin(), comp.end());
      components.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < n; ++v)
    if (order[v] < 0) visit(v);

  std::vector<Stratum> strata;
  for (const auto& comp : components) {
    Stratum s;
    s.members = comp;
    for (std::size_t v : comp) {
      for (const Edge& e : edges[v]) {
        if (component[e.to] != component[v]) continue;
        s.recursive = true;
        if (e.negative) {
          std::string cycle;
          for (std::size_t w : comp) {
            if (!cycle.empty()) cycle += ", ";
            cycle += vocab[definitions[w].head].name;
          }
          throw UnsupportedError("non-stratified definition: '" + vocab[definitions[v].head].name +
                                 "' depends negatively on '" + vocab[definitions[e.to].head].name +
                                 "' within the recursive cycle {" + cycle + "}");
        }
      }
    }
    strata.push_back(std::move(s));
  }
  return strata;
}

namespace {

// Dense numbering of the argument tuples of a predicate.
class TupleIndexer {
 public:
  TupleIndexer(const Vocabulary& vocab, const Structure& structure, SymbolId id) {
    for (SymbolId s : vocab.arg_sorts(id)) {
      const TypeExtension* ext = structure.type(s);
      if (!ext) throw DomainError("sort '" + vocab[s].name + "' has no extension");
      sorts_.push_back(ext);
    }
    size_ = 1;
    for (const auto* s : sorts_) size_ *= s->size();
  }

  std::size_t size() const noexcept { return size_; }

  std::optional<std::size_t> index(std::span<const Value> t) const {
    if (t.size() != sorts_.size()) return std::nullopt;
    std::size_t idx = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      auto k = sorts_[i]->index_of(t[i]);
      if (!k) return std::nullopt;
      idx = idx * sorts_[i]->size() + *k;
    }
    return idx;
  }

  Tuple tuple(std::size_t idx) const {
    Tuple t(sorts_.size());
    for (std::size_t i = sorts_.size(); i-- > 0;) {
      t[i] = sorts_[i]->values()[idx % sorts_[i]->size()];
      idx /= sorts_[i]->size();
    }
    return t;
  }

 private:
  std::vector<const TypeExtension*> sorts_;
  std::size_t size_ = 0;
};

struct HeadState {
  SymbolId head;
  TupleIndexer indexer;
  std::vector<char> truth;
  Relation relation;
};

// Base structure with the stratum heads replaced by the current iterate;
// optionally records which head tuples an evaluation looked at.
class IterateInterpretation : public Interpretation {
 public:
  IterateInterpretation(const Vocabulary& vocab, const Structure& structure, std::vector<HeadState>& heads)
      : base_(vocab, structure), heads_(heads) {
    for (std::size_t i = 0; i < heads.size(); ++i) slot_.emplace(heads[i].head, i);
  }

  struct Read {
    std::size_t head;
    std::size_t tuple;  // npos for a read of the whole relation
  };
  static constexpr std::size_t kWhole = static_cast<std::size_t>(-1);

  void record(std::vector<Read>* reads) { reads_ = reads; }

  const TypeExtension& sort(SymbolId type) const override { return base_.sort(type); }

  bool holds(SymbolId relation, std::span<const Value> args) const override {
    auto it = slot_.find(relation);
    if (it == slot_.end()) return base_.holds(relation, args);
    const HeadState& h = heads_[it->second];
    auto idx = h.indexer.index(args);
    if (!idx) return false;
    if (reads_) reads_->push_back({it->second, *idx});
    return h.truth[*idx] != 0;
  }

  const Value& apply(SymbolId function, std::span<const Value> args) const override {
    return base_.apply(function, args);
  }

  void for_each(SymbolId relation, const std::function<bool(std::span<const Value>)>& fn) const override {
    auto it = slot_.find(relation);
    if (it == slot_.end()) return base_.for_each(relation, fn);
    if (reads_) reads_->push_back({it->second, kWhole});
    // Snapshot: the caller never mutates the iterate during evaluation.
    for (const auto& t : heads_[it->second].relation)
      if (!fn(t)) return;
  }

 private:
  StructureInterpretation base_;
  std::vector<HeadState>& heads_;
  std::unordered_map<SymbolId, std::size_t> slot_;
  std::vector<Read>* reads_ = nullptr;
};

bool fire(const Definition& defn, const Tuple& t, const Interpretation& interp, Env& env) {
  for (const auto& rule : defn.rules) {
    env.assign(rule.body.slot_count, Value());
    std::copy(t.begin(), t.end(), env.begin());
    if (evaluate_formula(*rule.body.expr, interp, env)) return true;
  }
  return false;
}

std::vector<HeadState> make_heads(std::span<const Definition* const> stratum, const Vocabulary& vocab,
                                  const Structure& structure) {
  std::vector<HeadState> heads;
  for (const Definition* d : stratum) {
    TupleIndexer ix(vocab, structure, d->head);
    std::size_t n = ix.size();
    heads.push_back(HeadState{d->head, std::move(ix), std::vector<char>(n, 0), {}});
  }
  return heads;
}

void check_parameters(std::span<const Definition* const> stratum, const Vocabulary& vocab,
                      const Structure& structure) {
  std::set<SymbolId> heads;
  for (const Definition* d : stratum) heads.insert(d->head);
  for (const Definition* d : stratum)
    for (SymbolId p : d->parameters)
      if (!heads.count(p) && !structure.interprets(p))
        throw DomainError("parameter '" + vocab[p].name + "' of the definition of '" + vocab[d->head].name +
                          "' has no interpretation");
}

}  // namespace

std::vector<Relation> lfp_evaluate(std::span<const Definition* const> stratum, const Vocabulary& vocab,
                                   const Structure& structure, FixpointStrategy strategy) {
  check_parameters(stratum, vocab, structure);
  std::vector<HeadState> heads = make_heads(stratum, vocab, structure);
  IterateInterpretation interp(vocab, structure, heads);
  Env env;

  if (strategy == FixpointStrategy::naive) {
    std::size_t bound = 1;
    for (const auto& h : heads) bound += h.indexer.size();
    for (std::size_t round = 0;; ++round) {
      if (round > bound) throw Error("fixpoint iteration did not converge");
      std::vector<std::vector<char>> next;
      bool changed = false;
      for (std::size_t d = 0; d < heads.size(); ++d) {
        std::vector<char> truth(heads[d].indexer.size(), 0);
        for (std::size_t i = 0; i < truth.size(); ++i) {
          truth[i] = fire(*stratum[d], heads[d].indexer.tuple(i), interp, env) ? 1 : 0;
          if (truth[i] != heads[d].truth[i]) changed = true;
        }
        next.push_back(std::move(truth));
      }
      if (!changed) break;
      for (std::size_t d = 0; d < heads.size(); ++d) {
        heads[d].truth = std::move(next[d]);
        heads[d].relation.clear();
        for (std::size_t i = 0; i < heads[d].truth.size(); ++i)
          if (heads[d].truth[i]) heads[d].relation.insert(heads[d].indexer.tuple(i));
      }
    }
  } else {
    // Worklist over (head, tuple) candidates. A candidate whose rules fail
    // waits on the head tuples it read and is re-queued once one of them is
    // derived.
    using Candidate = std::pair<std::size_t, std::size_t>;
    std::deque<Candidate> queue;
    std::vector<std::vector<char>> queued;
    std::vector<std::vector<std::vector<Candidate>>> watchers;
    std::vector<std::vector<Candidate>> whole_watchers(heads.size());
    for (std::size_t d = 0; d < heads.size(); ++d) {
      std::size_t n = heads[d].indexer.size();
      queued.emplace_back(n, 1);
      watchers.emplace_back(n);
      for (std::size_t i = 0; i < n; ++i) queue.push_back({d, i});
    }
    std::vector<IterateInterpretation::Read> reads;
    interp.record(&reads);
    auto wake = [&](std::vector<Candidate>& list) {
      for (const auto& c : list) {
        if (!queued[c.first][c.second] && !heads[c.first].truth[c.second]) {
          queued[c.first][c.second] = 1;
          queue.push_back(c);
        }
      }
      list.clear();
      list.shrink_to_fit();
    };
    while (!queue.empty()) {
      auto [d, i] = queue.front();
      queue.pop_front();
      queued[d][i] = 0;
      if (heads[d].truth[i]) continue;
      reads.clear();
      Tuple t = heads[d].indexer.tuple(i);
      if (fire(*stratum[d], t, interp, env)) {
        heads[d].truth[i] = 1;
        heads[d].relation.insert(std::move(t));
        wake(watchers[d][i]);
        wake(whole_watchers[d]);
      } else {
        for (const auto& r : reads) {
          if (r.tuple == IterateInterpretation::kWhole) {
            whole_watchers[r.head].push_back({d, i});
          } else if (!heads[r.head].truth[r.tuple]) {
            watchers[r.head][r.tuple].push_back({d, i});
          }
        }
      }
    }
  }

  std::vector<Relation> out;
  for (auto& h : heads) out.push_back(std::move(h.relation));
  return out;
}

Relation lfp_evaluate(const Definition& defn, const Vocabulary& vocab, const Structure& structure,
                      FixpointStrategy strategy) {
  const Definition* one[] = {&defn};
  return std::move(lfp_evaluate(one, vocab, structure, strategy).front());
}

Relation derive_once(const Definition& defn, const Vocabulary& vocab, const Structure& structure,
                     const Relation& current) {
  const Definition* one[] = {&defn};
  std::vector<HeadState> heads = make_heads(one, vocab, structure);
  for (const auto& t : current) {
    if (auto idx = heads[0].indexer.index(t)) {
      heads[0].truth[*idx] = 1;
      heads[0].relation.insert(t);
    }
  }
  IterateInterpretation interp(vocab, structure, heads);
  Env env;
  Relation out;
  for (std::size_t i = 0; i < heads[0].indexer.size(); ++i) {
    Tuple t = heads[0].indexer.tuple(i);
    if (fire(defn, t, interp, env)) out.insert(std::move(t));
  }
  return out;
}

}  // namespace lazykb
