#include "lazykb/typecheck.hpp"

namespace lazykb {

namespace {

struct Scoped {
  std::string name;
  int slot;
  SymbolId sort;
};

class TypeChecker {
 public:
  TypeChecker(const Vocabulary& vocab, const Structure* structure) : vocab_(vocab), structure_(structure) {}

  TypedFormula run(const Expr& e, std::span<const Binding> outer) {
    for (const auto& b : outer) bind(b.name, b.sort, e.pos);
    TypedFormula out;
    out.expr = formula(e);
    out.slot_count = static_cast<std::size_t>(next_slot_);
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& msg, SourcePos pos) const {
    throw TypeError(std::to_string(pos.line) + ":" + std::to_string(pos.column) + ": " + msg);
  }

  int bind(const std::string& name, SymbolId sort, SourcePos pos) {
    if (vocab_.find(name))
      fail("variable '" + name + "' shadows the declared symbol of the same name", pos);
    int slot = next_slot_++;
    scope_.push_back({name, slot, sort});
    return slot;
  }

  const Scoped* lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->name == name) return &*it;
    return nullptr;
  }

  std::string describe(const TermType& t) const {
    switch (t.kind) {
      case TermType::boolean: return "boolean";
      case TermType::sort: return "sort " + vocab_[t.sort_id].name;
      case TermType::integer: return "integer";
      case TermType::symbol: return "symbolic value";
      default: return "unknown";
    }
  }

  bool integer_valued(const TermType& t) const {
    if (t.kind == TermType::integer) return true;
    if (t.kind != TermType::sort) return false;
    if (!structure_) return true;
    const TypeExtension* ext = structure_->type(t.sort_id);
    return !ext || ext->all_integers();
  }

  ExprPtr formula(const Expr& e) {
    ExprPtr out = any(e);
    if (out->type.kind != TermType::boolean)
      fail("expected a boolean formula but found a term of " + describe(out->type), e.pos);
    return out;
  }

  ExprPtr term(const Expr& e) {
    ExprPtr out = any(e);
    if (out->type.kind == TermType::boolean) fail("expected a term but found a boolean formula", e.pos);
    return out;
  }

  std::vector<ExprPtr> arguments(const Expr& e, SymbolId id) {
    const SymbolDecl& decl = vocab_[id];
    std::vector<SymbolId> sorts =
        decl.kind == SymbolKind::type ? std::vector<SymbolId>{id} : vocab_.arg_sorts(id);
    if (e.args.size() != sorts.size())
      fail("arity mismatch: '" + decl.name + "' takes " + std::to_string(sorts.size()) + " argument(s), got " +
               std::to_string(e.args.size()),
           e.pos);
    std::vector<ExprPtr> args;
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      ExprPtr a = term(*e.args[i]);
      if (a->type.kind == TermType::sort && a->type.sort_id != sorts[i])
        fail("sort mismatch: argument " + std::to_string(i + 1) + " of '" + decl.name + "' expects sort " +
                 vocab_[sorts[i]].name + " but got " + describe(a->type),
             e.args[i]->pos);
      args.push_back(std::move(a));
    }
    return args;
  }

  ExprPtr any(const Expr& e) {
    auto out = std::make_shared<Expr>(e);
    switch (e.kind) {
      case ExprKind::and_:
      case ExprKind::or_:
        out->args = {formula(*e.args[0]), formula(*e.args[1])};
        out->type = TermType::boolean_type();
        return out;
      case ExprKind::not_:
        out->args = {formula(*e.args[0])};
        out->type = TermType::boolean_type();
        return out;
      case ExprKind::all:
      case ExprKind::any: {
        std::size_t mark = scope_.size();
        for (auto& g : out->generators) generator(g);
        out->args = {formula(*e.args[0])};
        scope_.resize(mark);
        out->type = TermType::boolean_type();
        return out;
      }
      case ExprKind::compare: {
        ExprPtr l = term(*e.args[0]);
        ExprPtr r = term(*e.args[1]);
        const TermType& lt = l->type;
        const TermType& rt = r->type;
        if (e.cmp == CmpOp::eq || e.cmp == CmpOp::ne) {
          if (lt.kind == TermType::sort && rt.kind == TermType::sort && lt.sort_id != rt.sort_id)
            fail("sort mismatch: cannot compare " + describe(lt) + " with " + describe(rt), e.pos);
          bool li = lt.kind == TermType::integer, ls = lt.kind == TermType::symbol;
          bool ri = rt.kind == TermType::integer, rs = rt.kind == TermType::symbol;
          if ((li && rs) || (ls && ri))
            fail("cannot compare an integer with a symbolic value", e.pos);
          if ((lt.kind == TermType::sort && rs && integer_valued(lt)) ||
              (rt.kind == TermType::sort && ls && integer_valued(rt)))
            fail("cannot compare an integer-valued sort with a symbolic value", e.pos);
        } else if (!integer_valued(lt) || !integer_valued(rt)) {
          fail(std::string("ordering '") + std::string(to_string(e.cmp)) + "' needs integer operands, got " +
                   describe(lt) + " and " + describe(rt),
               e.pos);
        }
        out->args = {l, r};
        out->type = TermType::boolean_type();
        return out;
      }
      case ExprKind::member: {
        SymbolId id = relation_symbol(e.name, e.pos);
        Expr as_apply = e;
        as_apply.kind = ExprKind::apply;
        out->args = arguments(as_apply, id);
        out->symbol = id;
        out->type = TermType::boolean_type();
        return out;
      }
      case ExprKind::apply: {
        auto found = vocab_.find(e.name);
        if (!found) fail("unknown symbol '" + e.name + "'", e.pos);
        out->symbol = *found;
        out->args = arguments(e, *found);
        const SymbolDecl& decl = vocab_[*found];
        out->type = decl.is_relation() ? TermType::boolean_type() : TermType::of_sort(vocab_.ret_sort(*found));
        return out;
      }
      case ExprKind::arith: {
        ExprPtr l = term(*e.args[0]);
        ExprPtr r = term(*e.args[1]);
        if (!integer_valued(l->type) || !integer_valued(r->type))
          fail(std::string("arithmetic '") + std::string(to_string(e.arith)) + "' needs integer operands, got " +
                   describe(l->type) + " and " + describe(r->type),
               e.pos);
        out->args = {l, r};
        out->type = {TermType::integer, kNoSymbol};
        return out;
      }
      case ExprKind::var: {
        if (const Scoped* s = lookup(e.name)) {
          out->slot = s->slot;
          out->type = TermType::of_sort(s->sort);
          return out;
        }
        auto found = vocab_.find(e.name);
        if (found) {
          const SymbolDecl& decl = vocab_[*found];
          if (decl.kind == SymbolKind::constant) {
            out->kind = ExprKind::apply;
            out->symbol = *found;
            out->type = TermType::of_sort(vocab_.ret_sort(*found));
            return out;
          }
          if (decl.kind == SymbolKind::predicate && decl.arg_sorts.empty()) {
            out->kind = ExprKind::apply;
            out->symbol = *found;
            out->type = TermType::boolean_type();
            return out;
          }
          fail(std::string(to_string(decl.kind)) + " '" + e.name + "' cannot be used as a value", e.pos);
        }
        fail("unbound variable '" + e.name + "'", e.pos);
      }
      case ExprKind::literal:
        out->type = {e.literal.is_int() ? TermType::integer : TermType::symbol, kNoSymbol};
        return out;
    }
    fail("malformed expression", e.pos);
  }

  SymbolId relation_symbol(const std::string& name, SourcePos pos) const {
    auto found = vocab_.find(name);
    if (!found) fail("unknown symbol '" + name + "'", pos);
    if (!vocab_[*found].is_relation())
      fail("'" + name + "' is a " + std::string(to_string(vocab_[*found].kind)) + ", not a type or predicate", pos);
    return *found;
  }

  void generator(Generator& g) {
    SymbolId id = relation_symbol(g.domain, g.pos);
    const SymbolDecl& decl = vocab_[id];
    g.domain_id = id;
    if (g.pattern.size() != decl.arity())
      fail("arity mismatch: pattern binds " + std::to_string(g.pattern.size()) + " variable(s) but '" + decl.name +
               "' has arity " + std::to_string(decl.arity()),
           g.pos);
    g.slots.clear();
    for (std::size_t i = 0; i < g.pattern.size(); ++i) {
      SymbolId sort = decl.kind == SymbolKind::type ? id : vocab_.arg_sorts(id)[i];
      g.slots.push_back(bind(g.pattern[i], sort, g.pos));
    }
    for (auto& f : g.filters) f = formula(*f);
  }

  const Vocabulary& vocab_;
  const Structure* structure_;
  std::vector<Scoped> scope_;
  int next_slot_ = 0;
};

}  // namespace

TypedFormula infer_types(const Expr& e, const Vocabulary& vocab, const Structure* structure,
                         std::span<const Binding> outer) {
  TypedFormula out = TypeChecker(vocab, structure).run(e, outer);
  out.source = to_string(e);
  return out;
}

TypedFormula compile_sentence(std::string_view text, const Vocabulary& vocab, const Structure* structure) {
  ExprPtr e = parse_expr(text);
  TypedFormula out = infer_types(*e, vocab, structure);
  out.source = std::string(text);
  return out;
}

}  // namespace lazykb
