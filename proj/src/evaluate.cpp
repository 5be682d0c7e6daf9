#include "lazykb/evaluate.hpp"

#include "lazykb/error.hpp"

namespace lazykb {

const TypeExtension& StructureInterpretation::sort(SymbolId type) const {
  const TypeExtension* ext = structure_.type(type);
  if (!ext) throw DomainError("type '" + vocab_[type].name + "' has no extension");
  return *ext;
}

bool StructureInterpretation::holds(SymbolId relation, std::span<const Value> args) const {
  if (vocab_[relation].kind == SymbolKind::type) return args.size() == 1 && sort(relation).contains(args[0]);
  const Relation* rel = structure_.relation(relation);
  if (!rel) throw DomainError("predicate '" + vocab_[relation].name + "' has no interpretation");
  return rel->find(args) != rel->end();
}

const Value& StructureInterpretation::apply(SymbolId function, std::span<const Value> args) const {
  const FunctionTable* table = structure_.function(function);
  if (!table) throw DomainError("function '" + vocab_[function].name + "' has no interpretation");
  auto it = table->find(args);
  if (it == table->end())
    throw DomainError("argument " + to_string(args, true) + " is outside the domain of '" + vocab_[function].name +
                      "'");
  return it->second;
}

void StructureInterpretation::for_each(SymbolId relation,
                                       const std::function<bool(std::span<const Value>)>& fn) const {
  if (vocab_[relation].kind == SymbolKind::type) {
    for (const auto& v : sort(relation).values())
      if (!fn(std::span<const Value>(&v, 1))) return;
    return;
  }
  const Relation* rel = structure_.relation(relation);
  if (!rel) throw DomainError("predicate '" + vocab_[relation].name + "' has no interpretation");
  for (const auto& t : *rel)
    if (!fn(t)) return;
}

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  if (b == 0) throw DomainError("integer division by zero");
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t floor_mod(std::int64_t a, std::int64_t b) { return a - floor_div(a, b) * b; }

Value apply_arith(ArithOp op, const Value& a, const Value& b) {
  if (!a.is_int() || !b.is_int())
    throw TypeError("arithmetic on non-integer values " + a.to_string(true) + " and " + b.to_string(true));
  std::int64_t x = a.as_int(), y = b.as_int();
  switch (op) {
    case ArithOp::add: return x + y;
    case ArithOp::sub: return x - y;
    case ArithOp::mul: return x * y;
    case ArithOp::div: return floor_div(x, y);
    case ArithOp::mod: return floor_mod(x, y);
  }
  return 0;
}

bool apply_compare(CmpOp op, const Value& a, const Value& b) {
  switch (op) {
    case CmpOp::eq: return a == b;
    case CmpOp::ne: return a != b;
    default: break;
  }
  if (!a.is_int() || !b.is_int())
    throw TypeError("ordering on non-integer values " + a.to_string(true) + " and " + b.to_string(true));
  switch (op) {
    case CmpOp::lt: return a.as_int() < b.as_int();
    case CmpOp::le: return a.as_int() <= b.as_int();
    case CmpOp::gt: return a.as_int() > b.as_int();
    case CmpOp::ge: return a.as_int() >= b.as_int();
    default: return false;
  }
}

namespace {

// Runs generators [g, end) and then the body; `want` is the value that
// short-circuits the quantifier (false for all, true for any).
bool quantify(const Expr& e, std::size_t g, bool want, const Interpretation& interp, Env& env) {
  if (g == e.generators.size()) return evaluate_formula(*e.args[0], interp, env) == want;
  const Generator& gen = e.generators[g];
  bool found = false;
  interp.for_each(gen.domain_id, [&](std::span<const Value> t) {
    for (std::size_t i = 0; i < gen.slots.size(); ++i) env[static_cast<std::size_t>(gen.slots[i])] = t[i];
    for (const auto& f : gen.filters)
      if (!evaluate_formula(*f, interp, env)) return true;
    if (quantify(e, g + 1, want, interp, env)) {
      found = true;
      return false;
    }
    return true;
  });
  return found;
}

}  // namespace

bool evaluate_formula(const Expr& e, const Interpretation& interp, Env& env) {
  switch (e.kind) {
    case ExprKind::and_:
      return evaluate_formula(*e.args[0], interp, env) && evaluate_formula(*e.args[1], interp, env);
    case ExprKind::or_:
      return evaluate_formula(*e.args[0], interp, env) || evaluate_formula(*e.args[1], interp, env);
    case ExprKind::not_:
      return !evaluate_formula(*e.args[0], interp, env);
    case ExprKind::all:
      return !quantify(e, 0, false, interp, env);
    case ExprKind::any:
      return quantify(e, 0, true, interp, env);
    case ExprKind::compare:
      return apply_compare(e.cmp, evaluate_term(*e.args[0], interp, env), evaluate_term(*e.args[1], interp, env));
    case ExprKind::member:
    case ExprKind::apply: {
      Tuple args;
      args.reserve(e.args.size());
      for (const auto& a : e.args) args.push_back(evaluate_term(*a, interp, env));
      return interp.holds(e.symbol, args);
    }
    default:
      throw TypeError("expression is not a formula: " + to_string(e));
  }
}

Value evaluate_term(const Expr& e, const Interpretation& interp, Env& env) {
  switch (e.kind) {
    case ExprKind::var:
      return env.at(static_cast<std::size_t>(e.slot));
    case ExprKind::literal:
      return e.literal;
    case ExprKind::arith:
      return apply_arith(e.arith, evaluate_term(*e.args[0], interp, env), evaluate_term(*e.args[1], interp, env));
    case ExprKind::apply: {
      Tuple args;
      args.reserve(e.args.size());
      for (const auto& a : e.args) args.push_back(evaluate_term(*a, interp, env));
      return interp.apply(e.symbol, args);
    }
    default:
      throw TypeError("expression is not a term: " + to_string(e));
  }
}

std::variant<bool, Value> evaluate(const Expr& e, const Interpretation& interp, Env& env) {
  if (e.type.kind == TermType::boolean) return evaluate_formula(e, interp, env);
  return evaluate_term(e, interp, env);
}

bool holds(const TypedFormula& f, const Interpretation& interp) {
  Env env(f.slot_count);
  return evaluate_formula(*f.expr, interp, env);
}

}  // namespace lazykb
