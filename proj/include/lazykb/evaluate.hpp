#pragma once

#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "lazykb/expr.hpp"
#include "lazykb/structure.hpp"
#include "lazykb/typecheck.hpp"

namespace lazykb {

// Read access to an interpretation of the symbols a formula mentions.
class Interpretation {
 public:
  virtual ~Interpretation() = default;

  virtual const TypeExtension& sort(SymbolId type) const = 0;
  // Membership in a type or predicate. Values outside the sorts do not hold.
  virtual bool holds(SymbolId relation, std::span<const Value> args) const = 0;
  // Throws DomainError for arguments outside the function's domain.
  virtual const Value& apply(SymbolId function, std::span<const Value> args) const = 0;
  // Visits the tuples of a type (as 1-tuples) or predicate until fn returns false.
  virtual void for_each(SymbolId relation, const std::function<bool(std::span<const Value>)>& fn) const = 0;
};

// Interpretation backed by a structure; reading an ABSENT symbol throws.
class StructureInterpretation : public Interpretation {
 public:
  StructureInterpretation(const Vocabulary& vocab, const Structure& structure)
      : vocab_(vocab), structure_(structure) {}

  const TypeExtension& sort(SymbolId type) const override;
  bool holds(SymbolId relation, std::span<const Value> args) const override;
  const Value& apply(SymbolId function, std::span<const Value> args) const override;
  void for_each(SymbolId relation, const std::function<bool(std::span<const Value>)>& fn) const override;

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  const Structure& structure() const noexcept { return structure_; }

 private:
  const Vocabulary& vocab_;
  const Structure& structure_;
};

using Env = std::vector<Value>;

// Standard two-valued semantics. `all` over an empty domain is true, `any`
// false. Integer `/` rounds toward negative infinity and `%` is the
// matching remainder, so (a / b) * b + a % b == a.
bool evaluate_formula(const Expr& e, const Interpretation& interp, Env& env);
Value evaluate_term(const Expr& e, const Interpretation& interp, Env& env);
std::variant<bool, Value> evaluate(const Expr& e, const Interpretation& interp, Env& env);

// Evaluates a closed sentence.
bool holds(const TypedFormula& f, const Interpretation& interp);

std::int64_t floor_div(std::int64_t a, std::int64_t b);
std::int64_t floor_mod(std::int64_t a, std::int64_t b);

Value apply_arith(ArithOp op, const Value& a, const Value& b);
bool apply_compare(CmpOp op, const Value& a, const Value& b);

}  // namespace lazykb
