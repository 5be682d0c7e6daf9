#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "lazykb/error.hpp"
#include "lazykb/value.hpp"
#include "lazykb/vocabulary.hpp"

namespace lazykb {

// ---------------------------------------------------------------------------
// Tokens

enum class TokenKind {
  identifier,
  integer,
  string,
  kw_and,
  kw_or,
  kw_not,
  kw_all,
  kw_any,
  kw_for,
  kw_in,
  kw_if,
  kw_lambda,
  eq,
  ne,
  lt,
  le,
  gt,
  ge,
  plus,
  minus,
  star,
  slash,
  percent,
  lparen,
  rparen,
  comma,
  colon,
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;       // identifier name or string literal contents
  std::int64_t number = 0;
  SourcePos pos;
};

// Splits constraint text into tokens; whitespace and newlines are skipped.
// Throws ParseError on an illegal character or unterminated string.
std::vector<Token> tokenize(std::string_view text);

// ---------------------------------------------------------------------------
// Syntax tree

enum class ExprKind { and_, or_, not_, all, any, compare, member, apply, arith, var, literal };
enum class CmpOp { eq, ne, lt, le, gt, ge };
enum class ArithOp { add, sub, mul, div, mod };

std::string_view to_string(CmpOp op);
std::string_view to_string(ArithOp op);

// Static type of a (sub)expression after inference.
struct TermType {
  enum Kind { unknown, boolean, sort, integer, symbol } kind = unknown;
  SymbolId sort_id = kNoSymbol;  // for kind == sort

  static TermType boolean_type() { return {boolean, kNoSymbol}; }
  static TermType of_sort(SymbolId s) { return {sort, s}; }
  friend bool operator==(const TermType&, const TermType&) = default;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Generator {
  std::vector<std::string> pattern;  // one name, or a parenthesized tuple
  bool tuple_pattern = false;
  std::string domain;
  std::vector<ExprPtr> filters;  // `if` clauses, conjoined
  SourcePos pos;

  // Set by infer_types.
  SymbolId domain_id = kNoSymbol;
  std::vector<int> slots;
};

struct Expr {
  ExprKind kind = ExprKind::literal;
  CmpOp cmp = CmpOp::eq;
  ArithOp arith = ArithOp::add;
  std::string name;  // variable, applied symbol, or membership relation
  Value literal;
  // and/or/compare/arith: two operands; not: one; all/any: the body;
  // apply: arguments; member: the tuple elements.
  std::vector<ExprPtr> args;
  std::vector<Generator> generators;  // all/any only
  SourcePos pos;

  // Set by infer_types.
  SymbolId symbol = kNoSymbol;
  int slot = -1;
  TermType type;

  bool is_formula() const noexcept {
    return kind == ExprKind::and_ || kind == ExprKind::or_ || kind == ExprKind::not_ || kind == ExprKind::all ||
           kind == ExprKind::any || kind == ExprKind::compare || kind == ExprKind::member;
  }
};

// Node constructors.
ExprPtr make_bool(ExprKind kind, ExprPtr left, ExprPtr right, SourcePos pos = {});
ExprPtr make_not(ExprPtr inner, SourcePos pos = {});
ExprPtr make_quant(ExprKind kind, ExprPtr body, std::vector<Generator> gens, SourcePos pos = {});
ExprPtr make_compare(CmpOp op, ExprPtr left, ExprPtr right, SourcePos pos = {});
ExprPtr make_member(std::vector<ExprPtr> elements, std::string relation, SourcePos pos = {});
ExprPtr make_apply(std::string symbol, std::vector<ExprPtr> args, SourcePos pos = {});
ExprPtr make_arith(ArithOp op, ExprPtr left, ExprPtr right, SourcePos pos = {});
ExprPtr make_var(std::string name, SourcePos pos = {});
ExprPtr make_literal(Value v, SourcePos pos = {});

struct LambdaRule {
  std::vector<std::string> params;
  ExprPtr body;
};

// Parses one expression. Precedence from lowest: or, and, not,
// comparison/membership, additive, multiplicative, application/atoms.
// Comparisons do not chain.
ExprPtr parse_expr(const std::vector<Token>& tokens);
ExprPtr parse_expr(std::string_view text);

// "lambda x, y: body"
LambdaRule parse_lambda(std::string_view text);

// Canonical text that parses back to an identical tree.
std::string to_string(const Expr& e);
std::string to_string(const LambdaRule& rule);

// Structural equality ignoring positions and type annotations.
bool structurally_equal(const Expr& a, const Expr& b);

}  // namespace lazykb
