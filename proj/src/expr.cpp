#include "lazykb/expr.hpp"

#include <cctype>
#include <unordered_map>
#include <unordered_set>

namespace lazykb {

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::identifier: return "identifier";
    case TokenKind::integer: return "integer";
    case TokenKind::string: return "string";
    case TokenKind::kw_and: return "and";
    case TokenKind::kw_or: return "or";
    case TokenKind::kw_not: return "not";
    case TokenKind::kw_all: return "all";
    case TokenKind::kw_any: return "any";
    case TokenKind::kw_for: return "for";
    case TokenKind::kw_in: return "in";
    case TokenKind::kw_if: return "if";
    case TokenKind::kw_lambda: return "lambda";
    case TokenKind::eq: return "==";
    case TokenKind::ne: return "!=";
    case TokenKind::lt: return "<";
    case TokenKind::le: return "<=";
    case TokenKind::gt: return ">";
    case TokenKind::ge: return ">=";
    case TokenKind::plus: return "+";
    case TokenKind::minus: return "-";
    case TokenKind::star: return "*";
    case TokenKind::slash: return "/";
    case TokenKind::percent: return "%";
    case TokenKind::lparen: return "(";
    case TokenKind::rparen: return ")";
    case TokenKind::comma: return ",";
    case TokenKind::colon: return ":";
  }
  return "?";
}

std::string_view to_string(CmpOp op) {
  switch (op) {
    case CmpOp::eq: return "==";
    case CmpOp::ne: return "!=";
    case CmpOp::lt: return "<";
    case CmpOp::le: return "<=";
    case CmpOp::gt: return ">";
    case CmpOp::ge: return ">=";
  }
  return "?";
}

std::string_view to_string(ArithOp op) {
  switch (op) {
    case ArithOp::add: return "+";
    case ArithOp::sub: return "-";
    case ArithOp::mul: return "*";
    case ArithOp::div: return "/";
    case ArithOp::mod: return "%";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Lexer

std::vector<Token> tokenize(std::string_view text) {
  static const std::unordered_map<std::string_view, TokenKind> keywords = {
      {"and", TokenKind::kw_and}, {"or", TokenKind::kw_or},   {"not", TokenKind::kw_not},
      {"all", TokenKind::kw_all}, {"any", TokenKind::kw_any}, {"for", TokenKind::kw_for},
      {"in", TokenKind::kw_in},   {"if", TokenKind::kw_if},   {"lambda", TokenKind::kw_lambda},
  };

  std::vector<Token> out;
  SourcePos pos;
  std::size_t i = 0;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
      pos.offset = i + 1;
    }
  };
  auto push = [&](TokenKind kind, SourcePos at, std::string s = {}, std::int64_t n = 0) {
    out.push_back(Token{kind, std::move(s), n, at});
  };

  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance();
      continue;
    }
    SourcePos start = pos;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      std::string_view word = text.substr(i, j - i);
      auto kw = keywords.find(word);
      if (kw != keywords.end()) {
        push(kw->second, start, std::string(word));
      } else {
        push(TokenKind::identifier, start, std::string(word));
      }
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      std::int64_t n = 0;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) {
        n = n * 10 + (text[j] - '0');
        ++j;
      }
      if (j < text.size() && (std::isalpha(static_cast<unsigned char>(text[j])) || text[j] == '_'))
        throw ParseError("malformed number", start);
      push(TokenKind::integer, start, std::string(text.substr(i, j - i)), n);
      advance(j - i);
      continue;
    }
    if (c == '"' || c == '\'') {
      std::string s;
      advance();
      for (;;) {
        if (i >= text.size() || text[i] == '\n') throw ParseError("unterminated string literal", start);
        char d = text[i];
        if (d == c) {
          advance();
          break;
        }
        if (d == '\\') {
          advance();
          if (i >= text.size()) throw ParseError("unterminated string literal", start);
          d = text[i];
        }
        s += d;
        advance();
      }
      push(TokenKind::string, start, std::move(s));
      continue;
    }
    char next = i + 1 < text.size() ? text[i + 1] : '\0';
    auto two = [&](TokenKind kind) {
      push(kind, start);
      advance(2);
    };
    auto one = [&](TokenKind kind) {
      push(kind, start);
      advance();
    };
    switch (c) {
      case '=':
        if (next == '=') {
          two(TokenKind::eq);
          continue;
        }
        throw ParseError("'=' is not an operator; use '==' for equality", start);
      case '!':
        if (next == '=') {
          two(TokenKind::ne);
          continue;
        }
        throw ParseError("illegal character '!'; use 'not' for negation", start);
      case '<':
        if (next == '=') two(TokenKind::le);
        else one(TokenKind::lt);
        continue;
      case '>':
        if (next == '=') two(TokenKind::ge);
        else one(TokenKind::gt);
        continue;
      case '+': one(TokenKind::plus); continue;
      case '-': one(TokenKind::minus); continue;
      case '*': one(TokenKind::star); continue;
      case '/': one(TokenKind::slash); continue;
      case '%': one(TokenKind::percent); continue;
      case '(': one(TokenKind::lparen); continue;
      case ')': one(TokenKind::rparen); continue;
      case ',': one(TokenKind::comma); continue;
      case ':': one(TokenKind::colon); continue;
      default: break;
    }
    throw ParseError(std::string("illegal character '") + c + "'", start);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Node constructors

namespace {

std::shared_ptr<Expr> node(ExprKind kind, SourcePos pos) {
  auto e = std::make_shared<Expr>();
  e->kind = kind;
  e->pos = pos;
  return e;
}

}  // namespace

ExprPtr make_bool(ExprKind kind, ExprPtr left, ExprPtr right, SourcePos pos) {
  auto e = node(kind, pos);
  e->args = {std::move(left), std::move(right)};
  return e;
}

ExprPtr make_not(ExprPtr inner, SourcePos pos) {
  auto e = node(ExprKind::not_, pos);
  e->args = {std::move(inner)};
  return e;
}

ExprPtr make_quant(ExprKind kind, ExprPtr body, std::vector<Generator> gens, SourcePos pos) {
  auto e = node(kind, pos);
  e->args = {std::move(body)};
  e->generators = std::move(gens);
  return e;
}

ExprPtr make_compare(CmpOp op, ExprPtr left, ExprPtr right, SourcePos pos) {
  auto e = node(ExprKind::compare, pos);
  e->cmp = op;
  e->args = {std::move(left), std::move(right)};
  return e;
}

ExprPtr make_member(std::vector<ExprPtr> elements, std::string relation, SourcePos pos) {
  auto e = node(ExprKind::member, pos);
  e->name = std::move(relation);
  e->args = std::move(elements);
  return e;
}

ExprPtr make_apply(std::string symbol, std::vector<ExprPtr> args, SourcePos pos) {
  auto e = node(ExprKind::apply, pos);
  e->name = std::move(symbol);
  e->args = std::move(args);
  return e;
}

ExprPtr make_arith(ArithOp op, ExprPtr left, ExprPtr right, SourcePos pos) {
  auto e = node(ExprKind::arith, pos);
  e->arith = op;
  e->args = {std::move(left), std::move(right)};
  return e;
}

ExprPtr make_var(std::string name, SourcePos pos) {
  auto e = node(ExprKind::var, pos);
  e->name = std::move(name);
  return e;
}

ExprPtr make_literal(Value v, SourcePos pos) {
  auto e = node(ExprKind::literal, pos);
  e->literal = std::move(v);
  return e;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : toks_(tokens) {}

  ExprPtr parse_whole() {
    ExprPtr e = or_expr();
    no_tuple(e);
    if (!at_end()) fail("unexpected '" + describe(peek()) + "'");
    return e;
  }

  LambdaRule parse_lambda() {
    expect(TokenKind::kw_lambda, "'lambda'");
    LambdaRule rule;
    std::unordered_set<std::string> seen;
    for (;;) {
      const Token& t = expect(TokenKind::identifier, "parameter name");
      if (!seen.insert(t.text).second) throw ParseError("duplicate lambda parameter '" + t.text + "'", t.pos);
      rule.params.push_back(t.text);
      if (!accept(TokenKind::comma)) break;
    }
    expect(TokenKind::colon, "':'");
    rule.body = parse_whole();
    return rule;
  }

 private:
  bool at_end() const { return idx_ >= toks_.size(); }
  const Token& peek() const { return toks_[idx_]; }
  bool check(TokenKind k) const { return !at_end() && peek().kind == k; }
  bool accept(TokenKind k) {
    if (!check(k)) return false;
    ++idx_;
    return true;
  }

  SourcePos here() const {
    if (!at_end()) return peek().pos;
    if (toks_.empty()) return {};
    SourcePos p = toks_.back().pos;
    p.column += std::max<std::size_t>(1, toks_.back().text.size());
    return p;
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::identifier: return t.text;
      case TokenKind::integer: return t.text;
      case TokenKind::string: return "\"" + t.text + "\"";
      default: return std::string(to_string(t.kind));
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, here()); }

  const Token& expect(TokenKind k, const char* what) {
    if (!check(k)) {
      if (at_end()) fail(std::string("expected ") + what + " but reached end of input");
      fail(std::string("expected ") + what + " but found '" + describe(peek()) + "'");
    }
    return toks_[idx_++];
  }

  // A parenthesized tuple is represented by a member node without relation
  // name until the following `in` attaches one.
  static bool is_tuple(const ExprPtr& e) { return e->kind == ExprKind::member && e->name.empty(); }
  void no_tuple(const ExprPtr& e) const {
    if (is_tuple(e)) throw ParseError("a tuple is only allowed on the left of 'in'", e->pos);
  }

  ExprPtr or_expr() {
    ExprPtr left = and_expr();
    while (check(TokenKind::kw_or)) {
      SourcePos p = peek().pos;
      ++idx_;
      no_tuple(left);
      ExprPtr right = and_expr();
      no_tuple(right);
      left = make_bool(ExprKind::or_, left, right, p);
    }
    return left;
  }

  ExprPtr and_expr() {
    ExprPtr left = not_expr();
    while (check(TokenKind::kw_and)) {
      SourcePos p = peek().pos;
      ++idx_;
      no_tuple(left);
      ExprPtr right = not_expr();
      no_tuple(right);
      left = make_bool(ExprKind::and_, left, right, p);
    }
    return left;
  }

  ExprPtr not_expr() {
    if (check(TokenKind::kw_not)) {
      SourcePos p = peek().pos;
      ++idx_;
      ExprPtr inner = not_expr();
      no_tuple(inner);
      return make_not(inner, p);
    }
    return cmp_expr();
  }

  static bool cmp_op(TokenKind k, CmpOp& op) {
    switch (k) {
      case TokenKind::eq: op = CmpOp::eq; return true;
      case TokenKind::ne: op = CmpOp::ne; return true;
      case TokenKind::lt: op = CmpOp::lt; return true;
      case TokenKind::le: op = CmpOp::le; return true;
      case TokenKind::gt: op = CmpOp::gt; return true;
      case TokenKind::ge: op = CmpOp::ge; return true;
      default: return false;
    }
  }

  void no_chain() const {
    CmpOp op;
    if (!at_end() && (cmp_op(peek().kind, op) || peek().kind == TokenKind::kw_in))
      fail("chained comparisons are not supported; combine comparisons with 'and'");
  }

  ExprPtr cmp_expr() {
    ExprPtr left = additive();
    CmpOp op;
    if (!at_end() && cmp_op(peek().kind, op)) {
      SourcePos p = peek().pos;
      ++idx_;
      no_tuple(left);
      ExprPtr right = additive();
      no_tuple(right);
      no_chain();
      return make_compare(op, left, right, p);
    }
    if (check(TokenKind::kw_in)) {
      SourcePos p = peek().pos;
      ++idx_;
      const Token& rel = expect(TokenKind::identifier, "relation name after 'in'");
      std::vector<ExprPtr> elems = is_tuple(left) ? left->args : std::vector<ExprPtr>{left};
      no_chain();
      return make_member(std::move(elems), rel.text, p);
    }
    return left;
  }

  ExprPtr additive() {
    ExprPtr left = multiplicative();
    for (;;) {
      ArithOp op;
      if (check(TokenKind::plus)) op = ArithOp::add;
      else if (check(TokenKind::minus)) op = ArithOp::sub;
      else return left;
      SourcePos p = peek().pos;
      ++idx_;
      no_tuple(left);
      ExprPtr right = multiplicative();
      no_tuple(right);
      left = make_arith(op, left, right, p);
    }
  }

  ExprPtr multiplicative() {
    ExprPtr left = unary();
    for (;;) {
      ArithOp op;
      if (check(TokenKind::star)) op = ArithOp::mul;
      else if (check(TokenKind::slash)) op = ArithOp::div;
      else if (check(TokenKind::percent)) op = ArithOp::mod;
      else return left;
      SourcePos p = peek().pos;
      ++idx_;
      no_tuple(left);
      ExprPtr right = unary();
      no_tuple(right);
      left = make_arith(op, left, right, p);
    }
  }

  ExprPtr unary() {
    if (check(TokenKind::minus)) {
      SourcePos p = peek().pos;
      ++idx_;
      if (check(TokenKind::integer)) {
        const Token& t = toks_[idx_++];
        return make_literal(Value(-t.number), p);
      }
      ExprPtr inner = unary();
      no_tuple(inner);
      return make_arith(ArithOp::sub, make_literal(Value(0), p), inner, p);
    }
    return primary();
  }

  ExprPtr primary() {
    if (at_end()) fail("expected an expression but reached end of input");
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::integer:
        ++idx_;
        return make_literal(Value(t.number), t.pos);
      case TokenKind::string:
        ++idx_;
        return make_literal(Value(t.text), t.pos);
      case TokenKind::kw_all:
      case TokenKind::kw_any:
        return quantifier();
      case TokenKind::identifier: {
        ++idx_;
        if (accept(TokenKind::lparen)) {
          std::vector<ExprPtr> args;
          if (!check(TokenKind::rparen)) {
            for (;;) {
              ExprPtr a = or_expr();
              no_tuple(a);
              args.push_back(a);
              if (!accept(TokenKind::comma)) break;
            }
          }
          expect(TokenKind::rparen, "')'");
          return make_apply(t.text, std::move(args), t.pos);
        }
        return make_var(t.text, t.pos);
      }
      case TokenKind::lparen: {
        SourcePos p = t.pos;
        ++idx_;
        ExprPtr first = or_expr();
        no_tuple(first);
        if (check(TokenKind::comma)) {
          std::vector<ExprPtr> elems{first};
          while (accept(TokenKind::comma)) {
            ExprPtr e = or_expr();
            no_tuple(e);
            elems.push_back(e);
          }
          expect(TokenKind::rparen, "')'");
          return make_member(std::move(elems), std::string(), p);
        }
        expect(TokenKind::rparen, "')'");
        return first;
      }
      default:
        fail("unexpected '" + describe(t) + "'");
    }
  }

  ExprPtr quantifier() {
    const Token& kw = toks_[idx_++];
    ExprKind kind = kw.kind == TokenKind::kw_all ? ExprKind::all : ExprKind::any;
    if (!check(TokenKind::lparen))
      fail(std::string("'") + kw.text + "' must be applied to a comprehension: " + kw.text + "(... for x in D)");
    ++idx_;
    ExprPtr body = or_expr();
    no_tuple(body);
    if (!check(TokenKind::kw_for))
      fail(std::string("'") + kw.text + "' must be applied to a comprehension with a 'for' clause");
    std::vector<Generator> gens;
    while (check(TokenKind::kw_for)) gens.push_back(generator());
    expect(TokenKind::rparen, "')' closing the comprehension");
    return make_quant(kind, body, std::move(gens), kw.pos);
  }

  Generator generator() {
    Generator g;
    g.pos = peek().pos;
    expect(TokenKind::kw_for, "'for'");
    if (accept(TokenKind::lparen)) {
      g.tuple_pattern = true;
      for (;;) {
        g.pattern.push_back(expect(TokenKind::identifier, "variable name").text);
        if (!accept(TokenKind::comma)) break;
      }
      expect(TokenKind::rparen, "')'");
      std::unordered_set<std::string> seen;
      for (const auto& v : g.pattern)
        if (!seen.insert(v).second) throw ParseError("variable '" + v + "' repeated in pattern", g.pos);
    } else {
      g.pattern.push_back(expect(TokenKind::identifier, "variable name").text);
    }
    expect(TokenKind::kw_in, "'in'");
    g.domain = expect(TokenKind::identifier, "type or relation name").text;
    while (accept(TokenKind::kw_if)) {
      ExprPtr f = or_expr();
      no_tuple(f);
      g.filters.push_back(f);
    }
    return g;
  }

  const std::vector<Token>& toks_;
  std::size_t idx_ = 0;
};

}  // namespace

ExprPtr parse_expr(const std::vector<Token>& tokens) { return Parser(tokens).parse_whole(); }

ExprPtr parse_expr(std::string_view text) {
  auto tokens = tokenize(text);
  return parse_expr(tokens);
}

LambdaRule parse_lambda(std::string_view text) {
  auto tokens = tokenize(text);
  return Parser(tokens).parse_lambda();
}

// ---------------------------------------------------------------------------
// Printing

namespace {

void print(const Expr& e, std::string& out);

void print_generator(const Generator& g, std::string& out) {
  out += " for ";
  if (g.tuple_pattern) out += '(';
  for (std::size_t i = 0; i < g.pattern.size(); ++i) {
    if (i) out += ", ";
    out += g.pattern[i];
  }
  if (g.tuple_pattern) out += ')';
  out += " in ";
  out += g.domain;
  for (const auto& f : g.filters) {
    out += " if ";
    print(*f, out);
  }
}

void print(const Expr& e, std::string& out) {
  switch (e.kind) {
    case ExprKind::and_:
    case ExprKind::or_:
      out += '(';
      print(*e.args[0], out);
      out += e.kind == ExprKind::and_ ? " and " : " or ";
      print(*e.args[1], out);
      out += ')';
      return;
    case ExprKind::not_:
      out += "not ";
      print(*e.args[0], out);
      return;
    case ExprKind::all:
    case ExprKind::any:
      out += e.kind == ExprKind::all ? "all(" : "any(";
      print(*e.args[0], out);
      for (const auto& g : e.generators) print_generator(g, out);
      out += ')';
      return;
    case ExprKind::compare:
      out += '(';
      print(*e.args[0], out);
      out += ' ';
      out += to_string(e.cmp);
      out += ' ';
      print(*e.args[1], out);
      out += ')';
      return;
    case ExprKind::member:
      out += '(';
      if (e.args.size() == 1) {
        print(*e.args[0], out);
      } else {
        out += '(';
        for (std::size_t i = 0; i < e.args.size(); ++i) {
          if (i) out += ", ";
          print(*e.args[i], out);
        }
        out += ')';
      }
      out += " in ";
      out += e.name;
      out += ')';
      return;
    case ExprKind::apply:
      out += e.name;
      out += '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) out += ", ";
        print(*e.args[i], out);
      }
      out += ')';
      return;
    case ExprKind::arith:
      out += '(';
      print(*e.args[0], out);
      out += ' ';
      out += to_string(e.arith);
      out += ' ';
      print(*e.args[1], out);
      out += ')';
      return;
    case ExprKind::var:
      out += e.name;
      return;
    case ExprKind::literal:
      out += e.literal.to_string(true);
      return;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, out);
  return out;
}

std::string to_string(const LambdaRule& rule) {
  std::string out = "lambda ";
  for (std::size_t i = 0; i < rule.params.size(); ++i) {
    if (i) out += ", ";
    out += rule.params[i];
  }
  out += ": ";
  print(*rule.body, out);
  return out;
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size() || a.generators.size() != b.generators.size())
    return false;
  switch (a.kind) {
    case ExprKind::compare:
      if (a.cmp != b.cmp) return false;
      break;
    case ExprKind::arith:
      if (a.arith != b.arith) return false;
      break;
    case ExprKind::member:
    case ExprKind::apply:
    case ExprKind::var:
      if (a.name != b.name) return false;
      break;
    case ExprKind::literal:
      if (a.literal != b.literal) return false;
      break;
    default:
      break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!structurally_equal(*a.args[i], *b.args[i])) return false;
  for (std::size_t i = 0; i < a.generators.size(); ++i) {
    const Generator& ga = a.generators[i];
    const Generator& gb = b.generators[i];
    if (ga.pattern != gb.pattern || ga.tuple_pattern != gb.tuple_pattern || ga.domain != gb.domain ||
        ga.filters.size() != gb.filters.size())
      return false;
    for (std::size_t k = 0; k < ga.filters.size(); ++k)
      if (!structurally_equal(*ga.filters[k], *gb.filters[k])) return false;
  }
  return true;
}

}  // namespace lazykb
