#include "lazykb/vocabulary.hpp"

#include <cctype>

#include "lazykb/error.hpp"

namespace lazykb {

std::string_view to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::type: return "type";
    case SymbolKind::predicate: return "predicate";
    case SymbolKind::function: return "function";
    case SymbolKind::constant: return "constant";
  }
  return "?";
}

std::string SymbolDecl::signature() const {
  if (kind == SymbolKind::type) return "type " + name;
  if (kind == SymbolKind::constant) return name + " : " + ret_sort;
  std::string out = name + "(";
  for (std::size_t i = 0; i < arg_sorts.size(); ++i) {
    if (i) out += ',';
    out += arg_sorts[i];
  }
  out += ')';
  if (kind == SymbolKind::function) out += ": " + ret_sort;
  return out;
}

namespace {

class TypedNameParser {
 public:
  explicit TypedNameParser(std::string_view text) : text_(text) {}

  SymbolDecl parse() {
    SymbolDecl decl;
    decl.name = identifier("symbol name");
    skip_space();
    if (peek() == '(') {
      ++pos_;
      skip_space();
      if (peek() != ')') {
        for (;;) {
          decl.arg_sorts.push_back(identifier("sort name"));
          skip_space();
          if (peek() == ',') {
            ++pos_;
            continue;
          }
          break;
        }
      }
      expect(')');
      skip_space();
      if (peek() == ':') {
        ++pos_;
        decl.kind = SymbolKind::function;
        decl.ret_sort = identifier("return sort");
      } else {
        decl.kind = SymbolKind::predicate;
      }
    } else if (peek() == ':') {
      ++pos_;
      decl.kind = SymbolKind::constant;
      decl.ret_sort = identifier("sort name");
    } else {
      fail(at_end() ? "unknown typed-name shape: expected '(' or ':' after name"
                    : "unexpected character");
    }
    skip_space();
    if (!at_end()) fail("trailing characters after typed name");
    return decl;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void skip_space() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    SourcePos p;
    p.offset = pos_;
    p.column = pos_ + 1;
    throw ParseError(what + " in typed name '" + std::string(text_) + "'", p);
  }

  void expect(char c) {
    skip_space();
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  std::string identifier(const char* what) {
    skip_space();
    std::size_t start = pos_;
    if (at_end() || !(std::isalpha(static_cast<unsigned char>(peek())) || peek() == '_'))
      fail(std::string("expected ") + what);
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_')) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

SymbolDecl parse_typed_name(std::string_view text) { return TypedNameParser(text).parse(); }

SymbolId Vocabulary::add(SymbolDecl decl) {
  if (by_name_.count(decl.name)) throw DomainError("duplicate symbol '" + decl.name + "'");
  auto resolve = [&](const std::string& sort) {
    auto it = by_name_.find(sort);
    if (it == by_name_.end() || decls_[it->second].kind != SymbolKind::type)
      throw TypeError("unknown sort '" + sort + "' in declaration of '" + decl.name + "'");
    return it->second;
  };
  std::vector<SymbolId> args;
  SymbolId ret = kNoSymbol;
  switch (decl.kind) {
    case SymbolKind::type:
      decl.arg_sorts.clear();
      decl.ret_sort.clear();
      break;
    case SymbolKind::constant:
      if (!decl.arg_sorts.empty()) throw TypeError("constant '" + decl.name + "' takes no arguments");
      [[fallthrough]];
    case SymbolKind::function:
      ret = resolve(decl.ret_sort);
      [[fallthrough]];
    case SymbolKind::predicate:
      for (const auto& s : decl.arg_sorts) args.push_back(resolve(s));
      break;
  }
  if (decl.kind == SymbolKind::function && decl.arg_sorts.empty()) decl.kind = SymbolKind::constant;
  auto id = static_cast<SymbolId>(decls_.size());
  by_name_.emplace(decl.name, id);
  decls_.push_back(std::move(decl));
  arg_ids_.push_back(std::move(args));
  ret_ids_.push_back(ret);
  return id;
}

std::optional<SymbolId> Vocabulary::find(std::string_view name) const {
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

SymbolId Vocabulary::require(std::string_view name) const {
  if (auto id = find(name)) return *id;
  throw TypeError("unknown symbol '" + std::string(name) + "'");
}

}  // namespace lazykb
