#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lazykb {

using SymbolId = std::uint32_t;
inline constexpr SymbolId kNoSymbol = static_cast<SymbolId>(-1);

enum class SymbolKind { type, predicate, function, constant };

std::string_view to_string(SymbolKind kind);

struct SymbolDecl {
  std::string name;
  SymbolKind kind = SymbolKind::predicate;
  std::vector<std::string> arg_sorts;
  std::string ret_sort;  // functions and constants only

  std::size_t arity() const noexcept { return kind == SymbolKind::type ? 1 : arg_sorts.size(); }
  bool is_relation() const noexcept { return kind == SymbolKind::type || kind == SymbolKind::predicate; }
  bool is_function() const noexcept { return kind == SymbolKind::function || kind == SymbolKind::constant; }

  // "Border(Area,Area)", "Coloring(Area): Color", "C : Color", "type Area".
  std::string signature() const;

  friend bool operator==(const SymbolDecl&, const SymbolDecl&) = default;
};

// Parses a typed name of one of the shapes
//   Foo(T1, ..., Tn)        predicate
//   Foo(T1, ..., Tn): R     function
//   Foo : R                 constant
// Whitespace is insignificant. Throws ParseError with a column position.
SymbolDecl parse_typed_name(std::string_view text);

// Declared symbols in declaration order. Sorts are referenced by name in
// the declarations and resolved to ids here.
class Vocabulary {
 public:
  // Throws DomainError on a duplicate name, TypeError on an unknown sort.
  SymbolId add(SymbolDecl decl);

  std::optional<SymbolId> find(std::string_view name) const;
  SymbolId require(std::string_view name) const;  // TypeError when missing

  const SymbolDecl& operator[](SymbolId id) const { return decls_.at(id); }
  const std::vector<SymbolDecl>& decls() const noexcept { return decls_; }
  std::size_t size() const noexcept { return decls_.size(); }

  // Resolved argument / return sort ids.
  const std::vector<SymbolId>& arg_sorts(SymbolId id) const { return arg_ids_.at(id); }
  SymbolId ret_sort(SymbolId id) const { return ret_ids_.at(id); }

 private:
  std::vector<SymbolDecl> decls_;
  std::vector<std::vector<SymbolId>> arg_ids_;
  std::vector<SymbolId> ret_ids_;
  std::unordered_map<std::string, SymbolId> by_name_;
};

}  // namespace lazykb
