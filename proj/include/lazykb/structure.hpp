#pragma once

#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "lazykb/value.hpp"
#include "lazykb/vocabulary.hpp"

namespace lazykb {

// Ordered, duplicate-free list of values of one type.
class TypeExtension {
 public:
  TypeExtension() = default;
  explicit TypeExtension(std::vector<Value> values);

  bool add(Value v);  // false when already present
  bool remove(const Value& v);
  bool contains(const Value& v) const { return index_.count(v) != 0; }
  std::optional<std::size_t> index_of(const Value& v) const;

  const std::vector<Value>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }
  bool all_integers() const noexcept;

  friend bool operator==(const TypeExtension& a, const TypeExtension& b) { return a.values_ == b.values_; }

 private:
  std::vector<Value> values_;
  std::unordered_map<Value, std::size_t> index_;
};

using Relation = std::set<Tuple, TupleLess>;
using FunctionTable = std::map<Tuple, Value, TupleLess>;

// Raw host data accepted when interpreting a symbol.
//   Value                          constant
//   vector<Value>                  type, or unary predicate given as bare values
//   vector<Tuple>                  predicate
//   vector<pair<Tuple, Value>>     function
//   vector<pair<Value, Value>>     unary function given as a plain mapping
using RawData = std::variant<Value, std::vector<Value>, std::vector<Tuple>,
                             std::vector<std::pair<Tuple, Value>>, std::vector<std::pair<Value, Value>>>;

// Installed interpretation of a single symbol.
using Extension = std::variant<TypeExtension, Relation, FunctionTable>;

// Partial interpretation indexed by symbol id. A missing entry is ABSENT.
class Structure {
 public:
  Structure() = default;
  explicit Structure(std::size_t symbol_count) : ext_(symbol_count) {}

  void resize(std::size_t symbol_count) { ext_.resize(symbol_count); }
  std::size_t symbol_count() const noexcept { return ext_.size(); }

  bool interprets(SymbolId id) const { return id < ext_.size() && ext_[id].has_value(); }
  const TypeExtension* type(SymbolId id) const { return get<TypeExtension>(id); }
  const Relation* relation(SymbolId id) const { return get<Relation>(id); }
  const FunctionTable* function(SymbolId id) const { return get<FunctionTable>(id); }
  const std::optional<Extension>& extension(SymbolId id) const { return ext_.at(id); }

  TypeExtension* mutable_type(SymbolId id) { return get_mut<TypeExtension>(id); }
  Relation* mutable_relation(SymbolId id) { return get_mut<Relation>(id); }
  FunctionTable* mutable_function(SymbolId id) { return get_mut<FunctionTable>(id); }

  void set(SymbolId id, Extension ext) { ext_.at(id) = std::move(ext); }
  void clear(SymbolId id) { ext_.at(id).reset(); }

  friend bool operator==(const Structure&, const Structure&) = default;

 private:
  template <class T>
  const T* get(SymbolId id) const {
    if (id >= ext_.size() || !ext_[id]) return nullptr;
    return std::get_if<T>(&*ext_[id]);
  }
  template <class T>
  T* get_mut(SymbolId id) {
    if (id >= ext_.size() || !ext_[id]) return nullptr;
    return std::get_if<T>(&*ext_[id]);
  }

  std::vector<std::optional<Extension>> ext_;
};

// Converts raw data into the canonical extension of `id`, checking arity,
// sort membership and (for functions) totality against the type extensions
// present in `structure`. Unary predicate data given as bare values is
// wrapped into 1-tuples. Throws DomainError / TypeError.
Extension normalize_interpretation(const Vocabulary& vocab, const Structure& structure, SymbolId id,
                                   const RawData& raw);

// The raw form that normalizes back to `ext`.
RawData to_raw(const Extension& ext, const SymbolDecl& decl);

// Checks an installed extension against the current type extensions.
void validate_extension(const Vocabulary& vocab, const Structure& structure, SymbolId id,
                        const Extension& ext);

// Number of argument tuples over the sorts of `id` (Cartesian product size).
std::size_t domain_size(const Vocabulary& vocab, const Structure& structure, SymbolId id);

// Calls fn(tuple) for every tuple of the argument-sort product of `id`, in
// lexicographic order of sort positions.
template <class Fn>
void for_each_argument_tuple(const Vocabulary& vocab, const Structure& structure, SymbolId id, Fn&& fn);

}  // namespace lazykb

#include "lazykb/structure_inl.hpp"
