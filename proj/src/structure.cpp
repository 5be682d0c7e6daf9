#include "lazykb/structure.hpp"

#include <algorithm>

#include "lazykb/error.hpp"

namespace lazykb {

TypeExtension::TypeExtension(std::vector<Value> values) {
  values_.reserve(values.size());
  for (auto& v : values) add(std::move(v));
}

bool TypeExtension::add(Value v) {
  if (index_.count(v)) return false;
  index_.emplace(v, values_.size());
  values_.push_back(std::move(v));
  return true;
}

bool TypeExtension::remove(const Value& v) {
  auto it = index_.find(v);
  if (it == index_.end()) return false;
  values_.erase(values_.begin() + static_cast<std::ptrdiff_t>(it->second));
  index_.clear();
  for (std::size_t i = 0; i < values_.size(); ++i) index_.emplace(values_[i], i);
  return true;
}

std::optional<std::size_t> TypeExtension::index_of(const Value& v) const {
  auto it = index_.find(v);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool TypeExtension::all_integers() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](const Value& v) { return v.is_int(); });
}

namespace {

const TypeExtension& sort_extension(const Vocabulary& vocab, const Structure& structure, SymbolId sort,
                                    const SymbolDecl& owner) {
  const TypeExtension* ext = structure.type(sort);
  if (!ext)
    throw DomainError("sort '" + vocab[sort].name + "' of '" + owner.name + "' has no extension");
  return *ext;
}

void check_tuple(const Vocabulary& vocab, const Structure& structure, SymbolId id, std::span<const Value> t) {
  const SymbolDecl& decl = vocab[id];
  const auto& sorts = vocab.arg_sorts(id);
  if (t.size() != sorts.size())
    throw TypeError("arity mismatch for '" + decl.name + "': expected " + std::to_string(sorts.size()) +
                      " values, got " + std::to_string(t.size()));
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!sort_extension(vocab, structure, sorts[i], decl).contains(t[i]))
      throw DomainError("value " + t[i].to_string(true) + " is not in sort '" + vocab[sorts[i]].name +
                        "' (argument " + std::to_string(i + 1) + " of '" + decl.name + "')");
  }
}

void check_result(const Vocabulary& vocab, const Structure& structure, SymbolId id, const Value& v) {
  const SymbolDecl& decl = vocab[id];
  SymbolId ret = vocab.ret_sort(id);
  if (!sort_extension(vocab, structure, ret, decl).contains(v))
    throw DomainError("value " + v.to_string(true) + " is not in sort '" + vocab[ret].name + "' (result of '" +
                      decl.name + "')");
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::size_t domain_size(const Vocabulary& vocab, const Structure& structure, SymbolId id) {
  const SymbolDecl& decl = vocab[id];
  if (decl.kind == SymbolKind::type) return sort_extension(vocab, structure, id, decl).size();
  std::size_t n = 1;
  for (SymbolId s : vocab.arg_sorts(id)) n *= sort_extension(vocab, structure, s, decl).size();
  return n;
}

void validate_extension(const Vocabulary& vocab, const Structure& structure, SymbolId id, const Extension& ext) {
  const SymbolDecl& decl = vocab[id];
  switch (decl.kind) {
    case SymbolKind::type:
      if (!std::holds_alternative<TypeExtension>(ext)) throw DomainError("bad extension for type " + decl.name);
      return;
    case SymbolKind::predicate: {
      const auto* rel = std::get_if<Relation>(&ext);
      if (!rel) throw DomainError("bad extension for predicate " + decl.name);
      for (const auto& t : *rel) check_tuple(vocab, structure, id, t);
      return;
    }
    case SymbolKind::function:
    case SymbolKind::constant: {
      const auto* table = std::get_if<FunctionTable>(&ext);
      if (!table) throw DomainError("bad extension for function " + decl.name);
      for (const auto& [args, v] : *table) {
        check_tuple(vocab, structure, id, args);
        check_result(vocab, structure, id, v);
      }
      std::size_t expected = domain_size(vocab, structure, id);
      if (table->size() != expected)
        throw DomainError("non-total function table for '" + decl.name + "': " + std::to_string(table->size()) +
                          " of " + std::to_string(expected) + " argument tuples defined");
      return;
    }
  }
}

Extension normalize_interpretation(const Vocabulary& vocab, const Structure& structure, SymbolId id,
                                   const RawData& raw) {
  const SymbolDecl& decl = vocab[id];
  auto mismatch = [&](const char* expected) -> DomainError {
    return DomainError("interpretation of " + std::string(to_string(decl.kind)) + " '" + decl.name +
                       "' must be " + expected);
  };
  switch (decl.kind) {
    case SymbolKind::type: {
      const auto* values = std::get_if<std::vector<Value>>(&raw);
      if (!values) throw mismatch("a collection of values");
      return TypeExtension(*values);
    }
    case SymbolKind::predicate: {
      Relation rel;
      std::visit(Overloaded{
                     [&](const std::vector<Value>& values) {
                       if (decl.arity() != 1) throw mismatch("a collection of tuples");
                       for (const auto& v : values) rel.insert(Tuple{v});
                     },
                     [&](const std::vector<Tuple>& tuples) { rel.insert(tuples.begin(), tuples.end()); },
                     [&](const auto&) { throw mismatch("a collection of tuples"); },
                 },
                 raw);
      Extension ext{std::move(rel)};
      validate_extension(vocab, structure, id, ext);
      return ext;
    }
    case SymbolKind::function:
    case SymbolKind::constant: {
      FunctionTable table;
      auto put = [&](Tuple args, const Value& v) {
        auto [it, fresh] = table.emplace(std::move(args), v);
        if (!fresh && it->second != v)
          throw DomainError("conflicting values for '" + decl.name + to_string(it->first, true) + "'");
      };
      std::visit(Overloaded{
                     [&](const Value& v) {
                       if (decl.kind != SymbolKind::constant) throw mismatch("a mapping");
                       put(Tuple{}, v);
                     },
                     [&](const std::vector<std::pair<Tuple, Value>>& pairs) {
                       for (const auto& [k, v] : pairs) put(k, v);
                     },
                     [&](const std::vector<std::pair<Value, Value>>& pairs) {
                       if (decl.arity() != 1) throw mismatch("a mapping from argument tuples");
                       for (const auto& [k, v] : pairs) put(Tuple{k}, v);
                     },
                     [&](const auto&) {
                       throw mismatch(decl.kind == SymbolKind::constant ? "a single value" : "a mapping");
                     },
                 },
                 raw);
      Extension ext{std::move(table)};
      validate_extension(vocab, structure, id, ext);
      return ext;
    }
  }
  throw mismatch("well-formed");
}

RawData to_raw(const Extension& ext, const SymbolDecl& decl) {
  return std::visit(Overloaded{
                        [](const TypeExtension& t) -> RawData { return t.values(); },
                        [](const Relation& r) -> RawData { return std::vector<Tuple>(r.begin(), r.end()); },
                        [&](const FunctionTable& f) -> RawData {
                          if (decl.kind == SymbolKind::constant && f.size() == 1) return f.begin()->second;
                          return std::vector<std::pair<Tuple, Value>>(f.begin(), f.end());
                        },
                    },
                    ext);
}

}  // namespace lazykb
