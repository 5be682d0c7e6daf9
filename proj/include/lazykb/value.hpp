#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace lazykb {

// A domain element: either an integer or a symbolic token. The two kinds
// never compare equal; integers order before tokens.
class Value {
 public:
  Value() : data_(std::int64_t{0}) {}
  Value(std::int64_t v) : data_(v) {}  // NOLINT(google-explicit-constructor)
  Value(int v) : data_(std::int64_t{v}) {}  // NOLINT
  Value(std::string s) : data_(std::move(s)) {}  // NOLINT
  Value(const char* s) : data_(std::string(s)) {}  // NOLINT

  bool is_int() const noexcept { return data_.index() == 0; }
  bool is_symbol() const noexcept { return data_.index() == 1; }
  std::int64_t as_int() const { return std::get<std::int64_t>(data_); }
  const std::string& as_symbol() const { return std::get<std::string>(data_); }

  // Integers print bare; tokens print as-is when `quoted` is false.
  std::string to_string(bool quoted = false) const;

  friend bool operator==(const Value&, const Value&) = default;
  friend std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.data_.index() != b.data_.index()) return a.data_.index() <=> b.data_.index();
    if (a.is_int()) return a.as_int() <=> b.as_int();
    return a.as_symbol().compare(b.as_symbol()) <=> 0;
  }

  std::size_t hash() const noexcept;

 private:
  std::variant<std::int64_t, std::string> data_;
};

using Tuple = std::vector<Value>;

// Lexicographic tuple order usable with heterogeneous span lookups.
struct TupleLess {
  using is_transparent = void;
  bool operator()(std::span<const Value> a, std::span<const Value> b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

struct TupleHash {
  std::size_t operator()(std::span<const Value> t) const noexcept;
};

std::string to_string(std::span<const Value> tuple, bool quoted = false);

// True for strings that read back as a bare identifier token.
bool is_identifier(const std::string& s);

}  // namespace lazykb

template <>
struct std::hash<lazykb::Value> {
  std::size_t operator()(const lazykb::Value& v) const noexcept { return v.hash(); }
};
