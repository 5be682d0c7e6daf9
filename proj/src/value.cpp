#include "lazykb/value.hpp"

#include <algorithm>
#include <cctype>

namespace lazykb {

std::string Value::to_string(bool quoted) const {
  if (is_int()) return std::to_string(as_int());
  if (!quoted) return as_symbol();
  std::string out = "\"";
  for (char c : as_symbol()) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

std::size_t Value::hash() const noexcept {
  if (is_int()) return std::hash<std::int64_t>{}(as_int()) * 0x9e3779b97f4a7c15ULL;
  return std::hash<std::string>{}(as_symbol()) ^ 0x5bd1e995;
}

std::size_t TupleHash::operator()(std::span<const Value> t) const noexcept {
  std::size_t h = t.size();
  for (const auto& v : t) h ^= v.hash() + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

std::string to_string(std::span<const Value> tuple, bool quoted) {
  std::string out = "(";
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    if (i) out += ',';
    out += tuple[i].to_string(quoted);
  }
  out += ')';
  return out;
}

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

}  // namespace lazykb
