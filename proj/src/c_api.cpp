#include "lazykb/c_api.h"

#include <charconv>

#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <mutex>

#include <json.hpp>

#include "lazykb/dump.hpp"
#include "lazykb/error.hpp"
#include "lazykb/kb.hpp"
#include "lazykb/script.hpp"

using json = nlohmann::json;
using namespace lazykb;

namespace {

thread_local std::string g_last_error;

std::mutex g_mutex;
std::map<lkb_handle, std::unique_ptr<KnowledgeBase>> g_kbs;
lkb_handle g_next = 1;

struct BadHandle {};
struct BadArgument {
  std::string message;
};

KnowledgeBase& lookup(lkb_handle h) {
  std::lock_guard lock(g_mutex);
  auto it = g_kbs.find(h);
  if (it == g_kbs.end()) throw BadHandle{};
  return *it->second;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return LKB_OK;
  } catch (const BadHandle&) {
    g_last_error = "invalid knowledge-base handle";
    return LKB_ERR_INVALID_HANDLE;
  } catch (const BadArgument& e) {
    g_last_error = e.message;
    return LKB_ERR_INVALID_ARGUMENT;
  } catch (const json::exception& e) {
    g_last_error = std::string("invalid JSON argument: ") + e.what();
    return LKB_ERR_INVALID_ARGUMENT;
  } catch (const ParseError& e) {
    g_last_error = e.what();
    return LKB_ERR_PARSE;
  } catch (const ScriptError& e) {
    g_last_error = e.what();
    return LKB_ERR_PARSE;
  } catch (const TypeError& e) {
    g_last_error = e.what();
    return LKB_ERR_TYPE;
  } catch (const DomainError& e) {
    g_last_error = e.what();
    return LKB_ERR_DOMAIN;
  } catch (const UnsatError& e) {
    g_last_error = e.what();
    return LKB_ERR_UNSAT;
  } catch (const UnsupportedError& e) {
    g_last_error = e.what();
    return LKB_ERR_UNSUPPORTED;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LKB_ERR_INTERNAL;
  }
}

const char* need(const char* s, const char* what) {
  if (!s) throw BadArgument{std::string(what) + " must not be NULL"};
  return s;
}

template <class T>
T* need_out(T* p) {
  if (!p) throw BadArgument{"output pointer must not be NULL"};
  return p;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

Value to_value(const json& j) {
  if (j.is_number_integer()) return Value(j.get<std::int64_t>());
  if (j.is_string()) return Value(j.get<std::string>());
  throw BadArgument{"value must be an integer or a string: " + j.dump()};
}

json from_value(const Value& v) {
  if (v.is_int()) return v.as_int();
  return v.as_symbol();
}

Tuple to_tuple(const json& j) {
  if (!j.is_array()) return {to_value(j)};
  Tuple t;
  for (const auto& e : j) t.push_back(to_value(e));
  return t;
}

json from_tuple(const Tuple& t) {
  json out = json::array();
  for (const auto& v : t) out.push_back(from_value(v));
  return out;
}

// JSON object keys are strings; a key spelling a canonical integer is read
// as that integer so {"0": 1} keys an integer sort.
Value object_key(const std::string& k) {
  std::int64_t n = 0;
  auto [end, ec] = std::from_chars(k.data(), k.data() + k.size(), n);
  if (ec == std::errc() && end == k.data() + k.size() && std::to_string(n) == k) return Value(n);
  return Value(k);
}

RawData to_raw(SymbolKind kind, const json& j) {
  switch (kind) {
    case SymbolKind::constant:
      return to_value(j);
    case SymbolKind::type: {
      if (!j.is_array()) throw BadArgument{"type data must be an array"};
      std::vector<Value> values;
      for (const auto& e : j) values.push_back(to_value(e));
      return values;
    }
    case SymbolKind::predicate: {
      if (!j.is_array()) throw BadArgument{"predicate data must be an array"};
      std::vector<Tuple> tuples;
      for (const auto& e : j) tuples.push_back(to_tuple(e));
      return tuples;
    }
    case SymbolKind::function: {
      std::vector<std::pair<Tuple, Value>> pairs;
      if (j.is_object()) {
        for (const auto& [k, v] : j.items()) pairs.emplace_back(Tuple{object_key(k)}, to_value(v));
        return pairs;
      }
      if (!j.is_array()) throw BadArgument{"function data must be an array of pairs or an object"};
      for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw BadArgument{"function entries must be [key, value] pairs"};
        pairs.emplace_back(to_tuple(e[0]), to_value(e[1]));
      }
      return pairs;
    }
  }
  throw BadArgument{"unknown symbol kind"};
}

SymbolKind to_kind(int kind) {
  switch (kind) {
    case LKB_TYPE:
      return SymbolKind::type;
    case LKB_PREDICATE:
      return SymbolKind::predicate;
    case LKB_FUNCTION:
      return SymbolKind::function;
    case LKB_CONSTANT:
      return SymbolKind::constant;
    default:
      throw BadArgument{"unknown symbol kind " + std::to_string(kind)};
  }
}

}  // namespace

extern "C" {

const char* lkb_last_error(void) { return g_last_error.c_str(); }

void lkb_string_free(char* s) { std::free(s); }

int lkb_kb_new(const char* name, lkb_handle* out) {
  return guarded([&] {
    need_out(out);
    auto kb = std::make_unique<KnowledgeBase>(name ? name : "KB");
    std::lock_guard lock(g_mutex);
    *out = g_next++;
    g_kbs.emplace(*out, std::move(kb));
  });
}

int lkb_kb_free(lkb_handle h) {
  return guarded([&] {
    std::unique_ptr<KnowledgeBase> doomed;
    std::lock_guard lock(g_mutex);
    auto it = g_kbs.find(h);
    if (it == g_kbs.end()) throw BadHandle{};
    doomed = std::move(it->second);
    g_kbs.erase(it);
  });
}

int lkb_declare(lkb_handle h, int kind, const char* typed_name, const char* data_json) {
  return guarded([&] {
    KnowledgeBase& kb = lookup(h);
    SymbolKind k = to_kind(kind);
    need(typed_name, "typed_name");
    std::optional<RawData> data;
    if (data_json) data = to_raw(k, json::parse(data_json));
    if (k == SymbolKind::type) {
      SymbolDecl decl{typed_name, SymbolKind::type, {}, {}};
      kb.declare(std::move(decl), std::move(data));
      return;
    }
    SymbolDecl decl = parse_typed_name(typed_name);
    bool matches = decl.kind == k || (k == SymbolKind::function && decl.kind == SymbolKind::constant);
    if (!matches) throw TypeError(std::string("'") + typed_name + "' is not a " + std::string(to_string(k)) + " signature");
    if (data && decl.kind != k) data = to_raw(decl.kind, json::parse(data_json));
    kb.declare(std::move(decl), std::move(data));
  });
}

int lkb_assign(lkb_handle h, const char* name, const char* data_json) {
  return guarded([&] {
    KnowledgeBase& kb = lookup(h);
    SymbolId id = kb.require(need(name, "name"));
    kb.assign(name, to_raw(kb.vocabulary()[id].kind, json::parse(need(data_json, "data_json"))));
  });
}

int lkb_unassign(lkb_handle h, const char* name) {
  return guarded([&] { lookup(h).unassign(need(name, "name")); });
}

int lkb_constraint(lkb_handle h, const char* text) {
  return guarded([&] { lookup(h).constraint(need(text, "text")); });
}

int lkb_define(lkb_handle h, const char* head, const char* lambdas_json) {
  return guarded([&] {
    KnowledgeBase& kb = lookup(h);
    json j = json::parse(need(lambdas_json, "lambdas_json"));
    std::vector<std::string> lambdas;
    if (j.is_string()) {
      lambdas.push_back(j.get<std::string>());
    } else if (j.is_array()) {
      for (const auto& e : j) lambdas.push_back(e.get<std::string>());
    } else {
      throw BadArgument{"lambdas_json must be a string or an array of strings"};
    }
    kb.define(need(head, "head"), lambdas);
  });
}

int lkb_load_script(lkb_handle h, const char* text) {
  return guarded([&] { load_script(lookup(h), need(text, "text")); });
}

int lkb_satisfiable(lkb_handle h, int* out) {
  return guarded([&] { *need_out(out) = lookup(h).satisfiable() ? 1 : 0; });
}

int lkb_solver_invocations(lkb_handle h, uint64_t* out) {
  return guarded([&] { *need_out(out) = lookup(h).solver_invocations(); });
}

int lkb_symbols(lkb_handle h, char** out_json) {
  return guarded([&] {
    KnowledgeBase& kb = lookup(h);
    json out = json::array();
    for (SymbolId id = 0; id < kb.vocabulary().size(); ++id) {
      const SymbolDecl& d = kb.vocabulary()[id];
      out.push_back({{"name", d.name},
                     {"kind", std::string(to_string(d.kind))},
                     {"signature", d.signature()},
                     {"defined", kb.is_defined(id)}});
    }
    *need_out(out_json) = dup(out.dump());
  });
}

int lkb_relation_contains(lkb_handle h, const char* name, const char* tuple_json, int* out) {
  return guarded([&] {
    RelationView v = lookup(h).relation(need(name, "name"));
    *need_out(out) = v.contains(to_tuple(json::parse(need(tuple_json, "tuple_json")))) ? 1 : 0;
  });
}

int lkb_relation_add(lkb_handle h, const char* name, const char* tuple_json) {
  return guarded([&] {
    RelationView v = lookup(h).relation(need(name, "name"));
    v.add(to_tuple(json::parse(need(tuple_json, "tuple_json"))));
  });
}

int lkb_relation_remove(lkb_handle h, const char* name, const char* tuple_json) {
  return guarded([&] {
    RelationView v = lookup(h).relation(need(name, "name"));
    v.remove(to_tuple(json::parse(need(tuple_json, "tuple_json"))));
  });
}

int lkb_relation_size(lkb_handle h, const char* name, int64_t* out) {
  return guarded([&] { *need_out(out) = static_cast<int64_t>(lookup(h).relation(need(name, "name")).size()); });
}

int lkb_relation_tuples(lkb_handle h, const char* name, char** out_json) {
  return guarded([&] {
    json out = json::array();
    for (const auto& t : lookup(h).relation(need(name, "name")).tuples()) out.push_back(from_tuple(t));
    *need_out(out_json) = dup(out.dump());
  });
}

int lkb_function_lookup(lkb_handle h, const char* name, const char* args_json, char** out_json) {
  return guarded([&] {
    FunctionView v = lookup(h).function_view(need(name, "name"));
    json args = args_json ? json::parse(args_json) : json::array();
    *need_out(out_json) = dup(from_value(v.lookup(to_tuple(args))).dump());
  });
}

int lkb_function_keys(lkb_handle h, const char* name, char** out_json) {
  return guarded([&] {
    json out = json::array();
    for (const auto& t : lookup(h).function_view(need(name, "name")).keys()) out.push_back(from_tuple(t));
    *need_out(out_json) = dup(out.dump());
  });
}

int lkb_function_items(lkb_handle h, const char* name, char** out_json) {
  return guarded([&] {
    json out = json::array();
    for (const auto& [k, v] : lookup(h).function_view(need(name, "name")).items())
      out.push_back(json::array({from_tuple(k), from_value(v)}));
    *need_out(out_json) = dup(out.dump());
  });
}

int lkb_dump(lkb_handle h, char** out) {
  return guarded([&] { *need_out(out) = dup(dump_kb(lookup(h))); });
}

}  // extern "C"
