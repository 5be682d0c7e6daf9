// Random small theories with an exhaustive model enumerator, shared by the
// grounder property test and the acceptance run.
#pragma once

#include <functional>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "kbs.hpp"
#include "lazykb/definitions.hpp"
#include "lazykb/evaluate.hpp"
#include "lazykb/kb.hpp"

namespace rtheory {

using namespace lazykb;

inline std::vector<Tuple> product(int k, int arity) {
  std::vector<Tuple> out{{}};
  for (int a = 0; a < arity; ++a) {
    std::vector<Tuple> next;
    for (const auto& t : out)
      for (int v = 0; v < k; ++v) {
        Tuple u = t;
        u.emplace_back(v);
        next.push_back(u);
      }
    out = next;
  }
  return out;
}

inline Relation relation_from_mask(const std::vector<Tuple>& domain, std::uint64_t mask) {
  Relation r;
  for (std::size_t i = 0; i < domain.size(); ++i)
    if (mask >> i & 1) r.insert(domain[i]);
  return r;
}

// T has k in {2, 3} elements. K(T) is known; P(T) and F(T): T are unknown,
// plus Q(T,T) and C : T when k == 2. Unknown ground atoms: 2 + 4 + 4 + 2
// for k = 2, 3 + 9 for k = 3. Every third theory adds a recursive
// definition D and a non-recursive E.
struct Instance {
  std::unique_ptr<KnowledgeBase> kb;
  int k = 2;
  bool with_defs = false;
};

inline Instance make(std::mt19937_64& rng, int round) {
  Instance in;
  in.k = std::uniform_int_distribution<int>(2, 3)(rng);
  in.with_defs = round % 3 == 0;
  const int k = in.k;
  in.kb = std::make_unique<KnowledgeBase>("random");
  KnowledgeBase& kb = *in.kb;
  kb.type("T", kbs::range(k));
  std::vector<Value> known;
  for (int v = 0; v < k; ++v)
    if (rng() & 1) known.emplace_back(v);
  kb.predicate("K(T)", known);
  kb.predicate("P(T)");
  if (k == 2) kb.predicate("Q(T,T)");
  kb.function("F(T): T");
  if (k == 2) kb.constant("C : T");
  if (in.with_defs) {
    kb.define("D(T)", k == 2 ? "lambda x: P(x) or any(Q(x,y) and D(y) for y in T)"
                             : "lambda x: P(x) or any(F(x) == y and D(y) for y in T)");
    kb.define("E(T)", "lambda x: K(x) and not P(x)");
  }

  std::vector<std::string> vars;
  int fresh = 0;
  std::function<std::string()> term = [&]() -> std::string {
    int r = std::uniform_int_distribution<int>(0, 9)(rng);
    if (!vars.empty() && r < 6) return vars[rng() % vars.size()];
    if (r < 8) return std::to_string(rng() % k);
    if (r == 8 && k == 2) return "C";
    return "F(" + (vars.empty() ? std::to_string(rng() % k) : vars[rng() % vars.size()]) + ")";
  };
  std::function<std::string(int)> formula = [&](int depth) -> std::string {
    int r = std::uniform_int_distribution<int>(0, depth > 0 ? 9 : 4)(rng);
    switch (r) {
      case 0: return "P(" + term() + ")";
      case 1: return k == 2 ? "Q(" + term() + "," + term() + ")" : "K(" + term() + ")";
      case 2: return in.with_defs ? "D(" + term() + ")" : "P(" + term() + ")";
      case 3: return in.with_defs ? "E(" + term() + ")" : "K(" + term() + ")";
      case 4: return term() + (rng() & 1 ? " == " : " != ") + term();
      case 5: return "not (" + formula(depth - 1) + ")";
      case 6: return "(" + formula(depth - 1) + " and " + formula(depth - 1) + ")";
      case 7: return "(" + formula(depth - 1) + " or " + formula(depth - 1) + ")";
      default: {
        std::string v = "v" + std::to_string(fresh++);
        vars.push_back(v);
        std::string body = formula(depth - 1);
        std::string filter = rng() % 4 == 0 ? " if " + formula(0) : "";
        vars.pop_back();
        return std::string(r == 8 ? "all(" : "any(") + body + " for " + v + " in T" + filter + ")";
      }
    }
  };
  int sentences = std::uniform_int_distribution<int>(1, 3)(rng);
  for (int i = 0; i < sentences; ++i) kb.constraint(formula(3));
  return in;
}

// Key of a total structure restricted to the unknown symbols P, Q, F, C.
inline std::string key(const KnowledgeBase& kb, const Structure& s) {
  std::string out;
  for (const char* name : {"P", "Q", "F", "C"}) {
    auto id = kb.vocabulary().find(name);
    if (!id) continue;
    out += name;
    out += ':';
    if (const Relation* r = s.relation(*id))
      for (const auto& t : *r) out += to_string(t, false) + ";";
    if (const FunctionTable* f = s.function(*id))
      for (const auto& [a, v] : *f) out += to_string(a, false) + "->" + v.to_string(false) + ";";
    out += '|';
  }
  return out;
}

// Keys of all models, found by trying every interpretation of the unknowns
// and evaluating definitions by fixpoint and sentences directly.
inline std::set<std::string> exhaustive_models(const Instance& in) {
  const KnowledgeBase& kb = *in.kb;
  const Vocabulary& vocab = kb.vocabulary();
  const int k = in.k;
  auto unary = product(k, 1), binary = product(k, 2);
  std::uint64_t p_count = 1ull << k, q_count = k == 2 ? 1ull << 4 : 1;
  std::uint64_t f_count = 1;
  for (int i = 0; i < k; ++i) f_count *= static_cast<std::uint64_t>(k);
  std::set<std::string> out;
  for (std::uint64_t pm = 0; pm < p_count; ++pm)
    for (std::uint64_t qm = 0; qm < q_count; ++qm)
      for (std::uint64_t fm = 0; fm < f_count; ++fm)
        for (int c = 0; c < (k == 2 ? 2 : 1); ++c) {
          Structure s = kb.structure();
          s.set(kb.require("P"), relation_from_mask(unary, pm));
          if (k == 2) s.set(kb.require("Q"), relation_from_mask(binary, qm));
          FunctionTable f;
          std::uint64_t digits = fm;
          for (int i = 0; i < k; ++i, digits /= static_cast<std::uint64_t>(k))
            f[Tuple{i}] = Value(static_cast<std::int64_t>(digits % static_cast<std::uint64_t>(k)));
          s.set(kb.require("F"), f);
          if (k == 2) s.set(kb.require("C"), FunctionTable{{Tuple{}, Value(c)}});
          for (const auto& d : kb.definitions()) s.set(d.head, lfp_evaluate(d, vocab, s));
          StructureInterpretation interp(vocab, s);
          bool ok = true;
          for (const auto& sentence : kb.theory()) ok = ok && holds(sentence, interp);
          if (ok) out.insert(key(kb, s));
        }
  return out;
}

// Number of discrepancies between the engine and the exhaustive oracle:
// model-set mismatch, a returned model failing check(), or a wrong verdict.
inline int discrepancies(Instance& in) {
  KnowledgeBase& kb = *in.kb;
  auto expected = exhaustive_models(in);
  auto models = kb.models(0);
  std::set<std::string> got;
  int bad = 0;
  for (const auto& m : models) {
    if (!kb.check(m).empty()) ++bad;
    got.insert(key(kb, m));
  }
  if (got.size() != models.size()) ++bad;
  if (got != expected) ++bad;
  if (kb.satisfiable() != !expected.empty()) ++bad;
  return bad;
}

}  // namespace rtheory
