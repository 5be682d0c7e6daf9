#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "lazykb/evaluate.hpp"
#include "lazykb/expr.hpp"
#include "lazykb/structure.hpp"
#include "lazykb/typecheck.hpp"

namespace lazykb {

// One case of an inductive definition; the parameters of the lambda occupy
// environment slots 0..arity-1.
struct DefinitionRule {
  std::string source;
  TypedFormula body;
};

struct Definition {
  SymbolId head = kNoSymbol;
  std::vector<DefinitionRule> rules;
  // Predicates and functions read by the rule bodies, other than the head.
  std::set<SymbolId> parameters;
};

// Compiles lambda rules for `head`. Throws ParseError / TypeError, or
// TypeError when a lambda's parameter count differs from the head arity.
Definition compile_definition(SymbolId head, std::span<const std::string> lambdas, const Vocabulary& vocab,
                              const Structure* structure = nullptr);

// Symbol occurrences in a formula, split by polarity.
struct Occurrences {
  std::set<SymbolId> positive;
  std::set<SymbolId> negative;
};
Occurrences occurrences(const Expr& e);

struct Stratum {
  std::vector<std::size_t> members;  // indices into the definition list
  bool recursive = false;            // some member reads a member of this stratum
};

// Orders definitions so every stratum only reads heads of earlier strata or
// (positively) of itself. Throws UnsupportedError naming the cycle when a
// recursion passes through negation.
std::vector<Stratum> stratify(std::span<const Definition> definitions, const Vocabulary& vocab);

enum class FixpointStrategy { semi_naive, naive };

// Least fixpoint of the rules of a stratum, jointly for all its heads.
// Every parameter must be interpreted in `structure`; the heads are read
// from the current iterate. Semi-naive evaluation re-derives a candidate
// tuple only when a head tuple it read has been newly derived.
std::vector<Relation> lfp_evaluate(std::span<const Definition* const> stratum, const Vocabulary& vocab,
                                   const Structure& structure,
                                   FixpointStrategy strategy = FixpointStrategy::semi_naive);
Relation lfp_evaluate(const Definition& defn, const Vocabulary& vocab, const Structure& structure,
                      FixpointStrategy strategy = FixpointStrategy::semi_naive);

// One application of the rules of `defn` with the head read from `current`.
Relation derive_once(const Definition& defn, const Vocabulary& vocab, const Structure& structure,
                     const Relation& current);

}  // namespace lazykb
