#pragma once

#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lazykb/definitions.hpp"
#include "lazykb/satsolver.hpp"
#include "lazykb/structure.hpp"
#include "lazykb/typecheck.hpp"

namespace lazykb {

// An unknown proposition: P(t) for a predicate, or f(t) = v for a function.
struct GroundAtom {
  enum class Kind { pred, fun_cell };
  Kind kind = Kind::pred;
  SymbolId symbol = kNoSymbol;
  Tuple args;
  Value value;  // fun_cell only

  std::string to_string(const Vocabulary& vocab) const;
  friend bool operator==(const GroundAtom&, const GroundAtom&) = default;
};

// Atom block of one unknown symbol: variables base .. base + domain*range - 1,
// ordered by argument tuple then by result value.
struct SymbolAtoms {
  SymbolId symbol = kNoSymbol;
  int base = 0;
  std::size_t domain = 0;
  std::size_t range = 1;  // 1 for predicates
};

struct GroundProblem {
  sat::Cnf cnf;
  // atoms[i] is variable i + 1. Auxiliary variables follow the atoms and
  // are not listed.
  std::vector<GroundAtom> atoms;
  std::vector<SymbolAtoms> blocks;
  // Unfolding depth used for each recursive definition with unknown parameters.
  std::map<SymbolId, std::size_t> defined_levels;
  bool trivially_false = false;
  // The input structure extended with every definition folded by fixpoint
  // evaluation.
  Structure known;

  int atom_count() const noexcept { return static_cast<int>(atoms.size()); }
  std::optional<int> variable(const Vocabulary& vocab, const GroundAtom& atom) const;
};

struct GroundOptions {
  // Layers used to unfold recursive definitions with unknown parameters.
  // Default: the number of ground head atoms of the stratum.
  std::optional<std::size_t> unfold_depth;
  FixpointStrategy fixpoint = FixpointStrategy::semi_naive;
};

// Incremental grounder over a fixed structure. Every predicate or function
// that `structure` does not interpret is unknown; all of its atoms are
// allocated up front in symbol order, so variables 1..atom_count() are the
// atoms of the unknown symbols.
class Grounder {
 public:
  Grounder(const Vocabulary& vocab, Structure structure, GroundOptions options = {});
  ~Grounder();
  Grounder(const Grounder&) = delete;
  Grounder& operator=(const Grounder&) = delete;

  // Expands quantifiers over the extensions, folds subformulas whose symbols
  // are all known, and adds the clauses of the remaining formula.
  void add_constraint(const TypedFormula& f);

  // At-least-one and pairwise at-most-one clauses over the cells of each
  // argument tuple of an unknown function.
  void add_function_consistency(SymbolId function);

  // Known parameters: fixpoint evaluation; the heads become known. Otherwise
  // Clark completion (non-recursive) or bounded unfolding (recursive).
  // Returns true when the stratum was folded.
  bool add_definitions(std::span<const Definition* const> stratum, bool recursive);

  bool is_unknown(SymbolId id) const;
  const GroundProblem& problem() const;
  GroundProblem take();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Grounds a whole theory: definitions stratum by stratum (folding those with
// known parameters first), then constraints, then function consistency for
// every unknown function, then the unfolded definitions.
GroundProblem ground_theory(const Vocabulary& vocab, const Structure& structure,
                            std::span<const TypedFormula> constraints, std::span<const Definition> definitions,
                            GroundOptions options = {});

// Stand-alone pieces (fresh atom numbering over `structure`).
std::vector<std::vector<int>> ground_constraint(const TypedFormula& f, const Vocabulary& vocab,
                                                const Structure& structure);
std::vector<std::vector<int>> ground_function_consistency(SymbolId function, const Vocabulary& vocab,
                                                          const Structure& structure);

// Total structure from a satisfying assignment: problem.known plus the
// decoded interpretation of every unknown symbol.
Structure decode_model(const Vocabulary& vocab, const GroundProblem& problem, const sat::Assignment& model);

}  // namespace lazykb
