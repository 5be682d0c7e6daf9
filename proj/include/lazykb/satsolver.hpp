#pragma once

#include <cstdint>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

namespace lazykb::sat {

// DIMACS conventions: variables are 1..num_vars, a literal is +v or -v.
struct Cnf {
  int num_vars = 0;
  std::vector<std::vector<int>> clauses;
};

struct SolverOptions {
  // Deterministic defaults: branch on the lowest unassigned variable,
  // false first, never restart.
  bool vsids = false;
  bool restarts = false;
  std::size_t learned_limit = 100000;  // size-based pruning beyond this
};

struct SolverStats {
  std::uint64_t decisions = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t propagations = 0;
  std::uint64_t learned = 0;
  std::uint64_t restarts = 0;
  std::uint64_t reductions = 0;
};

// Assignment indexed by variable; index 0 is unused.
using Assignment = std::vector<bool>;

struct SolveResult {
  bool satisfiable = false;
  Assignment model;  // total over 1..num_vars when satisfiable
};

// CDCL with two watched literals and first-UIP learning. The solver can be
// solved repeatedly with clauses added in between (used for blocking-clause
// enumeration).
class Solver {
 public:
  explicit Solver(int num_vars = 0, SolverOptions options = {});
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  void reserve_vars(int num_vars);
  int num_vars() const noexcept;

  // Tautologies are dropped; duplicate literals merged. Returns false once
  // the clause set is known to be unsatisfiable at the root.
  bool add_clause(std::span<const int> lits);
  bool add_clause(std::initializer_list<int> lits) { return add_clause(std::span<const int>(lits.begin(), lits.size())); }

  SolveResult solve();

  const SolverStats& stats() const noexcept;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

SolveResult solve(const Cnf& cnf, SolverOptions options = {});

// Distinct models projected onto variables 1..projected (auxiliary
// variables above it are existentially hidden). limit == 0 means all.
std::vector<Assignment> enumerate(const Cnf& cnf, int projected, std::size_t limit, SolverOptions options = {});

// True when every clause has a true literal under `model`.
bool satisfies(const Cnf& cnf, const Assignment& model);

}  // namespace lazykb::sat
