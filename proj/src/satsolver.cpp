#include "lazykb/satsolver.hpp"

#include <algorithm>
#include <cstdlib>

namespace lazykb::sat {

namespace {

// Internal literal: 2*var + sign, sign 1 meaning negated.
inline int to_internal(int lit) { return lit > 0 ? 2 * lit : 2 * (-lit) + 1; }
inline int var_of(int l) { return l >> 1; }
inline int negate(int l) { return l ^ 1; }

constexpr signed char kUndef = -1;

double luby(double y, int x) {
  int size = 1, seq = 0;
  while (size < x + 1) {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  double r = 1;
  for (int i = 0; i < seq; ++i) r *= y;
  return r;
}

}  // namespace

struct Solver::Impl {
  struct Clause {
    std::vector<int> lits;
    bool learned = false;
    bool deleted = false;
  };

  SolverOptions options;
  SolverStats stats;
  int n = 0;
  bool unsat = false;

  std::vector<Clause> clauses;
  std::vector<std::vector<int>> watches;  // per internal literal
  std::vector<signed char> value;         // per var: kUndef, 0 or 1
  std::vector<int> level;
  std::vector<int> reason;
  std::vector<char> seen;
  std::vector<int> trail;
  std::vector<int> trail_lim;
  std::size_t qhead = 0;
  int cursor = 1;
  std::size_t learned_count = 0;

  // VSIDS
  std::vector<double> activity;
  double var_inc = 1.0;
  std::vector<int> heap;
  std::vector<int> heap_pos;

  explicit Impl(SolverOptions o) : options(o) {
    watches.resize(2);
    value.resize(1, kUndef);
    level.resize(1, 0);
    reason.resize(1, -1);
    seen.resize(1, 0);
    activity.resize(1, 0.0);
    heap_pos.resize(1, -1);
  }

  void grow(int vars) {
    if (vars <= n) return;
    int old = n;
    n = vars;
    auto size = static_cast<std::size_t>(n) + 1;
    watches.resize(2 * size);
    value.resize(size, kUndef);
    level.resize(size, 0);
    reason.resize(size, -1);
    seen.resize(size, 0);
    activity.resize(size, 0.0);
    heap_pos.resize(size, -1);
    for (int v = old + 1; v <= n; ++v) heap_insert(v);
  }

  int decision_level() const { return static_cast<int>(trail_lim.size()); }

  signed char lit_value(int l) const {
    signed char v = value[var_of(l)];
    if (v == kUndef) return kUndef;
    return static_cast<signed char>(v ^ (l & 1));
  }

  void enqueue(int l, int from) {
    int v = var_of(l);
    value[v] = static_cast<signed char>((l & 1) ? 0 : 1);
    level[v] = decision_level();
    reason[v] = from;
    trail.push_back(l);
  }

  // --- heap on activity (max at top, ties to the lower index) ---
  bool heap_less(int a, int b) const {
    if (activity[a] != activity[b]) return activity[a] > activity[b];
    return a < b;
  }
  void heap_up(std::size_t i) {
    int v = heap[i];
    while (i > 0) {
      std::size_t p = (i - 1) / 2;
      if (!heap_less(v, heap[p])) break;
      heap[i] = heap[p];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = p;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_down(std::size_t i) {
    int v = heap[i];
    for (;;) {
      std::size_t c = 2 * i + 1;
      if (c >= heap.size()) break;
      if (c + 1 < heap.size() && heap_less(heap[c + 1], heap[c])) ++c;
      if (!heap_less(heap[c], v)) break;
      heap[i] = heap[c];
      heap_pos[heap[i]] = static_cast<int>(i);
      i = c;
    }
    heap[i] = v;
    heap_pos[v] = static_cast<int>(i);
  }
  void heap_insert(int v) {
    if (!options.vsids || heap_pos[v] >= 0) return;
    heap.push_back(v);
    heap_up(heap.size() - 1);
  }
  int heap_pop() {
    int top = heap[0];
    heap_pos[top] = -1;
    int last = heap.back();
    heap.pop_back();
    if (!heap.empty()) {
      heap[0] = last;
      heap_pos[last] = 0;
      heap_down(0);
    }
    return top;
  }
  void bump(int v) {
    activity[v] += var_inc;
    if (activity[v] > 1e100) {
      for (int u = 1; u <= n; ++u) activity[u] *= 1e-100;
      var_inc *= 1e-100;
    }
    if (heap_pos[v] >= 0) heap_up(static_cast<std::size_t>(heap_pos[v]));
  }

  void backtrack(int target) {
    if (decision_level() <= target) return;
    std::size_t stop = static_cast<std::size_t>(trail_lim[static_cast<std::size_t>(target)]);
    for (std::size_t i = trail.size(); i-- > stop;) {
      int v = var_of(trail[i]);
      value[v] = kUndef;
      reason[v] = -1;
      cursor = std::min(cursor, v);
      heap_insert(v);
    }
    trail.resize(stop);
    trail_lim.resize(static_cast<std::size_t>(target));
    qhead = trail.size();
  }

  void attach(int ci) {
    const auto& c = clauses[static_cast<std::size_t>(ci)].lits;
    watches[static_cast<std::size_t>(c[0])].push_back(ci);
    watches[static_cast<std::size_t>(c[1])].push_back(ci);
  }

  // Returns the index of a conflicting clause or -1.
  int propagate() {
    while (qhead < trail.size()) {
      int p = trail[qhead++];
      int false_lit = negate(p);
      auto& ws = watches[static_cast<std::size_t>(false_lit)];
      std::size_t i = 0, j = 0;
      while (i < ws.size()) {
        int ci = ws[i++];
        Clause& c = clauses[static_cast<std::size_t>(ci)];
        if (c.deleted) continue;
        auto& lits = c.lits;
        if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
        if (lit_value(lits[0]) == 1) {
          ws[j++] = ci;
          continue;
        }
        bool moved = false;
        for (std::size_t k = 2; k < lits.size(); ++k) {
          if (lit_value(lits[k]) != 0) {
            std::swap(lits[1], lits[k]);
            watches[static_cast<std::size_t>(lits[1])].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[j++] = ci;
        if (lit_value(lits[0]) == 0) {
          while (i < ws.size()) ws[j++] = ws[i++];
          ws.resize(j);
          return ci;
        }
        ++stats.propagations;
        enqueue(lits[0], ci);
      }
      ws.resize(j);
    }
    return -1;
  }

  void analyze(int conflict, std::vector<int>& learnt, int& backjump) {
    learnt.clear();
    learnt.push_back(0);
    int path = 0;
    int p = -1;
    std::size_t idx = trail.size();
    int ci = conflict;
    std::vector<int> touched;
    do {
      const auto& lits = clauses[static_cast<std::size_t>(ci)].lits;
      for (int q : lits) {
        int v = var_of(q);
        if (p >= 0 && v == var_of(p)) continue;
        if (seen[v] || level[v] == 0) continue;
        seen[v] = 1;
        touched.push_back(v);
        if (options.vsids) bump(v);
        if (level[v] == decision_level()) ++path;
        else learnt.push_back(q);
      }
      do {
        --idx;
      } while (!seen[var_of(trail[idx])]);
      p = trail[idx];
      ci = reason[var_of(p)];
      seen[var_of(p)] = 0;
      --path;
    } while (path > 0);
    learnt[0] = negate(p);

    backjump = 0;
    if (learnt.size() > 1) {
      std::size_t best = 1;
      for (std::size_t k = 2; k < learnt.size(); ++k)
        if (level[var_of(learnt[k])] > level[var_of(learnt[best])]) best = k;
      std::swap(learnt[1], learnt[best]);
      backjump = level[var_of(learnt[1])];
    }
    for (int v : touched) seen[v] = 0;
    if (options.vsids) var_inc /= 0.95;
  }

  bool locked(int ci) const {
    const auto& c = clauses[static_cast<std::size_t>(ci)];
    int v = var_of(c.lits[0]);
    return reason[v] == ci && lit_value(c.lits[0]) == 1;
  }

  void reduce() {
    ++stats.reductions;
    std::vector<int> candidates;
    for (std::size_t ci = 0; ci < clauses.size(); ++ci) {
      const Clause& c = clauses[ci];
      if (c.learned && !c.deleted && c.lits.size() > 2 && !locked(static_cast<int>(ci)))
        candidates.push_back(static_cast<int>(ci));
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) {
      return clauses[static_cast<std::size_t>(a)].lits.size() > clauses[static_cast<std::size_t>(b)].lits.size();
    });
    for (std::size_t k = 0; k < candidates.size() / 2; ++k) {
      Clause& c = clauses[static_cast<std::size_t>(candidates[k])];
      c.deleted = true;
      c.lits.clear();
      c.lits.shrink_to_fit();
      --learned_count;
    }
  }

  int pick_branch() {
    if (options.vsids) {
      while (!heap.empty()) {
        int v = heap_pop();
        if (value[v] == kUndef) return v;
      }
      return 0;
    }
    while (cursor <= n && value[cursor] != kUndef) ++cursor;
    return cursor <= n ? cursor : 0;
  }

  bool add(std::span<const int> input) {
    if (unsat) return false;
    backtrack(0);
    std::vector<int> lits;
    lits.reserve(input.size());
    for (int x : input) {
      if (x == 0) continue;
      grow(std::abs(x));
      lits.push_back(to_internal(x));
    }
    std::sort(lits.begin(), lits.end());
    lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
    for (std::size_t k = 1; k < lits.size(); ++k)
      if (lits[k] == negate(lits[k - 1])) return true;  // tautology
    std::vector<int> kept;
    for (int l : lits) {
      signed char v = lit_value(l);
      if (v == 1) return true;
      if (v == kUndef) kept.push_back(l);
    }
    if (kept.empty()) {
      unsat = true;
      return false;
    }
    if (kept.size() == 1) {
      enqueue(kept[0], -1);
      return true;
    }
    clauses.push_back(Clause{std::move(kept), false, false});
    attach(static_cast<int>(clauses.size() - 1));
    return true;
  }

  SolveResult run() {
    SolveResult result;
    if (unsat) return result;
    backtrack(0);
    std::vector<int> learnt;
    std::uint64_t conflicts_since_restart = 0;
    int restart_index = 0;
    double restart_limit = options.restarts ? 100 * luby(2, restart_index) : 0;
    for (;;) {
      int conflict = propagate();
      if (conflict >= 0) {
        ++stats.conflicts;
        ++conflicts_since_restart;
        if (decision_level() == 0) {
          unsat = true;
          return result;
        }
        int bj = 0;
        analyze(conflict, learnt, bj);
        backtrack(bj);
        if (learnt.size() == 1) {
          enqueue(learnt[0], -1);
        } else {
          clauses.push_back(Clause{learnt, true, false});
          int ci = static_cast<int>(clauses.size() - 1);
          attach(ci);
          enqueue(learnt[0], ci);
          ++learned_count;
        }
        ++stats.learned;
        if (learned_count > options.learned_limit) reduce();
        if (options.restarts && static_cast<double>(conflicts_since_restart) >= restart_limit) {
          ++stats.restarts;
          conflicts_since_restart = 0;
          restart_limit = 100 * luby(2, ++restart_index);
          backtrack(0);
        }
        continue;
      }
      int v = pick_branch();
      if (v == 0) {
        result.satisfiable = true;
        result.model.assign(static_cast<std::size_t>(n) + 1, false);
        for (int u = 1; u <= n; ++u) result.model[static_cast<std::size_t>(u)] = value[u] == 1;
        return result;
      }
      ++stats.decisions;
      trail_lim.push_back(static_cast<int>(trail.size()));
      enqueue(2 * v + 1, -1);
    }
  }
};

Solver::Solver(int num_vars, SolverOptions options) : impl_(std::make_unique<Impl>(options)) {
  impl_->grow(num_vars);
}

Solver::~Solver() = default;

void Solver::reserve_vars(int num_vars) { impl_->grow(num_vars); }
int Solver::num_vars() const noexcept { return impl_->n; }
bool Solver::add_clause(std::span<const int> lits) { return impl_->add(lits); }
SolveResult Solver::solve() { return impl_->run(); }
const SolverStats& Solver::stats() const noexcept { return impl_->stats; }

SolveResult solve(const Cnf& cnf, SolverOptions options) {
  Solver s(cnf.num_vars, options);
  for (const auto& c : cnf.clauses)
    if (!s.add_clause(c)) break;
  return s.solve();
}

std::vector<Assignment> enumerate(const Cnf& cnf, int projected, std::size_t limit, SolverOptions options) {
  std::vector<Assignment> out;
  Solver s(cnf.num_vars, options);
  for (const auto& c : cnf.clauses)
    if (!s.add_clause(c)) return out;
  std::vector<int> block;
  for (;;) {
    SolveResult r = s.solve();
    if (!r.satisfiable) break;
    out.push_back(r.model);
    if (limit != 0 && out.size() >= limit) break;
    block.clear();
    for (int v = 1; v <= projected; ++v) block.push_back(r.model[static_cast<std::size_t>(v)] ? -v : v);
    if (!s.add_clause(block)) break;
  }
  return out;
}

bool satisfies(const Cnf& cnf, const Assignment& model) {
  for (const auto& c : cnf.clauses) {
    bool ok = false;
    for (int l : c) {
      auto v = static_cast<std::size_t>(std::abs(l));
      if (v < model.size() && model[v] == (l > 0)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

}  // namespace lazykb::sat
