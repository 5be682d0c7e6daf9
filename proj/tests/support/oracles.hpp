// Independent reference implementations used by the test suites. None of
// them touch the engine.
#pragma once

#include <chrono>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Edge = std::pair<int, int>;

inline std::vector<std::vector<bool>> floyd_warshall(int n, const std::vector<Edge>& edges) {
  std::vector<std::vector<bool>> r(static_cast<std::size_t>(n), std::vector<bool>(static_cast<std::size_t>(n)));
  for (auto [a, b] : edges) r[a][b] = true;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (r[i][k])
        for (int j = 0; j < n; ++j)
          if (r[k][j]) r[i][j] = true;
  return r;
}

class UnionFind {
 public:
  explicit UnionFind(int n) : parent_(static_cast<std::size_t>(n)), size_(static_cast<std::size_t>(n), 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
  }
  int size_of(int x) { return size_[find(x)]; }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

inline std::vector<int> component_sizes(int n, const std::vector<Edge>& edges) {
  UnionFind uf(n);
  for (auto [a, b] : edges) uf.unite(a, b);
  std::vector<int> sizes;
  for (int v = 0; v < n; ++v)
    if (uf.find(v) == v) sizes.push_back(uf.size_of(v));
  return sizes;
}

inline bool is_tree(int n, const std::vector<Edge>& edges) {
  return component_sizes(n, edges).size() == 1 && static_cast<int>(edges.size()) == n - 1;
}

// Undirected simple graph on 0..n-1 as pairs (a, b) with a < b.
inline std::vector<Edge> random_graph(std::mt19937_64& rng, int n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> out;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (coin(rng)) out.push_back({a, b});
  return out;
}

inline std::vector<Edge> random_digraph(std::mt19937_64& rng, int n, double p) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> out;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (coin(rng)) out.push_back({a, b});
  return out;
}

// Random labelled tree (random parent for each node after the first).
inline std::vector<Edge> random_tree(std::mt19937_64& rng, int n) {
  std::vector<Edge> out;
  for (int v = 1; v < n; ++v) {
    int p = std::uniform_int_distribution<int>(0, v - 1)(rng);
    out.push_back({p, v});
  }
  return out;
}

// CNF as bitmasks over at most 32 variables: a clause holds under
// assignment `a` when (a & pos) | (~a & neg) is nonzero.
struct MaskClause {
  std::uint32_t pos = 0;
  std::uint32_t neg = 0;
};

inline std::vector<MaskClause> to_masks(const std::vector<std::vector<int>>& clauses) {
  std::vector<MaskClause> out;
  for (const auto& c : clauses) {
    MaskClause m;
    for (int lit : c) (lit > 0 ? m.pos : m.neg) |= 1u << (std::abs(lit) - 1);
    out.push_back(m);
  }
  return out;
}

inline bool mask_satisfies(const std::vector<MaskClause>& cnf, std::uint32_t a) {
  for (const auto& c : cnf)
    if (((a & c.pos) | (~a & c.neg)) == 0) return false;
  return true;
}

inline bool brute_force_sat(int n, const std::vector<std::vector<int>>& clauses) {
  auto cnf = to_masks(clauses);
  for (std::uint64_t a = 0; a < (1ull << n); ++a)
    if (mask_satisfies(cnf, static_cast<std::uint32_t>(a))) return true;
  return false;
}

inline std::uint64_t brute_force_count(int n, const std::vector<std::vector<int>>& clauses) {
  auto cnf = to_masks(clauses);
  std::uint64_t count = 0;
  for (std::uint64_t a = 0; a < (1ull << n); ++a) count += mask_satisfies(cnf, static_cast<std::uint32_t>(a));
  return count;
}

inline std::vector<std::vector<int>> random_3cnf(std::mt19937_64& rng, int n, int m) {
  std::uniform_int_distribution<int> var(1, n);
  std::bernoulli_distribution sign(0.5);
  std::vector<std::vector<int>> out;
  for (int i = 0; i < m; ++i) {
    std::vector<int> c;
    while (c.size() < 3) {
      int v = var(rng);
      bool dup = false;
      for (int l : c) dup = dup || std::abs(l) == v;
      if (!dup) c.push_back(sign(rng) ? v : -v);
    }
    out.push_back(c);
  }
  return out;
}

// Sudoku rules checked directly on an 81-digit grid.
inline bool sudoku_valid(const std::vector<int>& g) {
  for (int i = 0; i < 81; ++i) {
    if (g[i] < 1 || g[i] > 9) return false;
    for (int j = i + 1; j < 81; ++j) {
      bool row = i / 9 == j / 9, col = i % 9 == j % 9;
      bool box = i / 27 == j / 27 && (i % 9) / 3 == (j % 9) / 3;
      if ((row || col || box) && g[i] == g[j]) return false;
    }
  }
  return true;
}

inline std::vector<int> parse_grid(const std::string& s) {
  std::vector<int> g;
  for (char c : s) g.push_back(c == '.' ? 0 : c - '0');
  return g;
}

// Generate-and-test baseline: enumerates every filling of the blank cells
// in odometer order and tests each complete grid. Returns true with the
// solution when one is found before the deadline.
inline bool naive_sudoku(std::vector<int> grid, std::chrono::steady_clock::duration budget, std::vector<int>& out) {
  auto deadline = std::chrono::steady_clock::now() + budget;
  std::vector<int> blanks;
  for (int i = 0; i < 81; ++i)
    if (grid[i] == 0) blanks.push_back(i);
  for (int b : blanks) grid[b] = 1;
  std::uint64_t tries = 0;
  while (true) {
    if (sudoku_valid(grid)) {
      out = grid;
      return true;
    }
    if ((++tries & 0xfff) == 0 && std::chrono::steady_clock::now() > deadline) return false;
    std::size_t k = 0;
    while (k < blanks.size() && grid[blanks[k]] == 9) grid[blanks[k++]] = 1;
    if (k == blanks.size()) return false;
    ++grid[blanks[k]];
  }
}

}  // namespace oracle
