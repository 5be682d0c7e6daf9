#include <doctest.h>

#include <functional>
#include <random>

#include "../support/kbs.hpp"
#include "../support/oracles.hpp"
#include "../support/random_theory.hpp"
#include "lazykb/evaluate.hpp"
#include "lazykb/grounder.hpp"
#include "lazykb/kb.hpp"

using namespace lazykb;

namespace {

std::size_t count_with_depth(const KnowledgeBase& kb, std::optional<std::size_t> depth) {
  GroundOptions opts;
  opts.unfold_depth = depth;
  auto p = ground_theory(kb.vocabulary(), kb.structure(), kb.theory(), kb.definitions(), opts);
  if (p.trivially_false) return 0;
  return sat::enumerate(p.cnf, p.atom_count(), 0).size();
}

}  // namespace

TEST_CASE("coloring grounds to difference and consistency clauses") {
  auto kb = kbs::coloring();
  auto diff = ground_constraint(kb->theory()[0], kb->vocabulary(), kb->structure());
  CHECK(diff.size() == 9);
  for (const auto& c : diff) {
    CHECK(c.size() == 2);
    CHECK(c[0] < 0);
    CHECK(c[1] < 0);
  }
  auto cons = ground_function_consistency(kb->require("Coloring"), kb->vocabulary(), kb->structure());
  int alo = 0, amo = 0;
  for (const auto& c : cons) (c.size() == 3 ? alo : amo) += 1;
  CHECK(alo == 3);
  CHECK(amo == 9);

  auto p = kb->ground();
  CHECK(p.atom_count() == 9);
  CHECK(p.cnf.num_vars == 9);
  CHECK(p.cnf.clauses.size() == 21);
  CHECK(p.atoms[0].to_string(kb->vocabulary()) == "Coloring(Belgium)=Blue");
  auto v = p.variable(kb->vocabulary(), GroundAtom{GroundAtom::Kind::fun_cell, kb->require("Coloring"),
                                                    Tuple{"Holland"}, Value("Red")});
  REQUIRE(v.has_value());
  CHECK(p.atoms[*v - 1].to_string(kb->vocabulary()) == "Coloring(Holland)=Red");
}

TEST_CASE("consistency edge cases") {
  KnowledgeBase kb;
  kb.type("One", std::vector<Value>{"only"});
  kb.type("Empty", std::vector<Value>{});
  kb.type("A", std::vector<Value>{1, 2});
  kb.constant("C : One");
  auto unit = ground_function_consistency(kb.require("C"), kb.vocabulary(), kb.structure());
  REQUIRE(unit.size() == 1);
  CHECK(unit[0].size() == 1);
  CHECK(kb.satisfiable());
  CHECK(kb.function_view("C")() == Value("only"));

  kb.function("F(A): Empty");
  CHECK_FALSE(kb.satisfiable());
  kb.assign("A", std::vector<Value>{});
  CHECK(kb.satisfiable());  // no arguments, so F is the empty function
}

TEST_CASE("known subformulas fold away") {
  KnowledgeBase kb;
  kb.type("T", kbs::range(4));
  kb.predicate("K(T)", std::vector<Value>{0, 2});
  kb.predicate("P(T)");
  kb.constraint("all(K(x) or P(x) for x in T)");
  kb.constraint("any(K(x) for x in T) or P(0)");
  kb.constraint("all(x == x for x in T)");
  auto p = kb.ground();
  CHECK(p.cnf.clauses.size() == 2);  // units P(1), P(3)
  for (const auto& c : p.cnf.clauses) CHECK(c.size() == 1);

  kb.constraint("any(K(x) and x == 3 for x in T)");
  CHECK(kb.ground().trivially_false);
  CHECK_FALSE(kb.satisfiable());
}

TEST_CASE("definitions over known parameters produce no clauses") {
  auto kb = kbs::graph(6, {{0, 1}, {1, 2}, {3, 4}}, "g");
  kbs::add_tc(*kb, "Edge", "Path");
  kb->constraint("Path(0,2)");
  auto p = kb->ground();
  CHECK(p.atom_count() == 0);
  CHECK(p.cnf.clauses.empty());
  CHECK_FALSE(p.trivially_false);
  REQUIRE(p.known.relation(kb->require("Path")) != nullptr);
  CHECK(p.known.relation(kb->require("Path"))->size() == 9 + 4);
  CHECK(kb->satisfiable());
  CHECK(kb->solver_invocations() == 1);
}

TEST_CASE("sudoku exclusion clauses") {
  auto kb = kbs::sudoku();
  kbs::set_given(*kb, oracle::parse_grid(kbs::kEulerGrid01));
  auto p = kb->ground();
  CHECK(p.atom_count() == 81 * 10);
  // 1620 ordered pairs of distinct cells sharing a unit, times 10 values.
  auto clauses = ground_constraint(kb->theory()[0], kb->vocabulary(), p.known);
  CHECK(clauses.size() == 16200);
  for (const auto& c : clauses) CHECK(c.size() == 2);
  CHECK(kb->satisfiable());
  CHECK(oracle::sudoku_valid(kbs::solution(*kb)));
}

TEST_CASE("recursive definition over an unknown graph matches brute force") {
  KnowledgeBase kb;
  kb.type("Node", kbs::range(3));
  kb.predicate("G(Node,Node)");
  kbs::add_tc(kb, "G", "TC");
  kb.constraint("all(TC(x,y) for x in Node for y in Node if x != y)");
  kb.constraint("not any(G(x,x) for x in Node)");

  auto p = kb.ground();
  CHECK(p.defined_levels.at(kb.require("TC")) == 9);

  // Strongly connected loop-free digraphs on 3 labelled nodes.
  auto pairs = rtheory::product(3, 2);
  std::size_t expected = 0;
  for (std::uint64_t mask = 0; mask < 512; ++mask) {
    std::vector<oracle::Edge> edges;
    bool loop = false;
    for (std::size_t i = 0; i < 9; ++i)
      if (mask >> i & 1) {
        int a = static_cast<int>(pairs[i][0].as_int()), b = static_cast<int>(pairs[i][1].as_int());
        loop = loop || a == b;
        edges.push_back({a, b});
      }
    if (loop) continue;
    auto r = oracle::floyd_warshall(3, edges);
    bool strong = true;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) strong = strong && (a == b || r[a][b]);
    expected += strong;
  }
  CHECK(expected == 18);
  CHECK(count_with_depth(kb, std::nullopt) == expected);
  CHECK(count_with_depth(kb, 10) == expected);
  CHECK(kb.models(0).size() == expected);
  for (const auto& m : kb.models(0)) CHECK(kb.check(m).empty());
}

TEST_CASE("unfolding depth bounds the derivable paths") {
  KnowledgeBase kb;
  kb.type("Node", kbs::range(4));
  kb.predicate("G(Node,Node)");
  kbs::add_tc(kb, "G", "TC");
  kb.constraint("TC(0,3)");
  kb.constraint("not G(0,3) and not G(0,2) and not G(1,3)");
  kb.constraint("not any(G(x,y) for x in Node for y in Node if y < x)");
  // Only 0 -> 1 -> 2 -> 3 reaches; it needs three layers.
  CHECK(count_with_depth(kb, 1) == 0);
  CHECK(count_with_depth(kb, 2) == 0);
  std::size_t at3 = count_with_depth(kb, 3);
  CHECK(at3 > 0);
  CHECK(count_with_depth(kb, 4) == at3);
  CHECK(count_with_depth(kb, std::nullopt) == at3);
}

TEST_CASE("decoding enforces exactly one value per cell") {
  auto kb = kbs::coloring();
  auto p = kb->ground();
  sat::Assignment none(p.cnf.num_vars + 1, false);
  CHECK_THROWS_AS(decode_model(kb->vocabulary(), p, none), Error);
  sat::Assignment two = none;
  two[1] = two[2] = true;
  two[4] = two[7] = true;
  CHECK_THROWS_AS(decode_model(kb->vocabulary(), p, two), Error);
  auto r = sat::solve(p.cnf);
  REQUIRE(r.satisfiable);
  Structure m = decode_model(kb->vocabulary(), p, r.model);
  CHECK(m.function(kb->require("Coloring"))->size() == 3);
  CHECK(kb->check(m).empty());
}

TEST_CASE("property: grounded models equal exhaustive enumeration") {
  std::mt19937_64 rng(31337);
  for (int round = 0; round < 300; ++round) {
    auto in = rtheory::make(rng, round);
    INFO("round " << round << ": " << in.kb->theory().back().source);
    REQUIRE(rtheory::discrepancies(in) == 0);
  }
}
