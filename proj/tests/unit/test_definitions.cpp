#include <doctest.h>

#include <random>

#include "../support/kbs.hpp"
#include "../support/oracles.hpp"
#include "lazykb/definitions.hpp"
#include "lazykb/error.hpp"
#include "lazykb/kb.hpp"

using namespace lazykb;

namespace {

struct TcFixture {
  Vocabulary vocab;
  Structure s;
  SymbolId node, g, tc;
  explicit TcFixture(int n, const std::vector<oracle::Edge>& edges) {
    node = vocab.add({"Node", SymbolKind::type, {}, {}});
    g = vocab.add(parse_typed_name("G(Node,Node)"));
    tc = vocab.add(parse_typed_name("TC(Node,Node)"));
    s.resize(vocab.size());
    s.set(node, TypeExtension(kbs::range(n)));
    s.set(g, normalize_interpretation(vocab, s, g, kbs::tuples(edges)));
  }
  Definition two_rules() const {
    std::vector<std::string> r{"lambda x,y: G(x,y)", "lambda x,y: any(G(x,z) and TC(z,y) for z in Node)"};
    return compile_definition(tc, r, vocab, &s);
  }
  Definition one_rule() const {
    std::vector<std::string> r{"lambda x,y: G(x,y) or any(G(x,z) and TC(z,y) for z in Node)"};
    return compile_definition(tc, r, vocab, &s);
  }
};

Relation reach_relation(int n, const std::vector<oracle::Edge>& edges) {
  auto r = oracle::floyd_warshall(n, edges);
  Relation out;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (r[i][j]) out.insert({i, j});
  return out;
}

}  // namespace

TEST_CASE("definition compilation") {
  TcFixture fx(3, {{0, 1}});
  Definition two = fx.two_rules();
  CHECK(two.rules.size() == 2);
  CHECK(two.parameters == std::set<SymbolId>{fx.g});
  Definition one = fx.one_rule();
  CHECK(one.rules.size() == 1);
  std::vector<std::string> wrong_arity{"lambda x: G(x,x)"};
  CHECK_THROWS_AS(compile_definition(fx.tc, wrong_arity, fx.vocab, &fx.s), TypeError);
}

TEST_CASE("lfp examples") {
  TcFixture chain(4, {{1, 2}, {2, 3}});
  Relation tc = lfp_evaluate(chain.two_rules(), chain.vocab, chain.s);
  CHECK(tc == Relation{{1, 2}, {2, 3}, {1, 3}});

  TcFixture empty(4, {});
  CHECK(lfp_evaluate(empty.two_rules(), empty.vocab, empty.s).empty());
}

TEST_CASE("lfp equals Floyd-Warshall reachability") {
  std::mt19937_64 rng(99);
  for (int round = 0; round < 200; ++round) {
    int n = std::uniform_int_distribution<int>(1, 8)(rng);
    auto edges = oracle::random_digraph(rng, n, std::uniform_real_distribution<double>(0.05, 0.4)(rng));
    TcFixture fx(n, edges);
    REQUIRE(lfp_evaluate(fx.two_rules(), fx.vocab, fx.s) == reach_relation(n, edges));
  }
}

TEST_CASE("property: lfp output is a minimal fixpoint") {
  std::mt19937_64 rng(8);
  for (int round = 0; round < 60; ++round) {
    int n = std::uniform_int_distribution<int>(1, 4)(rng);  // head domain <= 16 tuples
    auto edges = oracle::random_digraph(rng, n, 0.3);
    TcFixture fx(n, edges);
    Definition d = fx.one_rule();
    Relation out = lfp_evaluate(d, fx.vocab, fx.s);
    CHECK(derive_once(d, fx.vocab, fx.s, out) == out);
    for (const auto& t : out) {
      Relation smaller = out;
      smaller.erase(t);
      CHECK(derive_once(d, fx.vocab, fx.s, smaller) != smaller);
    }
  }
}

TEST_CASE("two-rule and one-rule forms agree on every digraph with at most 5 nodes") {
  // n = 5 has 2^25 digraphs; exhaustive up to 4 nodes, 3000 sampled at 5.
  for (int n = 0; n <= 4; ++n) {
    std::size_t pairs = static_cast<std::size_t>(n * n);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs); ++mask) {
      std::vector<oracle::Edge> edges;
      for (std::size_t k = 0; k < pairs; ++k)
        if (mask >> k & 1) edges.push_back({static_cast<int>(k) / n, static_cast<int>(k) % n});
      TcFixture fx(n, edges);
      REQUIRE(lfp_evaluate(fx.two_rules(), fx.vocab, fx.s) == lfp_evaluate(fx.one_rule(), fx.vocab, fx.s));
    }
  }
  std::mt19937_64 rng(55);
  std::uniform_int_distribution<std::uint64_t> masks(0, (std::uint64_t{1} << 25) - 1);
  for (int round = 0; round < 3000; ++round) {
    std::uint64_t mask = masks(rng);
    std::vector<oracle::Edge> edges;
    for (int k = 0; k < 25; ++k)
      if (mask >> k & 1) edges.push_back({k / 5, k % 5});
    TcFixture fx(5, edges);
    REQUIRE(lfp_evaluate(fx.two_rules(), fx.vocab, fx.s) == lfp_evaluate(fx.one_rule(), fx.vocab, fx.s));
  }
}

TEST_CASE("naive and semi-naive iteration agree") {
  std::mt19937_64 rng(4);
  for (int round = 0; round < 150; ++round) {
    int n = std::uniform_int_distribution<int>(1, 9)(rng);
    auto edges = oracle::random_digraph(rng, n, 0.25);
    TcFixture fx(n, edges);
    for (const Definition& d : {fx.one_rule(), fx.two_rules()}) {
      REQUIRE(lfp_evaluate(d, fx.vocab, fx.s, FixpointStrategy::naive) ==
              lfp_evaluate(d, fx.vocab, fx.s, FixpointStrategy::semi_naive));
    }
  }
}

TEST_CASE("stratification") {
  KnowledgeBase kb;
  kb.type("T", std::vector<Value>{1, 2});
  kb.predicate("Base(T)", std::vector<Value>{1});
  kb.predicate("G(T,T)", std::vector<Tuple>{{1, 2}});
  kb.define("TC(T,T)", "lambda x,y: G(x,y) or any(G(x,z) and TC(z,y) for z in T)");
  kb.predicate("Q(T)");
  kb.define("P(T)", "lambda x: not Q(x)");
  kb.define("Q(T)", "lambda x: Base(x)");
  auto strata = stratify(kb.definitions(), kb.vocabulary());
  REQUIRE(strata.size() == 3);
  auto head_of = [&](const Stratum& s) { return kb.vocabulary()[kb.definitions()[s.members[0]].head].name; };
  std::vector<std::string> order;
  for (const auto& s : strata) order.push_back(head_of(s));
  auto pos = [&](const std::string& n) { return std::find(order.begin(), order.end(), n) - order.begin(); };
  CHECK(pos("Q") < pos("P"));
  for (const auto& s : strata) CHECK(s.recursive == (head_of(s) == "TC"));
  CHECK(kb.satisfiable());
  CHECK(kb.relation("P").tuples() == std::vector<Tuple>{{2}});

  KnowledgeBase bad;
  bad.type("T", std::vector<Value>{1});
  CHECK_THROWS_WITH_AS(bad.define("P(T)", "lambda x: not P(x)"), doctest::Contains("non-stratified"),
                       UnsupportedError);
  CHECK_FALSE(bad.vocabulary().find("P").has_value());

  KnowledgeBase mutual;
  mutual.type("T", std::vector<Value>{1});
  mutual.predicate("A(T)");
  mutual.predicate("B2(T)");
  mutual.define("A2(T)", "lambda x: A(x) or B2(x)");
  CHECK_THROWS_AS(mutual.define("B2(T)", "lambda x: not A2(x)"), UnsupportedError);
}

TEST_CASE("definition registration rules") {
  KnowledgeBase kb;
  kb.type("Node", kbs::range(3));
  kb.predicate("Adjacent(Node,Node)", std::vector<Tuple>{{0, 1}});
  kb.define("Edge(Node,Node)", "lambda x,y: Adjacent(x,y) or Adjacent(y,x)");
  CHECK(kb.definitions().back().parameters == std::set<SymbolId>{kb.require("Adjacent")});
  CHECK_THROWS_AS(kb.define("Edge(Node,Node)", "lambda x,y: Adjacent(x,y)"), DomainError);
  CHECK_THROWS_AS(kb.define("Adjacent(Node,Node)", "lambda x,y: x == y"), DomainError);
  CHECK_THROWS_AS(kb.define("Other(Node)", "lambda x,y: x == y"), TypeError);
  CHECK_THROWS_AS(kb.assign("Edge", std::vector<Tuple>{}), DomainError);

  // A declared but uninterpreted predicate may be defined.
  kb.predicate("Loop(Node,Node)");
  CHECK_NOTHROW(kb.define("Loop(Node, Node)", "lambda x,y: x == y"));
  CHECK_THROWS_AS(kb.define("Loop2(Node)", std::vector<std::string>{}), DomainError);

  // Paired form groups rules by head.
  kb.define({{"TC(Node,Node)", "lambda x,y: Edge(x,y)"},
             {"TC(Node,Node)", "lambda x,y: any(Edge(x,z) and TC(z,y) for z in Node)"}});
  CHECK(kb.definitions().back().rules.size() == 2);
  CHECK(kb.relation("TC").contains(Tuple{1, 0}));
  CHECK(kb.relation("TC").contains(Tuple{0, 0}));
  CHECK_FALSE(kb.relation("TC").contains(Tuple{2, 2}));
}

TEST_CASE("a later stratum may negate a recursive head over unknown parameters") {
  KnowledgeBase kb;
  kb.type("T", kbs::range(2));
  kb.predicate("G(T,T)");
  kb.define("R(T)", "lambda x: any(G(y,x) for y in T) or any(G(x,y) and R(y) for y in T)");
  kb.constraint("R(0)");
  CHECK(kb.satisfiable());
  kb.define("NotR(T)", "lambda x: not R(x)");
  kb.constraint("NotR(1)");
  CHECK(kb.satisfiable());
}
