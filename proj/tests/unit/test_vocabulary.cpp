#include <doctest.h>

#include <random>

#include "lazykb/error.hpp"
#include "lazykb/evaluate.hpp"
#include "lazykb/kb.hpp"
#include "lazykb/structure.hpp"
#include "lazykb/typecheck.hpp"
#include "lazykb/vocabulary.hpp"

using namespace lazykb;

TEST_CASE("values: kinds never compare equal and integers order first") {
  CHECK(Value(1) != Value("1"));
  CHECK(Value(5) < Value("a"));
  CHECK(Value(-3) < Value(2));
  CHECK(Value("Belgium") < Value("Holland"));
  CHECK(Value("x y").to_string(true) == "\"x y\"");
  CHECK(Value("a\"b").to_string(true) == "\"a\\\"b\"");
  CHECK(to_string(Tuple{1, "a"}) == "(1,a)");
  CHECK(is_identifier("Belgium"));
  CHECK_FALSE(is_identifier("two words"));
  CHECK_FALSE(is_identifier("9lives"));
}

TEST_CASE("parse_typed_name shapes") {
  SymbolDecl p = parse_typed_name("Border(Area,Area)");
  CHECK(p.kind == SymbolKind::predicate);
  CHECK(p.arg_sorts == std::vector<std::string>{"Area", "Area"});

  SymbolDecl f = parse_typed_name("Coloring(Area): Color");
  CHECK(f.kind == SymbolKind::function);
  CHECK(f.arg_sorts == std::vector<std::string>{"Area"});
  CHECK(f.ret_sort == "Color");

  SymbolDecl c = parse_typed_name("C : Color");
  CHECK(c.kind == SymbolKind::constant);
  CHECK(c.arg_sorts.empty());
  CHECK(c.ret_sort == "Color");

  CHECK(parse_typed_name("  Border ( Area , Area ) ") == p);
  CHECK(parse_typed_name("Coloring(Area):Color") == f);
  CHECK(parse_typed_name("Given(Cell):Number").kind == SymbolKind::function);
  CHECK(parse_typed_name("Flag()").arg_sorts.empty());
  CHECK(parse_typed_name("Flag()").kind == SymbolKind::predicate);
}

TEST_CASE("parse_typed_name errors carry positions") {
  CHECK_THROWS_AS(parse_typed_name("Border(Area,"), ParseError);
  CHECK_THROWS_AS(parse_typed_name("Border(Area Area)"), ParseError);
  CHECK_THROWS_AS(parse_typed_name("F(A): "), ParseError);
  CHECK_THROWS_AS(parse_typed_name("Bare"), ParseError);
  try {
    parse_typed_name("P(A,,B)");
    FAIL("no error");
  } catch (const ParseError& e) {
    CHECK(e.position().column == 5);
  }
}

TEST_CASE("signatures print in declaration syntax") {
  CHECK(parse_typed_name("Border(Area,Area)").signature() == "Border(Area,Area)");
  CHECK(parse_typed_name("Coloring(Area) : Color").signature() == "Coloring(Area): Color");
  CHECK(parse_typed_name("C:Color").signature() == "C : Color");
}

TEST_CASE("vocabulary declarations") {
  Vocabulary v;
  SymbolId area = v.add({"Area", SymbolKind::type, {}, {}});
  v.add(parse_typed_name("Border(Area,Area)"));
  CHECK_THROWS_AS(v.add({"Area", SymbolKind::type, {}, {}}), DomainError);
  CHECK_THROWS_AS(v.add(parse_typed_name("Bad(Nope)")), TypeError);
  CHECK_THROWS_AS(v.add(parse_typed_name("F(Area): Nope")), TypeError);
  CHECK(v.find("Border").has_value());
  CHECK(v.arg_sorts(*v.find("Border")) == std::vector<SymbolId>{area, area});
  CHECK_FALSE(v.find("Missing").has_value());
  CHECK_THROWS_AS(v.require("Missing"), TypeError);
}

TEST_CASE("declare with interpretations") {
  KnowledgeBase kb;
  kb.type("Color", std::vector<Value>{"Blue", "Red", "Green"});
  CHECK(kb.structure().type(kb.require("Color"))->size() == 3);

  std::vector<Value> cells;
  for (int i = 0; i < 81; ++i) cells.emplace_back(i);
  kb.type("Cell", cells);
  CHECK(kb.structure().type(kb.require("Cell"))->size() == 81);
  CHECK(kb.structure().type(kb.require("Cell"))->all_integers());

  kb.type("Area", std::vector<Value>{"Belgium", "Holland", "Germany"});
  kb.predicate("Border(Area,Area)");
  CHECK_FALSE(kb.structure().interprets(kb.require("Border")));
  CHECK_THROWS_AS(kb.predicate("Border(Area,Area)"), DomainError);
  CHECK_THROWS_AS(kb.predicate("Border2(Nowhere,Area)"), TypeError);
  CHECK_THROWS_AS(kb.predicate("Coloring(Area): Color"), TypeError);
  CHECK_THROWS_AS(kb.function("Border3(Area)"), TypeError);

  // A bad interpretation leaves no declaration behind.
  CHECK_THROWS_AS(kb.predicate("InArea(Area)", std::vector<Value>{"Mars"}), DomainError);
  CHECK_FALSE(kb.vocabulary().find("InArea").has_value());
}

TEST_CASE("type extensions are ordered and duplicate-free") {
  TypeExtension t({"b", "a", "b", 3});
  CHECK(t.size() == 3);
  CHECK(t.values() == std::vector<Value>{"b", "a", 3});
  CHECK(t.index_of("a") == 1u);
  CHECK_FALSE(t.add("a"));
  CHECK(t.remove("b"));
  CHECK(t.values() == std::vector<Value>{"a", 3});
  CHECK(t.index_of(3) == 1u);
}

TEST_CASE("normalize_interpretation") {
  Vocabulary v;
  Structure s;
  SymbolId area = v.add({"Area", SymbolKind::type, {}, {}});
  SymbolId color = v.add({"Color", SymbolKind::type, {}, {}});
  s.resize(v.size());
  s.set(area, normalize_interpretation(v, s, area, std::vector<Value>{"Belgium", "Holland"}));
  s.set(color, normalize_interpretation(v, s, color, std::vector<Value>{"Red", "Blue"}));
  SymbolId in = v.add(parse_typed_name("In(Area)"));
  SymbolId border = v.add(parse_typed_name("Border(Area,Area)"));
  SymbolId col = v.add(parse_typed_name("Coloring(Area): Color"));
  SymbolId c = v.add(parse_typed_name("C : Color"));
  s.resize(v.size());

  SUBCASE("unary predicates accept bare values") {
    Extension e = normalize_interpretation(v, s, in, std::vector<Value>{"Belgium"});
    CHECK(std::get<Relation>(e) == Relation{{"Belgium"}});
  }
  SUBCASE("duplicates collapse") {
    Extension e = normalize_interpretation(v, s, border,
                                           std::vector<Tuple>{{"Belgium", "Holland"}, {"Belgium", "Holland"}});
    CHECK(std::get<Relation>(e).size() == 1);
  }
  SUBCASE("arity and sort checks") {
    CHECK_THROWS_AS(normalize_interpretation(v, s, border, std::vector<Tuple>{{"Belgium"}}), TypeError);
    CHECK_THROWS_AS(normalize_interpretation(v, s, border, std::vector<Tuple>{{"Belgium", "Mars"}}), DomainError);
  }
  SUBCASE("function tables must be total") {
    std::vector<std::pair<Value, Value>> full{{"Belgium", "Red"}, {"Holland", "Blue"}};
    CHECK(std::get<FunctionTable>(normalize_interpretation(v, s, col, full)).size() == 2);
    std::vector<std::pair<Value, Value>> partial{{"Belgium", "Red"}};
    try {
      normalize_interpretation(v, s, col, partial);
      FAIL("expected an error");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("non-total") != std::string::npos);
    }
    std::vector<std::pair<Value, Value>> conflicting{{"Belgium", "Red"}, {"Belgium", "Blue"}, {"Holland", "Red"}};
    CHECK_THROWS_AS(normalize_interpretation(v, s, col, conflicting), DomainError);
    std::vector<std::pair<Value, Value>> bad_value{{"Belgium", "Red"}, {"Holland", "Pink"}};
    CHECK_THROWS_AS(normalize_interpretation(v, s, col, bad_value), DomainError);
  }
  SUBCASE("constants are 0-ary tables") {
    const auto& t = std::get<FunctionTable>(normalize_interpretation(v, s, c, Value("Red")));
    CHECK(t.size() == 1);
    CHECK(t.begin()->first.empty());
    CHECK(t.begin()->second == Value("Red"));
  }
}

TEST_CASE("property: normalize_interpretation is idempotent") {
  std::mt19937_64 rng(11);
  Vocabulary v;
  Structure s;
  SymbolId a = v.add({"A", SymbolKind::type, {}, {}});
  SymbolId b = v.add({"B", SymbolKind::type, {}, {}});
  s.resize(v.size());
  s.set(a, TypeExtension({"p", "q", "r"}));
  s.set(b, TypeExtension({0, 1, 2, 3}));
  SymbolId rel = v.add(parse_typed_name("R(A,B)"));
  SymbolId un = v.add(parse_typed_name("U(B)"));
  SymbolId fn = v.add(parse_typed_name("F(A,B): B"));
  s.resize(v.size());
  auto pick = [&](const TypeExtension& t) {
    return t.values()[std::uniform_int_distribution<std::size_t>(0, t.size() - 1)(rng)];
  };
  for (int round = 0; round < 200; ++round) {
    std::vector<Tuple> tuples;
    int n = std::uniform_int_distribution<int>(0, 15)(rng);
    for (int i = 0; i < n; ++i) tuples.push_back({pick(*s.type(a)), pick(*s.type(b))});
    Extension once = normalize_interpretation(v, s, rel, tuples);
    CHECK(normalize_interpretation(v, s, rel, to_raw(once, v[rel])) == once);

    std::vector<Value> bare;
    for (int i = 0; i < n; ++i) bare.push_back(pick(*s.type(b)));
    Extension u = normalize_interpretation(v, s, un, bare);
    CHECK(normalize_interpretation(v, s, un, to_raw(u, v[un])) == u);

    std::vector<std::pair<Tuple, Value>> pairs;
    for_each_argument_tuple(v, s, fn, [&](const Tuple& t) { pairs.emplace_back(t, pick(*s.type(b))); });
    std::shuffle(pairs.begin(), pairs.end(), rng);
    Extension f = normalize_interpretation(v, s, fn, pairs);
    CHECK(normalize_interpretation(v, s, fn, to_raw(f, v[fn])) == f);
  }
}

TEST_CASE("for_each_argument_tuple walks the sort product in order") {
  Vocabulary v;
  Structure s;
  SymbolId a = v.add({"A", SymbolKind::type, {}, {}});
  SymbolId e = v.add({"E", SymbolKind::type, {}, {}});
  s.resize(v.size());
  s.set(a, TypeExtension({1, 2}));
  s.set(e, TypeExtension());
  SymbolId r = v.add(parse_typed_name("R(A,A)"));
  SymbolId z = v.add(parse_typed_name("Z()"));
  SymbolId re = v.add(parse_typed_name("RE(A,E)"));
  s.resize(v.size());
  std::vector<Tuple> seen;
  for_each_argument_tuple(v, s, r, [&](const Tuple& t) { seen.push_back(t); });
  CHECK(seen == std::vector<Tuple>{{1, 1}, {1, 2}, {2, 1}, {2, 2}});
  int zero = 0, empty = 0;
  for_each_argument_tuple(v, s, z, [&](const Tuple& t) { zero += t.empty(); });
  for_each_argument_tuple(v, s, re, [&](const Tuple&) { ++empty; });
  CHECK(zero == 1);
  CHECK(empty == 0);
  CHECK(domain_size(v, s, r) == 4);
}

TEST_CASE("property: total structures evaluate every constraint to a definite boolean") {
  std::mt19937_64 rng(5);
  KnowledgeBase kb;
  kb.type("A", std::vector<Value>{"x", "y", "z"});
  kb.predicate("P(A,A)");
  kb.function("F(A): A");
  const char* sentences[] = {
      "all(P(a,b) for a in A for b in A if F(a) == b)",
      "any(not P(F(a), a) for a in A)",
      "all(any(P(a,b) or F(b) == a for b in A) for a in A)",
      "not any(P(a,a) for a in A) or all(F(a) != a for a in A)",
  };
  std::vector<TypedFormula> fs;
  for (const char* s : sentences) fs.push_back(compile_sentence(s, kb.vocabulary(), &kb.structure()));
  std::bernoulli_distribution coin(0.4);
  std::uniform_int_distribution<int> idx(0, 2);
  const std::vector<Value> dom{"x", "y", "z"};
  for (int round = 0; round < 100; ++round) {
    Structure s = kb.structure();
    Relation p;
    for (const auto& a : dom)
      for (const auto& b : dom)
        if (coin(rng)) p.insert({a, b});
    FunctionTable f;
    for (const auto& a : dom) f[{a}] = dom[static_cast<std::size_t>(idx(rng))];
    s.set(kb.require("P"), p);
    s.set(kb.require("F"), f);
    StructureInterpretation in(kb.vocabulary(), s);
    for (const auto& tf : fs) {
      Env env(tf.slot_count);
      auto r = evaluate(*tf.expr, in, env);
      CHECK(std::holds_alternative<bool>(r));
    }
  }
}
