#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "../support/cli.hpp"
#include "../support/kbs.hpp"
#include "lazykb/dump.hpp"
#include "lazykb/error.hpp"
#include "lazykb/grounder.hpp"
#include "lazykb/kb.hpp"
#include "lazykb/script.hpp"

using namespace lazykb;
namespace fs = std::filesystem;

namespace {

using cli::sample;
using cli::slurp;

cli::Result run_cli(const std::string& args) { return cli::run(args); }

fs::path scratch_dir() {
  fs::path d = fs::temp_directory_path() / "lazykb_cli_tests";
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("load the coloring script") {
  KnowledgeBase kb("color");
  load_script(kb, slurp(sample("coloring.kb")), "coloring.kb");
  CHECK(kb.relation("Area").size() == 3);
  CHECK(kb.relation("Border").size() == 3);
  CHECK(kb.theory().size() == 1);
  CHECK(kb.models(0).size() == 6);
}

TEST_CASE("script structure block forms") {
  KnowledgeBase kb;
  load_script(kb, R"(
vocabulary V {
  type Cell; type Name
  Given(Cell): Cell
  Pair(Cell, Cell)
  Only : Name
  Label(Name)   // unary
}
structure S : V {
  Cell = { 0..3 }
  Name = { a; "two words"; b }
  Given = { 0->1; 1->1; 2->3; 3->0 }
  Pair = { (0,1); (2,3) }
  Only = "two words"
  Label = { a }
}
define D : V {
  Sym(Cell, Cell) <- lambda x,y: Pair(x,y) or Pair(y,x).
}
theory T : V {
  Sym(1, 0).   # comment with a . inside
  all(Given(x) != 2 for x in Cell).
}
)");
  CHECK(kb.relation("Cell").size() == 4);
  CHECK(kb.relation("Name")("two words"));
  CHECK(kb.function_view("Given")[2] == Value(3));
  CHECK(kb.function_view("Only")() == Value("two words"));
  CHECK(kb.relation("Label")("a"));
  CHECK(kb.relation("Sym")(3, 2));
  CHECK(kb.theory().size() == 2);
  CHECK(kb.satisfiable());
}

TEST_CASE("script errors report the line") {
  KnowledgeBase kb;
  CHECK_THROWS_WITH_AS(load_script(kb, "vocabulary V {\n  type A\n  P(B)\n}\n", "bad.kb"),
                       doctest::Contains("bad.kb:3:"), ScriptError);
  KnowledgeBase kb2;
  CHECK_THROWS_WITH_AS(load_script(kb2, "vocabulary V {\n type A\n}\nstructure S : V {\n A = { 1; 2 \n", "x.kb"),
                       doctest::Contains("x.kb:"), ScriptError);
  KnowledgeBase kb3;
  CHECK_THROWS_WITH_AS(load_script(kb3,
                                   "vocabulary V {\n type A\n P(A)\n}\nstructure S : V {\n A = {1}\n}\n"
                                   "theory T : V {\n all(P(x) for x in A\n}\n",
                                   "t.kb"),
                       doctest::Contains("t.kb:9:"), ScriptError);
  KnowledgeBase kb4;
  CHECK_THROWS_AS(load_script(kb4, "nonsense { }"), ScriptError);
}

TEST_CASE("dump format") {
  auto kb = kbs::coloring();
  kb->constant("C : Color", Value("Red"));
  kb->define("Sym(Area, Area)", "lambda a,b: Border(a,b) or Border(b,a)");
  const auto& s = kb->structure();
  CHECK(format_extension(kb->vocabulary(), kb->require("Area"), *s.extension(kb->require("Area"))) ==
        "Area = { Belgium; Holland; Germany; }");
  CHECK(format_extension(kb->vocabulary(), kb->require("C"), *s.extension(kb->require("C"))) == "C = \"Red\"");
  CHECK(format_value(Value("two words")) == "\"two words\"");
  CHECK(format_value(Value(-3)) == "-3");
  FunctionTable ft{{{"Belgium"}, "Red"}, {{"Germany"}, "Blue"}};
  CHECK(format_extension(kb->vocabulary(), kb->require("Coloring"), ft) == "Coloring = {\"Belgium\"->\"Red\";\"Germany\"->\"Blue\"}");

  std::string dump = dump_kb(*kb);
  CHECK(dump.find("vocabulary V {") != std::string::npos);
  CHECK(dump.find("Coloring(Area): Color") != std::string::npos);
  CHECK(dump.find("all(Coloring(a) != Coloring(b) for (a,b) in Border).") != std::string::npos);
  CHECK(dump.find("Sym(Area,Area) <- lambda a,b: Border(a,b) or Border(b,a).") != std::string::npos);

  // A dump reloads into an equivalent knowledge base.
  KnowledgeBase copy;
  load_script(copy, dump);
  CHECK(copy.structure() == kb->structure());
  CHECK(copy.models(0).size() == kb->models(0).size());
}

TEST_CASE("DIMACS output") {
  auto kb = kbs::coloring();
  auto p = kb->ground();
  std::string cnf = to_dimacs(p);
  CHECK(cnf.rfind("p cnf 9 21\n", 0) == 0);
  std::istringstream in(cnf);
  std::string line;
  std::getline(in, line);
  int clauses = 0;
  while (std::getline(in, line)) {
    REQUIRE(line.size() >= 2);
    CHECK(line.substr(line.size() - 2) == " 0");
    ++clauses;
  }
  CHECK(clauses == 21);
  std::string atoms = atom_map(kb->vocabulary(), p);
  CHECK(atoms.rfind("1 Coloring(Belgium)=Blue\n", 0) == 0);
}

TEST_CASE("CLI prints models deterministically") {
  auto first = run_cli("run " + sample("coloring.kb").string() + " --models 0");
  CHECK(first.status == 0);
  CHECK(first.out.find("Number of models: 6") != std::string::npos);
  CHECK(first.out.find("Model 6\n=======\n") != std::string::npos);
  CHECK(first.out.find("Coloring = {") != std::string::npos);
  CHECK(first.out.find("Border =") == std::string::npos);
  for (int i = 0; i < 4; ++i) CHECK(run_cli("run " + sample("coloring.kb").string() + " --models 0").out == first.out);

  auto one = run_cli("run " + sample("coloring.kb").string());
  CHECK(one.out.find("Number of models: 1") != std::string::npos);
  auto checked = run_cli("run " + sample("sudoku.kb").string() + " --check");
  CHECK(checked.status == 0);
  CHECK(checked.out.find("check: ok") != std::string::npos);
}

TEST_CASE("CLI exit codes and debug files") {
  fs::path dir = scratch_dir();
  fs::path unsat = dir / "two_colors.kb";
  {
    std::string text = slurp(sample("coloring.kb"));
    auto pos = text.find("Blue; Red; Green;");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 17, "Blue; Red;");
    std::ofstream(unsat) << text;
  }
  auto r = run_cli("run " + unsat.string());
  CHECK(r.status == 1);
  CHECK(r.out.find("UNSATISFIABLE") != std::string::npos);

  fs::path broken = dir / "broken.kb";
  std::ofstream(broken) << "vocabulary V {\n  P(Missing)\n}\n";
  auto b = run_cli("run " + broken.string());
  CHECK(b.status == 2);
  CHECK(b.out.find("broken.kb:2:") != std::string::npos);
  CHECK(run_cli("run " + (dir / "does_not_exist.kb").string()).status == 2);

  fs::path debug = dir / "debug.kb";
  fs::copy_file(sample("coloring.kb"), debug, fs::copy_options::overwrite_existing);
  auto d = run_cli("run " + debug.string() + " --debug");
  CHECK(d.status == 0);
  CHECK(d.out.find("theory T : V {") != std::string::npos);
  CHECK(slurp(dir / "debug.kb.cnf").rfind("p cnf 9 21", 0) == 0);
  CHECK(slurp(dir / "debug.kb.atoms").find("Coloring(Germany)=Green") != std::string::npos);
  CHECK(fs::exists(dir / "debug.kb.ground.txt"));
}
