// Command-line runner for knowledge-base scripts.
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "lazykb/dump.hpp"
#include "lazykb/error.hpp"
#include "lazykb/kb.hpp"
#include "lazykb/script.hpp"

namespace {

constexpr int kExitSat = 0;
constexpr int kExitUnsat = 1;
constexpr int kExitError = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lazykb::Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw lazykb::Error("cannot write '" + path + "'");
  out << text;
}

struct RunOptions {
  std::string script;
  std::size_t models = 1;
  bool debug = false;
  bool check = false;
  std::uint64_t seed = 0;
};

int run(const RunOptions& opt) {
  lazykb::KnowledgeBase kb(opt.script);
  lazykb::load_script(kb, read_file(opt.script), opt.script);

  if (opt.debug) {
    lazykb::GroundProblem problem = kb.ground();
    write_file(opt.script + ".ground.txt", lazykb::dump_kb(kb));
    write_file(opt.script + ".cnf", lazykb::to_dimacs(problem));
    write_file(opt.script + ".atoms", lazykb::atom_map(kb.vocabulary(), problem));
    kb.set_debug(&std::cout);
  }

  std::vector<lazykb::Structure> models = kb.models(opt.models);
  if (models.empty()) {
    std::cout << "UNSATISFIABLE\n";
    return kExitUnsat;
  }

  const lazykb::Vocabulary& vocab = kb.vocabulary();
  bool violated = false;
  std::cout << "Number of models: " << models.size() << "\n";
  for (std::size_t i = 0; i < models.size(); ++i) {
    std::cout << "Model " << (i + 1) << "\n=======\n";
    for (lazykb::SymbolId id = 0; id < vocab.size(); ++id) {
      if (kb.structure().interprets(id) || kb.is_defined(id)) continue;
      std::cout << lazykb::format_extension(vocab, id, *models[i].extension(id)) << "\n";
    }
    if (opt.check) {
      std::vector<std::string> bad = kb.check(models[i]);
      for (lazykb::SymbolId id = 0; id < vocab.size(); ++id)
        if (kb.structure().interprets(id) && !(models[i].extension(id) == kb.structure().extension(id)))
          bad.push_back("interpretation of " + vocab[id].name + " was altered");
      if (bad.empty()) {
        std::cout << "check: ok (" << kb.theory().size() << " constraints, " << kb.definitions().size()
                  << " definitions)\n";
      } else {
        violated = true;
        for (const auto& b : bad) std::cout << "check: VIOLATED " << b << "\n";
      }
    }
  }
  return violated ? kExitError : kExitSat;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lazy knowledge-base engine: finite model expansion over typed first-order theories"};
  app.require_subcommand(1);

  RunOptions opt;
  CLI::App* run_cmd = app.add_subcommand("run", "Expand the structure of a script and print models");
  run_cmd->add_option("script", opt.script, "Script with vocabulary, structure, define and theory blocks")
      ->required();
  run_cmd->add_option("--models", opt.models, "Number of models to print (0 = all)")->capture_default_str();
  run_cmd->add_flag("--debug", opt.debug,
                    "Write <script>.ground.txt, <script>.cnf and <script>.atoms; print the dump to stdout");
  run_cmd->add_flag("--check", opt.check, "Re-evaluate every constraint and definition on each model");
  run_cmd->add_option("--seed", opt.seed, "Reserved; the solver is deterministic");

  CLI11_PARSE(app, argc, argv);

  try {
    return run(opt);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
