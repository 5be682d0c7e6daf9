#pragma once

#include <span>
#include <string>

#include "lazykb/grounder.hpp"
#include "lazykb/kb.hpp"
#include "lazykb/structure.hpp"
#include "lazykb/vocabulary.hpp"

namespace lazykb {

// Structure-block spelling of a value: identifiers and integers bare,
// other tokens double-quoted.
std::string format_value(const Value& v);

// One structure line, e.g.
//   Area = { Belgium; Holland; Germany; }
//   Border = { (Belgium,Holland); (Belgium,Germany); }
//   Coloring = {"Belgium"->"Red";"Germany"->"Blue";"Holland"->"Green"}
//   C = "Red"
std::string format_extension(const Vocabulary& vocab, SymbolId id, const Extension& ext);

// vocabulary / theory / define / structure blocks of the KB's user state.
std::string dump_kb(const KnowledgeBase& kb);

// DIMACS CNF of a ground problem.
std::string to_dimacs(const GroundProblem& problem);

// "varIndex atomString" per atom variable.
std::string atom_map(const Vocabulary& vocab, const GroundProblem& problem);

}  // namespace lazykb
