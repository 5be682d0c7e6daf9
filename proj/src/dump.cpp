#include "lazykb/dump.hpp"

#include <sstream>

namespace lazykb {

namespace {

std::string quoted(const Value& v) { return v.to_string(true); }

std::string key_string(const Tuple& t) {
  if (t.size() == 1) return quoted(t[0]);
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ',';
    out += quoted(t[i]);
  }
  return out + ")";
}

std::string tuple_string(const Tuple& t) {
  if (t.size() == 1) return format_value(t[0]);
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += ',';
    out += format_value(t[i]);
  }
  return out + ")";
}

}  // namespace

std::string format_value(const Value& v) {
  if (v.is_int() || is_identifier(v.as_symbol())) return v.to_string();
  return v.to_string(true);
}

std::string format_extension(const Vocabulary& vocab, SymbolId id, const Extension& ext) {
  const SymbolDecl& decl = vocab[id];
  std::string out = decl.name + " = ";
  if (const auto* type = std::get_if<TypeExtension>(&ext)) {
    out += "{ ";
    for (const auto& v : type->values()) out += format_value(v) + "; ";
    return out + "}";
  }
  if (const auto* rel = std::get_if<Relation>(&ext)) {
    out += "{ ";
    for (const auto& t : *rel) out += (t.empty() ? std::string("()") : tuple_string(t)) + "; ";
    return out + "}";
  }
  const auto& table = std::get<FunctionTable>(ext);
  if (decl.kind == SymbolKind::constant) return out + (table.empty() ? "{}" : quoted(table.begin()->second));
  out += "{";
  bool first = true;
  for (const auto& [k, v] : table) {
    if (!first) out += ';';
    first = false;
    out += key_string(k) + "->" + quoted(v);
  }
  return out + "}";
}

std::string dump_kb(const KnowledgeBase& kb) {
  const Vocabulary& vocab = kb.vocabulary();
  std::ostringstream out;
  out << "vocabulary V {\n";
  for (SymbolId id = 0; id < vocab.size(); ++id)
    if (!kb.is_defined(id)) out << "  " << vocab[id].signature() << "\n";
  out << "}\n";
  out << "theory T : V {\n";
  for (const auto& f : kb.theory()) out << "  " << f.source << ".\n";
  out << "}\n";
  if (!kb.definitions().empty()) {
    out << "define D : V {\n";
    for (const auto& d : kb.definitions())
      for (const auto& r : d.rules) out << "  " << vocab[d.head].signature() << " <- " << r.source << ".\n";
    out << "}\n";
  }
  out << "structure S : V {\n";
  for (SymbolId id = 0; id < vocab.size(); ++id)
    if (kb.structure().interprets(id))
      out << "  " << format_extension(vocab, id, *kb.structure().extension(id)) << "\n";
  out << "}\n";
  return out.str();
}

std::string to_dimacs(const GroundProblem& problem) {
  std::ostringstream out;
  out << "p cnf " << problem.cnf.num_vars << ' ' << problem.cnf.clauses.size() << '\n';
  for (const auto& c : problem.cnf.clauses) {
    for (int lit : c) out << lit << ' ';
    out << "0\n";
  }
  return out.str();
}

std::string atom_map(const Vocabulary& vocab, const GroundProblem& problem) {
  std::ostringstream out;
  for (std::size_t i = 0; i < problem.atoms.size(); ++i)
    out << (i + 1) << ' ' << problem.atoms[i].to_string(vocab) << '\n';
  return out.str();
}

}  // namespace lazykb
