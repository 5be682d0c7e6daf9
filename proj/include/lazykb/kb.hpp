#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lazykb/definitions.hpp"
#include "lazykb/grounder.hpp"
#include "lazykb/structure.hpp"
#include "lazykb/typecheck.hpp"
#include "lazykb/vocabulary.hpp"

namespace lazykb {

class KnowledgeBase;

enum class Verdict { sat, unsat };

struct ExpansionResult {
  Verdict verdict = Verdict::unsat;
  // Interpretations of every symbol the user left ABSENT (defined heads
  // included). Empty on UNSAT.
  std::vector<std::pair<SymbolId, Extension>> completed;
};

// Set view of a type or predicate. Reading an ABSENT or defined symbol
// expands the KB first.
class RelationView {
 public:
  RelationView(KnowledgeBase& kb, SymbolId id) : kb_(&kb), id_(id) {}

  SymbolId symbol() const noexcept { return id_; }
  const std::string& name() const;

  bool contains(const Tuple& t) const;
  bool contains(const Value& v) const { return contains(Tuple{v}); }
  template <class... Args>
  bool operator()(Args&&... args) const {
    return contains(Tuple{Value(std::forward<Args>(args))...});
  }

  void add(const Tuple& t);
  void add(const Value& v) { add(Tuple{v}); }
  void remove(const Tuple& t);
  void remove(const Value& v) { remove(Tuple{v}); }

  std::vector<Tuple> tuples() const;
  std::size_t size() const;

 private:
  KnowledgeBase* kb_;
  SymbolId id_;
};

// Mapping view of a function or constant.
class FunctionView {
 public:
  FunctionView(KnowledgeBase& kb, SymbolId id) : kb_(&kb), id_(id) {}

  SymbolId symbol() const noexcept { return id_; }
  const std::string& name() const;

  // The argument-sort product; computed without solving.
  std::vector<Tuple> keys() const;
  std::size_t size() const;

  Value lookup(const Tuple& args) const;
  Value operator[](const Value& v) const { return lookup(Tuple{v}); }
  template <class... Args>
  Value operator()(Args&&... args) const {
    return lookup(Tuple{Value(std::forward<Args>(args))...});
  }

  std::vector<Value> values() const;
  std::vector<std::pair<Tuple, Value>> items() const;

  void assign(const RawData& raw);

 private:
  KnowledgeBase* kb_;
  SymbolId id_;
};

// A vocabulary, a partial structure and a theory. Unfilled symbols are
// completed by model expansion the first time they are read; the result is
// cached until the next mutation.
class KnowledgeBase {
 public:
  explicit KnowledgeBase(std::string name = "KB");

  const std::string& name() const noexcept { return name_; }

  // Declarations. `typed_name` uses the shapes "P(A,B)", "F(A): R", "C : T".
  SymbolId type(std::string_view name, std::optional<std::vector<Value>> values = std::nullopt);
  SymbolId predicate(std::string_view typed_name, std::optional<RawData> data = std::nullopt);
  SymbolId function(std::string_view typed_name, std::optional<RawData> data = std::nullopt);
  SymbolId constant(std::string_view typed_name, std::optional<Value> value = std::nullopt);
  SymbolId declare(SymbolDecl decl, std::optional<RawData> data = std::nullopt);

  // Replaces the user interpretation of a declared, non-defined symbol.
  void assign(std::string_view name, const RawData& raw);
  // Makes a symbol ABSENT again.
  void unassign(std::string_view name);

  void constraint(std::string_view text);

  // Declares `head_typed_name` when it is not declared yet. One lambda per
  // rule; all rules of a head must be given in one call.
  SymbolId define(std::string_view head_typed_name, std::string_view lambda);
  SymbolId define(std::string_view head_typed_name, const std::vector<std::string>& lambdas);
  // (head, lambda) pairs; pairs sharing a head are grouped into one definition.
  void define(const std::vector<std::pair<std::string, std::string>>& rules);

  bool satisfiable();
  explicit operator bool() { return satisfiable(); }

  ExpansionResult expand();

  // User interpretation when present, otherwise the completed one.
  // Throws UnsatError when completion is needed and no model exists.
  const Extension& materialize(std::string_view name);
  const Extension& materialize(SymbolId id);

  // Up to `limit` distinct models (0 = all), as total structures. Distinct
  // on the atoms of the unknown symbols.
  std::vector<Structure> models(std::size_t limit);

  // Violated constraint sources on a total structure.
  std::vector<std::string> check(const Structure& total) const;

  RelationView relation(std::string_view name);
  FunctionView function_view(std::string_view name);

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  const Structure& structure() const noexcept { return structure_; }
  const std::vector<TypedFormula>& theory() const noexcept { return theory_; }
  const std::vector<Definition>& definitions() const noexcept { return definitions_; }
  bool is_defined(SymbolId id) const;
  SymbolId require(std::string_view name) const { return vocab_.require(name); }

  // The grounding the next expansion would solve.
  GroundProblem ground() const;

  // Cached total model, if the last expansion found one.
  const Structure* cached_model() const noexcept;

  std::uint64_t solver_invocations() const noexcept { return solver_invocations_; }
  std::uint64_t generation() const noexcept { return generation_; }

  // When set, the full dump is written here before each solver run.
  void set_debug(std::ostream* out) noexcept { debug_ = out; }
  GroundOptions& ground_options() noexcept { return options_; }
  sat::SolverOptions& solver_options() noexcept { return solver_options_; }

 private:
  friend class RelationView;
  friend class FunctionView;

  enum class CacheState { dirty, model, unsat };

  void touch();
  void require_user_symbol(SymbolId id, std::string_view action) const;
  void install(SymbolId id, Extension ext);
  void check_types_ready() const;
  // Ensures the cache is not dirty; increments the counter when it solves.
  void ensure_expanded();

  std::string name_;
  Vocabulary vocab_;
  Structure structure_;
  std::vector<TypedFormula> theory_;
  std::vector<Definition> definitions_;
  std::vector<char> defined_;

  CacheState cache_ = CacheState::dirty;
  Structure model_;
  std::uint64_t solver_invocations_ = 0;
  std::uint64_t generation_ = 0;

  std::ostream* debug_ = nullptr;
  GroundOptions options_;
  sat::SolverOptions solver_options_;
};

}  // namespace lazykb
