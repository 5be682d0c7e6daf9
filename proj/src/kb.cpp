#include "lazykb/kb.hpp"

#include <algorithm>
#include <ostream>

#include "lazykb/dump.hpp"
#include "lazykb/error.hpp"
#include "lazykb/evaluate.hpp"

namespace lazykb {

namespace {

std::string quote_source(std::string_view text) { return "\"" + std::string(text) + "\""; }

// Re-raises `e` with the offending source text appended, keeping its type.
[[noreturn]] void rethrow_with_source(std::string_view what, std::string_view text) {
  try {
    throw;
  } catch (const ParseError& e) {
    throw ParseError(e.message() + " in " + std::string(what) + " " + quote_source(text), e.position());
  } catch (const TypeError& e) {
    throw TypeError(std::string(e.what()) + " in " + std::string(what) + " " + quote_source(text));
  } catch (const DomainError& e) {
    throw DomainError(std::string(e.what()) + " in " + std::string(what) + " " + quote_source(text));
  }
}

}  // namespace

// --- RelationView --------------------------------------------------------

const std::string& RelationView::name() const { return kb_->vocab_[id_].name; }

bool RelationView::contains(const Tuple& t) const {
  const SymbolDecl& decl = kb_->vocab_[id_];
  if (t.size() != decl.arity())
    throw TypeError("'" + decl.name + "' expects " + std::to_string(decl.arity()) + " arguments, got " +
                    std::to_string(t.size()));
  const Extension& ext = kb_->materialize(id_);
  if (const auto* type = std::get_if<TypeExtension>(&ext)) return type->contains(t[0]);
  const auto& rel = std::get<Relation>(ext);
  return rel.find(t) != rel.end();
}

void RelationView::add(const Tuple& t) {
  kb_->require_user_symbol(id_, "add to");
  if (kb_->vocab_[id_].kind == SymbolKind::type) {
    if (t.size() != 1) throw TypeError("a type holds single values");
    TypeExtension next = *kb_->structure_.type(id_);
    next.add(t[0]);
    kb_->install(id_, std::move(next));
    return;
  }
  const Extension single = normalize_interpretation(kb_->vocab_, kb_->structure_, id_, std::vector<Tuple>{t});
  Relation* rel = kb_->structure_.mutable_relation(id_);
  if (!rel) {
    kb_->structure_.set(id_, Relation{});
    rel = kb_->structure_.mutable_relation(id_);
  }
  rel->insert(*std::get<Relation>(single).begin());
  kb_->touch();
}

void RelationView::remove(const Tuple& t) {
  kb_->require_user_symbol(id_, "remove from");
  if (kb_->vocab_[id_].kind == SymbolKind::type) {
    if (t.size() != 1) throw TypeError("a type holds single values");
    TypeExtension next = *kb_->structure_.type(id_);
    next.remove(t[0]);
    kb_->install(id_, std::move(next));
    return;
  }
  Relation* rel = kb_->structure_.mutable_relation(id_);
  if (!rel) {
    kb_->structure_.set(id_, Relation{});
  } else {
    rel->erase(t);
  }
  kb_->touch();
}

std::vector<Tuple> RelationView::tuples() const {
  const Extension& ext = kb_->materialize(id_);
  if (const auto* type = std::get_if<TypeExtension>(&ext)) {
    std::vector<Tuple> out;
    for (const auto& v : type->values()) out.push_back({v});
    return out;
  }
  const auto& rel = std::get<Relation>(ext);
  return {rel.begin(), rel.end()};
}

std::size_t RelationView::size() const {
  const Extension& ext = kb_->materialize(id_);
  if (const auto* type = std::get_if<TypeExtension>(&ext)) return type->size();
  return std::get<Relation>(ext).size();
}

// --- FunctionView --------------------------------------------------------

const std::string& FunctionView::name() const { return kb_->vocab_[id_].name; }

std::vector<Tuple> FunctionView::keys() const {
  for (SymbolId s : kb_->vocab_.arg_sorts(id_))
    if (!kb_->structure_.type(s)) throw DomainError("type '" + kb_->vocab_[s].name + "' has no extension");
  std::vector<Tuple> out;
  for_each_argument_tuple(kb_->vocab_, kb_->structure_, id_, [&](const Tuple& t) { out.push_back(t); });
  return out;
}

std::size_t FunctionView::size() const { return keys().size(); }

Value FunctionView::lookup(const Tuple& args) const {
  const SymbolDecl& decl = kb_->vocab_[id_];
  const auto& sorts = kb_->vocab_.arg_sorts(id_);
  if (args.size() != sorts.size())
    throw TypeError("'" + decl.name + "' expects " + std::to_string(sorts.size()) + " arguments, got " +
                    std::to_string(args.size()));
  for (std::size_t i = 0; i < args.size(); ++i) {
    const TypeExtension* ext = kb_->structure_.type(sorts[i]);
    if (!ext || !ext->contains(args[i]))
      throw DomainError("argument " + to_string(args, true) + " is outside the domain of '" + decl.name + "'");
  }
  const auto& table = std::get<FunctionTable>(kb_->materialize(id_));
  return table.at(args);
}

std::vector<Value> FunctionView::values() const {
  std::vector<Value> out;
  for (const auto& [k, v] : std::get<FunctionTable>(kb_->materialize(id_))) out.push_back(v);
  return out;
}

std::vector<std::pair<Tuple, Value>> FunctionView::items() const {
  const auto& table = std::get<FunctionTable>(kb_->materialize(id_));
  return {table.begin(), table.end()};
}

void FunctionView::assign(const RawData& raw) { kb_->assign(kb_->vocab_[id_].name, raw); }

// --- KnowledgeBase -------------------------------------------------------

KnowledgeBase::KnowledgeBase(std::string name) : name_(std::move(name)) {}

SymbolId KnowledgeBase::declare(SymbolDecl decl, std::optional<RawData> data) {
  std::optional<Extension> ext;
  if (data) {
    // Validate against a scratch vocabulary so a bad interpretation leaves
    // no half-declared symbol behind.
    Vocabulary scratch = vocab_;
    SymbolId id = scratch.add(decl);
    Structure s = structure_;
    s.resize(scratch.size());
    ext = normalize_interpretation(scratch, s, id, *data);
  }
  SymbolId id = vocab_.add(std::move(decl));
  structure_.resize(vocab_.size());
  model_.resize(vocab_.size());
  defined_.resize(vocab_.size(), 0);
  if (ext) structure_.set(id, std::move(*ext));
  touch();
  return id;
}

SymbolId KnowledgeBase::type(std::string_view name, std::optional<std::vector<Value>> values) {
  SymbolDecl decl{std::string(name), SymbolKind::type, {}, {}};
  if (!is_identifier(decl.name)) throw ParseError("type name must be an identifier: '" + decl.name + "'", {});
  std::optional<RawData> data;
  if (values) data = RawData(std::move(*values));
  return declare(std::move(decl), std::move(data));
}

SymbolId KnowledgeBase::predicate(std::string_view typed_name, std::optional<RawData> data) {
  SymbolDecl decl = parse_typed_name(typed_name);
  if (decl.kind != SymbolKind::predicate)
    throw TypeError("'" + std::string(typed_name) + "' is not a predicate signature");
  return declare(std::move(decl), std::move(data));
}

SymbolId KnowledgeBase::function(std::string_view typed_name, std::optional<RawData> data) {
  SymbolDecl decl = parse_typed_name(typed_name);
  if (!decl.is_function()) throw TypeError("'" + std::string(typed_name) + "' is not a function signature");
  return declare(std::move(decl), std::move(data));
}

SymbolId KnowledgeBase::constant(std::string_view typed_name, std::optional<Value> value) {
  SymbolDecl decl = parse_typed_name(typed_name);
  if (decl.kind != SymbolKind::constant)
    throw TypeError("'" + std::string(typed_name) + "' is not a constant signature");
  std::optional<RawData> data;
  if (value) data = RawData(std::move(*value));
  return declare(std::move(decl), std::move(data));
}

void KnowledgeBase::require_user_symbol(SymbolId id, std::string_view action) const {
  if (defined_.at(id))
    throw DomainError("cannot " + std::string(action) + " '" + vocab_[id].name + "': it is a defined symbol");
}

void KnowledgeBase::install(SymbolId id, Extension ext) {
  if (vocab_[id].kind != SymbolKind::type) {
    validate_extension(vocab_, structure_, id, ext);
    structure_.set(id, std::move(ext));
    touch();
    return;
  }
  Structure trial = structure_;
  trial.set(id, std::move(ext));
  for (SymbolId other = 0; other < vocab_.size(); ++other) {
    if (other == id || !trial.interprets(other) || vocab_[other].kind == SymbolKind::type) continue;
    const auto& sorts = vocab_.arg_sorts(other);
    bool depends = std::find(sorts.begin(), sorts.end(), id) != sorts.end() ||
                   (vocab_[other].is_function() && vocab_.ret_sort(other) == id);
    if (depends) validate_extension(vocab_, trial, other, *trial.extension(other));
  }
  structure_ = std::move(trial);
  touch();
}

void KnowledgeBase::assign(std::string_view name, const RawData& raw) {
  SymbolId id = vocab_.require(name);
  require_user_symbol(id, "assign");
  install(id, normalize_interpretation(vocab_, structure_, id, raw));
}

void KnowledgeBase::unassign(std::string_view name) {
  SymbolId id = vocab_.require(name);
  require_user_symbol(id, "unassign");
  structure_.clear(id);
  touch();
}

void KnowledgeBase::constraint(std::string_view text) {
  TypedFormula f;
  try {
    f = compile_sentence(text, vocab_, &structure_);
  } catch (const Error&) {
    rethrow_with_source("constraint", text);
  }
  theory_.push_back(std::move(f));
  touch();
}

SymbolId KnowledgeBase::define(std::string_view head_typed_name, std::string_view lambda) {
  return define(head_typed_name, std::vector<std::string>{std::string(lambda)});
}

SymbolId KnowledgeBase::define(std::string_view head_typed_name, const std::vector<std::string>& lambdas) {
  SymbolDecl decl = parse_typed_name(head_typed_name);
  if (decl.kind != SymbolKind::predicate)
    throw TypeError("definition head '" + std::string(head_typed_name) + "' is not a predicate signature");
  if (lambdas.empty()) throw DomainError("definition of '" + decl.name + "' has no rules");

  Vocabulary scratch = vocab_;
  SymbolId id;
  bool fresh = false;
  if (auto existing = vocab_.find(decl.name)) {
    id = *existing;
    if (!(vocab_[id] == decl))
      throw TypeError("definition head '" + std::string(head_typed_name) + "' does not match the declaration '" +
                      vocab_[id].signature() + "'");
    if (defined_[id]) throw DomainError("redefinition of '" + decl.name + "'");
    if (structure_.interprets(id))
      throw DomainError("'" + decl.name + "' is interpreted by the structure and cannot be defined");
  } else {
    id = scratch.add(decl);
    fresh = true;
  }

  Definition defn;
  Structure s = structure_;
  s.resize(scratch.size());
  try {
    defn = compile_definition(id, lambdas, scratch, &s);
  } catch (const Error&) {
    std::string joined;
    for (const auto& l : lambdas) joined += (joined.empty() ? "" : "; ") + l;
    rethrow_with_source("definition of " + decl.name + ":", joined);
  }
  std::vector<Definition> all = definitions_;
  all.push_back(defn);
  stratify(all, scratch);

  if (fresh) {
    vocab_.add(std::move(decl));
    structure_.resize(vocab_.size());
    model_.resize(vocab_.size());
    defined_.resize(vocab_.size(), 0);
  }
  defined_[id] = 1;
  definitions_.push_back(std::move(defn));
  touch();
  return id;
}

void KnowledgeBase::define(const std::vector<std::pair<std::string, std::string>>& rules) {
  std::vector<std::pair<std::string, std::vector<std::string>>> grouped;
  std::vector<std::string> names;
  for (const auto& [head, lambda] : rules) {
    std::string name = parse_typed_name(head).name;
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) {
      names.push_back(name);
      grouped.push_back({head, {lambda}});
    } else {
      grouped[static_cast<std::size_t>(it - names.begin())].second.push_back(lambda);
    }
  }
  for (const auto& [head, lambdas] : grouped) define(head, lambdas);
}

bool KnowledgeBase::is_defined(SymbolId id) const { return id < defined_.size() && defined_[id]; }

void KnowledgeBase::touch() {
  cache_ = CacheState::dirty;
  ++generation_;
}

void KnowledgeBase::check_types_ready() const {
  for (SymbolId id = 0; id < vocab_.size(); ++id)
    if (vocab_[id].kind == SymbolKind::type && !structure_.interprets(id))
      throw DomainError("type '" + vocab_[id].name + "' has no extension");
}

GroundProblem KnowledgeBase::ground() const {
  check_types_ready();
  return ground_theory(vocab_, structure_, theory_, definitions_, options_);
}

void KnowledgeBase::ensure_expanded() {
  if (cache_ != CacheState::dirty) return;
  if (debug_) *debug_ << dump_kb(*this) << std::flush;
  GroundProblem problem = ground();
  ++solver_invocations_;
  if (problem.trivially_false) {
    cache_ = CacheState::unsat;
    return;
  }
  sat::SolveResult r = sat::solve(problem.cnf, solver_options_);
  if (!r.satisfiable) {
    cache_ = CacheState::unsat;
    return;
  }
  model_ = decode_model(vocab_, problem, r.model);
  cache_ = CacheState::model;
}

bool KnowledgeBase::satisfiable() {
  ensure_expanded();
  return cache_ == CacheState::model;
}

ExpansionResult KnowledgeBase::expand() {
  ensure_expanded();
  ExpansionResult result;
  if (cache_ != CacheState::model) return result;
  result.verdict = Verdict::sat;
  for (SymbolId id = 0; id < vocab_.size(); ++id)
    if (!structure_.interprets(id)) result.completed.emplace_back(id, *model_.extension(id));
  return result;
}

const Extension& KnowledgeBase::materialize(std::string_view name) { return materialize(vocab_.require(name)); }

const Extension& KnowledgeBase::materialize(SymbolId id) {
  if (structure_.interprets(id)) return *structure_.extension(id);
  ensure_expanded();
  if (cache_ != CacheState::model) throw UnsatError("knowledge base '" + name_ + "' has no model");
  return *model_.extension(id);
}

std::vector<Structure> KnowledgeBase::models(std::size_t limit) {
  if (debug_) *debug_ << dump_kb(*this) << std::flush;
  GroundProblem problem = ground();
  ++solver_invocations_;
  std::vector<Structure> out;
  if (!problem.trivially_false) {
    for (const auto& m : sat::enumerate(problem.cnf, problem.atom_count(), limit, solver_options_))
      out.push_back(decode_model(vocab_, problem, m));
  }
  if (out.empty()) {
    cache_ = CacheState::unsat;
  } else {
    model_ = out.front();
    cache_ = CacheState::model;
  }
  return out;
}

const Structure* KnowledgeBase::cached_model() const noexcept {
  return cache_ == CacheState::model ? &model_ : nullptr;
}

std::vector<std::string> KnowledgeBase::check(const Structure& total) const {
  std::vector<std::string> violations;
  StructureInterpretation interp(vocab_, total);
  for (const auto& f : theory_)
    if (!holds(f, interp)) violations.push_back(f.source);
  for (const Stratum& stratum : stratify(definitions_, vocab_)) {
    std::vector<const Definition*> members;
    for (std::size_t m : stratum.members) members.push_back(&definitions_[m]);
    std::vector<Relation> expected = lfp_evaluate(members, vocab_, total);
    for (std::size_t k = 0; k < members.size(); ++k) {
      const Relation* actual = total.relation(members[k]->head);
      if (!actual || *actual != expected[k])
        violations.push_back("definition of " + vocab_[members[k]->head].name);
    }
  }
  return violations;
}

RelationView KnowledgeBase::relation(std::string_view name) {
  SymbolId id = vocab_.require(name);
  if (!vocab_[id].is_relation()) throw TypeError("'" + std::string(name) + "' is not a type or predicate");
  return RelationView(*this, id);
}

FunctionView KnowledgeBase::function_view(std::string_view name) {
  SymbolId id = vocab_.require(name);
  if (!vocab_[id].is_function()) throw TypeError("'" + std::string(name) + "' is not a function or constant");
  return FunctionView(*this, id);
}

}  // namespace lazykb
