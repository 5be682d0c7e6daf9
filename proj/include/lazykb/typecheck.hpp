#pragma once

#include <span>
#include <string>

#include "lazykb/expr.hpp"
#include "lazykb/structure.hpp"
#include "lazykb/vocabulary.hpp"

namespace lazykb {

// A sentence (or lambda body) with every variable resolved to an
// environment slot and every symbol resolved to its id.
struct TypedFormula {
  ExprPtr expr;
  std::size_t slot_count = 0;
  std::string source;
};

struct Binding {
  std::string name;
  SymbolId sort = kNoSymbol;
};

// Annotates a copy of `e` with sorts, slots and symbol ids. Variables take
// their sort from the generator that binds them: a type domain gives that
// type, a relation domain gives the positional argument sort. `outer`
// bindings occupy slots 0..outer.size()-1 (lambda parameters). Bare
// identifiers naming a declared 0-ary symbol denote that symbol.
//
// `structure` (optional) lets ordering and arithmetic check that sort
// extensions hold integers.
//
// Throws TypeError on unknown symbols, arity or sort mismatches, unbound or
// shadowing variables, and non-boolean sentences.
TypedFormula infer_types(const Expr& e, const Vocabulary& vocab, const Structure* structure = nullptr,
                         std::span<const Binding> outer = {});

// Parses and type-checks a sentence.
TypedFormula compile_sentence(std::string_view text, const Vocabulary& vocab, const Structure* structure = nullptr);

}  // namespace lazykb
