#pragma once

#include "lazykb/error.hpp"

namespace lazykb {

template <class Fn>
void for_each_argument_tuple(const Vocabulary& vocab, const Structure& structure, SymbolId id, Fn&& fn) {
  const SymbolDecl& decl = vocab[id];
  std::vector<const TypeExtension*> sorts;
  if (decl.kind == SymbolKind::type) {
    sorts.push_back(structure.type(id));
  } else {
    for (SymbolId s : vocab.arg_sorts(id)) sorts.push_back(structure.type(s));
  }
  for (const auto* s : sorts) {
    if (!s) throw DomainError("sort of '" + decl.name + "' has no extension");
    if (s->empty()) return;
  }
  std::vector<std::size_t> idx(sorts.size(), 0);
  Tuple t(sorts.size());
  for (std::size_t i = 0; i < sorts.size(); ++i) t[i] = sorts[i]->values()[0];
  for (;;) {
    fn(static_cast<const Tuple&>(t));
    std::size_t k = sorts.size();
    while (k > 0) {
      --k;
      if (++idx[k] < sorts[k]->size()) {
        t[k] = sorts[k]->values()[idx[k]];
        break;
      }
      idx[k] = 0;
      t[k] = sorts[k]->values()[0];
      if (k == 0) return;
    }
    if (sorts.empty()) return;
  }
}

}  // namespace lazykb
