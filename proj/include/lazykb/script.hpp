#pragma once

#include <string>
#include <string_view>

#include "lazykb/error.hpp"
#include "lazykb/kb.hpp"

namespace lazykb {

// Error in a script file, formatted "file:line: message".
class ScriptError : public Error {
 public:
  ScriptError(const std::string& file, std::size_t line, const std::string& message)
      : Error(file + ":" + std::to_string(line) + ": " + message), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Loads a script made of blocks
//
//   vocabulary V { type Area  Border(Area,Area)  Coloring(Area): Color }
//   structure S : V { Area = { Belgium; Holland; }  Cell = { 0..80 }  C = Red }
//   define D : V { TC(Node,Node) <- lambda x,y: G(x,y). }
//   theory T : V { all(Coloring(a) != Coloring(b) for (a,b) in Border). }
//
// into `kb`. Declarations come first, then type extensions, then the other
// interpretations, definitions and sentences. `#` and `//` start comments.
void load_script(KnowledgeBase& kb, std::string_view text, const std::string& filename = "<script>");

}  // namespace lazykb
