#include "lazykb/script.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <vector>

namespace lazykb {

namespace {

struct Line {
  std::string text;
  std::size_t line;
};

struct Block {
  std::string kind;
  std::string body;
  std::size_t body_line;  // line of the first character of body
};

// Replaces comments by spaces so line numbers and offsets survive.
std::string strip_comments(std::string_view text) {
  std::string out(text);
  char quote = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    char c = out[i];
    if (quote) {
      if (c == '\\' && i + 1 < out.size()) {
        ++i;
      } else if (c == quote || c == '\n') {
        quote = 0;
      }
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '#' || (c == '/' && i + 1 < out.size() && out[i + 1] == '/')) {
      while (i < out.size() && out[i] != '\n') out[i++] = ' ';
    }
  }
  return out;
}

class BlockReader {
 public:
  BlockReader(std::string text, std::string file) : text_(std::move(text)), file_(std::move(file)) {}

  std::vector<Block> read() {
    std::vector<Block> blocks;
    while (true) {
      skip_space();
      if (pos_ >= text_.size()) break;
      std::size_t line = line_;
      std::string kind = word();
      if (kind != "vocabulary" && kind != "theory" && kind != "structure" && kind != "define")
        fail(line, "expected a vocabulary, theory, define or structure block, found '" + kind + "'");
      skip_space();
      if (word().empty()) fail(line_, "block name expected");
      skip_space();
      if (peek() == ':') {
        ++pos_;
        skip_space();
        if (word().empty()) fail(line_, "vocabulary name expected after ':'");
        skip_space();
      }
      if (peek() != '{') fail(line_, "'{' expected");
      ++pos_;
      Block b{kind, {}, line_};
      b.body = until_close(line);
      blocks.push_back(std::move(b));
    }
    return blocks;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void advance() {
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
  }

  std::string word() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::string until_close(std::size_t open_line) {
    std::size_t start = pos_;
    int depth = 0;
    char quote = 0;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (quote) {
        if (c == '\\') {
          advance();
        } else if (c == quote) {
          quote = 0;
        }
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '{') {
        ++depth;
      } else if (c == '}') {
        if (depth == 0) {
          std::string body = text_.substr(start, pos_ - start);
          ++pos_;
          return body;
        }
        --depth;
      }
      if (pos_ < text_.size()) advance();
    }
    fail(open_line, "unterminated block");
  }

  [[noreturn]] void fail(std::size_t line, const std::string& msg) const { throw ScriptError(file_, line, msg); }

  std::string text_;
  std::string file_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// Splits on any of `seps` outside quotes and parentheses; records the line
// of the first non-blank character of each piece.
std::vector<Line> split(const std::string& body, std::size_t first_line, std::string_view seps) {
  std::vector<Line> out;
  std::string cur;
  std::size_t line = first_line;
  std::size_t start_line = 0;
  int depth = 0;
  char quote = 0;
  auto flush = [&] {
    std::string t = trim(cur);
    if (!t.empty()) out.push_back({t, start_line});
    cur.clear();
    start_line = 0;
  };
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (!start_line && !std::isspace(static_cast<unsigned char>(c))) start_line = line;
    if (quote) {
      if (c == '\\' && i + 1 < body.size()) {
        cur += c;
        c = body[++i];
      } else if (c == quote) {
        quote = 0;
      }
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '(') {
      ++depth;
    } else if (c == ')') {
      --depth;
    } else if (depth == 0 && seps.find(c) != std::string_view::npos) {
      if (c == '\n') ++line;
      flush();
      continue;
    }
    if (c == '\n') ++line;
    cur += c;
  }
  flush();
  return out;
}

// --- structure values --------------------------------------------------

struct SToken {
  enum Kind { ident, integer, string, punct, end } kind;
  std::string text;
  std::int64_t number = 0;
  std::size_t line = 0;
};

std::vector<SToken> lex_structure(const std::string& body, std::size_t first_line, const std::string& file) {
  std::vector<SToken> out;
  std::size_t line = first_line;
  std::size_t i = 0;
  while (i < body.size()) {
    char c = body[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t s = i;
      while (i < body.size() && (std::isalnum(static_cast<unsigned char>(body[i])) || body[i] == '_')) ++i;
      out.push_back({SToken::ident, body.substr(s, i - s), 0, line});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '-' && i + 1 < body.size() && std::isdigit(static_cast<unsigned char>(body[i + 1])))) {
      std::size_t s = i++;
      while (i < body.size() && std::isdigit(static_cast<unsigned char>(body[i]))) ++i;
      SToken t{SToken::integer, body.substr(s, i - s), 0, line};
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.number);
      if (ec != std::errc()) throw ScriptError(file, line, "integer out of range: " + t.text);
      out.push_back(std::move(t));
      continue;
    }
    if (c == '"' || c == '\'') {
      std::string s;
      ++i;
      while (i < body.size() && body[i] != c) {
        if (body[i] == '\n') throw ScriptError(file, line, "unterminated string");
        if (body[i] == '\\' && i + 1 < body.size()) ++i;
        s += body[i++];
      }
      if (i >= body.size()) throw ScriptError(file, line, "unterminated string");
      ++i;
      out.push_back({SToken::string, s, 0, line});
      continue;
    }
    if (body.compare(i, 2, "->") == 0 || body.compare(i, 2, "..") == 0) {
      out.push_back({SToken::punct, body.substr(i, 2), 0, line});
      i += 2;
      continue;
    }
    if (std::string_view("{}();,=").find(c) != std::string_view::npos) {
      out.push_back({SToken::punct, std::string(1, c), 0, line});
      ++i;
      continue;
    }
    throw ScriptError(file, line, std::string("unexpected character '") + c + "' in structure");
  }
  out.push_back({SToken::end, "", 0, line});
  return out;
}

struct Element {
  Tuple key;              // a bare scalar is a 1-tuple
  bool tuple = false;     // written in parentheses
  std::optional<Value> value;  // after "->"
};

struct Assignment {
  std::string name;
  std::size_t line = 0;
  bool scalar = false;  // "C = v"
  Value single;
  std::vector<Element> elements;
};

class StructureParser {
 public:
  StructureParser(std::vector<SToken> toks, std::string file) : toks_(std::move(toks)), file_(std::move(file)) {}

  std::vector<Assignment> parse() {
    std::vector<Assignment> out;
    while (cur().kind != SToken::end) {
      if (is(";")) {
        ++i_;
        continue;
      }
      if (cur().kind != SToken::ident) fail("symbol name expected");
      Assignment a;
      a.name = cur().text;
      a.line = cur().line;
      ++i_;
      expect("=");
      if (is("{")) {
        ++i_;
        while (!is("}")) {
          if (cur().kind == SToken::end) fail("'}' expected");
          if (is(";") || is(",")) {
            ++i_;
            continue;
          }
          element(a.elements);
        }
        ++i_;
      } else {
        a.scalar = true;
        a.single = scalar();
      }
      out.push_back(std::move(a));
    }
    return out;
  }

 private:
  const SToken& cur() const { return toks_[i_]; }
  bool is(std::string_view p) const { return cur().kind == SToken::punct && cur().text == p; }
  void expect(std::string_view p) {
    if (!is(p)) fail("'" + std::string(p) + "' expected");
    ++i_;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ScriptError(file_, cur().line, msg + (cur().kind == SToken::end ? "" : " near '" + cur().text + "'"));
  }

  Value scalar() {
    const SToken& t = cur();
    switch (t.kind) {
      case SToken::integer:
        ++i_;
        return Value(t.number);
      case SToken::ident:
      case SToken::string:
        ++i_;
        return Value(t.text);
      default:
        fail("value expected");
    }
  }

  void element(std::vector<Element>& out) {
    Element e;
    if (is("(")) {
      ++i_;
      e.tuple = true;
      if (!is(")")) {
        e.key.push_back(scalar());
        while (is(",")) {
          ++i_;
          e.key.push_back(scalar());
        }
      }
      expect(")");
    } else {
      Value first = scalar();
      if (is("..")) {
        ++i_;
        Value last = scalar();
        if (!first.is_int() || !last.is_int()) fail("range bounds must be integers");
        for (std::int64_t v = first.as_int(); v <= last.as_int(); ++v) out.push_back({{Value(v)}, false, {}});
        return;
      }
      e.key.push_back(std::move(first));
    }
    if (is("->")) {
      ++i_;
      e.value = scalar();
    }
    out.push_back(std::move(e));
  }

  std::vector<SToken> toks_;
  std::string file_;
  std::size_t i_ = 0;
};

RawData to_raw_data(const SymbolDecl& decl, const Assignment& a, const std::string& file) {
  auto fail = [&](const std::string& msg) -> ScriptError { return ScriptError(file, a.line, msg); };
  if (decl.kind == SymbolKind::constant) {
    if (a.scalar) return a.single;
    if (a.elements.size() == 1 && !a.elements[0].value && a.elements[0].key.size() == 1) return a.elements[0].key[0];
    throw fail("constant '" + decl.name + "' expects a single value");
  }
  if (a.scalar) throw fail("'" + decl.name + "' expects an enumeration in braces");
  switch (decl.kind) {
    case SymbolKind::type: {
      std::vector<Value> values;
      for (const auto& e : a.elements) {
        if (e.value || e.tuple || e.key.size() != 1) throw fail("type '" + decl.name + "' holds single values");
        values.push_back(e.key[0]);
      }
      return values;
    }
    case SymbolKind::predicate: {
      std::vector<Tuple> tuples;
      for (const auto& e : a.elements) {
        if (e.value) throw fail("predicate '" + decl.name + "' does not map values");
        tuples.push_back(e.key);
      }
      return tuples;
    }
    default: {
      std::vector<std::pair<Tuple, Value>> pairs;
      for (const auto& e : a.elements) {
        if (!e.value) throw fail("function '" + decl.name + "' expects key->value pairs");
        pairs.emplace_back(e.key, *e.value);
      }
      return pairs;
    }
  }
}

template <class Fn>
void at_line(const std::string& file, std::size_t line, Fn&& fn) {
  try {
    fn();
  } catch (const ScriptError&) {
    throw;
  } catch (const Error& e) {
    throw ScriptError(file, line, e.what());
  }
}

}  // namespace

void load_script(KnowledgeBase& kb, std::string_view text, const std::string& filename) {
  std::vector<Block> blocks = BlockReader(strip_comments(text), filename).read();

  std::vector<Line> decls, sentences, rules;
  std::vector<Assignment> assignments;
  for (const auto& b : blocks) {
    if (b.kind == "vocabulary") {
      for (auto& l : split(b.body, b.body_line, "\n;")) decls.push_back(std::move(l));
    } else if (b.kind == "theory") {
      for (auto& l : split(b.body, b.body_line, ".")) sentences.push_back(std::move(l));
    } else if (b.kind == "define") {
      for (auto& l : split(b.body, b.body_line, ".")) rules.push_back(std::move(l));
    } else {
      auto parsed = StructureParser(lex_structure(b.body, b.body_line, filename), filename).parse();
      for (auto& a : parsed) assignments.push_back(std::move(a));
    }
  }

  for (const auto& d : decls) {
    at_line(filename, d.line, [&] {
      if (d.text.rfind("type", 0) == 0 && d.text.size() > 4 && std::isspace(static_cast<unsigned char>(d.text[4]))) {
        kb.type(trim(d.text.substr(4)));
      } else {
        kb.declare(parse_typed_name(d.text));
      }
    });
  }

  auto apply = [&](bool types) {
    for (const auto& a : assignments) {
      at_line(filename, a.line, [&] {
        SymbolId id = kb.require(a.name);
        const SymbolDecl& decl = kb.vocabulary()[id];
        if ((decl.kind == SymbolKind::type) != types) return;
        kb.assign(a.name, to_raw_data(decl, a, filename));
      });
    }
  };
  apply(true);
  apply(false);

  std::vector<std::pair<std::string, std::vector<std::string>>> grouped;
  std::map<std::string, std::size_t> by_name;
  std::map<std::string, std::size_t> first_line;
  for (const auto& r : rules) {
    auto arrow = r.text.find("<-");
    if (arrow == std::string::npos) throw ScriptError(filename, r.line, "definition rule needs 'Head(...) <- lambda ...'");
    std::string head = trim(r.text.substr(0, arrow));
    std::string lambda = trim(r.text.substr(arrow + 2));
    std::string name;
    at_line(filename, r.line, [&] { name = parse_typed_name(head).name; });
    auto [it, fresh] = by_name.try_emplace(name, grouped.size());
    if (fresh) {
      grouped.push_back({head, {}});
      first_line[name] = r.line;
    }
    grouped[it->second].second.push_back(lambda);
  }
  for (const auto& [head, lambdas] : grouped) {
    at_line(filename, first_line[parse_typed_name(head).name], [&] { kb.define(head, lambdas); });
  }

  for (const auto& s : sentences) at_line(filename, s.line, [&] { kb.constraint(s.text); });
}

}  // namespace lazykb
