#include "qlet/sexpr.hpp"

namespace qlet {
namespace {

struct Lexer {
  std::string_view text;
  size_t pos = 0;
  int line = 1;

  void skip_ws() {
    while (pos < text.size()) {
      char c = text[pos];
      if (c == ';') {
        while (pos < text.size() && text[pos] != '\n') ++pos;
      } else if (c == '\n') {
        ++line;
        ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r') {
        ++pos;
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_ws();
    return pos >= text.size();
  }

  Sexpr next() {
    skip_ws();
    if (pos >= text.size()) throw ParseError("unexpected end of input", line);
    char c = text[pos];
    if (c == '(') {
      Sexpr list;
      list.line = line;
      ++pos;
      while (true) {
        skip_ws();
        if (pos >= text.size()) throw ParseError("unterminated list", list.line);
        if (text[pos] == ')') {
          ++pos;
          return list;
        }
        list.items.push_back(next());
      }
    }
    if (c == ')') throw ParseError("unexpected ')'", line);
    Sexpr a;
    a.is_atom = true;
    a.line = line;
    size_t start = pos;
    while (pos < text.size()) {
      char d = text[pos];
      if (d == '(' || d == ')' || d == ';' || d == ' ' || d == '\t' || d == '\r' || d == '\n') break;
      ++pos;
    }
    a.atom = std::string(text.substr(start, pos - start));
    return a;
  }
};

}  // namespace

std::string Sexpr::to_string() const {
  if (is_atom) return atom;
  std::string out = "(";
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += ' ';
    out += items[i].to_string();
  }
  out += ')';
  return out;
}

Sexpr read_sexpr(std::string_view text) {
  Lexer lx{text};
  Sexpr e = lx.next();
  if (!lx.at_end()) throw ParseError("trailing content after expression", lx.line);
  return e;
}

std::vector<Sexpr> read_sexprs(std::string_view text) {
  Lexer lx{text};
  std::vector<Sexpr> out;
  while (!lx.at_end()) out.push_back(lx.next());
  return out;
}

}  // namespace qlet
