#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qlet {

/// Error raised by any of the text-format readers. Carries a 1-based line
/// number when the source location is known.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

/// A parsed S-expression: either a bare atom or a list of S-expressions.
struct Sexpr {
  bool is_atom = false;
  std::string atom;
  std::vector<Sexpr> items;
  int line = 0;

  bool is_list() const { return !is_atom; }
  size_t size() const { return items.size(); }
  const Sexpr& operator[](size_t i) const { return items[i]; }

  // Head symbol of a list, or empty string if this is not a list with an
  // atom in head position.
  std::string head() const {
    if (is_atom || items.empty() || !items[0].is_atom) return {};
    return items[0].atom;
  }

  std::string to_string() const;
};

/// Reads a single S-expression from `text`. Comments start with ';' and run
/// to end of line. Trailing content after the expression is an error.
Sexpr read_sexpr(std::string_view text);

/// Reads all top-level S-expressions from `text`.
std::vector<Sexpr> read_sexprs(std::string_view text);

}  // namespace qlet
