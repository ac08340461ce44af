#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qlet/sexpr.hpp"

namespace qlet {

/// Non-logical vocabulary: individual constants and predicates with arities.
/// Identity is built in and never appears here. The constant stock is
/// extensible on demand (the proof checker introduces fresh constants).
struct Signature {
  std::vector<std::string> constants;      // declaration order, unique
  std::map<std::string, int> predicates;   // name -> arity (>= 0)

  bool has_constant(const std::string& name) const;
  void add_constant(const std::string& name);
  void add_predicate(const std::string& name, int arity);
};

Signature parse_signature(std::string_view text);
std::string to_string(const Signature& sig);

/// A term is a variable or a constant; there are no function symbols.
/// Element names acting as constants of the diagram language carry a '#'
/// prefix in their name ("#d1").
struct Term {
  enum class Kind { Var, Const };
  Kind kind;
  std::string name;

  static Term var(std::string n) { return {Kind::Var, std::move(n)}; }
  static Term constant(std::string n) { return {Kind::Const, std::move(n)}; }
  bool is_var() const { return kind == Kind::Var; }
  bool is_element() const { return kind == Kind::Const && !name.empty() && name[0] == '#'; }
  // Domain element named by a '#'-constant.
  std::string element() const { return name.substr(1); }

  friend bool operator==(const Term& a, const Term& b) {
    return a.kind == b.kind && a.name == b.name;
  }
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
};

enum class Conn { Atom, Identity, Not, And, Or, Circ, Bull, Forall, Exists };

class Formula;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Immutable formula tree. Construct through the factory functions, which
/// enforce the void-quantifier exclusion.
class Formula {
 public:
  Conn kind;
  std::string pred;             // Atom
  std::vector<Term> args;       // Atom; Identity uses exactly two
  std::string var;              // Forall / Exists (name without the '?' sigil)
  std::vector<FormulaPtr> sub;  // children

  static FormulaPtr atom(std::string pred, std::vector<Term> args);
  static FormulaPtr identity(Term lhs, Term rhs);
  static FormulaPtr negate(FormulaPtr f);
  static FormulaPtr conj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr disj(FormulaPtr a, FormulaPtr b);
  static FormulaPtr circ(FormulaPtr f);
  static FormulaPtr bull(FormulaPtr f);
  // Throw ParseError("void quantifier") when `var` has no free occurrence
  // in `body`.
  static FormulaPtr forall(std::string var, FormulaPtr body);
  static FormulaPtr exists(std::string var, FormulaPtr body);
};

bool equal(const FormulaPtr& a, const FormulaPtr& b);
std::string to_string(const FormulaPtr& f);

std::set<std::string> free_vars(const FormulaPtr& f);
bool is_sentence(const FormulaPtr& f);
bool contains_constant(const FormulaPtr& f, const std::string& name);
std::set<std::string> constants_of(const FormulaPtr& f);
std::set<std::string> predicates_of(const FormulaPtr& f);
bool circ_bull_free(const FormulaPtr& f);

/// Replaces every free occurrence of `var` by the constant term `c`.
/// Bound occurrences are untouched; no capture is possible.
FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const Term& c);

/// True iff `g` results from `f` by a binding-structure-preserving renaming
/// of bound variables.
bool alphabetic_variant_eq(const FormulaPtr& f, const FormulaPtr& g);

/// A sentence with constants replaced by the domain elements they denote and
/// bound variables renamed to an indexed scheme in left-to-right order of
/// binder occurrence. Two sentences canonicalize equal iff they are
/// alphabetic variants after identifying denotation-equal constants.
struct CanonicalSentence {
  FormulaPtr formula;
  std::string key;

  friend bool operator==(const CanonicalSentence& a, const CanonicalSentence& b) {
    return a.key == b.key;
  }
  friend bool operator<(const CanonicalSentence& a, const CanonicalSentence& b) {
    return a.key < b.key;
  }
};

/// `assign` maps constant names to element names; '#'-constants pass through.
/// Throws ParseError on a constant with no entry.
CanonicalSentence canonicalize(const FormulaPtr& sentence,
                               const std::map<std::string, std::string>& assign);

struct ParseOptions {
  bool extend_constants = false;   // auto-declare unknown constants
  bool extend_predicates = false;  // auto-declare predicates at observed arity
};

FormulaPtr parse_formula(std::string_view text, const Signature& sig);
FormulaPtr parse_formula(std::string_view text, Signature& sig, const ParseOptions& opts);
FormulaPtr parse_formula(const Sexpr& e, Signature& sig, const ParseOptions& opts);

/// As parse_formula, but additionally requires closedness.
FormulaPtr parse_sentence(std::string_view text, const Signature& sig);
FormulaPtr parse_sentence(std::string_view text, Signature& sig, const ParseOptions& opts);

/// Reads a sentence-list file: one formula per line, ';' comments.
std::vector<FormulaPtr> parse_sentence_list(std::string_view text, Signature& sig,
                                            const ParseOptions& opts);

}  // namespace qlet
