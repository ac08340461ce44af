#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "qlet/syntax.hpp"

namespace qlet {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when an enumeration would exceed a configured cap.
class CapError : public std::runtime_error {
 public:
  CapError(const std::string& what, long value)
      : std::runtime_error(what), value_(value) {}
  long value() const { return value_; }

 private:
  long value_;
};

struct PredInterp {
  int arity = -1;  // -1: not yet determined (empty interpretation)
  std::set<std::vector<std::string>> pos;
  std::set<std::vector<std::string>> neg;
};

/// Finite structure: domain, constant assignment, and per-predicate
/// extension/anti-extension. The identity extension is always the diagonal
/// and is not stored; only its anti-extension is free.
struct Structure {
  std::vector<std::string> domain;                 // ordered, non-empty
  std::map<std::string, std::string> assign;       // constant -> element
  std::map<std::string, PredInterp> preds;
  std::set<std::pair<std::string, std::string>> identity_neg;

  bool has_element(const std::string& e) const;
};

enum class Constraint { None, E1, E2, E1E2 };

bool constraint_has_e1(Constraint c);
bool constraint_has_e2(Constraint c);

/// Checks the structure invariants plus the requested extension condition.
/// Returns an error description, or nullopt when everything holds.
std::optional<std::string> validate_structure(const Structure& s, Constraint c);

Structure parse_structure(std::string_view text);
std::string to_string(const Structure& s);

enum class ChoiceKind { Circ, NegCirc, NegBull };

/// One independent binary degree of freedom of a valuation: the value of
/// circA, (not circA), or (not bullA), keyed by the canonical form of A.
struct ChoiceAtom {
  ChoiceKind kind;
  CanonicalSentence operand;

  friend bool operator<(const ChoiceAtom& a, const ChoiceAtom& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.operand.key < b.operand.key;
  }
  friend bool operator==(const ChoiceAtom& a, const ChoiceAtom& b) {
    return a.kind == b.kind && a.operand.key == b.operand.key;
  }
};

std::string to_string(const ChoiceAtom& a);

/// A total {0,1} map over a closure of choice atoms.
struct ChoiceAssignment {
  std::map<ChoiceAtom, int> values;

  std::string to_string() const;  // replayable "(choices ...)" form
};

ChoiceAssignment parse_choices(std::string_view text, const Structure& s);

/// The choice atoms reachable by the evaluation recursion from `sentences`,
/// quantifiers unfolded over the whole domain. Sorted, duplicate-free.
std::vector<ChoiceAtom> closure(const std::vector<FormulaPtr>& sentences, const Structure& s);

/// Deterministic evaluation of sentences relative to a structure and a
/// choice assignment, memoized per canonical sentence. One evaluator per
/// (structure, assignment) session; not shared between threads.
class Evaluator {
 public:
  Evaluator(const Structure& s, const ChoiceAssignment& choices);

  /// `sentence` may mention signature constants (resolved via the structure's
  /// assignment) or '#'-element constants.
  int evaluate(const FormulaPtr& sentence);

 private:
  int eval_ground(const FormulaPtr& f);
  int atom_value(const FormulaPtr& f, bool negated);
  int choice_value(ChoiceKind kind, const FormulaPtr& operand);

  const Structure& structure_;
  const ChoiceAssignment& choices_;
  std::map<std::string, int> memo_;
};

/// Yields every clause-8-consistent assignment over `atoms`, in lexicographic
/// order of the value tuple (atom order as given). The empty closure yields
/// exactly one (empty) assignment.
class ValuationEnumerator {
 public:
  ValuationEnumerator(const Structure& s, std::vector<ChoiceAtom> atoms);

  std::optional<ChoiceAssignment> next();

 private:
  const Structure& structure_;
  std::vector<ChoiceAtom> atoms_;
  std::uint64_t index_ = 0;
  std::uint64_t limit_;
};

/// All consistent assignments over closure(sentences). Throws CapError when
/// the closure has more than `max_choice_atoms` atoms.
std::vector<ChoiceAssignment> enumerate_valuations(const Structure& s,
                                                   const std::vector<FormulaPtr>& sentences,
                                                   int max_choice_atoms);

struct Holds {};
using EntailmentResult = std::variant<Holds, ChoiceAssignment>;

/// First enumerated assignment making all premises 1 and the conclusion 0,
/// else Holds.
EntailmentResult entails_on_structure(const Structure& s,
                                      const std::vector<FormulaPtr>& premises,
                                      const FormulaPtr& conclusion, int max_choice_atoms);

}  // namespace qlet
