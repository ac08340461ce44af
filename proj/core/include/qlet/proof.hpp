#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qlet/semantics.hpp"
#include "qlet/syntax.hpp"

namespace qlet {

enum class RuleId {
  AndI, AndE_L, AndE_R,
  OrI_L, OrI_R, OrE,
  NegAndI_L, NegAndI_R, NegAndE,
  NegOrI, NegOrE_L, NegOrE_R,
  DN_I, DN_E,
  ExpCirc, PemCirc, Cons, Comp,
  ForallI, ForallI_Prime, ForallE,
  ExistsI, ExistsE,
  NegForallI, NegForallE,
  NegExistsI, NegExistsE,
  IdI, IdE, AV,
  PEM, EXP,
};

std::string rule_name(RuleId rule);
std::optional<RuleId> rule_from_name(const std::string& name);

/// A derivation tree node: an open premise, a labeled hypothesis, or an
/// inference with a rule, conclusion, discharge annotations and children.
struct Derivation {
  enum class Kind { Premise, Hyp, Infer };

  Kind kind;
  FormulaPtr sentence;                      // the node's (concluding) sentence
  std::string label;                        // Hyp only
  RuleId rule = RuleId::AndI;               // Infer only
  std::vector<std::string> discharges;      // Infer only
  std::optional<std::string> const_hint;    // ":const c"
  std::optional<std::string> var_hint;      // ":var ?x"
  std::vector<std::shared_ptr<Derivation>> children;
};

using DerivationPtr = std::shared_ptr<Derivation>;

/// Rule set plus the structural and vocabulary constraints of one of the
/// logics qletf, qfde, qk3, qlp, qcl, qfde-prime.
struct RuleProfile {
  std::string name;
  std::set<RuleId> rules;
  Constraint constraint = Constraint::None;
  bool allow_circ_bull = true;

  bool allows(RuleId rule) const { return rules.count(rule) > 0; }

  /// Throws ParseError for an unknown profile name.
  static RuleProfile named(const std::string& name);
};

struct OpenHypothesis {
  std::string label;   // empty for Premise leaves
  FormulaPtr sentence;
};

/// The Premise and undischarged Hyp leaves of the (sub)derivation.
std::vector<OpenHypothesis> open_hypotheses(const Derivation& d);

struct CheckReport {
  bool accepted = false;
  size_t nodes = 0;
  // On rejection: path of child indices from the root, the offending rule
  // (empty at leaves), and the violated condition.
  std::string failure_path;
  std::string failure_rule;
  std::string failure_message;
  std::vector<OpenHypothesis> open_premises;  // of the root, when accepted
};

/// Checks a derivation against a profile. `sig` is extended with any fresh
/// constants mentioned by the derivation.
CheckReport check_derivation(const Derivation& d, const RuleProfile& profile, Signature& sig);

/// Parses a proof file (one proof term). Constants are auto-declared;
/// predicates too unless already fixed in `sig`.
DerivationPtr parse_proof(std::string_view text, Signature& sig);
DerivationPtr parse_proof(const Sexpr& e, Signature& sig);

}  // namespace qlet
