#include "qlet/proof.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace qlet {

namespace {

constexpr std::array<std::pair<RuleId, const char*>, 32> kRuleNames{{
    {RuleId::AndI, "and-i"},
    {RuleId::AndE_L, "and-e-l"},
    {RuleId::AndE_R, "and-e-r"},
    {RuleId::OrI_L, "or-i-l"},
    {RuleId::OrI_R, "or-i-r"},
    {RuleId::OrE, "or-e"},
    {RuleId::NegAndI_L, "neg-and-i-l"},
    {RuleId::NegAndI_R, "neg-and-i-r"},
    {RuleId::NegAndE, "neg-and-e"},
    {RuleId::NegOrI, "neg-or-i"},
    {RuleId::NegOrE_L, "neg-or-e-l"},
    {RuleId::NegOrE_R, "neg-or-e-r"},
    {RuleId::DN_I, "dn-i"},
    {RuleId::DN_E, "dn-e"},
    {RuleId::ExpCirc, "exp-circ"},
    {RuleId::PemCirc, "pem-circ"},
    {RuleId::Cons, "cons"},
    {RuleId::Comp, "comp"},
    {RuleId::ForallI, "forall-i"},
    {RuleId::ForallI_Prime, "forall-i-prime"},
    {RuleId::ForallE, "forall-e"},
    {RuleId::ExistsI, "exists-i"},
    {RuleId::ExistsE, "exists-e"},
    {RuleId::NegForallI, "neg-forall-i"},
    {RuleId::NegForallE, "neg-forall-e"},
    {RuleId::NegExistsI, "neg-exists-i"},
    {RuleId::NegExistsE, "neg-exists-e"},
    {RuleId::IdI, "id-i"},
    {RuleId::IdE, "id-e"},
    {RuleId::AV, "av"},
    {RuleId::PEM, "pem"},
    {RuleId::EXP, "exp"},
}};

}  // namespace

std::string rule_name(RuleId rule) {
  for (const auto& [id, name] : kRuleNames)
    if (id == rule) return name;
  return "?";
}

std::optional<RuleId> rule_from_name(const std::string& name) {
  for (const auto& [id, n] : kRuleNames)
    if (name == n) return id;
  return std::nullopt;
}

RuleProfile RuleProfile::named(const std::string& name) {
  std::set<RuleId> qletf = {
      RuleId::AndI, RuleId::AndE_L, RuleId::AndE_R,
      RuleId::OrI_L, RuleId::OrI_R, RuleId::OrE,
      RuleId::NegAndI_L, RuleId::NegAndI_R, RuleId::NegAndE,
      RuleId::NegOrI, RuleId::NegOrE_L, RuleId::NegOrE_R,
      RuleId::DN_I, RuleId::DN_E,
      RuleId::ExpCirc, RuleId::PemCirc, RuleId::Cons, RuleId::Comp,
      RuleId::ForallI, RuleId::ForallE, RuleId::ExistsI, RuleId::ExistsE,
      RuleId::NegForallI, RuleId::NegForallE, RuleId::NegExistsI, RuleId::NegExistsE,
      RuleId::IdI, RuleId::IdE, RuleId::AV,
  };
  std::set<RuleId> qfde = qletf;
  for (RuleId r : {RuleId::ExpCirc, RuleId::PemCirc, RuleId::Cons, RuleId::Comp, RuleId::AV})
    qfde.erase(r);
  if (name == "qletf") return {name, std::move(qletf), Constraint::None, true};
  if (name == "qfde") return {name, std::move(qfde), Constraint::None, false};
  if (name == "qk3") {
    qfde.insert(RuleId::EXP);
    return {name, std::move(qfde), Constraint::E2, false};
  }
  if (name == "qlp") {
    qfde.insert(RuleId::PEM);
    return {name, std::move(qfde), Constraint::E1, false};
  }
  if (name == "qcl") {
    qfde.insert(RuleId::PEM);
    qfde.insert(RuleId::EXP);
    return {name, std::move(qfde), Constraint::E1E2, false};
  }
  if (name == "qfde-prime") {
    qfde.erase(RuleId::ForallI);
    qfde.insert(RuleId::ForallI_Prime);
    return {name, std::move(qfde), Constraint::None, false};
  }
  throw ParseError("unknown profile '" + name + "'");
}

namespace {

struct CheckFailure {
  std::string path;
  std::string rule;
  std::string message;
};

// Matches `instance` against matrix(c/var) and reports the unique constant c.
// Bound variables must coincide literally; renaming is AV's business.
bool match_instance(const FormulaPtr& matrix, const FormulaPtr& instance, const std::string& var,
                    std::set<std::string>& shadowed, std::optional<std::string>& c) {
  if (matrix->kind != instance->kind) return false;
  switch (matrix->kind) {
    case Conn::Atom:
    case Conn::Identity: {
      if (matrix->pred != instance->pred || matrix->args.size() != instance->args.size())
        return false;
      for (size_t i = 0; i < matrix->args.size(); ++i) {
        const Term& tm = matrix->args[i];
        const Term& ti = instance->args[i];
        if (tm.is_var() && tm.name == var && !shadowed.count(var)) {
          if (ti.is_var()) return false;
          if (c && *c != ti.name) return false;
          c = ti.name;
        } else if (tm != ti) {
          return false;
        }
      }
      return true;
    }
    case Conn::Forall:
    case Conn::Exists: {
      if (matrix->var != instance->var) return false;
      bool added = shadowed.insert(matrix->var).second;
      bool ok = match_instance(matrix->sub[0], instance->sub[0], var, shadowed, c);
      if (added) shadowed.erase(matrix->var);
      return ok;
    }
    default:
      if (matrix->sub.size() != instance->sub.size()) return false;
      for (size_t i = 0; i < matrix->sub.size(); ++i)
        if (!match_instance(matrix->sub[i], instance->sub[i], var, shadowed, c)) return false;
      return true;
  }
}

std::optional<std::string> match_instance(const FormulaPtr& matrix, const FormulaPtr& instance,
                                          const std::string& var) {
  std::set<std::string> shadowed;
  std::optional<std::string> c;
  if (!match_instance(matrix, instance, var, shadowed, c)) return std::nullopt;
  // Void quantifiers are excluded, so `var` always has a free occurrence.
  return c;
}

// Conclusion obtained from the minor premise by rewriting a subset of
// occurrences of c1 to c2 (identity elimination).
bool rewrites_to(const FormulaPtr& from, const FormulaPtr& to, const std::string& c1,
                 const std::string& c2) {
  if (from->kind != to->kind) return false;
  switch (from->kind) {
    case Conn::Atom:
    case Conn::Identity: {
      if (from->pred != to->pred || from->args.size() != to->args.size()) return false;
      for (size_t i = 0; i < from->args.size(); ++i) {
        const Term& a = from->args[i];
        const Term& b = to->args[i];
        if (a == b) continue;
        if (!a.is_var() && !b.is_var() && a.name == c1 && b.name == c2) continue;
        return false;
      }
      return true;
    }
    case Conn::Forall:
    case Conn::Exists:
      if (from->var != to->var) return false;
      return rewrites_to(from->sub[0], to->sub[0], c1, c2);
    default:
      if (from->sub.size() != to->sub.size()) return false;
      for (size_t i = 0; i < from->sub.size(); ++i)
        if (!rewrites_to(from->sub[i], to->sub[i], c1, c2)) return false;
      return true;
  }
}

class Checker {
 public:
  Checker(const RuleProfile& profile, Signature& sig) : profile_(profile), sig_(sig) {}

  std::vector<OpenHypothesis> walk(const Derivation& d, const std::string& path) {
    ++nodes_;
    check_vocabulary(d, path);
    switch (d.kind) {
      case Derivation::Kind::Premise:
        return {{"", d.sentence}};
      case Derivation::Kind::Hyp:
        return {{d.label, d.sentence}};
      case Derivation::Kind::Infer:
        return infer(d, path);
    }
    return {};
  }

  size_t nodes() const { return nodes_; }

 private:
  [[noreturn]] void fail(const std::string& path, const Derivation& d, const std::string& msg) {
    throw CheckFailure{path, d.kind == Derivation::Kind::Infer ? rule_name(d.rule) : "", msg};
  }

  void check_vocabulary(const Derivation& d, const std::string& path) {
    if (!profile_.allow_circ_bull && !circ_bull_free(d.sentence))
      fail(path, d, "vocabulary violation: circ/bull not available under profile " + profile_.name +
                        " in " + to_string(d.sentence));
  }

  void expect_children(const Derivation& d, const std::string& path, size_t n) {
    if (d.children.size() != n)
      fail(path, d, "rule " + rule_name(d.rule) + " takes " + std::to_string(n) +
                        " subderivations, got " + std::to_string(d.children.size()));
  }

  const FormulaPtr& child_concl(const Derivation& d, size_t i) const {
    return d.children[i]->sentence;
  }

  void require(bool ok, const Derivation& d, const std::string& path, const std::string& msg) {
    if (!ok) fail(path, d, msg);
  }

  // Removes open entries carrying a discharged label from `hyps`; every such
  // entry must carry the expected hypothesis sentence (or one of several
  // alternatives, for rules whose branches assume different formulas).
  void discharge(const Derivation& d, const std::string& path, std::vector<OpenHypothesis>& hyps,
                 const FormulaPtr& expected) {
    for (auto it = hyps.begin(); it != hyps.end();) {
      if (!it->label.empty() &&
          std::find(d.discharges.begin(), d.discharges.end(), it->label) != d.discharges.end()) {
        require(equal(it->sentence, expected), d, path,
                "discharged hypothesis [" + it->label + "] " + to_string(it->sentence) +
                    " does not match the rule's assumption " + to_string(expected));
        it = hyps.erase(it);
      } else {
        ++it;
      }
    }
  }

  std::optional<std::string> occurring_in_hyps(const std::string& c,
                                               const std::vector<OpenHypothesis>& hyps) {
    for (const auto& h : hyps)
      if (contains_constant(h.sentence, c)) return to_string(h.sentence);
    return std::nullopt;
  }

  std::string resolve_constant(const Derivation& d, const std::string& path,
                               const std::optional<std::string>& inferred) {
    if (d.const_hint) {
      require(!inferred || *inferred == *d.const_hint, d, path,
              "annotation :const " + *d.const_hint + " conflicts with inferred eigenconstant " +
                  (inferred ? *inferred : std::string("?")));
      return *d.const_hint;
    }
    require(inferred.has_value(), d, path, "cannot infer the rule's instantiating constant");
    return *inferred;
  }

  void check_const_hint(const Derivation& d, const std::string& path,
                        const std::optional<std::string>& inferred) {
    if (d.const_hint && inferred && *inferred != *d.const_hint)
      fail(path, d, "annotation :const " + *d.const_hint +
                        " conflicts with inferred instantiating constant " + *inferred);
  }

  void check_var_hint(const Derivation& d, const std::string& path, const std::string& var) {
    if (d.var_hint)
      require(*d.var_hint == var, d, path,
              "annotation :var ?" + *d.var_hint + " conflicts with bound variable ?" + var);
  }

  std::vector<OpenHypothesis> merge(std::vector<std::vector<OpenHypothesis>> sets) {
    std::vector<OpenHypothesis> out;
    for (auto& s : sets)
      for (auto& h : s) out.push_back(std::move(h));
    return out;
  }

  std::vector<OpenHypothesis> infer(const Derivation& d, const std::string& path) {
    require(profile_.allows(d.rule), d, path,
            "rule " + rule_name(d.rule) + " is not part of profile " + profile_.name);
    std::vector<std::vector<OpenHypothesis>> child_hyps;
    for (size_t i = 0; i < d.children.size(); ++i)
      child_hyps.push_back(walk(*d.children[i], path + "." + std::to_string(i)));

    const FormulaPtr& concl = d.sentence;
    bool discharging = d.rule == RuleId::OrE || d.rule == RuleId::NegAndE ||
                       d.rule == RuleId::ExistsE || d.rule == RuleId::NegForallE;
    require(discharging || d.discharges.empty(), d, path,
            "rule " + rule_name(d.rule) + " does not discharge hypotheses");

    switch (d.rule) {
      case RuleId::AndI: {
        expect_children(d, path, 2);
        require(concl->kind == Conn::And && equal(concl->sub[0], child_concl(d, 0)) &&
                    equal(concl->sub[1], child_concl(d, 1)),
                d, path, "conclusion does not match the and-i schema");
        break;
      }
      case RuleId::AndE_L:
      case RuleId::AndE_R: {
        expect_children(d, path, 1);
        const FormulaPtr& p = child_concl(d, 0);
        require(p->kind == Conn::And &&
                    equal(concl, p->sub[d.rule == RuleId::AndE_L ? 0 : 1]),
                d, path, "conclusion is not the stated conjunct of the premise");
        break;
      }
      case RuleId::OrI_L:
      case RuleId::OrI_R: {
        expect_children(d, path, 1);
        require(concl->kind == Conn::Or &&
                    equal(child_concl(d, 0), concl->sub[d.rule == RuleId::OrI_L ? 0 : 1]),
                d, path, "premise is not the stated disjunct of the conclusion");
        break;
      }
      case RuleId::OrE: {
        expect_children(d, path, 3);
        const FormulaPtr& major = child_concl(d, 0);
        require(major->kind == Conn::Or, d, path, "or-e major premise must be a disjunction");
        require(equal(child_concl(d, 1), concl) && equal(child_concl(d, 2), concl), d, path,
                "both minor conclusions must equal the rule's conclusion");
        discharge(d, path, child_hyps[1], major->sub[0]);
        discharge(d, path, child_hyps[2], major->sub[1]);
        break;
      }
      case RuleId::NegAndI_L:
      case RuleId::NegAndI_R: {
        expect_children(d, path, 1);
        require(concl->kind == Conn::Not && concl->sub[0]->kind == Conn::And, d, path,
                "conclusion must be a negated conjunction");
        FormulaPtr expected =
            Formula::negate(concl->sub[0]->sub[d.rule == RuleId::NegAndI_L ? 0 : 1]);
        require(equal(child_concl(d, 0), expected), d, path,
                "premise is not the negation of the stated conjunct");
        break;
      }
      case RuleId::NegAndE: {
        expect_children(d, path, 3);
        const FormulaPtr& major = child_concl(d, 0);
        require(major->kind == Conn::Not && major->sub[0]->kind == Conn::And, d, path,
                "neg-and-e major premise must be a negated conjunction");
        require(equal(child_concl(d, 1), concl) && equal(child_concl(d, 2), concl), d, path,
                "both minor conclusions must equal the rule's conclusion");
        discharge(d, path, child_hyps[1], Formula::negate(major->sub[0]->sub[0]));
        discharge(d, path, child_hyps[2], Formula::negate(major->sub[0]->sub[1]));
        break;
      }
      case RuleId::NegOrI: {
        expect_children(d, path, 2);
        require(concl->kind == Conn::Not && concl->sub[0]->kind == Conn::Or &&
                    equal(child_concl(d, 0), Formula::negate(concl->sub[0]->sub[0])) &&
                    equal(child_concl(d, 1), Formula::negate(concl->sub[0]->sub[1])),
                d, path, "conclusion does not match the neg-or-i schema");
        break;
      }
      case RuleId::NegOrE_L:
      case RuleId::NegOrE_R: {
        expect_children(d, path, 1);
        const FormulaPtr& p = child_concl(d, 0);
        require(p->kind == Conn::Not && p->sub[0]->kind == Conn::Or, d, path,
                "premise must be a negated disjunction");
        require(equal(concl, Formula::negate(
                                 p->sub[0]->sub[d.rule == RuleId::NegOrE_L ? 0 : 1])),
                d, path, "conclusion is not the negation of the stated disjunct");
        break;
      }
      case RuleId::DN_I: {
        expect_children(d, path, 1);
        require(concl->kind == Conn::Not && concl->sub[0]->kind == Conn::Not &&
                    equal(concl->sub[0]->sub[0], child_concl(d, 0)),
                d, path, "conclusion is not the double negation of the premise");
        break;
      }
      case RuleId::DN_E: {
        expect_children(d, path, 1);
        const FormulaPtr& p = child_concl(d, 0);
        require(p->kind == Conn::Not && p->sub[0]->kind == Conn::Not &&
                    equal(p->sub[0]->sub[0], concl),
                d, path, "premise is not the double negation of the conclusion");
        break;
      }
      case RuleId::ExpCirc: {
        expect_children(d, path, 3);
        const FormulaPtr& circ = child_concl(d, 0);
        require(circ->kind == Conn::Circ && equal(circ->sub[0], child_concl(d, 1)) &&
                    equal(Formula::negate(circ->sub[0]), child_concl(d, 2)),
                d, path, "premises do not match the exp-circ schema (circ A, A, not A)");
        break;
      }
      case RuleId::PemCirc: {
        expect_children(d, path, 1);
        const FormulaPtr& circ = child_concl(d, 0);
        require(circ->kind == Conn::Circ && concl->kind == Conn::Or &&
                    equal(concl->sub[0], circ->sub[0]) &&
                    equal(concl->sub[1], Formula::negate(circ->sub[0])),
                d, path, "conclusion does not match the pem-circ schema (A or not A)");
        break;
      }
      case RuleId::Cons: {
        expect_children(d, path, 2);
        const FormulaPtr& circ = child_concl(d, 0);
        const FormulaPtr& bull = child_concl(d, 1);
        require(circ->kind == Conn::Circ && bull->kind == Conn::Bull &&
                    equal(circ->sub[0], bull->sub[0]),
                d, path, "premises do not match the cons schema (circ A, bull A)");
        break;
      }
      case RuleId::Comp: {
        expect_children(d, path, 0);
        require(concl->kind == Conn::Or && concl->sub[0]->kind == Conn::Circ &&
                    concl->sub[1]->kind == Conn::Bull &&
                    equal(concl->sub[0]->sub[0], concl->sub[1]->sub[0]),
                d, path, "conclusion must be (circ A) or (bull A) with identical A");
        break;
      }
      case RuleId::PEM: {
        expect_children(d, path, 0);
        require(concl->kind == Conn::Or && equal(concl->sub[1], Formula::negate(concl->sub[0])),
                d, path, "conclusion must have the form A or not A");
        break;
      }
      case RuleId::EXP: {
        expect_children(d, path, 2);
        require(equal(child_concl(d, 1), Formula::negate(child_concl(d, 0))), d, path,
                "premises do not match the exp schema (A, not A)");
        break;
      }
      case RuleId::ForallI: {
        expect_children(d, path, 1);
        require(concl->kind == Conn::Or && concl->sub[1]->kind == Conn::Forall, d, path,
                "conclusion must have the form B or (forall x A)");
        const FormulaPtr& side = concl->sub[0];
        const FormulaPtr& quant = concl->sub[1];
        check_var_hint(d, path, quant->var);
        const FormulaPtr& p = child_concl(d, 0);
        require(p->kind == Conn::Or && equal(p->sub[0], side), d, path,
                "premise must have the form B or A(c/x) with the same B");
        auto inferred = match_instance(quant->sub[0], p->sub[1], quant->var);
        require(inferred.has_value(), d, path,
                "premise disjunct is not an instance of the quantified matrix");
        std::string c = resolve_constant(d, path, inferred);
        require(!contains_constant(quant->sub[0], c), d, path,
                "eigenconstant " + c + " occurs in the quantified matrix");
        require(!contains_constant(side, c), d, path,
                "eigenconstant " + c + " occurs in the side disjunct " + to_string(side));
        if (auto h = occurring_in_hyps(c, child_hyps[0]))
          fail(path, d, "eigenconstant " + c + " occurs in open hypothesis " + *h);
        break;
      }
      case RuleId::ForallI_Prime: {
        expect_children(d, path, 1);
        require(concl->kind == Conn::Forall, d, path, "conclusion must be universally quantified");
        check_var_hint(d, path, concl->var);
        auto inferred = match_instance(concl->sub[0], child_concl(d, 0), concl->var);
        require(inferred.has_value(), d, path,
                "premise is not an instance of the quantified matrix");
        std::string c = resolve_constant(d, path, inferred);
        require(!contains_constant(concl->sub[0], c), d, path,
                "eigenconstant " + c + " occurs in the quantified matrix");
        if (auto h = occurring_in_hyps(c, child_hyps[0]))
          fail(path, d, "eigenconstant " + c + " occurs in open hypothesis " + *h);
        break;
      }
      case RuleId::ForallE: {
        expect_children(d, path, 1);
        const FormulaPtr& p = child_concl(d, 0);
        require(p->kind == Conn::Forall, d, path, "premise must be universally quantified");
        check_var_hint(d, path, p->var);
        auto inst = match_instance(p->sub[0], concl, p->var);
        require(inst.has_value(), d, path,
                "conclusion is not an instance of the quantified matrix");
        check_const_hint(d, path, inst);
        break;
      }
      case RuleId::ExistsI: {
        expect_children(d, path, 1);
        require(concl->kind == Conn::Exists, d, path,
                "conclusion must be existentially quantified");
        check_var_hint(d, path, concl->var);
        auto inst = match_instance(concl->sub[0], child_concl(d, 0), concl->var);
        require(inst.has_value(), d, path, "premise is not an instance of the quantified matrix");
        check_const_hint(d, path, inst);
        break;
      }
      case RuleId::ExistsE:
      case RuleId::NegForallE: {
        expect_children(d, path, 2);
        bool negated = d.rule == RuleId::NegForallE;
        FormulaPtr major = child_concl(d, 0);
        if (negated) {
          require(major->kind == Conn::Not && major->sub[0]->kind == Conn::Forall, d, path,
                  "major premise must be a negated universal");
          major = major->sub[0];
        } else {
          require(major->kind == Conn::Exists, d, path,
                  "major premise must be existentially quantified");
        }
        check_var_hint(d, path, major->var);
        require(equal(child_concl(d, 1), concl), d, path,
                "minor conclusion must equal the rule's conclusion");
        // The eigenconstant comes from the discharged hypotheses A(c/x)
        // (not A(c/x) for neg-forall-e).
        std::optional<std::string> inferred;
        for (const auto& h : child_hyps[1]) {
          if (h.label.empty() ||
              std::find(d.discharges.begin(), d.discharges.end(), h.label) == d.discharges.end())
            continue;
          FormulaPtr body = h.sentence;
          if (negated) {
            require(body->kind == Conn::Not, d, path,
                    "discharged hypothesis must be a negated instance of the matrix");
            body = body->sub[0];
          }
          auto c = match_instance(major->sub[0], body, major->var);
          require(c.has_value(), d, path,
                  "discharged hypothesis " + to_string(h.sentence) +
                      " is not an instance of the quantified matrix");
          require(!inferred || *inferred == *c, d, path,
                  "discharged hypotheses disagree on the eigenconstant (" + *inferred + " vs " +
                      *c + ")");
          inferred = c;
        }
        std::string c;
        if (inferred) {
          c = resolve_constant(d, path, inferred);
        } else if (d.const_hint) {
          c = *d.const_hint;
        } else {
          // Vacuous discharge: any fresh constant witnesses the side
          // conditions, so there is nothing left to check.
          discharge_matching(d, child_hyps[1]);
          break;
        }
        require(!contains_constant(major->sub[0], c), d, path,
                "eigenconstant " + c + " occurs in the quantified matrix");
        require(!contains_constant(concl, c), d, path,
                "eigenconstant " + c + " occurs in the conclusion " + to_string(concl));
        discharge_matching(d, child_hyps[1]);
        if (auto h = occurring_in_hyps(c, child_hyps[1]))
          fail(path, d, "eigenconstant " + c + " occurs in open hypothesis " + *h);
        break;
      }
      case RuleId::NegForallI: {
        expect_children(d, path, 1);
        require(concl->kind == Conn::Not && concl->sub[0]->kind == Conn::Forall, d, path,
                "conclusion must be a negated universal");
        const FormulaPtr& quant = concl->sub[0];
        check_var_hint(d, path, quant->var);
        const FormulaPtr& p = child_concl(d, 0);
        require(p->kind == Conn::Not, d, path, "premise must be negated");
        auto inst = match_instance(quant->sub[0], p->sub[0], quant->var);
        require(inst.has_value(), d, path,
                "premise is not a negated instance of the quantified matrix");
        check_const_hint(d, path, inst);
        break;
      }
      case RuleId::NegExistsI: {
        expect_children(d, path, 1);
        require(concl->kind == Conn::Not && concl->sub[0]->kind == Conn::Exists, d, path,
                "conclusion must be a negated existential");
        const FormulaPtr& quant = concl->sub[0];
        check_var_hint(d, path, quant->var);
        const FormulaPtr& p = child_concl(d, 0);
        require(p->kind == Conn::Not, d, path, "premise must be negated");
        auto inferred = match_instance(quant->sub[0], p->sub[0], quant->var);
        require(inferred.has_value(), d, path,
                "premise is not a negated instance of the quantified matrix");
        std::string c = resolve_constant(d, path, inferred);
        require(!contains_constant(quant->sub[0], c), d, path,
                "eigenconstant " + c + " occurs in the quantified matrix");
        if (auto h = occurring_in_hyps(c, child_hyps[0]))
          fail(path, d, "eigenconstant " + c + " occurs in open hypothesis " + *h);
        break;
      }
      case RuleId::NegExistsE: {
        expect_children(d, path, 1);
        const FormulaPtr& p = child_concl(d, 0);
        require(p->kind == Conn::Not && p->sub[0]->kind == Conn::Exists, d, path,
                "premise must be a negated existential");
        check_var_hint(d, path, p->sub[0]->var);
        require(concl->kind == Conn::Not, d, path, "conclusion must be negated");
        auto inst = match_instance(p->sub[0]->sub[0], concl->sub[0], p->sub[0]->var);
        require(inst.has_value(), d, path,
                "conclusion is not a negated instance of the quantified matrix");
        check_const_hint(d, path, inst);
        break;
      }
      case RuleId::IdI: {
        expect_children(d, path, 0);
        require(concl->kind == Conn::Identity && !concl->args[0].is_var() &&
                    concl->args[0] == concl->args[1],
                d, path, "conclusion must have the form c = c");
        break;
      }
      case RuleId::IdE: {
        expect_children(d, path, 2);
        const FormulaPtr& major = child_concl(d, 0);
        require(major->kind == Conn::Identity && !major->args[0].is_var() &&
                    !major->args[1].is_var(),
                d, path, "major premise must be an identity between constants");
        require(rewrites_to(child_concl(d, 1), concl, major->args[0].name, major->args[1].name),
                d, path,
                "conclusion is not obtained from the minor premise by rewriting " +
                    major->args[0].name + " to " + major->args[1].name);
        break;
      }
      case RuleId::AV: {
        expect_children(d, path, 1);
        require(alphabetic_variant_eq(child_concl(d, 0), concl), d, path,
                "conclusion is not an alphabetic variant of the premise");
        break;
      }
    }
    return merge(std::move(child_hyps));
  }

  // Removes discharged entries without sentence checks (callers have
  // already validated them where required).
  void discharge_matching(const Derivation& d, std::vector<OpenHypothesis>& hyps) {
    hyps.erase(std::remove_if(hyps.begin(), hyps.end(),
                              [&](const OpenHypothesis& h) {
                                return !h.label.empty() &&
                                       std::find(d.discharges.begin(), d.discharges.end(),
                                                 h.label) != d.discharges.end();
                              }),
               hyps.end());
  }

  const RuleProfile& profile_;
  Signature& sig_;
  size_t nodes_ = 0;
};

}  // namespace

std::vector<OpenHypothesis> open_hypotheses(const Derivation& d) {
  switch (d.kind) {
    case Derivation::Kind::Premise:
      return {{"", d.sentence}};
    case Derivation::Kind::Hyp:
      return {{d.label, d.sentence}};
    case Derivation::Kind::Infer: {
      std::vector<std::vector<OpenHypothesis>> child_sets;
      for (const auto& c : d.children) child_sets.push_back(open_hypotheses(*c));
      bool discharging = d.rule == RuleId::OrE || d.rule == RuleId::NegAndE ||
                         d.rule == RuleId::ExistsE || d.rule == RuleId::NegForallE;
      std::vector<OpenHypothesis> out;
      for (size_t i = 0; i < child_sets.size(); ++i) {
        bool minor = discharging && i >= 1;
        for (auto& h : child_sets[i]) {
          if (minor && !h.label.empty() &&
              std::find(d.discharges.begin(), d.discharges.end(), h.label) != d.discharges.end())
            continue;
          out.push_back(std::move(h));
        }
      }
      return out;
    }
  }
  return {};
}

CheckReport check_derivation(const Derivation& d, const RuleProfile& profile, Signature& sig) {
  CheckReport report;
  Checker checker(profile, sig);
  try {
    auto open = checker.walk(d, "root");
    report.nodes = checker.nodes();
    for (const auto& h : open) {
      if (!h.label.empty()) {
        report.accepted = false;
        report.failure_path = "root";
        report.failure_message =
            "undischarged hypothesis [" + h.label + "] " + to_string(h.sentence);
        return report;
      }
    }
    report.accepted = true;
    report.open_premises = std::move(open);
  } catch (const CheckFailure& f) {
    report.nodes = checker.nodes();
    report.accepted = false;
    report.failure_path = f.path;
    report.failure_rule = f.rule;
    report.failure_message = f.message;
  }
  return report;
}

namespace {

DerivationPtr parse_proof_rec(const Sexpr& e, Signature& sig) {
  ParseOptions opts{true, true};
  std::string head = e.head();
  auto node = std::make_shared<Derivation>();
  if (head == "premise") {
    if (e.size() != 2) throw ParseError("expected (premise FORMULA)", e.line);
    node->kind = Derivation::Kind::Premise;
    node->sentence = parse_formula(e[1], sig, opts);
  } else if (head == "hyp") {
    if (e.size() != 3 || !e[1].is_atom) throw ParseError("expected (hyp LABEL FORMULA)", e.line);
    node->kind = Derivation::Kind::Hyp;
    node->label = e[1].atom;
    node->sentence = parse_formula(e[2], sig, opts);
  } else if (head == "infer") {
    if (e.size() < 3 || !e[1].is_atom) throw ParseError("expected (infer RULE FORMULA ...)", e.line);
    node->kind = Derivation::Kind::Infer;
    auto rule = rule_from_name(e[1].atom);
    if (!rule) throw ParseError("unknown rule '" + e[1].atom + "'", e[1].line);
    node->rule = *rule;
    node->sentence = parse_formula(e[2], sig, opts);
    for (size_t i = 3; i < e.size(); ++i) {
      const Sexpr& item = e[i];
      if (item.is_atom && item.atom == ":discharge") {
        if (++i >= e.size() || e[i].is_atom)
          throw ParseError(":discharge expects a label list", item.line);
        for (const auto& l : e[i].items) {
          if (!l.is_atom) throw ParseError("label expected", l.line);
          node->discharges.push_back(l.atom);
        }
      } else if (item.is_atom && item.atom == ":const") {
        if (++i >= e.size() || !e[i].is_atom) throw ParseError(":const expects a constant", item.line);
        node->const_hint = e[i].atom;
        sig.add_constant(e[i].atom);
      } else if (item.is_atom && item.atom == ":var") {
        if (++i >= e.size() || !e[i].is_atom || e[i].atom.size() < 2 || e[i].atom[0] != '?')
          throw ParseError(":var expects a '?'-variable", item.line);
        node->var_hint = e[i].atom.substr(1);
      } else if (item.is_atom) {
        throw ParseError("unexpected token '" + item.atom + "' in proof term", item.line);
      } else {
        node->children.push_back(parse_proof_rec(item, sig));
      }
    }
  } else {
    throw ParseError("proof term must start with premise, hyp, or infer", e.line);
  }
  auto fv = free_vars(node->sentence);
  if (!fv.empty())
    throw ParseError("proof sentences must be closed, but ?" + *fv.begin() + " occurs free",
                     e.line);
  return node;
}

}  // namespace

DerivationPtr parse_proof(const Sexpr& e, Signature& sig) { return parse_proof_rec(e, sig); }

DerivationPtr parse_proof(std::string_view text, Signature& sig) {
  return parse_proof_rec(read_sexpr(text), sig);
}

}  // namespace qlet
