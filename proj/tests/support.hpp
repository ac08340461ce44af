#pragma once

// Shared helpers for the unit and acceptance tests: independent oracles and
// deterministic random generators for sentences and structures.

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qlet/semantics.hpp"
#include "qlet/syntax.hpp"

namespace testsupport {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Textbook definition of alphabetic variance, independent of the library's
// depth-map comparison: rename both binders to a shared fresh variable and
// compare the bodies.
inline bool av_oracle(const qlet::FormulaPtr& f, const qlet::FormulaPtr& g, int& fresh) {
  using qlet::Conn;
  if (f->kind != g->kind) return false;
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Identity:
      return f->pred == g->pred && f->args == g->args;
    case Conn::Forall:
    case Conn::Exists: {
      qlet::Term z = qlet::Term::var("@" + std::to_string(fresh++));
      return av_oracle(qlet::substitute(f->sub[0], f->var, z),
                       qlet::substitute(g->sub[0], g->var, z), fresh);
    }
    default:
      for (size_t i = 0; i < f->sub.size(); ++i)
        if (!av_oracle(f->sub[i], g->sub[i], fresh)) return false;
      return true;
  }
}

inline bool av_oracle(const qlet::FormulaPtr& f, const qlet::FormulaPtr& g) {
  int fresh = 0;
  return av_oracle(f, g, fresh);
}

// Generate-everything-then-filter valuation oracle: all 2^k value maps over
// the closure, kept when every circ atom set to 1 satisfies clause 8.
inline std::vector<qlet::ChoiceAssignment> valuation_oracle(
    const qlet::Structure& s, const std::vector<qlet::FormulaPtr>& sentences) {
  auto atoms = qlet::closure(sentences, s);
  if (atoms.size() > 20) throw std::runtime_error("oracle closure too large");
  std::vector<qlet::ChoiceAssignment> out;
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << atoms.size()); ++bits) {
    qlet::ChoiceAssignment a;
    for (size_t i = 0; i < atoms.size(); ++i)
      a.values[atoms[i]] = static_cast<int>((bits >> (atoms.size() - 1 - i)) & 1);
    bool ok = true;
    for (const auto& [atom, value] : a.values) {
      if (atom.kind != qlet::ChoiceKind::Circ || value != 1) continue;
      qlet::Evaluator ev(s, a);
      int va = ev.evaluate(atom.operand.formula);
      int vn = ev.evaluate(qlet::Formula::negate(atom.operand.formula));
      if ((va == 1) != (vn == 0)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(std::move(a));
  }
  return out;
}

// Deterministic random formula over P/1, R/2, constants {a, b} and the bound
// variables currently in scope. Always closed when scope starts empty.
inline qlet::FormulaPtr random_formula(std::mt19937& rng, int depth, bool allow_circ_bull,
                                       std::vector<std::string> scope = {}) {
  using qlet::Formula;
  using qlet::Term;
  auto pick = [&](int n) { return static_cast<int>(rng() % n); };
  auto term = [&]() -> Term {
    if (!scope.empty() && pick(2) == 0) return Term::var(scope[pick(static_cast<int>(scope.size()))]);
    return Term::constant(pick(2) == 0 ? "a" : "b");
  };
  if (depth <= 0) {
    if (pick(4) == 0) return Formula::identity(term(), term());
    if (pick(2) == 0) return Formula::atom("P", {term()});
    return Formula::atom("R", {term(), term()});
  }
  switch (pick(allow_circ_bull ? 8 : 6)) {
    case 0: return Formula::negate(random_formula(rng, depth - 1, allow_circ_bull, scope));
    case 1:
      return Formula::conj(random_formula(rng, depth - 1, allow_circ_bull, scope),
                           random_formula(rng, depth - 1, allow_circ_bull, scope));
    case 2:
      return Formula::disj(random_formula(rng, depth - 1, allow_circ_bull, scope),
                           random_formula(rng, depth - 1, allow_circ_bull, scope));
    case 3:
    case 4: {
      std::string v = "v" + std::to_string(scope.size());
      scope.push_back(v);
      // the body must use the bound variable; force an atom on it when the
      // random body happens not to
      qlet::FormulaPtr body = random_formula(rng, depth - 1, allow_circ_bull, scope);
      if (!qlet::free_vars(body).count(v))
        body = Formula::disj(body, Formula::atom("P", {Term::var(v)}));
      return pick(2) == 0 ? Formula::forall(v, body) : Formula::exists(v, body);
    }
    case 5: return random_formula(rng, depth - 1, allow_circ_bull, scope);
    case 6: return Formula::circ(random_formula(rng, depth - 1, allow_circ_bull, scope));
    default: return Formula::bull(random_formula(rng, depth - 1, allow_circ_bull, scope));
  }
}

// Random structure over domain d1..dn interpreting P/1, R/2 and constants
// a, b with arbitrary extension/anti-extension states.
inline qlet::Structure random_structure(std::mt19937& rng, int n) {
  qlet::Structure s;
  for (int i = 1; i <= n; ++i) s.domain.push_back("d" + std::to_string(i));
  s.assign["a"] = s.domain[rng() % n];
  s.assign["b"] = s.domain[rng() % n];
  s.preds["P"].arity = 1;
  s.preds["R"].arity = 2;
  for (const auto& e : s.domain) {
    if (rng() % 2) s.preds["P"].pos.insert({e});
    if (rng() % 2) s.preds["P"].neg.insert({e});
    for (const auto& e2 : s.domain) {
      if (rng() % 2) s.preds["R"].pos.insert({e, e2});
      if (rng() % 2) s.preds["R"].neg.insert({e, e2});
      if (rng() % 2) s.identity_neg.emplace(e, e2);
    }
  }
  return s;
}

}  // namespace testsupport
