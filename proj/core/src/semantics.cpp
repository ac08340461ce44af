#include "qlet/semantics.hpp"

#include <algorithm>
#include <sstream>

namespace qlet {

bool Structure::has_element(const std::string& e) const {
  return std::find(domain.begin(), domain.end(), e) != domain.end();
}

bool constraint_has_e1(Constraint c) { return c == Constraint::E1 || c == Constraint::E1E2; }
bool constraint_has_e2(Constraint c) { return c == Constraint::E2 || c == Constraint::E1E2; }

namespace {

std::string tuple_str(const std::vector<std::string>& tuple) {
  std::string out = "(";
  for (size_t i = 0; i < tuple.size(); ++i) {
    if (i > 0) out += ' ';
    out += tuple[i];
  }
  return out + ")";
}

// All n-tuples over the domain, lexicographic in domain order.
std::vector<std::vector<std::string>> all_tuples(const std::vector<std::string>& domain, int n) {
  std::vector<std::vector<std::string>> out{{}};
  for (int i = 0; i < n; ++i) {
    std::vector<std::vector<std::string>> next;
    for (const auto& t : out)
      for (const auto& e : domain) {
        auto u = t;
        u.push_back(e);
        next.push_back(std::move(u));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

std::optional<std::string> validate_structure(const Structure& s, Constraint c) {
  if (s.domain.empty()) return "empty domain";
  std::set<std::string> elems(s.domain.begin(), s.domain.end());
  if (elems.size() != s.domain.size()) return "duplicate domain element";
  for (const auto& [con, e] : s.assign)
    if (!elems.count(e)) return "constant '" + con + "' assigned to unknown element '" + e + "'";
  for (const auto& [name, interp] : s.preds) {
    if (interp.arity < 0 && (!interp.pos.empty() || !interp.neg.empty()))
      return "predicate '" + name + "' has tuples but no arity";
    for (const auto* side : {&interp.pos, &interp.neg})
      for (const auto& tuple : *side) {
        if (static_cast<int>(tuple.size()) != interp.arity)
          return "tuple " + tuple_str(tuple) + " outside D^n for predicate '" + name + "'";
        for (const auto& e : tuple)
          if (!elems.count(e))
            return "tuple " + tuple_str(tuple) + " outside D^n for predicate '" + name + "'";
      }
  }
  for (const auto& [a, b] : s.identity_neg)
    if (!elems.count(a) || !elems.count(b))
      return "identity anti-extension pair (" + a + " " + b + ") outside D^2";
  if (constraint_has_e1(c)) {
    for (const auto& [name, interp] : s.preds) {
      if (interp.arity < 0) continue;
      for (const auto& tuple : all_tuples(s.domain, interp.arity))
        if (!interp.pos.count(tuple) && !interp.neg.count(tuple))
          return "E1 violation: tuple " + tuple_str(tuple) + " of predicate '" + name +
                 "' is in neither the extension nor the anti-extension";
    }
    for (const auto& a : s.domain)
      for (const auto& b : s.domain)
        if (a != b && !s.identity_neg.count({a, b}))
          return "E1 violation: off-diagonal pair (" + a + " " + b +
                 ") missing from the identity anti-extension";
  }
  if (constraint_has_e2(c)) {
    for (const auto& [name, interp] : s.preds)
      for (const auto& tuple : interp.pos)
        if (interp.neg.count(tuple))
          return "E2 violation: tuple " + tuple_str(tuple) + " of predicate '" + name +
                 "' is in both the extension and the anti-extension";
    for (const auto& a : s.domain)
      if (s.identity_neg.count({a, a}))
        return "E2 violation: diagonal pair (" + a + " " + a +
               ") is in the identity anti-extension";
  }
  return std::nullopt;
}

namespace {

std::vector<std::string> parse_tuple(const Sexpr& e) {
  if (e.is_atom) throw ParseError("tuple expected", e.line);
  std::vector<std::string> tuple;
  for (const auto& item : e.items) {
    if (!item.is_atom) throw ParseError("element name expected", item.line);
    tuple.push_back(item.atom);
  }
  return tuple;
}

}  // namespace

Structure parse_structure(std::string_view text) {
  Sexpr e = read_sexpr(text);
  if (e.head() != "structure") throw ParseError("expected (structure ...)", e.line);
  Structure s;
  for (size_t i = 1; i < e.size(); ++i) {
    const Sexpr& section = e[i];
    std::string head = section.head();
    if (head == "domain") {
      for (size_t j = 1; j < section.size(); ++j) {
        if (!section[j].is_atom) throw ParseError("element name expected", section.line);
        s.domain.push_back(section[j].atom);
      }
    } else if (head == "assign") {
      for (size_t j = 1; j < section.size(); ++j) {
        const Sexpr& pair = section[j];
        if (pair.is_atom || pair.size() != 2 || !pair[0].is_atom || !pair[1].is_atom)
          throw ParseError("expected (CONSTANT ELEMENT)", pair.line);
        s.assign[pair[0].atom] = pair[1].atom;
      }
    } else if (head == "pred") {
      if (section.size() < 2 || !section[1].is_atom)
        throw ParseError("expected (pred NAME ...)", section.line);
      PredInterp interp;
      size_t j = 2;
      if (j < section.size() && section[j].is_atom) {
        try {
          interp.arity = std::stoi(section[j].atom);
        } catch (...) {
          throw ParseError("bad arity '" + section[j].atom + "'", section[j].line);
        }
        ++j;
      }
      for (; j < section.size(); ++j) {
        const Sexpr& side = section[j];
        std::string sh = side.head();
        if (sh != "pos" && sh != "neg") throw ParseError("expected (pos ...) or (neg ...)", side.line);
        for (size_t k = 1; k < side.size(); ++k) {
          auto tuple = parse_tuple(side[k]);
          if (interp.arity < 0) interp.arity = static_cast<int>(tuple.size());
          if (static_cast<int>(tuple.size()) != interp.arity)
            throw ParseError("tuple arity mismatch for predicate '" + section[1].atom + "'",
                             side[k].line);
          (sh == "pos" ? interp.pos : interp.neg).insert(std::move(tuple));
        }
      }
      s.preds[section[1].atom] = std::move(interp);
    } else if (head == "identity") {
      for (size_t j = 1; j < section.size(); ++j) {
        const Sexpr& side = section[j];
        if (side.head() != "neg") throw ParseError("identity section admits only (neg ...)", side.line);
        for (size_t k = 1; k < side.size(); ++k) {
          auto tuple = parse_tuple(side[k]);
          if (tuple.size() != 2) throw ParseError("identity pairs are binary", side[k].line);
          s.identity_neg.emplace(tuple[0], tuple[1]);
        }
      }
    } else {
      throw ParseError("unknown structure section", section.line);
    }
  }
  return s;
}

std::string to_string(const Structure& s) {
  std::ostringstream out;
  out << "(structure (domain";
  for (const auto& e : s.domain) out << ' ' << e;
  out << ") (assign";
  for (const auto& [c, e] : s.assign) out << " (" << c << ' ' << e << ')';
  out << ')';
  for (const auto& [name, interp] : s.preds) {
    out << " (pred " << name << ' ' << std::max(interp.arity, 0) << " (pos";
    for (const auto& t : interp.pos) out << ' ' << tuple_str(t);
    out << ") (neg";
    for (const auto& t : interp.neg) out << ' ' << tuple_str(t);
    out << "))";
  }
  out << " (identity (neg";
  for (const auto& [a, b] : s.identity_neg) out << " (" << a << ' ' << b << ')';
  out << ")))";
  return out.str();
}

std::string to_string(const ChoiceAtom& a) {
  const char* kind = a.kind == ChoiceKind::Circ      ? "circ"
                     : a.kind == ChoiceKind::NegCirc ? "negcirc"
                                                     : "negbull";
  return std::string("(") + kind + " " + a.operand.key + ")";
}

std::string ChoiceAssignment::to_string() const {
  std::string out = "(choices";
  for (const auto& [atom, value] : values) {
    const char* kind = atom.kind == ChoiceKind::Circ      ? "circ"
                       : atom.kind == ChoiceKind::NegCirc ? "negcirc"
                                                          : "negbull";
    out += std::string(" (") + kind + " " + atom.operand.key + " " + std::to_string(value) + ")";
  }
  return out + ")";
}

ChoiceAssignment parse_choices(std::string_view text, const Structure& s) {
  Sexpr e = read_sexpr(text);
  if (e.head() != "choices") throw ParseError("expected (choices ...)", e.line);
  ChoiceAssignment out;
  Signature scratch;  // predicates inferred from the formulas themselves
  ParseOptions opts{true, true};
  for (size_t i = 1; i < e.size(); ++i) {
    const Sexpr& entry = e[i];
    if (entry.is_atom || entry.size() != 3 || !entry[0].is_atom || !entry[2].is_atom)
      throw ParseError("expected (circ|negcirc|negbull FORMULA 0|1)", entry.line);
    ChoiceKind kind;
    if (entry[0].atom == "circ") kind = ChoiceKind::Circ;
    else if (entry[0].atom == "negcirc") kind = ChoiceKind::NegCirc;
    else if (entry[0].atom == "negbull") kind = ChoiceKind::NegBull;
    else throw ParseError("unknown choice kind '" + entry[0].atom + "'", entry.line);
    if (entry[2].atom != "0" && entry[2].atom != "1")
      throw ParseError("choice value must be 0 or 1", entry[2].line);
    FormulaPtr f = parse_formula(entry[1], scratch, opts);
    if (!is_sentence(f)) throw ParseError("choice operand must be a sentence", entry[1].line);
    out.values[{kind, canonicalize(f, s.assign)}] = entry[2].atom == "1" ? 1 : 0;
  }
  return out;
}

namespace {

struct ClosureCollector {
  const Structure& s;
  std::set<std::string> visited;
  std::set<ChoiceAtom> atoms;

  void collect(const FormulaPtr& f) {
    std::string key = canonicalize(f, {}).key;
    if (!visited.insert(key).second) return;
    switch (f->kind) {
      case Conn::Atom:
      case Conn::Identity:
        return;
      case Conn::And:
      case Conn::Or:
        collect(f->sub[0]);
        collect(f->sub[1]);
        return;
      case Conn::Circ:
      case Conn::Bull:
        // Clause-8 consistency of the circ atom mentions v(A) and v(not A),
        // so both recursions contribute to the closure.
        atoms.insert({ChoiceKind::Circ, canonicalize(f->sub[0], {})});
        collect(f->sub[0]);
        collect(Formula::negate(f->sub[0]));
        return;
      case Conn::Forall:
      case Conn::Exists:
        for (const auto& e : s.domain)
          collect(substitute(f->sub[0], f->var, Term::constant("#" + e)));
        return;
      case Conn::Not: {
        const FormulaPtr& g = f->sub[0];
        switch (g->kind) {
          case Conn::Atom:
          case Conn::Identity:
            return;
          case Conn::Not:
            collect(g->sub[0]);
            return;
          case Conn::And:
          case Conn::Or:
            collect(Formula::negate(g->sub[0]));
            collect(Formula::negate(g->sub[1]));
            return;
          case Conn::Circ:
            atoms.insert({ChoiceKind::NegCirc, canonicalize(g->sub[0], {})});
            return;
          case Conn::Bull:
            atoms.insert({ChoiceKind::NegBull, canonicalize(g->sub[0], {})});
            return;
          case Conn::Forall:
          case Conn::Exists:
            for (const auto& e : s.domain)
              collect(Formula::negate(substitute(g->sub[0], g->var, Term::constant("#" + e))));
            return;
        }
        return;
      }
    }
  }
};

}  // namespace

std::vector<ChoiceAtom> closure(const std::vector<FormulaPtr>& sentences, const Structure& s) {
  ClosureCollector collector{s, {}, {}};
  for (const auto& f : sentences) collector.collect(canonicalize(f, s.assign).formula);
  return {collector.atoms.begin(), collector.atoms.end()};
}

Evaluator::Evaluator(const Structure& s, const ChoiceAssignment& choices)
    : structure_(s), choices_(choices) {}

int Evaluator::evaluate(const FormulaPtr& sentence) {
  return eval_ground(canonicalize(sentence, structure_.assign).formula);
}

int Evaluator::atom_value(const FormulaPtr& f, bool negated) {
  std::vector<std::string> tuple;
  for (const Term& t : f->args) {
    if (!t.is_element()) throw EvalError("non-ground term in evaluation: " + t.name);
    std::string e = t.element();
    if (!structure_.has_element(e)) throw EvalError("element '" + e + "' not in domain");
    tuple.push_back(std::move(e));
  }
  if (f->kind == Conn::Identity) {
    if (!negated) return tuple[0] == tuple[1] ? 1 : 0;
    return structure_.identity_neg.count({tuple[0], tuple[1]}) ? 1 : 0;
  }
  auto it = structure_.preds.find(f->pred);
  if (it == structure_.preds.end()) return 0;
  if (it->second.arity >= 0 && it->second.arity != static_cast<int>(tuple.size()))
    throw EvalError("arity mismatch for predicate '" + f->pred + "'");
  const auto& side = negated ? it->second.neg : it->second.pos;
  return side.count(tuple) ? 1 : 0;
}

int Evaluator::choice_value(ChoiceKind kind, const FormulaPtr& operand) {
  ChoiceAtom atom{kind, canonicalize(operand, {})};
  auto it = choices_.values.find(atom);
  if (it == choices_.values.end())
    throw EvalError("missing choice atom " + to_string(atom));
  return it->second;
}

int Evaluator::eval_ground(const FormulaPtr& f) {
  std::string key = canonicalize(f, {}).key;
  auto memo = memo_.find(key);
  if (memo != memo_.end()) return memo->second;
  int value = 0;
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Identity:
      value = atom_value(f, false);
      break;
    case Conn::And:
      value = std::min(eval_ground(f->sub[0]), eval_ground(f->sub[1]));
      break;
    case Conn::Or:
      value = std::max(eval_ground(f->sub[0]), eval_ground(f->sub[1]));
      break;
    case Conn::Circ:
      value = choice_value(ChoiceKind::Circ, f->sub[0]);
      break;
    case Conn::Bull:
      value = 1 - choice_value(ChoiceKind::Circ, f->sub[0]);
      break;
    case Conn::Forall: {
      value = 1;
      for (const auto& e : structure_.domain)
        value = std::min(value, eval_ground(substitute(f->sub[0], f->var, Term::constant("#" + e))));
      break;
    }
    case Conn::Exists: {
      value = 0;
      for (const auto& e : structure_.domain)
        value = std::max(value, eval_ground(substitute(f->sub[0], f->var, Term::constant("#" + e))));
      break;
    }
    case Conn::Not: {
      const FormulaPtr& g = f->sub[0];
      switch (g->kind) {
        case Conn::Atom:
        case Conn::Identity:
          value = atom_value(g, true);
          break;
        case Conn::Not:
          value = eval_ground(g->sub[0]);
          break;
        case Conn::And:
          value = std::max(eval_ground(Formula::negate(g->sub[0])),
                           eval_ground(Formula::negate(g->sub[1])));
          break;
        case Conn::Or:
          value = std::min(eval_ground(Formula::negate(g->sub[0])),
                           eval_ground(Formula::negate(g->sub[1])));
          break;
        case Conn::Circ:
          value = choice_value(ChoiceKind::NegCirc, g->sub[0]);
          break;
        case Conn::Bull:
          value = choice_value(ChoiceKind::NegBull, g->sub[0]);
          break;
        case Conn::Forall: {
          value = 0;
          for (const auto& e : structure_.domain)
            value = std::max(value, eval_ground(Formula::negate(
                                        substitute(g->sub[0], g->var, Term::constant("#" + e)))));
          break;
        }
        case Conn::Exists: {
          value = 1;
          for (const auto& e : structure_.domain)
            value = std::min(value, eval_ground(Formula::negate(
                                        substitute(g->sub[0], g->var, Term::constant("#" + e)))));
          break;
        }
      }
      break;
    }
  }
  memo_.emplace(std::move(key), value);
  return value;
}

ValuationEnumerator::ValuationEnumerator(const Structure& s, std::vector<ChoiceAtom> atoms)
    : structure_(s), atoms_(std::move(atoms)) {
  if (atoms_.size() > 62)
    throw CapError("closure too large to enumerate", static_cast<long>(atoms_.size()));
  limit_ = std::uint64_t{1} << atoms_.size();
}

std::optional<ChoiceAssignment> ValuationEnumerator::next() {
  const size_t k = atoms_.size();
  while (index_ < limit_) {
    std::uint64_t bits = index_++;
    ChoiceAssignment assignment;
    for (size_t i = 0; i < k; ++i)
      assignment.values[atoms_[i]] = static_cast<int>((bits >> (k - 1 - i)) & 1);
    // Clause-8 filter: a circ atom set to 1 forces exactly one of A, not-A.
    Evaluator ev(structure_, assignment);
    bool consistent = true;
    for (const auto& [atom, value] : assignment.values) {
      if (atom.kind != ChoiceKind::Circ || value != 1) continue;
      int va = ev.evaluate(atom.operand.formula);
      int vn = ev.evaluate(Formula::negate(atom.operand.formula));
      if ((va == 1) != (vn == 0)) {
        consistent = false;
        break;
      }
    }
    if (consistent) return assignment;
  }
  return std::nullopt;
}

std::vector<ChoiceAssignment> enumerate_valuations(const Structure& s,
                                                   const std::vector<FormulaPtr>& sentences,
                                                   int max_choice_atoms) {
  auto atoms = closure(sentences, s);
  if (static_cast<int>(atoms.size()) > max_choice_atoms)
    throw CapError("closure has " + std::to_string(atoms.size()) +
                       " choice atoms, cap is " + std::to_string(max_choice_atoms),
                   static_cast<long>(atoms.size()));
  ValuationEnumerator en(s, std::move(atoms));
  std::vector<ChoiceAssignment> out;
  while (auto a = en.next()) out.push_back(std::move(*a));
  return out;
}

EntailmentResult entails_on_structure(const Structure& s,
                                      const std::vector<FormulaPtr>& premises,
                                      const FormulaPtr& conclusion, int max_choice_atoms) {
  std::vector<FormulaPtr> all = premises;
  all.push_back(conclusion);
  auto atoms = closure(all, s);
  if (static_cast<int>(atoms.size()) > max_choice_atoms)
    throw CapError("closure has " + std::to_string(atoms.size()) +
                       " choice atoms, cap is " + std::to_string(max_choice_atoms),
                   static_cast<long>(atoms.size()));
  ValuationEnumerator en(s, std::move(atoms));
  while (auto a = en.next()) {
    Evaluator ev(s, *a);
    bool all_premises = true;
    for (const auto& p : premises)
      if (ev.evaluate(p) != 1) {
        all_premises = false;
        break;
      }
    if (all_premises && ev.evaluate(conclusion) == 0) return *a;
  }
  return Holds{};
}

}  // namespace qlet
