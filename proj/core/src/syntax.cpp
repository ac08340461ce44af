#include "qlet/syntax.hpp"

#include <algorithm>
#include <sstream>

namespace qlet {

bool Signature::has_constant(const std::string& name) const {
  return std::find(constants.begin(), constants.end(), name) != constants.end();
}

void Signature::add_constant(const std::string& name) {
  if (!has_constant(name)) constants.push_back(name);
}

void Signature::add_predicate(const std::string& name, int arity) {
  auto it = predicates.find(name);
  if (it == predicates.end()) {
    predicates.emplace(name, arity);
  } else if (it->second != arity) {
    throw ParseError("predicate '" + name + "' redeclared with arity " +
                     std::to_string(arity) + " (was " + std::to_string(it->second) + ")");
  }
}

Signature parse_signature(std::string_view text) {
  Sexpr e = read_sexpr(text);
  if (e.head() != "signature") throw ParseError("expected (signature ...)", e.line);
  Signature sig;
  for (size_t i = 1; i < e.size(); ++i) {
    const Sexpr& section = e[i];
    if (section.head() == "constants") {
      for (size_t j = 1; j < section.size(); ++j) {
        if (!section[j].is_atom) throw ParseError("constant name expected", section.line);
        if (sig.has_constant(section[j].atom))
          throw ParseError("duplicate constant '" + section[j].atom + "'", section.line);
        sig.constants.push_back(section[j].atom);
      }
    } else if (section.head() == "predicates") {
      for (size_t j = 1; j < section.size(); ++j) {
        const Sexpr& p = section[j];
        if (p.is_atom || p.size() != 2 || !p[0].is_atom || !p[1].is_atom)
          throw ParseError("expected (NAME ARITY)", p.line);
        int arity = 0;
        try {
          arity = std::stoi(p[1].atom);
        } catch (...) {
          throw ParseError("bad arity '" + p[1].atom + "'", p.line);
        }
        if (arity < 0) throw ParseError("negative arity", p.line);
        if (sig.predicates.count(p[0].atom))
          throw ParseError("duplicate predicate '" + p[0].atom + "'", p.line);
        sig.predicates.emplace(p[0].atom, arity);
      }
    } else {
      throw ParseError("unknown signature section", section.line);
    }
  }
  return sig;
}

std::string to_string(const Signature& sig) {
  std::ostringstream out;
  out << "(signature (constants";
  for (const auto& c : sig.constants) out << ' ' << c;
  out << ") (predicates";
  for (const auto& [name, arity] : sig.predicates) out << " (" << name << ' ' << arity << ')';
  out << "))";
  return out.str();
}

namespace {

FormulaPtr make(Conn kind) {
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  return f;
}

bool occurs_free(const FormulaPtr& f, const std::string& var) {
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Identity:
      for (const Term& t : f->args)
        if (t.is_var() && t.name == var) return true;
      return false;
    case Conn::Forall:
    case Conn::Exists:
      if (f->var == var) return false;
      return occurs_free(f->sub[0], var);
    default:
      for (const auto& s : f->sub)
        if (occurs_free(s, var)) return true;
      return false;
  }
}

FormulaPtr unary(Conn kind, FormulaPtr a) {
  auto f = make(kind);
  std::const_pointer_cast<Formula>(f)->sub = {std::move(a)};
  return f;
}

FormulaPtr binary(Conn kind, FormulaPtr a, FormulaPtr b) {
  auto f = make(kind);
  std::const_pointer_cast<Formula>(f)->sub = {std::move(a), std::move(b)};
  return f;
}

FormulaPtr quant(Conn kind, std::string var, FormulaPtr body) {
  if (!occurs_free(body, var))
    throw ParseError("void quantifier: ?" + var + " has no free occurrence in its body");
  auto f = make(kind);
  auto* m = std::const_pointer_cast<Formula>(f).get();
  m->var = std::move(var);
  m->sub = {std::move(body)};
  return f;
}

}  // namespace

FormulaPtr Formula::atom(std::string pred, std::vector<Term> args) {
  auto f = make(Conn::Atom);
  auto* m = std::const_pointer_cast<Formula>(f).get();
  m->pred = std::move(pred);
  m->args = std::move(args);
  return f;
}

FormulaPtr Formula::identity(Term lhs, Term rhs) {
  auto f = make(Conn::Identity);
  std::const_pointer_cast<Formula>(f)->args = {std::move(lhs), std::move(rhs)};
  return f;
}

FormulaPtr Formula::negate(FormulaPtr f) { return unary(Conn::Not, std::move(f)); }
FormulaPtr Formula::conj(FormulaPtr a, FormulaPtr b) { return binary(Conn::And, std::move(a), std::move(b)); }
FormulaPtr Formula::disj(FormulaPtr a, FormulaPtr b) { return binary(Conn::Or, std::move(a), std::move(b)); }
FormulaPtr Formula::circ(FormulaPtr f) { return unary(Conn::Circ, std::move(f)); }
FormulaPtr Formula::bull(FormulaPtr f) { return unary(Conn::Bull, std::move(f)); }
FormulaPtr Formula::forall(std::string var, FormulaPtr body) {
  return quant(Conn::Forall, std::move(var), std::move(body));
}
FormulaPtr Formula::exists(std::string var, FormulaPtr body) {
  return quant(Conn::Exists, std::move(var), std::move(body));
}

bool equal(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind || a->pred != b->pred || a->var != b->var ||
      a->args != b->args || a->sub.size() != b->sub.size())
    return false;
  for (size_t i = 0; i < a->sub.size(); ++i)
    if (!equal(a->sub[i], b->sub[i])) return false;
  return true;
}

namespace {

void print(const FormulaPtr& f, std::string& out) {
  auto term = [&](const Term& t) {
    if (t.is_var()) out += '?';
    out += t.name;
  };
  switch (f->kind) {
    case Conn::Atom:
      out += '(';
      out += f->pred;
      for (const Term& t : f->args) {
        out += ' ';
        term(t);
      }
      out += ')';
      break;
    case Conn::Identity:
      out += "(= ";
      term(f->args[0]);
      out += ' ';
      term(f->args[1]);
      out += ')';
      break;
    case Conn::Not:
    case Conn::Circ:
    case Conn::Bull:
      out += f->kind == Conn::Not ? "(not " : f->kind == Conn::Circ ? "(circ " : "(bull ";
      print(f->sub[0], out);
      out += ')';
      break;
    case Conn::And:
    case Conn::Or:
      out += f->kind == Conn::And ? "(and " : "(or ";
      print(f->sub[0], out);
      out += ' ';
      print(f->sub[1], out);
      out += ')';
      break;
    case Conn::Forall:
    case Conn::Exists:
      out += f->kind == Conn::Forall ? "(forall ?" : "(exists ?";
      out += f->var;
      out += ' ';
      print(f->sub[0], out);
      out += ')';
      break;
  }
}

}  // namespace

std::string to_string(const FormulaPtr& f) {
  std::string out;
  print(f, out);
  return out;
}

namespace {

void collect_free(const FormulaPtr& f, std::set<std::string>& bound, std::set<std::string>& out) {
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Identity:
      for (const Term& t : f->args)
        if (t.is_var() && !bound.count(t.name)) out.insert(t.name);
      break;
    case Conn::Forall:
    case Conn::Exists: {
      bool fresh = bound.insert(f->var).second;
      collect_free(f->sub[0], bound, out);
      if (fresh) bound.erase(f->var);
      break;
    }
    default:
      for (const auto& s : f->sub) collect_free(s, bound, out);
  }
}

}  // namespace

std::set<std::string> free_vars(const FormulaPtr& f) {
  std::set<std::string> bound, out;
  collect_free(f, bound, out);
  return out;
}

bool is_sentence(const FormulaPtr& f) { return free_vars(f).empty(); }

bool contains_constant(const FormulaPtr& f, const std::string& name) {
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Identity:
      for (const Term& t : f->args)
        if (!t.is_var() && t.name == name) return true;
      return false;
    default:
      for (const auto& s : f->sub)
        if (contains_constant(s, name)) return true;
      return false;
  }
}

std::set<std::string> constants_of(const FormulaPtr& f) {
  std::set<std::string> out;
  if (f->kind == Conn::Atom || f->kind == Conn::Identity) {
    for (const Term& t : f->args)
      if (!t.is_var()) out.insert(t.name);
  } else {
    for (const auto& s : f->sub)
      for (auto& c : constants_of(s)) out.insert(c);
  }
  return out;
}

std::set<std::string> predicates_of(const FormulaPtr& f) {
  std::set<std::string> out;
  if (f->kind == Conn::Atom) out.insert(f->pred);
  for (const auto& s : f->sub)
    for (auto& p : predicates_of(s)) out.insert(p);
  return out;
}

bool circ_bull_free(const FormulaPtr& f) {
  if (f->kind == Conn::Circ || f->kind == Conn::Bull) return false;
  for (const auto& s : f->sub)
    if (!circ_bull_free(s)) return false;
  return true;
}

FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const Term& c) {
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Identity: {
      bool hit = false;
      for (const Term& t : f->args)
        if (t.is_var() && t.name == var) hit = true;
      if (!hit) return f;
      std::vector<Term> args = f->args;
      for (Term& t : args)
        if (t.is_var() && t.name == var) t = c;
      return f->kind == Conn::Atom ? Formula::atom(f->pred, std::move(args))
                                   : Formula::identity(args[0], args[1]);
    }
    case Conn::Forall:
    case Conn::Exists: {
      if (f->var == var) return f;
      FormulaPtr body = substitute(f->sub[0], var, c);
      if (body.get() == f->sub[0].get()) return f;
      return f->kind == Conn::Forall ? Formula::forall(f->var, std::move(body))
                                     : Formula::exists(f->var, std::move(body));
    }
    default: {
      std::vector<FormulaPtr> sub;
      bool changed = false;
      for (const auto& s : f->sub) {
        sub.push_back(substitute(s, var, c));
        changed |= sub.back().get() != s.get();
      }
      if (!changed) return f;
      switch (f->kind) {
        case Conn::Not: return Formula::negate(sub[0]);
        case Conn::And: return Formula::conj(sub[0], sub[1]);
        case Conn::Or: return Formula::disj(sub[0], sub[1]);
        case Conn::Circ: return Formula::circ(sub[0]);
        default: return Formula::bull(sub[0]);
      }
    }
  }
}

namespace {

bool av_eq(const FormulaPtr& a, const FormulaPtr& b,
           std::map<std::string, int>& ea, std::map<std::string, int>& eb, int depth) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Conn::Atom:
    case Conn::Identity: {
      if (a->pred != b->pred || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i) {
        const Term& ta = a->args[i];
        const Term& tb = b->args[i];
        if (ta.is_var() != tb.is_var()) return false;
        if (!ta.is_var()) {
          if (ta.name != tb.name) return false;
          continue;
        }
        auto ia = ea.find(ta.name);
        auto ib = eb.find(tb.name);
        bool ba = ia != ea.end();
        bool bb = ib != eb.end();
        if (ba != bb) return false;
        if (ba) {
          if (ia->second != ib->second) return false;
        } else if (ta.name != tb.name) {
          // Free variables must match literally.
          return false;
        }
      }
      return true;
    }
    case Conn::Forall:
    case Conn::Exists: {
      auto sa = ea.find(a->var);
      auto sb = eb.find(b->var);
      std::optional<int> shadow_a, shadow_b;
      if (sa != ea.end()) shadow_a = sa->second;
      if (sb != eb.end()) shadow_b = sb->second;
      ea[a->var] = depth;
      eb[b->var] = depth;
      bool ok = av_eq(a->sub[0], b->sub[0], ea, eb, depth + 1);
      if (shadow_a) ea[a->var] = *shadow_a; else ea.erase(a->var);
      if (shadow_b) eb[b->var] = *shadow_b; else eb.erase(b->var);
      return ok;
    }
    default:
      if (a->sub.size() != b->sub.size()) return false;
      for (size_t i = 0; i < a->sub.size(); ++i)
        if (!av_eq(a->sub[i], b->sub[i], ea, eb, depth)) return false;
      return true;
  }
}

FormulaPtr canon_rec(const FormulaPtr& f, const std::map<std::string, std::string>& assign,
                     std::map<std::string, std::string>& env, int& counter) {
  switch (f->kind) {
    case Conn::Atom:
    case Conn::Identity: {
      std::vector<Term> args = f->args;
      for (Term& t : args) {
        if (t.is_var()) {
          auto it = env.find(t.name);
          if (it == env.end()) throw ParseError("free variable ?" + t.name + " in sentence");
          t = Term::var(it->second);
        } else if (!t.is_element()) {
          auto it = assign.find(t.name);
          if (it == assign.end()) throw ParseError("unmapped constant '" + t.name + "'");
          t = Term::constant("#" + it->second);
        }
      }
      return f->kind == Conn::Atom ? Formula::atom(f->pred, std::move(args))
                                   : Formula::identity(args[0], args[1]);
    }
    case Conn::Forall:
    case Conn::Exists: {
      std::string fresh = "_" + std::to_string(++counter);
      auto old = env.find(f->var);
      std::optional<std::string> shadow;
      if (old != env.end()) shadow = old->second;
      env[f->var] = fresh;
      FormulaPtr body = canon_rec(f->sub[0], assign, env, counter);
      if (shadow) env[f->var] = *shadow; else env.erase(f->var);
      return f->kind == Conn::Forall ? Formula::forall(fresh, std::move(body))
                                     : Formula::exists(fresh, std::move(body));
    }
    case Conn::Not:
      return Formula::negate(canon_rec(f->sub[0], assign, env, counter));
    case Conn::Circ:
      return Formula::circ(canon_rec(f->sub[0], assign, env, counter));
    case Conn::Bull:
      return Formula::bull(canon_rec(f->sub[0], assign, env, counter));
    case Conn::And:
      return Formula::conj(canon_rec(f->sub[0], assign, env, counter),
                           canon_rec(f->sub[1], assign, env, counter));
    default:
      return Formula::disj(canon_rec(f->sub[0], assign, env, counter),
                           canon_rec(f->sub[1], assign, env, counter));
  }
}

}  // namespace

bool alphabetic_variant_eq(const FormulaPtr& f, const FormulaPtr& g) {
  std::map<std::string, int> ea, eb;
  return av_eq(f, g, ea, eb, 0);
}

CanonicalSentence canonicalize(const FormulaPtr& sentence,
                               const std::map<std::string, std::string>& assign) {
  std::map<std::string, std::string> env;
  int counter = 0;
  FormulaPtr canon = canon_rec(sentence, assign, env, counter);
  return {canon, to_string(canon)};
}

namespace {

Term parse_term(const Sexpr& e, Signature& sig, const ParseOptions& opts) {
  if (!e.is_atom) throw ParseError("term expected", e.line);
  const std::string& s = e.atom;
  if (s.empty()) throw ParseError("empty term", e.line);
  if (s[0] == '?') {
    if (s.size() == 1) throw ParseError("empty variable name", e.line);
    return Term::var(s.substr(1));
  }
  if (s[0] == '#') {
    if (s.size() == 1) throw ParseError("empty element name", e.line);
    return Term::constant(s);  // diagram-language constant; resolved against a domain
  }
  if (!sig.has_constant(s)) {
    if (!opts.extend_constants) throw ParseError("unknown constant '" + s + "'", e.line);
    sig.add_constant(s);
  }
  return Term::constant(s);
}

const std::set<std::string> kReserved = {"not", "and", "or", "circ", "bull",
                                         "forall", "exists", "="};

FormulaPtr parse_rec(const Sexpr& e, Signature& sig, const ParseOptions& opts) {
  if (e.is_atom)
    throw ParseError("formula expected, got atom '" + e.atom + "'", e.line);
  std::string head = e.head();
  if (head.empty()) throw ParseError("formula head must be a symbol", e.line);
  if (head == "not" || head == "circ" || head == "bull") {
    if (e.size() != 2) throw ParseError("'" + head + "' takes one formula", e.line);
    FormulaPtr a = parse_rec(e[1], sig, opts);
    return head == "not" ? Formula::negate(a) : head == "circ" ? Formula::circ(a) : Formula::bull(a);
  }
  if (head == "and" || head == "or") {
    if (e.size() != 3) throw ParseError("'" + head + "' takes two formulas", e.line);
    FormulaPtr a = parse_rec(e[1], sig, opts);
    FormulaPtr b = parse_rec(e[2], sig, opts);
    return head == "and" ? Formula::conj(a, b) : Formula::disj(a, b);
  }
  if (head == "forall" || head == "exists") {
    if (e.size() != 3) throw ParseError("'" + head + "' takes a variable and a body", e.line);
    if (!e[1].is_atom || e[1].atom.size() < 2 || e[1].atom[0] != '?')
      throw ParseError("quantified variable must carry the '?' sigil", e[1].line);
    std::string var = e[1].atom.substr(1);
    FormulaPtr body = parse_rec(e[2], sig, opts);
    try {
      return head == "forall" ? Formula::forall(var, body) : Formula::exists(var, body);
    } catch (const ParseError& err) {
      throw ParseError(err.what(), e.line);
    }
  }
  if (head == "=") {
    if (e.size() != 3) throw ParseError("'=' takes two terms", e.line);
    return Formula::identity(parse_term(e[1], sig, opts), parse_term(e[2], sig, opts));
  }
  if (head[0] == '?')
    throw ParseError("variable '" + head + "' cannot head a formula", e.line);
  // Predicate application.
  std::vector<Term> args;
  for (size_t i = 1; i < e.size(); ++i) args.push_back(parse_term(e[i], sig, opts));
  auto it = sig.predicates.find(head);
  if (it == sig.predicates.end()) {
    if (!opts.extend_predicates) throw ParseError("unknown predicate '" + head + "'", e.line);
    sig.add_predicate(head, static_cast<int>(args.size()));
  } else if (it->second != static_cast<int>(args.size())) {
    throw ParseError("arity mismatch: '" + head + "' expects " + std::to_string(it->second) +
                         " arguments, got " + std::to_string(args.size()),
                     e.line);
  }
  return Formula::atom(head, std::move(args));
}

}  // namespace

FormulaPtr parse_formula(const Sexpr& e, Signature& sig, const ParseOptions& opts) {
  return parse_rec(e, sig, opts);
}

FormulaPtr parse_formula(std::string_view text, Signature& sig, const ParseOptions& opts) {
  return parse_rec(read_sexpr(text), sig, opts);
}

FormulaPtr parse_formula(std::string_view text, const Signature& sig) {
  Signature copy = sig;
  return parse_formula(text, copy, ParseOptions{});
}

FormulaPtr parse_sentence(std::string_view text, Signature& sig, const ParseOptions& opts) {
  FormulaPtr f = parse_formula(text, sig, opts);
  auto fv = free_vars(f);
  if (!fv.empty())
    throw ParseError("sentence required, but ?" + *fv.begin() + " occurs free");
  return f;
}

FormulaPtr parse_sentence(std::string_view text, const Signature& sig) {
  Signature copy = sig;
  return parse_sentence(text, copy, ParseOptions{});
}

std::vector<FormulaPtr> parse_sentence_list(std::string_view text, Signature& sig,
                                            const ParseOptions& opts) {
  std::vector<FormulaPtr> out;
  for (const Sexpr& e : read_sexprs(text)) {
    FormulaPtr f = parse_rec(e, sig, opts);
    auto fv = free_vars(f);
    if (!fv.empty())
      throw ParseError("sentence required, but ?" + *fv.begin() + " occurs free", e.line);
    out.push_back(f);
  }
  return out;
}

}  // namespace qlet
