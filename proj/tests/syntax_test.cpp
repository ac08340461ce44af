#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qlet/syntax.hpp"
#include "support.hpp"

using namespace qlet;

namespace {

Signature demo_sig() {
  Signature sig;
  sig.add_constant("a");
  sig.add_constant("b");
  sig.add_constant("c");
  sig.add_predicate("P", 1);
  sig.add_predicate("R", 2);
  sig.add_predicate("Q", 0);
  return sig;
}

}  // namespace

TEST_CASE("sexpr reader tracks lines and rejects trailing content") {
  Sexpr e = read_sexpr("; comment\n(and (P a)\n  (Q))");
  CHECK(e.head() == "and");
  CHECK(e[1].line == 2);
  CHECK(e[2].line == 3);
  CHECK_THROWS_AS(read_sexpr("(P a) extra"), ParseError);
  CHECK_THROWS_AS(read_sexpr("(P a"), ParseError);
  CHECK_THROWS_AS(read_sexpr(")"), ParseError);
}

TEST_CASE("formula parsing enforces the signature") {
  Signature sig = demo_sig();
  FormulaPtr f = parse_formula("(forall ?x (or (P ?x) (R ?x c)))", sig);
  CHECK(to_string(f) == "(forall ?x (or (P ?x) (R ?x c)))");
  CHECK(is_sentence(f));

  CHECK_THROWS_WITH_AS(parse_formula("(P a b)", sig), doctest::Contains("arity"), ParseError);
  CHECK_THROWS_WITH_AS(parse_formula("(P z)", sig), doctest::Contains("unknown"), ParseError);
  CHECK_THROWS_WITH_AS(parse_formula("(forall ?x (Q))", sig),
                       doctest::Contains("void quantifier"), ParseError);
  CHECK_THROWS_AS(parse_sentence("(P ?x)", sig), ParseError);

  SUBCASE("element constants always parse") {
    FormulaPtr g = parse_formula("(P #d1)", sig);
    CHECK(g->args[0].is_element());
    CHECK(g->args[0].element() == "d1");
  }

  SUBCASE("extension options auto-declare") {
    Signature open;
    ParseOptions opts{true, true};
    parse_formula("(S c d)", open, opts);
    CHECK(open.predicates.at("S") == 2);
    CHECK(open.has_constant("d"));
    CHECK_THROWS_AS(parse_formula("(S c)", open, opts), ParseError);  // arity now fixed
  }
}

TEST_CASE("free variables and substitution respect binding") {
  Signature sig = demo_sig();
  ParseOptions opts{false, false};
  FormulaPtr f = parse_formula("(and (P ?x) (forall ?x (R ?x a)))", sig, opts);
  CHECK(free_vars(f) == std::set<std::string>{"x"});

  FormulaPtr g = substitute(f, "x", Term::constant("b"));
  CHECK(to_string(g) == "(and (P b) (forall ?x (R ?x a)))");
}

TEST_CASE("alphabetic variants") {
  Signature sig = demo_sig();
  auto parse = [&](const char* t) { return parse_formula(t, sig); };

  CHECK(alphabetic_variant_eq(parse("(forall ?x (P ?x))"), parse("(forall ?y (P ?y))")));
  CHECK(alphabetic_variant_eq(parse("(forall ?x (exists ?y (R ?x ?y)))"),
                              parse("(forall ?y (exists ?x (R ?y ?x)))")));
  CHECK_FALSE(alphabetic_variant_eq(parse("(forall ?x (P ?x))"), parse("(exists ?x (P ?x))")));
  CHECK_FALSE(alphabetic_variant_eq(parse("(forall ?x (R ?x ?x))"),
                                    parse("(forall ?x (R ?x a))")));

  SUBCASE("agrees with the renaming oracle on random formulas") {
    std::mt19937 rng(7);
    std::vector<FormulaPtr> pool;
    for (int i = 0; i < 60; ++i) pool.push_back(testsupport::random_formula(rng, 3, true));
    for (const auto& f : pool)
      for (const auto& g : pool)
        CHECK(alphabetic_variant_eq(f, g) == testsupport::av_oracle(f, g));
  }
}

TEST_CASE("canonicalization identifies variants and co-denoting constants") {
  Signature sig = demo_sig();
  std::map<std::string, std::string> assign{{"a", "d1"}, {"b", "d1"}, {"c", "d2"}};

  auto key = [&](const char* t) { return canonicalize(parse_formula(t, sig), assign).key; };
  CHECK(key("(forall ?x (R ?x a))") == key("(forall ?y (R ?y b))"));
  CHECK(key("(P a)") == key("(P b)"));
  CHECK(key("(P a)") != key("(P c)"));
  CHECK(key("(P #d1)") == key("(P a)"));

  SUBCASE("equal keys exactly when variants after identifying denotations") {
    std::mt19937 rng(11);
    std::map<std::string, std::string> same{{"a", "d1"}, {"b", "d2"}};
    for (int i = 0; i < 40; ++i) {
      FormulaPtr f = testsupport::random_formula(rng, 2, true);
      FormulaPtr g = testsupport::random_formula(rng, 2, true);
      bool keys_equal = canonicalize(f, same).key == canonicalize(g, same).key;
      CHECK(keys_equal == testsupport::av_oracle(f, g));
    }
  }

  CHECK_THROWS_AS(canonicalize(parse_formula("(P a)", sig), {}), ParseError);
}

TEST_CASE("signature file round trip") {
  Signature sig = parse_signature("(signature (constants a b c) (predicates (P 1) (R 2) (Q 0)))");
  CHECK(sig.constants == std::vector<std::string>{"a", "b", "c"});
  CHECK(sig.predicates.at("R") == 2);
  CHECK(sig.predicates.at("Q") == 0);
  Signature again = parse_signature(to_string(sig));
  CHECK(again.constants == sig.constants);
  CHECK(again.predicates == sig.predicates);
}

TEST_CASE("sentence lists skip comments and report the line on errors") {
  Signature sig = demo_sig();
  ParseOptions opts{false, false};
  auto list = parse_sentence_list("; header\n(P a)\n\n(not (Q))\n", sig, opts);
  REQUIRE(list.size() == 2);
  CHECK(to_string(list[1]) == "(not (Q))");
  try {
    parse_sentence_list("(P a)\n(P ?x)\n", sig, opts);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}
