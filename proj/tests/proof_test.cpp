#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qlet/proof.hpp"
#include "support.hpp"

#include <filesystem>

using namespace qlet;

namespace {

const std::string kCorpus = std::string(QLET_DATA_DIR) + "/corpus";

CheckReport check_text(const std::string& text, const std::string& profile) {
  Signature sig;
  auto proof = parse_proof(text, sig);
  return check_derivation(*proof, RuleProfile::named(profile), sig);
}

CheckReport check_file(const std::string& name, const std::string& profile) {
  return check_text(testsupport::slurp(kCorpus + "/" + name), profile);
}

}  // namespace

TEST_CASE("rule names round trip") {
  for (RuleId r : {RuleId::AndI, RuleId::NegForallE, RuleId::ForallI_Prime, RuleId::IdE,
                   RuleId::AV, RuleId::EXP})
    CHECK(rule_from_name(rule_name(r)) == r);
  CHECK(!rule_from_name("frobnicate"));
}

TEST_CASE("the whole corpus is accepted under qletf") {
  int accepted = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kCorpus)) {
    if (entry.path().extension() != ".nd") continue;
    CheckReport report = check_file(entry.path().filename().string(), "qletf");
    INFO(entry.path().filename().string(), ": ", report.failure_message);
    CHECK(report.accepted);
    ++accepted;
  }
  CHECK(accepted >= 12);
}

TEST_CASE("circ-free corpus members are also qfde derivations") {
  for (const char* name : {"gen.nd", "interchange1.nd", "interchange5.nd", "id_sym.nd",
                           "lindenbaum_forall.nd", "lindenbaum_exists.nd"}) {
    CheckReport report = check_file(name, "qfde");
    INFO(name, ": ", report.failure_message);
    CHECK(report.accepted);
  }
}

TEST_CASE("eigenconstant violations are rejected with the condition named") {
  SUBCASE("forall-i against an open premise") {
    auto report = check_text(
        "(infer forall-i (or (Q) (forall ?x (P ?x)))"
        " (infer or-i-r (or (Q) (P c)) (premise (P c))))",
        "qletf");
    CHECK_FALSE(report.accepted);
    CHECK(report.failure_rule == "forall-i");
    CHECK(report.failure_message.find("eigenconstant c occurs in open hypothesis") !=
          std::string::npos);
  }
  SUBCASE("exists-e with the witness constant in a side premise") {
    auto report = check_text(
        "(infer exists-e (exists ?y (R ?y)) :discharge (1)"
        " (premise (exists ?x (P ?x)))"
        " (infer exists-i (exists ?y (R ?y))"
        "  (infer and-e-r (R c)"
        "   (infer and-i (and (P c) (R c)) (hyp 1 (P c)) (premise (R c))))))",
        "qletf");
    CHECK_FALSE(report.accepted);
    CHECK(report.failure_rule == "exists-e");
    CHECK(report.failure_message.find("eigenconstant") != std::string::npos);
  }
  SUBCASE("neg-forall-e likewise") {
    auto report = check_text(
        "(infer neg-forall-e (exists ?y (not (R ?y))) :discharge (1)"
        " (premise (not (forall ?x (P ?x))))"
        " (infer exists-i (exists ?y (not (R ?y)))"
        "  (infer and-e-r (not (R c))"
        "   (infer and-i (and (not (P c)) (not (R c)))"
        "    (hyp 1 (not (P c))) (premise (not (R c)))))))",
        "qletf");
    CHECK_FALSE(report.accepted);
    CHECK(report.failure_rule == "neg-forall-e");
    CHECK(report.failure_message.find("eigenconstant") != std::string::npos);
  }
  SUBCASE("neg-exists-i from its own instance") {
    auto report = check_text(
        "(infer neg-exists-i (not (exists ?x (P ?x))) (premise (not (P c))))", "qletf");
    CHECK_FALSE(report.accepted);
    CHECK(report.failure_rule == "neg-exists-i");
    CHECK(report.failure_message.find("eigenconstant") != std::string::npos);
  }
  SUBCASE("the same figures pass when the constant stays fresh") {
    CHECK(check_file("interchange4.nd", "qletf").accepted);
  }
}

TEST_CASE("profiles restrict rules and vocabulary") {
  SUBCASE("forall-i is not available under qfde-prime") {
    auto report = check_file("interchange3.nd", "qfde-prime");
    CHECK_FALSE(report.accepted);
    CHECK(report.failure_rule == "forall-i");
    CHECK(report.failure_message.find("not part of profile") != std::string::npos);
  }
  SUBCASE("forall-i-prime takes over in qfde-prime") {
    auto report = check_text(
        "(infer forall-i-prime (forall ?x (P ?x))"
        " (infer forall-e (P c) (premise (forall ?y (P ?y)))))",
        "qfde-prime");
    INFO(report.failure_message);
    CHECK(report.accepted);
  }
  SUBCASE("circ and bull are rejected outright under the qfde family") {
    for (const char* profile : {"qfde", "qk3", "qlp", "qcl"}) {
      auto report = check_file("comp.nd", profile);
      CHECK_FALSE(report.accepted);
      CHECK(report.failure_message.find("vocabulary violation") != std::string::npos);
    }
  }
  SUBCASE("pem and exp belong to the extensions only") {
    std::string pem = "(infer pem (or (P c) (not (P c))))";
    CHECK(check_text(pem, "qlp").accepted);
    CHECK(check_text(pem, "qcl").accepted);
    CHECK_FALSE(check_text(pem, "qfde").accepted);
    CHECK_FALSE(check_text(pem, "qletf").accepted);

    std::string exp =
        "(infer exp (Q) (premise (P c)) (premise (not (P c))))";
    CHECK(check_text(exp, "qk3").accepted);
    CHECK_FALSE(check_text(exp, "qlp").accepted);
  }
}

TEST_CASE("discharge bookkeeping") {
  SUBCASE("vacuous discharge is allowed") {
    auto report = check_text(
        "(infer exists-e (Q) :discharge (1)"
        " (premise (exists ?x (P ?x)))"
        " (premise (Q)))",
        "qletf");
    INFO(report.failure_message);
    CHECK(report.accepted);
  }
  SUBCASE("a discharged hypothesis must match the rule's assumption") {
    auto report = check_text(
        "(infer or-e (Q) :discharge (1)"
        " (premise (or (P c) (P d)))"
        " (hyp 1 (Q))"
        " (hyp 1 (Q)))",
        "qletf");
    CHECK_FALSE(report.accepted);
  }
  SUBCASE("an undischarged hypothesis blocks acceptance at the root") {
    auto report = check_text("(infer or-i-l (or (P c) (Q)) (hyp 1 (P c)))", "qletf");
    CHECK_FALSE(report.accepted);
    CHECK(report.failure_message.find("undischarged hypothesis [1]") != std::string::npos);
  }
  SUBCASE("discharge annotations on non-discharging rules are rejected") {
    auto report =
        check_text("(infer and-i (and (Q) (Q)) :discharge (1) (hyp 1 (Q)) (hyp 1 (Q)))", "qletf");
    CHECK_FALSE(report.accepted);
  }
  SUBCASE("open premises are reported") {
    auto report = check_text(
        "(infer and-e-l (P c) (premise (and (P c) (Q))))", "qletf");
    REQUIRE(report.accepted);
    REQUIRE(report.open_premises.size() == 1);
    CHECK(to_string(report.open_premises[0].sentence) == "(and (P c) (Q))");
  }
}

TEST_CASE("schema mismatches carry the node path") {
  auto report = check_text(
      "(infer and-i (and (P c) (Q))"
      " (premise (P c))"
      " (infer dn-e (Q) (premise (Q))))",
      "qletf");
  CHECK_FALSE(report.accepted);
  CHECK(report.failure_path == "root.1");
  CHECK(report.failure_rule == "dn-e");
}

TEST_CASE("identity rules") {
  SUBCASE("id-i wants a reflexive identity between constants") {
    CHECK(check_text("(infer id-i (= c c))", "qletf").accepted);
    CHECK_FALSE(check_text("(infer id-i (= c d))", "qletf").accepted);
  }
  SUBCASE("id-e rewrites any subset of occurrences") {
    auto ok = check_text(
        "(infer id-e (and (P d) (R c))"
        " (premise (= c d))"
        " (premise (and (P c) (R c))))",
        "qletf");
    INFO(ok.failure_message);
    CHECK(ok.accepted);
    auto bad = check_text(
        "(infer id-e (and (P e) (R c))"
        " (premise (= c d))"
        " (premise (and (P c) (R c))))",
        "qletf");
    CHECK_FALSE(bad.accepted);
  }
}

TEST_CASE("av licenses exactly the alphabetic variants, only under qletf") {
  std::string av =
      "(infer av (forall ?y (P ?y)) (premise (forall ?x (P ?x))))";
  CHECK(check_text(av, "qletf").accepted);
  CHECK_FALSE(check_text(av, "qfde").accepted);
  CHECK_FALSE(check_text(
                  "(infer av (exists ?y (P ?y)) (premise (forall ?x (P ?x))))", "qletf")
                  .accepted);
}

TEST_CASE("proof parsing rejects malformed input") {
  Signature sig;
  CHECK_THROWS_WITH_AS(parse_proof("(infer frob (Q))", sig), doctest::Contains("unknown rule"),
                       ParseError);
  CHECK_THROWS_WITH_AS(parse_proof("(premise (P ?x))", sig), doctest::Contains("closed"),
                       ParseError);
  CHECK_THROWS_AS(parse_proof("(guess (Q))", sig), ParseError);
  CHECK_THROWS_AS(parse_proof("(infer and-i (Q) :discharge oops)", sig), ParseError);
}

TEST_CASE("annotation hints are verified against the inferred instantiation") {
  auto ok = check_text(
      "(infer forall-e (P c) :const c :var ?x (premise (forall ?x (P ?x))))", "qletf");
  CHECK(ok.accepted);
  auto bad = check_text(
      "(infer forall-e (P c) :const d (premise (forall ?x (P ?x))))", "qletf");
  CHECK_FALSE(bad.accepted);
  CHECK(bad.failure_message.find(":const") != std::string::npos);
}
