#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qlet/proof.hpp"
#include "qlet/search.hpp"
#include "qlet/semantics.hpp"
#include "qlet/syntax.hpp"

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// Parse errors rethrown with the offending file named.
template <typename F>
auto in_file(const std::string& path, F fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const qlet::ParseError& e) {
    throw UsageError(path + ": " + e.what());
  }
}

qlet::Signature signature_for(const qlet::Structure& s) {
  qlet::Signature sig;
  for (const auto& [c, e] : s.assign) sig.add_constant(c);
  for (const auto& [name, interp] : s.preds)
    if (interp.arity >= 0) sig.add_predicate(name, interp.arity);
  return sig;
}

void require_constants_assigned(const qlet::FormulaPtr& f, const qlet::Structure& s) {
  for (const auto& c : qlet::constants_of(f)) {
    if (!c.empty() && c[0] == '#') {
      if (!s.has_element(c.substr(1)))
        throw UsageError("element constant " + c + " is not in the domain");
    } else if (!s.assign.count(c)) {
      throw UsageError("constant '" + c + "' has no assignment in the structure");
    }
  }
}

int run_check(const std::string& proof_file, const std::string& profile_name,
              const std::string& sig_file, bool porcelain) {
  qlet::RuleProfile profile = qlet::RuleProfile::named(profile_name);
  qlet::Signature sig;
  if (!sig_file.empty())
    sig = in_file(sig_file, [&] { return qlet::parse_signature(slurp(sig_file)); });
  auto proof = in_file(proof_file, [&] { return qlet::parse_proof(slurp(proof_file), sig); });
  qlet::CheckReport report = qlet::check_derivation(*proof, profile, sig);
  if (porcelain) {
    if (report.accepted) {
      std::cout << "verdict:accepted\tnodes:" << report.nodes << "\n";
    } else {
      std::cout << "verdict:rejected\tpath:" << report.failure_path << "\trule:"
                << report.failure_rule << "\treason:" << report.failure_message << "\n";
    }
  } else if (report.accepted) {
    std::cout << "accepted\n"
              << "nodes: " << report.nodes << "\n"
              << "conclusion: " << qlet::to_string(proof->sentence) << "\n";
    for (const auto& p : report.open_premises)
      std::cout << "premise: " << qlet::to_string(p.sentence) << "\n";
  } else {
    std::cout << "rejected\n"
              << "at: " << report.failure_path << "\n";
    if (!report.failure_rule.empty()) std::cout << "rule: " << report.failure_rule << "\n";
    std::cout << "reason: " << report.failure_message << "\n";
  }
  return report.accepted ? 0 : 1;
}

int run_eval(const std::string& structure_file, const std::string& formula_text,
             const std::string& choices_file, bool all, int max_choice_atoms, bool porcelain) {
  auto s = in_file(structure_file,
                   [&] { return qlet::parse_structure(slurp(structure_file)); });
  if (auto err = qlet::validate_structure(s, qlet::Constraint::None))
    throw UsageError(structure_file + ": " + *err);
  qlet::Signature sig = signature_for(s);
  qlet::ParseOptions opts{true, true};
  qlet::FormulaPtr f = qlet::parse_sentence(formula_text, sig, opts);
  require_constants_assigned(f, s);

  if (all) {
    auto valuations = qlet::enumerate_valuations(s, {f}, max_choice_atoms);
    if (valuations.empty()) throw UsageError("structure admits no consistent valuation");
    int first = -1;
    bool uniform = true;
    std::vector<std::pair<int, std::string>> rows;
    for (const auto& v : valuations) {
      qlet::Evaluator ev(s, v);
      int value = ev.evaluate(f);
      if (first < 0) first = value;
      uniform = uniform && value == first;
      rows.emplace_back(value, v.to_string());
    }
    if (uniform) {
      if (porcelain) std::cout << "forced:" << first << "\n";
      else std::cout << "forced " << first << "\n";
    } else {
      for (const auto& [value, choices] : rows) {
        if (porcelain) std::cout << "value:" << value << "\tchoices:" << choices << "\n";
        else std::cout << value << " " << choices << "\n";
      }
    }
    return 0;
  }

  qlet::ChoiceAssignment choices;
  if (!choices_file.empty())
    choices = in_file(choices_file,
                      [&] { return qlet::parse_choices(slurp(choices_file), s); });
  qlet::Evaluator ev(s, choices);
  int value = ev.evaluate(f);
  if (porcelain) std::cout << "value:" << value << "\n";
  else std::cout << "value: " << value << "\n";
  return 0;
}

int run_valuations(const std::string& structure_file, const std::string& sentences_file,
                   long limit, int max_choice_atoms, bool porcelain) {
  auto s = in_file(structure_file,
                   [&] { return qlet::parse_structure(slurp(structure_file)); });
  if (auto err = qlet::validate_structure(s, qlet::Constraint::None))
    throw UsageError(structure_file + ": " + *err);
  qlet::Signature sig = signature_for(s);
  qlet::ParseOptions opts{true, true};
  auto sentences = in_file(sentences_file, [&] {
    return qlet::parse_sentence_list(slurp(sentences_file), sig, opts);
  });
  for (const auto& f : sentences) require_constants_assigned(f, s);

  auto atoms = qlet::closure(sentences, s);
  if (static_cast<int>(atoms.size()) > max_choice_atoms)
    throw UsageError("closure has " + std::to_string(atoms.size()) + " choice atoms, cap is " +
                     std::to_string(max_choice_atoms));
  qlet::ValuationEnumerator en(s, std::move(atoms));
  long count = 0;
  while (auto v = en.next()) {
    if (limit > 0 && count >= limit) {
      if (porcelain) std::cout << "truncated:" << limit << "\n";
      else std::cout << "... (limit " << limit << " reached)\n";
      break;
    }
    std::cout << v->to_string() << "\n";
    ++count;
  }
  if (porcelain) std::cout << "count:" << count << "\n";
  else std::cout << "count: " << count << "\n";
  return 0;
}

int run_refute(const std::string& premises_file, const std::string& conclusion_text,
               const std::string& profile_name, int max_domain, std::uint64_t max_structures,
               int max_choice_atoms, int jobs, bool porcelain) {
  qlet::RuleProfile profile = qlet::RuleProfile::named(profile_name);
  qlet::Signature sig;
  qlet::ParseOptions opts{true, true};
  std::vector<qlet::FormulaPtr> premises;
  if (!premises_file.empty())
    premises = in_file(premises_file,
                       [&] { return qlet::parse_sentence_list(slurp(premises_file), sig, opts); });
  qlet::FormulaPtr conclusion = qlet::parse_sentence(conclusion_text, sig, opts);
  if (!profile.allow_circ_bull) {
    for (const auto& p : premises)
      if (!qlet::circ_bull_free(p))
        throw UsageError("premise " + qlet::to_string(p) + " uses circ/bull, not available under " +
                         profile.name);
    if (!qlet::circ_bull_free(conclusion))
      throw UsageError("conclusion uses circ/bull, not available under " + profile.name);
  }

  qlet::SearchConfig config;
  config.max_domain = max_domain;
  config.max_structures = max_structures;
  config.max_choice_atoms = max_choice_atoms;
  config.constraint = profile.constraint;
  config.jobs = jobs;
  qlet::SearchOutcome outcome = qlet::find_countermodel(premises, conclusion, config);

  if (auto* cm = std::get_if<qlet::Countermodel>(&outcome)) {
    if (porcelain) {
      std::cout << "verdict:countermodel\tdomain:" << cm->domain_size << "\tstructure:"
                << qlet::to_string(cm->structure) << "\tchoices:" << cm->choices.to_string()
                << "\n";
    } else {
      std::cout << "countermodel (domain size " << cm->domain_size << ")\n"
                << qlet::to_string(cm->structure) << "\n"
                << cm->choices.to_string() << "\n";
    }
    return 1;
  }
  if (auto* ex = std::get_if<qlet::Exhausted>(&outcome)) {
    if (porcelain)
      std::cout << "verdict:exhausted\tmax-domain:" << ex->max_domain << "\tstructures:"
                << ex->structures_tried << "\n";
    else
      std::cout << "no countermodel up to " << ex->max_domain << " (" << ex->structures_tried
                << " structures)\n";
    return 0;
  }
  const auto& cap = std::get<qlet::CapHit>(outcome);
  if (porcelain)
    std::cout << "verdict:cap\tcap:" << cap.cap << "\tvalue:" << cap.value << "\n";
  else
    std::cout << "search stopped: " << cap.cap << " cap reached (" << cap.value << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Checker and finite-model tools for the logics of evidence and truth"};
  app.require_subcommand(1);

  std::string proof_file, sig_file, structure_file, formula_text, choices_file;
  std::string sentences_file, premises_file, conclusion_text;
  std::string profile_name = "qletf";
  bool all = false, porcelain = false;
  int max_domain = 3, max_choice_atoms = 20, jobs = 1;
  long limit = 0;
  std::uint64_t max_structures = 1'000'000;

  auto* check = app.add_subcommand("check", "Check a natural-deduction proof file");
  check->add_option("--proof", proof_file, "proof file")->required();
  check->add_option("--profile", profile_name, "rule profile (qletf, qfde, qk3, qlp, qcl, qfde-prime)");
  check->add_option("--sig", sig_file, "signature file");
  check->add_flag("--porcelain", porcelain, "machine-readable output");

  auto* eval = app.add_subcommand("eval", "Evaluate a sentence on a structure");
  eval->add_option("--structure", structure_file, "structure file")->required();
  eval->add_option("--formula", formula_text, "sentence to evaluate")->required();
  eval->add_option("--choices", choices_file, "choice assignment file");
  eval->add_flag("--all", all, "evaluate under every consistent valuation");
  eval->add_option("--max-choice-atoms", max_choice_atoms, "closure size cap");
  eval->add_flag("--porcelain", porcelain, "machine-readable output");

  auto* valuations = app.add_subcommand("valuations", "List the consistent valuations of a sentence set");
  valuations->add_option("--structure", structure_file, "structure file")->required();
  valuations->add_option("--sentences", sentences_file, "sentence list file")->required();
  valuations->add_option("--limit", limit, "print at most this many (0 = all)");
  valuations->add_option("--max-choice-atoms", max_choice_atoms, "closure size cap");
  valuations->add_flag("--porcelain", porcelain, "machine-readable output");

  auto* refute = app.add_subcommand("refute", "Search for a finite countermodel");
  refute->add_option("--premises", premises_file, "sentence list file");
  refute->add_option("--conclusion", conclusion_text, "conclusion sentence")->required();
  refute->add_option("--profile", profile_name, "rule profile (fixes the structure constraint)");
  refute->add_option("--max-domain", max_domain, "largest domain size to try");
  refute->add_option("--max-structures", max_structures, "total structure budget");
  refute->add_option("--max-choice-atoms", max_choice_atoms, "closure size cap");
  refute->add_option("--jobs", jobs, "worker threads (output independent of N)");
  refute->add_flag("--porcelain", porcelain, "machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;  // usage errors are always exit 2
  }

  try {
    if (check->parsed()) return run_check(proof_file, profile_name, sig_file, porcelain);
    if (eval->parsed())
      return run_eval(structure_file, formula_text, choices_file, all, max_choice_atoms, porcelain);
    if (valuations->parsed())
      return run_valuations(structure_file, sentences_file, limit, max_choice_atoms, porcelain);
    if (refute->parsed())
      return run_refute(premises_file, conclusion_text, profile_name, max_domain, max_structures,
                        max_choice_atoms, jobs, porcelain);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
