#include <benchmark/benchmark.h>

#include "qlet/proof.hpp"
#include "qlet/search.hpp"
#include "qlet/semantics.hpp"
#include "qlet/syntax.hpp"

namespace {

qlet::Structure demo_structure(int n) {
  qlet::Structure s;
  for (int i = 1; i <= n; ++i) s.domain.push_back("d" + std::to_string(i));
  s.assign["a"] = "d1";
  s.assign["b"] = "d" + std::to_string(n);
  s.preds["P"].arity = 1;
  s.preds["P"].pos.insert({"d1"});
  s.preds["P"].neg.insert({"d" + std::to_string(n)});
  s.preds["R"].arity = 2;
  s.preds["R"].pos.insert({"d1", "d" + std::to_string(n)});
  return s;
}

qlet::Signature demo_signature() {
  qlet::Signature sig;
  sig.add_constant("a");
  sig.add_constant("b");
  sig.add_predicate("P", 1);
  sig.add_predicate("R", 2);
  return sig;
}

void BM_EvaluateQuantified(benchmark::State& state) {
  auto s = demo_structure(static_cast<int>(state.range(0)));
  auto sig = demo_signature();
  auto f = qlet::parse_sentence("(forall ?x (exists ?y (or (R ?x ?y) (not (P ?x)))))", sig);
  qlet::ChoiceAssignment empty;
  for (auto _ : state) {
    qlet::Evaluator ev(s, empty);
    benchmark::DoNotOptimize(ev.evaluate(f));
  }
}
BENCHMARK(BM_EvaluateQuantified)->Arg(2)->Arg(4)->Arg(6);

void BM_EnumerateValuations(benchmark::State& state) {
  auto s = demo_structure(2);
  auto sig = demo_signature();
  auto f = qlet::parse_sentence("(forall ?x (or (circ (P ?x)) (not (circ (P ?x)))))", sig);
  for (auto _ : state)
    benchmark::DoNotOptimize(qlet::enumerate_valuations(s, {f}, 20));
}
BENCHMARK(BM_EnumerateValuations);

void BM_StructureDecode(benchmark::State& state) {
  auto sig = demo_signature();
  auto f = qlet::parse_sentence("(or (P a) (R a b))", sig);
  qlet::QueryFragment frag = qlet::query_fragment({}, f);
  qlet::StructureSpace space(frag, 2, qlet::Constraint::None);
  std::uint64_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(space.at(i % space.count()));
    ++i;
  }
}
BENCHMARK(BM_StructureDecode);

void BM_CheckProof(benchmark::State& state) {
  const char* text =
      "(infer or-e (or (P a) (P b))"
      " :discharge (1)"
      " (premise (or (P a) (P b)))"
      " (infer or-i-l (or (P a) (P b)) (hyp 1 (P a)))"
      " (infer or-i-r (or (P a) (P b)) (hyp 1 (P b))))";
  auto profile = qlet::RuleProfile::named("qletf");
  for (auto _ : state) {
    qlet::Signature sig = demo_signature();
    auto proof = qlet::parse_proof(text, sig);
    benchmark::DoNotOptimize(qlet::check_derivation(*proof, profile, sig));
  }
}
BENCHMARK(BM_CheckProof);

void BM_FindCountermodel(benchmark::State& state) {
  qlet::Signature sig;
  qlet::ParseOptions opts{true, true};
  auto premise = qlet::parse_sentence("(and (P c) (not (P c)))", sig, opts);
  auto conclusion = qlet::parse_sentence("(Q c)", sig, opts);
  qlet::SearchConfig config;
  config.max_domain = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(qlet::find_countermodel({premise}, conclusion, config));
}
BENCHMARK(BM_FindCountermodel);

}  // namespace

BENCHMARK_MAIN();
