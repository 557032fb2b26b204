#include <benchmark/benchmark.h>

#include "certgate/certifier.hpp"
#include "certgate/generator.hpp"
#include "certgate/ledger.hpp"
#include "certgate/memory.hpp"
#include "certgate/scenario.hpp"

using namespace certgate;

namespace {

ProposedTrace sample_trace() {
  GeneratorSpec gen;
  gen.templates = {{TemplateKind::QueryBurst, kPpm}};
  gen.knobs_ppm["p_over_budget"] = 0;
  gen.mode = GeneratorSpec::Mode::Enumerate;
  gen.n = 100;
  return enumerate_universe(gen, "fin-1").back().trace;
}

CertifierConfig bench_cfg() {
  CertifierConfig cfg;
  cfg.certifier_id = "cert_bench";
  cfg.mac_key = "bench-key";
  return cfg;
}

void BM_CanonicalHash(benchmark::State& state) {
  ProposedTrace t = sample_trace();
  for (auto _ : state) benchmark::DoNotOptimize(canonical_hash(t));
}
BENCHMARK(BM_CanonicalHash);

void BM_Evaluate(benchmark::State& state) {
  PolicySystem p = layered_finance_policy("fin-1");
  ProposedTrace t = sample_trace();
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(p, t));
}
BENCHMARK(BM_Evaluate);

void BM_Certify(benchmark::State& state) {
  PolicySystem p = layered_finance_policy("fin-1");
  ProposedTrace t = sample_trace();
  CertifierConfig cfg = bench_cfg();
  MemoryState mem = init_memory(p);
  for (auto _ : state) benchmark::DoNotOptimize(certify(t, p, mem, cfg));
}
BENCHMARK(BM_Certify);

void BM_LedgerAppend(benchmark::State& state) {
  Ledger ledger;
  LedgerBody body{Digest{}, "{}", "Certified", "fin-1", "risk-desk", 0, 0};
  for (auto _ : state) benchmark::DoNotOptimize(ledger.append(body));
}
BENCHMARK(BM_LedgerAppend);

}  // namespace

BENCHMARK_MAIN();
