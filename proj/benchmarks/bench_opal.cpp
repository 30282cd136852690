#include <benchmark/benchmark.h>

#include "opal/closures.hpp"
#include "opal/corpus.hpp"
#include "opal/pds.hpp"

using namespace opal;

namespace {

OmegaOpa omega(const char* name) { return load_fixture(name).automaton->a; }

void BM_finite_run(benchmark::State& st) {
  Opa a = load_fixture("db_queries").automaton->a;
  Word w = parse_word(a.opm(), "A cup B join C join pi_expr D");
  for (auto _ : st) benchmark::DoNotOptimize(accepts_finite(a, w).accepted);
}
BENCHMARK(BM_finite_run);

void BM_classical_to_variant(benchmark::State& st) {
  Opa a = load_fixture("db_queries").automaton->a;
  for (auto _ : st) benchmark::DoNotOptimize(classical_to_variant(a).automaton.num_states());
}
BENCHMARK(BM_classical_to_variant);

void BM_lasso_membership(benchmark::State& st) {
  auto a = omega("interrupts");
  auto l = parse_lasso(a.opm(), "call_a call_b ; int0 ret_b call_b ret_b");
  for (auto _ : st) benchmark::DoNotOptimize(accepts_lasso(a, l));
}
BENCHMARK(BM_lasso_membership);

void BM_emptiness(benchmark::State& st) {
  auto a = omega("interrupts");
  for (auto _ : st) benchmark::DoNotOptimize(is_empty_omega(a).empty);
}
BENCHMARK(BM_emptiness);

void BM_emptiness_prestar(benchmark::State& st) {
  auto a = omega("interrupts");
  for (auto _ : st) benchmark::DoNotOptimize(is_empty_omega_prestar(a));
}
BENCHMARK(BM_emptiness_prestar);

void BM_intersect(benchmark::State& st) {
  auto a = omega("interrupts"), b = omega("interrupts_restricted");
  for (auto _ : st) benchmark::DoNotOptimize(intersect(a, b).num_states());
}
BENCHMARK(BM_intersect);

void BM_complement(benchmark::State& st) {
  auto a = to_buchi_final(omega("L1_bfae"));
  for (auto _ : st) benchmark::DoNotOptimize(complement(a).num_states());
}
BENCHMARK(BM_complement)->Unit(benchmark::kMillisecond);

void BM_includes(benchmark::State& st) {
  auto a = omega("interrupts"), b = omega("interrupts_restricted");
  for (auto _ : st) benchmark::DoNotOptimize(includes(a, b).included);
}
BENCHMARK(BM_includes)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
