#include <benchmark/benchmark.h>

#include <string>

#include "idx/attribution.hpp"
#include "idx/dataset.hpp"
#include "idx/explanation.hpp"
#include "idx/influence.hpp"
#include "idx/inference.hpp"
#include "idx/kits.hpp"
#include "idx/learning.hpp"

namespace {

const idx::Classifier& model() {
  static const idx::Classifier c = [] {
    idx::Dataset d = idx::Dataset::from_csv(std::string(IDX_DATA_DIR) + "/play_outside.csv");
    idx::Hyperparams h;
    h.alpha = 0.1;
    idx::Structure s;
    s.edges = {{"o", "w"}, {"o", "t"}, {"o", "r"}, {"r", "t"}, {"r", "p"}};
    return idx::fit_bcc(d, {"r", "o"}, h, s);
  }();
  return c;
}

idx::Assignment input() {
  return idx::Assignment().bind("w", "l").bind("t", "m").bind("p", "l");
}

void bench_posterior(benchmark::State& state) {
  const idx::Classifier& c = model();
  const idx::Assignment a = input();
  for (auto _ : state) {
    benchmark::DoNotOptimize(idx::posterior(c, a, "o"));
  }
}
BENCHMARK(bench_posterior);

void bench_predict_all(benchmark::State& state) {
  const idx::Classifier& c = model();
  const idx::Assignment a = input();
  for (auto _ : state) {
    benchmark::DoNotOptimize(idx::predict_all(c, a));
  }
}
BENCHMARK(bench_predict_all);

// Kit construction stays inside the loop: kits memoize posterior lookups, so a
// hoisted kit would measure cache hits instead of explanation generation.
void bench_generate(benchmark::State& state, const std::string& kit_name) {
  const idx::Classifier& c = model();
  const idx::InfluenceGraph g = idx::influences(c);
  const idx::Assignment a = input();
  for (auto _ : state) {
    idx::ExplanationKit kit = idx::make_kit(kit_name, c);
    benchmark::DoNotOptimize(idx::generate(c, g, kit, "o", a));
  }
}
BENCHMARK_CAPTURE(bench_generate, md, "md");
BENCHMARK_CAPTURE(bench_generate, sd, "sd");
BENCHMARK_CAPTURE(bench_generate, cf, "cf");

void bench_surrogate(benchmark::State& state) {
  const idx::Classifier& c = model();
  const idx::Assignment a = input();
  idx::SurrogateParams params;
  params.samples = static_cast<std::size_t>(state.range(0));
  params.seed = 17;
  for (auto _ : state) {
    benchmark::DoNotOptimize(idx::surrogate_scores(c, a, {"r", "o"}, params));
  }
}
BENCHMARK(bench_surrogate)->Arg(500)->Arg(2000);

}  // namespace

BENCHMARK_MAIN();
