#include <benchmark/benchmark.h>

#include "bindbench/analysis.hpp"
#include "bindbench/observer.hpp"
#include "bindbench/parse.hpp"
#include "bindbench/render.hpp"
#include "bindbench/rng.hpp"
#include "bindbench/scoring.hpp"
#include "bindbench/stimulus.hpp"

using namespace bindbench;

namespace {

std::vector<FeatureCodes> random_codes(int n, int vocab, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<FeatureCodes> out(static_cast<std::size_t>(n));
  for (auto& c : out) {
    c.color = static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(vocab)));
    c.shape = static_cast<std::uint32_t>(rng.below(static_cast<std::uint64_t>(vocab)));
  }
  return out;
}

ObjectList random_list(int n, std::uint64_t seed) {
  static const char* shapes[] = {"circle", "square", "triangle", "star"};
  static const char* colors[] = {"red", "green", "blue", "yellow"};
  Rng rng(seed);
  ObjectList out;
  for (int i = 0; i < n; ++i) out.push_back({shapes[rng.below(4)], colors[rng.below(4)]});
  return out;
}

void BM_TripletsReference(benchmark::State& state) {
  auto codes = random_codes(static_cast<int>(state.range(0)), 4, 1);
  for (auto _ : state) benchmark::DoNotOptimize(count_feature_triplets_reference(codes));
}
BENCHMARK(BM_TripletsReference)->Arg(10)->Arg(20)->Arg(40);

void BM_TripletsPairwise(benchmark::State& state) {
  auto codes = random_codes(static_cast<int>(state.range(0)), 4, 1);
  for (auto _ : state) benchmark::DoNotOptimize(count_feature_triplets_pairwise(codes));
}
BENCHMARK(BM_TripletsPairwise)->Arg(10)->Arg(20)->Arg(40)->Arg(200);

void BM_EditDistance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  auto truth = random_list(n, 2);
  auto pred = random_list(n, 3);
  for (auto _ : state) benchmark::DoNotOptimize(score_edit_distance(truth, pred).distance);
}
BENCHMARK(BM_EditDistance)->Arg(6)->Arg(20)->Arg(60);

void BM_DescriptionScene(benchmark::State& state) {
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gen_scene_description_trial(12, state.range(0), ++seed));
}
BENCHMARK(BM_DescriptionScene)->Arg(0)->Arg(4)->Arg(12);

void BM_RenderSearchScene(benchmark::State& state) {
  auto scene = gen_search_trial(SearchCondition::Conjunctive, static_cast<int>(state.range(0)), true, 5);
  for (auto _ : state) benchmark::DoNotOptimize(render_scene(scene));
}
BENCHMARK(BM_RenderSearchScene)->Arg(5)->Arg(50)->Unit(benchmark::kMillisecond);

void BM_ParseObjectJson(benchmark::State& state) {
  const std::string text = format_answer(Answer{ObjectListAnswer{random_list(15, 4)}});
  for (auto _ : state) benchmark::DoNotOptimize(parse_answer(text, AnswerKind::ObjectList));
}
BENCHMARK(BM_ParseObjectJson);

}  // namespace

BENCHMARK_MAIN();
