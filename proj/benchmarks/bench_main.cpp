#include <benchmark/benchmark.h>

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hotspan/detector.hpp"
#include "hotspan/em.hpp"
#include "hotspan/graph.hpp"
#include "hotspan/likelihood.hpp"
#include "hotspan/parent_cache.hpp"
#include "hotspan/rng.hpp"
#include "hotspan/schedule.hpp"
#include "hotspan/simulate.hpp"

namespace {

using namespace hotspan;

/** Shared fixture: one graph, one multi-episode dataset, one cache. */
struct BenchData {
  Graph graph;
  PiecewiseSchedule schedule;
  Dataset dataset;
  ParentCache cache;

  BenchData(int nodes, double degree, int episodes)
      : graph(generate_random_graph(nodes, degree, 1234)),
        schedule(PiecewiseSchedule::hot_span(0.1, 0.3, Span{10.0, 20.0}, 1.0)),
        dataset(simulate_dataset(graph, schedule, episodes, 60.0, 5678,
                                 SimulateOptions{.min_active = 30})),
        cache(graph, dataset) {}
};

const BenchData& desk_data() {
  static const BenchData data(2000, 6.6, 5);
  return data;
}

void BM_SimulateEpisode(benchmark::State& state) {
  const auto& d = desk_data();
  std::uint64_t seed = 1;
  for (auto _ : state) {
    const Episode ep = simulate_episode(d.graph, d.schedule, 0, 60.0, seed++);
    benchmark::DoNotOptimize(ep.activations.data());
  }
}
BENCHMARK(BM_SimulateEpisode);

void BM_ParentCacheBuild(benchmark::State& state) {
  const auto& d = desk_data();
  for (auto _ : state) {
    const ParentCache cache(d.graph, d.dataset);
    benchmark::DoNotOptimize(cache.total_pairs());
  }
  state.counters["pairs"] = static_cast<double>(d.cache.total_pairs());
}
BENCHMARK(BM_ParentCacheBuild);

void BM_LogLikelihoodUniform(benchmark::State& state) {
  const auto& d = desk_data();
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_likelihood_uniform(d.cache, 0.15, 1.0));
  }
  state.counters["pairs"] = static_cast<double>(d.cache.total_pairs());
}
BENCHMARK(BM_LogLikelihoodUniform);

void BM_LogLikelihoodSpan(benchmark::State& state) {
  const auto& d = desk_data();
  const Span span{10.0, 20.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(log_likelihood_span(d.cache, 0.1, 0.3, 1.0, span));
  }
}
BENCHMARK(BM_LogLikelihoodSpan);

void BM_LinkGradient(benchmark::State& state) {
  const auto& d = desk_data();
  const auto sched = PiecewiseSchedule::uniform(0.15, 1.0);
  for (auto _ : state) {
    const GradientTable table = link_gradient(d.cache, sched);
    benchmark::DoNotOptimize(table.total());
  }
}
BENCHMARK(BM_LinkGradient);

void BM_GradientPrefix(benchmark::State& state) {
  const auto& d = desk_data();
  for (auto _ : state) {
    const PrefixScores scores = gradient_prefix(d.cache, 0.15, 1.0);
    benchmark::DoNotOptimize(scores.prefix.data());
  }
}
BENCHMARK(BM_GradientPrefix);

void BM_EmFitUniform(benchmark::State& state) {
  const auto& d = desk_data();
  for (auto _ : state) {
    const FitResult fit = fit_uniform(d.cache);
    benchmark::DoNotOptimize(fit.log_likelihood);
  }
}
BENCHMARK(BM_EmFitUniform);

void BM_EmFitSpan(benchmark::State& state) {
  const auto& d = desk_data();
  const Span span{10.0, 20.0};
  for (auto _ : state) {
    const FitResult fit = fit_span(d.cache, span);
    benchmark::DoNotOptimize(fit.log_likelihood);
  }
}
BENCHMARK(BM_EmFitSpan);

void BM_DetectProposed(benchmark::State& state) {
  const auto& d = desk_data();
  for (auto _ : state) {
    const DetectionReport report = detect_proposed(d.cache);
    benchmark::DoNotOptimize(report.objective);
  }
}
BENCHMARK(BM_DetectProposed);

/** Synthetic prefix array exercising the interval argmax in isolation. */
std::vector<double> synthetic_prefix(std::size_t n) {
  Rng rng(99);
  std::vector<double> prefix(n);
  double running = 0.0;
  for (auto& value : prefix) {
    running += rng.uniform01() * 2.0 - 1.0;
    value = running;
  }
  return prefix;
}

void BM_MaxPrefixInterval(benchmark::State& state) {
  const auto prefix = synthetic_prefix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_prefix_interval(prefix));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MaxPrefixInterval)->Range(1 << 8, 1 << 14)->Complexity(benchmark::oN);

void BM_MaxPrefixIntervalExhaustive(benchmark::State& state) {
  const auto prefix = synthetic_prefix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(max_prefix_interval_exhaustive(prefix));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_MaxPrefixIntervalExhaustive)->Range(1 << 8, 1 << 12)->Complexity(benchmark::oNSquared);

}  // namespace

BENCHMARK_MAIN();
