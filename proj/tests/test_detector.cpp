#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "hotspan/detector.hpp"
#include "hotspan/em.hpp"
#include "hotspan/episode.hpp"
#include "hotspan/errors.hpp"
#include "hotspan/graph.hpp"
#include "hotspan/likelihood.hpp"
#include "hotspan/parent_cache.hpp"
#include "hotspan/rng.hpp"
#include "hotspan/schedule.hpp"
#include "hotspan/simulate.hpp"
#include "support.hpp"

using hotspan::Dataset;
using hotspan::DetectOptions;
using hotspan::DetectionReport;
using hotspan::Episode;
using hotspan::Graph;
using hotspan::IntervalResult;
using hotspan::ParentCache;
using hotspan::PiecewiseSchedule;
using hotspan::Span;
using hotspan::collect_time_points;
using hotspan::detect_error;
using hotspan::detect_naive;
using hotspan::detect_proposed;
using hotspan::gradient_prefix;
using hotspan::max_prefix_interval;
using hotspan::max_prefix_interval_exhaustive;

namespace {

Dataset single_episode(int node_count, int source, double horizon,
                       std::vector<hotspan::Activation> acts) {
  Dataset d;
  d.node_count = node_count;
  Episode ep;
  ep.source = source;
  ep.horizon = horizon;
  ep.activations = std::move(acts);
  d.episodes.push_back(std::move(ep));
  return d;
}

// Chain with side branches: activations at integer times plus three failed
// links, giving a four-point candidate grid where every span is fittable.
const ParentCache& chain_cache() {
  static const Graph g(7, {{0, 1}, {1, 2}, {2, 3}, {0, 4}, {2, 5}, {3, 6}});
  static const Dataset d =
      single_episode(7, 0, 6.0, {{0, 0.0}, {1, 1.0}, {2, 2.0}, {3, 3.0}});
  static const ParentCache cache(g, d);
  return cache;
}

// Planted burst: probability jumps from 0.1 to 0.35 inside [5, 12).
const ParentCache& planted_cache() {
  static const Graph g = hotspan::generate_random_graph(800, 8.0, 81);
  static const Dataset d = [] {
    hotspan::SimulateOptions opts;
    opts.min_active = 10;
    return hotspan::simulate_dataset(
        g, PiecewiseSchedule::hot_span(0.1, 0.35, Span{5.0, 12.0}, 1.0), 3, 36.0, 82, opts);
  }();
  static const ParentCache cache(g, d);
  return cache;
}

}  // namespace

TEST_CASE("candidate grid pools distinct activation times") {
  const Dataset d = single_episode(3, 0, 10.0, {{0, 0.0}, {1, 3.0}, {2, 7.0}});
  const auto c = collect_time_points(d);
  CHECK(c.time_points == std::vector<double>{0.0, 3.0, 7.0});
  CHECK(c.pair_count() == 3);

  Dataset two = d;
  two.episodes.push_back(two.episodes[0]);
  two.episodes[1].activations[1].time = 3.0;  // duplicate across episodes
  two.episodes[1].activations[2].time = 5.0;
  const auto c2 = collect_time_points(two);
  CHECK(c2.time_points == std::vector<double>{0.0, 3.0, 5.0, 7.0});
  CHECK(c2.pair_count() == 6);
}

TEST_CASE("fewer than two distinct times cannot form a candidate grid") {
  const Dataset d = single_episode(1, 0, 10.0, {{0, 0.0}});
  CHECK_THROWS_AS(collect_time_points(d), detect_error);
}

TEST_CASE("prefix sums reproduce direct interval scores") {
  const auto inst = support::make_small_instance(91);
  const ParentCache cache(inst.graph, inst.dataset);
  const auto scores = gradient_prefix(cache, inst.p, inst.rate);
  const auto table =
      hotspan::link_gradient(cache, PiecewiseSchedule::uniform(inst.p, inst.rate));
  const std::size_t n = scores.times.size();
  REQUIRE(scores.prefix.size() == n + 1);
  CHECK(scores.prefix[0] == 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double via_prefix = scores.prefix[j] - scores.prefix[i];
      const double direct = support::oracle_interval_score(
          cache, table.scores, Span{scores.times[i], scores.times[j]});
      CHECK(std::abs(via_prefix - direct) <= 1e-9 * std::max(1.0, std::abs(direct)));
    }
  // The synthetic last entry holds the total score.
  CHECK(scores.prefix[n] == doctest::Approx(table.total()).epsilon(1e-12));
}

TEST_CASE("interval score over a gap with no activations is exactly zero") {
  const auto inst = support::make_small_instance(93);
  const ParentCache cache(inst.graph, inst.dataset);
  const auto table =
      hotspan::link_gradient(cache, PiecewiseSchedule::uniform(inst.p, inst.rate));
  const auto c = collect_time_points(inst.dataset);
  const double lo = c.time_points[0];
  const double hi = c.time_points[1];
  const double third = (hi - lo) / 3.0;
  CHECK(support::oracle_interval_score(cache, table.scores,
                                       Span{lo + third, hi - third}) == 0.0);
}

TEST_CASE("total gradient vanishes at a tight uniform fit") {
  const ParentCache& cache = planted_cache();
  hotspan::EmConfig config;
  config.tol = 1e-13;
  config.max_iter = 20000;
  const auto fit = hotspan::fit_uniform(cache, config);
  REQUIRE(fit.converged);
  const auto scores = gradient_prefix(cache, fit.p(), fit.rate);
  CHECK(std::abs(scores.prefix.back()) <= 1e-6 * static_cast<double>(cache.total_pairs()));
}

TEST_CASE("linear interval search agrees with the exhaustive scan") {
  hotspan::Rng rng(2718);
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 2 + rng.uniform_index(39);
    std::vector<double> prefix(n);
    const bool integer_valued = round % 2 == 0;  // force plateaus and ties
    for (auto& x : prefix)
      x = integer_valued ? static_cast<double>(rng.uniform_index(5)) - 2.0
                         : 10.0 * rng.uniform01() - 5.0;
    const IntervalResult fast = max_prefix_interval(prefix);
    const IntervalResult slow = max_prefix_interval_exhaustive(prefix);
    CAPTURE(round);
    CHECK(fast.start == slow.start);
    CHECK(fast.end == slow.end);
    CHECK(fast.value == slow.value);
  }
}

TEST_CASE("interval ties resolve to the earliest start then shortest span") {
  const std::vector<double> a{0.0, 5.0, 0.0, 5.0};
  const IntervalResult ra = max_prefix_interval(a);
  CHECK(ra.start == 0);
  CHECK(ra.end == 1);
  CHECK(ra.value == 5.0);
  const std::vector<double> b{0.0, -1.0, 4.0, -1.0, 4.0};
  const IntervalResult rb = max_prefix_interval(b);
  CHECK(rb.start == 1);
  CHECK(rb.end == 2);
  CHECK(rb.value == 5.0);
  CHECK_THROWS_AS(max_prefix_interval(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("proposed detector locates the planted burst with two fits") {
  std::atomic<long> invocations{0};
  DetectOptions options;
  options.em.invocations = &invocations;
  const DetectionReport report = detect_proposed(planted_cache(), options);
  CHECK(report.method == "proposed");
  CHECK(report.em_invocations == 2);
  CHECK(invocations.load() == 2);
  CHECK(report.span.start > 0.0);
  CHECK(report.span.end > report.span.start);
  CHECK(hotspan::span_error(report.span, Span{5.0, 12.0}) <= 4.0);
  CHECK(report.p2 > report.p1);
  CHECK_FALSE(report.weak_evidence);
  CHECK(report.uniform_p.has_value());
  CHECK(report.uniform_rate.has_value());
  CHECK(report.candidate_count == collect_time_points(planted_cache()).time_points.size());
}

TEST_CASE("naive detector evaluates every sampled pair") {
  std::atomic<long> invocations{0};
  DetectOptions options;
  options.em.invocations = &invocations;
  const DetectionReport report = detect_naive(planted_cache(), 6, 7, options);
  CHECK(report.method == "naive");
  CHECK(report.naive_k == 6);
  CHECK(report.naive_seed == 7);
  CHECK(report.em_invocations == 15);
  CHECK(invocations.load() == 15);
  CHECK(report.span.end > report.span.start);
  CHECK(report.objective < 0.0);  // a log-likelihood
}

TEST_CASE("naive detection is deterministic in the seed") {
  const DetectionReport a = detect_naive(planted_cache(), 5, 11);
  const DetectionReport b = detect_naive(planted_cache(), 5, 11);
  CHECK(a.span.start == b.span.start);
  CHECK(a.span.end == b.span.end);
  CHECK(a.objective == b.objective);
}

TEST_CASE("naive search over the full grid dominates the proposed span") {
  const ParentCache& cache = chain_cache();
  const auto c = collect_time_points(cache);
  REQUIRE(c.time_points.size() == 4);
  std::atomic<long> invocations{0};
  DetectOptions options;
  options.em.invocations = &invocations;
  const DetectionReport naive =
      detect_naive(cache, static_cast<int>(c.time_points.size()), 1, options);
  CHECK(invocations.load() == 6);
  const DetectionReport proposed = detect_proposed(cache);
  const double proposed_ll =
      hotspan::fit_span(cache, proposed.span).log_likelihood;
  CHECK(naive.objective >= proposed_ll - 1e-9);
}

TEST_CASE("naive sample size must fit the candidate grid") {
  const ParentCache& cache = chain_cache();
  CHECK_THROWS_AS(detect_naive(cache, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(detect_naive(cache, 5, 1), std::invalid_argument);
  CHECK_NOTHROW(detect_naive(cache, 2, 1));
}

TEST_CASE("a span whose complement is empty is skipped, and may exhaust the grid") {
  // Two nodes, one edge, both active: the only candidate span [0, t1] makes
  // the normal partition empty, so every naive attempt fails.
  const Graph g(2, {{0, 1}});
  const Dataset d = single_episode(2, 0, 5.0, {{0, 0.0}, {1, 2.0}});
  const ParentCache cache(g, d);
  CHECK_THROWS_AS(detect_naive(cache, 2, 3), detect_error);
}

TEST_CASE("weak evidence flag reflects the threshold") {
  DetectOptions strict;
  strict.weak_evidence_threshold = 1e9;  // everything counts as weak
  const DetectionReport report = detect_proposed(planted_cache(), strict);
  CHECK(report.weak_evidence);
  CHECK(report.relative_uplift > 0.1);  // the data itself is strong
}

TEST_CASE("doubling the time axis doubles the detected span") {
  const auto inst = support::make_small_instance(67);
  const ParentCache cache(inst.graph, inst.dataset);
  Dataset doubled = inst.dataset;
  for (auto& ep : doubled.episodes) {
    ep.horizon *= 2.0;
    for (auto& a : ep.activations) a.time *= 2.0;
  }
  const ParentCache cache2(inst.graph, doubled);
  const DetectionReport a = detect_proposed(cache);
  const DetectionReport b = detect_proposed(cache2);
  CHECK(b.span.start == 2.0 * a.span.start);
  CHECK(b.span.end == 2.0 * a.span.end);
  CHECK(std::abs(b.p1 - a.p1) <= 1e-9);
  CHECK(std::abs(b.p2 - a.p2) <= 1e-9);
  CHECK(std::abs(b.rate - a.rate / 2.0) <= 1e-9 * a.rate);
}

TEST_CASE("accuracy metrics") {
  CHECK(hotspan::span_error(Span{10.0, 20.0}, Span{10.0, 20.0}) == 0.0);
  CHECK(hotspan::span_error(Span{9.0, 22.0}, Span{10.0, 20.0}) == 3.0);
  CHECK(hotspan::prob_error(0.1, 0.3, 0.1, 0.3) == 0.0);
  CHECK(hotspan::prob_error(0.11, 0.27, 0.1, 0.3) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK_THROWS_AS(hotspan::prob_error(0.1, 0.3, 0.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(hotspan::prob_error(0.1, 0.3, 0.1, -0.2), std::invalid_argument);
}
