#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <vector>

#include "hotspan/episode.hpp"
#include "hotspan/errors.hpp"
#include "hotspan/graph.hpp"
#include "hotspan/likelihood.hpp"
#include "hotspan/parent_cache.hpp"
#include "hotspan/schedule.hpp"
#include "support.hpp"

using hotspan::Dataset;
using hotspan::Episode;
using hotspan::Graph;
using hotspan::ParentCache;
using hotspan::PiecewiseSchedule;
using hotspan::Span;

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

}  // namespace

TEST_CASE("lone failed attempt over a huge window costs log(1-p)") {
  // One edge, source never transmits: as the window grows the survival
  // probability tends to 1-p, so at p = 0.5 the log-likelihood is log(0.5).
  const Graph g(2, {{0, 1}});
  const Dataset d = single_episode(2, 0, 50.0, {{0, 0.0}});
  const ParentCache cache(g, d);
  CHECK(cache.total_pairs() == 1);
  CHECK(cache.total_arcs() == 0);
  const double ll = hotspan::log_likelihood_uniform(cache, 0.5, 1.0);
  CHECK(ll == doctest::Approx(-0.6931471805599453).epsilon(1e-9));
}

TEST_CASE("single transmission arc has a closed-form log-density") {
  // log(p · r · e^{-r·delta}) with p = 0.5, r = 1, delta = 2.
  const Graph g(2, {{0, 1}});
  const Dataset d = single_episode(2, 0, 5.0, {{0, 0.0}, {1, 2.0}});
  const ParentCache cache(g, d);
  CHECK(cache.total_arcs() == 1);
  CHECK(cache.total_pairs() == 1);  // no failed links in this episode
  const double ll = hotspan::log_likelihood_uniform(cache, 0.5, 1.0);
  CHECK(ll == doctest::Approx(std::log(0.5) - 2.0).epsilon(1e-9));
  CHECK(ll == doctest::Approx(-2.6931471805599453).epsilon(1e-9));
}

TEST_CASE("three-node path with a hot middle matches the hand computation") {
  // 0 -> 1 -> 2 activating at 0, 12, 14 under span [10, 20): node 0 attempts
  // at probability p1, node 1 (inside the span) at p2; no failed links.
  const Graph g(3, {{0, 1}, {1, 2}});
  const Dataset d = single_episode(3, 0, 30.0, {{0, 0.0}, {1, 12.0}, {2, 14.0}});
  const ParentCache cache(g, d);
  const double p1 = 0.1;
  const double p2 = 0.3;
  const double r = 1.0;
  const double want = std::log(p1 * r) - r * 12.0 + std::log(p2 * r) - r * 2.0;
  const double got = hotspan::log_likelihood_span(cache, p1, p2, r, Span{10.0, 20.0});
  CHECK(got == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("uniform likelihood matches the direct sum-of-products oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    CAPTURE(seed);
    const auto inst = support::make_small_instance(seed);
    const ParentCache cache(inst.graph, inst.dataset);
    const double mine = hotspan::log_likelihood_uniform(cache, inst.p, inst.rate);
    const double oracle = support::oracle_log_likelihood(
        inst.graph, inst.dataset, support::constant_p(inst.p), inst.rate);
    CHECK(support::rel_diff(mine, oracle) < 1e-12);
  }
}

TEST_CASE("span likelihood matches the oracle with membership-dependent links") {
  for (std::uint64_t seed = 11; seed <= 16; ++seed) {
    CAPTURE(seed);
    const auto inst = support::make_small_instance(seed);
    const ParentCache cache(inst.graph, inst.dataset);
    const Span span{1.0, 4.0};
    const double p2 = 0.6;
    const double mine = hotspan::log_likelihood_span(cache, inst.p, p2, inst.rate, span);
    const double oracle = support::oracle_log_likelihood(
        inst.graph, inst.dataset,
        [&](int, int, int, double tu) {
          return (tu >= span.start && tu < span.end) ? p2 : inst.p;
        },
        inst.rate);
    CHECK(support::rel_diff(mine, oracle) < 1e-12);
  }
}

TEST_CASE("degenerate span collapses to the uniform likelihood exactly") {
  const auto inst = support::make_small_instance(3);
  const ParentCache cache(inst.graph, inst.dataset);
  const double flat = hotspan::log_likelihood_uniform(cache, inst.p, inst.rate);
  CHECK(hotspan::log_likelihood_span(cache, inst.p, inst.p, inst.rate, Span{1.0, 3.0}) == flat);
  // A span placed before every activation has an empty hot set.
  CHECK(hotspan::log_likelihood_span(cache, inst.p, 0.9, inst.rate, Span{-20.0, -10.0}) == flat);
}

TEST_CASE("likelihood requires probabilities strictly inside the unit interval") {
  const Graph g(2, {{0, 1}});
  const Dataset d = single_episode(2, 0, 5.0, {{0, 0.0}, {1, 2.0}});
  const ParentCache cache(g, d);
  CHECK_THROWS_AS(hotspan::log_likelihood_uniform(cache, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(hotspan::log_likelihood(cache, PiecewiseSchedule::uniform(1.0, 1.0)),
                  std::invalid_argument);
}

TEST_CASE("parent cache rejects inconsistent inputs") {
  SUBCASE("node count mismatch") {
    const Graph g(2, {{0, 1}});
    const Dataset d = single_episode(3, 0, 5.0, {{0, 0.0}});
    CHECK_THROWS_AS(ParentCache(g, d), hotspan::data_error);
  }
  SUBCASE("activation without an active earlier in-neighbor") {
    const Graph g(2, {{1, 0}});  // only edge points the wrong way
    const Dataset d = single_episode(2, 0, 5.0, {{0, 0.0}, {1, 1.0}});
    CHECK_THROWS_WITH_AS(ParentCache(g, d),
                         doctest::Contains("no active earlier in-neighbor"),
                         hotspan::data_error);
  }
}

TEST_CASE("parent cache counts arcs, failures and pairs on a hand example") {
  // Edges: 0->1, 0->2, 1->2, 2->3, 1->4.  Episode activates 0, 1, 2 and
  // leaves 3, 4 inactive.
  const Graph g(5, {{0, 1}, {0, 2}, {1, 2}, {2, 3}, {1, 4}});
  const Dataset d = single_episode(5, 0, 10.0, {{0, 0.0}, {1, 1.0}, {2, 3.0}});
  const ParentCache cache(g, d);
  REQUIRE(cache.episodes().size() == 1);
  const auto& ep = cache.episodes()[0];
  REQUIRE(ep.children.size() == 2);
  CHECK(ep.children[0].arcs.size() == 1);  // node 1 <- node 0
  CHECK(ep.children[1].arcs.size() == 2);  // node 2 <- nodes 0 and 1
  CHECK(cache.total_arcs() == 3);
  CHECK(cache.total_pairs() == 5);  // plus failed links 2->3 and 1->4
  CHECK(cache.total_activations() == 3);
  CHECK(cache.mean_delay() == doctest::Approx((1.0 + 3.0 + 2.0) / 3.0));
}

TEST_CASE("per-link derivatives match central finite differences") {
  // Every reported per-term derivative is checked against a finite
  // difference of the oracle in which only that link's probability moves.
  const double eps = 1e-6;
  for (std::uint64_t seed = 21; seed <= 26; ++seed) {
    CAPTURE(seed);
    const auto inst = support::make_small_instance(seed);
    const ParentCache cache(inst.graph, inst.dataset);
    const auto sched = PiecewiseSchedule::uniform(inst.p, inst.rate);
    const auto links = hotspan::per_link_gradients(cache, sched);
    REQUIRE(!links.empty());
    std::size_t checked = 0;
    for (const auto& lg : links) {
      if (checked >= 25) break;
      const double fd = support::oracle_fd(
          inst.graph, inst.dataset, inst.p, inst.rate, eps,
          [&](int m, int u, int v) {
            return m == lg.episode && u == lg.source && v == lg.target;
          });
      CAPTURE(lg.episode);
      CAPTURE(lg.source);
      CAPTURE(lg.target);
      CHECK(support::rel_diff(lg.value, fd) < 1e-5);
      ++checked;
    }
  }
}

TEST_CASE("per-node scores match finite differences over whole out-neighborhoods") {
  const double eps = 1e-6;
  const auto inst = support::make_small_instance(31);
  const ParentCache cache(inst.graph, inst.dataset);
  const auto sched = PiecewiseSchedule::uniform(inst.p, inst.rate);
  const auto table = hotspan::link_gradient(cache, sched);
  REQUIRE(table.scores.size() == inst.dataset.episodes.size());
  for (std::size_t m = 0; m < table.scores.size(); ++m) {
    const auto& acts = cache.episodes()[m].activations;
    REQUIRE(table.scores[m].size() == acts.size());
    for (std::size_t i = 0; i < acts.size(); ++i) {
      const int node = acts[i].node;
      const double fd = support::oracle_fd(
          inst.graph, inst.dataset, inst.p, inst.rate, eps,
          [&](int em, int u, int) { return em == static_cast<int>(m) && u == node; });
      CAPTURE(m);
      CAPTURE(node);
      CHECK(support::rel_diff(table.scores[m][i], fd) < 1e-5);
    }
  }
}

TEST_CASE("per-node scores under a span schedule match finite differences") {
  const double eps = 1e-6;
  const auto inst = support::make_small_instance(37);
  const ParentCache cache(inst.graph, inst.dataset);
  const Span span{1.0, 4.0};
  const double p2 = 0.55;
  const auto sched = PiecewiseSchedule::hot_span(inst.p, p2, span, inst.rate);
  const auto base = [&](int, int, int, double tu) {
    return (tu >= span.start && tu < span.end) ? p2 : inst.p;
  };
  const auto table = hotspan::link_gradient(cache, sched);
  for (std::size_t m = 0; m < table.scores.size(); ++m) {
    const auto& acts = cache.episodes()[m].activations;
    for (std::size_t i = 0; i < acts.size(); ++i) {
      const int node = acts[i].node;
      const double fd = support::oracle_fd_link(
          inst.graph, inst.dataset, base, inst.rate, eps,
          [&](int em, int u, int) { return em == static_cast<int>(m) && u == node; });
      CHECK(support::rel_diff(table.scores[m][i], fd) < 1e-5);
    }
  }
}

TEST_CASE("analytic derivative values on frozen one-arc instances") {
  SUBCASE("sole-parent transmission differentiates to 1/p") {
    const Graph g(2, {{0, 1}});
    const Dataset d = single_episode(2, 0, 5.0, {{0, 0.0}, {1, 2.0}});
    const ParentCache cache(g, d);
    const auto links =
        hotspan::per_link_gradients(cache, PiecewiseSchedule::uniform(0.25, 1.0));
    REQUIRE(links.size() == 1);
    CHECK_FALSE(links[0].failure);
    CHECK(links[0].value == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("saturated failure differentiates to -1/(1-p)") {
    const Graph g(2, {{0, 1}});
    const Dataset d = single_episode(2, 0, 50.0, {{0, 0.0}});
    const ParentCache cache(g, d);
    const auto links =
        hotspan::per_link_gradients(cache, PiecewiseSchedule::uniform(0.5, 1.0));
    REQUIRE(links.size() == 1);
    CHECK(links[0].failure);
    CHECK(links[0].target == 1);
    CHECK(links[0].value == doctest::Approx(-2.0).epsilon(1e-9));
  }
}

TEST_CASE("nodes without likelihood terms score exactly zero") {
  // Node 2 activates last and has no out-edges: nothing depends on its links.
  const Graph g(3, {{0, 1}, {1, 2}});
  const Dataset d = single_episode(3, 0, 30.0, {{0, 0.0}, {1, 12.0}, {2, 14.0}});
  const ParentCache cache(g, d);
  const auto table = hotspan::link_gradient(cache, PiecewiseSchedule::uniform(0.3, 1.0));
  CHECK(table.scores[0][2] == 0.0);
  CHECK(table.total() == table.scores[0][0] + table.scores[0][1]);
}
