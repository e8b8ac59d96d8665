#pragma once

// Shared fixtures and independent oracles.  The oracle evaluators work
// straight from the graph and raw episodes (explicit set construction,
// sum-of-products density) so they share no code with the library's
// cache-based implementation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "hotspan/episode.hpp"
#include "hotspan/graph.hpp"
#include "hotspan/parent_cache.hpp"
#include "hotspan/rng.hpp"
#include "hotspan/schedule.hpp"
#include "hotspan/simulate.hpp"

namespace support {

// Per-link probability, addressable by episode so a single episode's links
// can be perturbed in isolation: (episode index, source u, target v, u's
// activation time) -> probability.
using LinkProb = std::function<double(int m, int u, int v, double tu)>;

inline LinkProb constant_p(double p) {
  return [p](int, int, int, double) { return p; };
}

// Direct evaluation of the observation log-likelihood.  The density that an
// active non-source node v appeared exactly at its time is the explicit
// mixture sum over parents u: density_u × Π_{u'≠u} survival_{u'}.
inline double oracle_log_likelihood(const hotspan::Graph& g, const hotspan::Dataset& data,
                                    const LinkProb& link_p, double rate) {
  double total = 0.0;
  for (std::size_t m = 0; m < data.episodes.size(); ++m) {
    const hotspan::Episode& ep = data.episodes[m];
    std::map<int, double> time_of;
    for (const auto& a : ep.activations) time_of[a.node] = a.time;
    for (const auto& a : ep.activations) {
      if (a.node == ep.source) continue;
      std::vector<int> parents;
      for (int u : g.in_neighbors(a.node)) {
        const auto it = time_of.find(u);
        if (it != time_of.end() && it->second < a.time) parents.push_back(u);
      }
      double h = 0.0;
      for (int u : parents) {
        const double tu = time_of.at(u);
        const double delta = a.time - tu;
        double term = link_p(static_cast<int>(m), u, a.node, tu) * rate *
                      std::exp(-rate * delta);
        for (int other : parents) {
          if (other == u) continue;
          const double to = time_of.at(other);
          const double d = a.time - to;
          const double p = link_p(static_cast<int>(m), other, a.node, to);
          term *= 1.0 - p * (1.0 - std::exp(-rate * d));
        }
        h += term;
      }
      total += std::log(h);
    }
    for (const auto& a : ep.activations) {
      for (int w : g.out_neighbors(a.node)) {
        if (time_of.count(w)) continue;
        const double tau = ep.horizon - a.time;
        const double p = link_p(static_cast<int>(m), a.node, w, a.time);
        total += std::log(1.0 - p * (1.0 - std::exp(-rate * tau)));
      }
    }
  }
  return total;
}

// Central finite difference of the oracle along one perturbation direction,
// on top of an arbitrary base probability assignment.
inline double oracle_fd_link(const hotspan::Graph& g, const hotspan::Dataset& data,
                             const LinkProb& base, double rate, double eps,
                             const std::function<bool(int m, int u, int v)>& perturbed) {
  const auto shifted = [&](double dp) {
    return oracle_log_likelihood(
        g, data,
        [&, dp](int m, int u, int v, double tu) {
          return base(m, u, v, tu) + (perturbed(m, u, v) ? dp : 0.0);
        },
        rate);
  };
  return (shifted(eps) - shifted(-eps)) / (2.0 * eps);
}

inline double oracle_fd(const hotspan::Graph& g, const hotspan::Dataset& data, double p,
                        double rate, double eps,
                        const std::function<bool(int m, int u, int v)>& perturbed) {
  return oracle_fd_link(g, data, constant_p(p), rate, eps, perturbed);
}

// Relative disagreement with a guard against tiny denominators.
inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-3});
}

// Direct hot-span membership sum: the summed per-node scores of activations
// whose time falls in [span.start, span.end).
inline double oracle_interval_score(const hotspan::ParentCache& cache,
                                    const std::vector<std::vector<double>>& scores,
                                    const hotspan::Span& span) {
  double total = 0.0;
  for (std::size_t m = 0; m < cache.episodes().size(); ++m) {
    const auto& acts = cache.episodes()[m].activations;
    for (std::size_t i = 0; i < acts.size(); ++i)
      if (acts[i].time >= span.start && acts[i].time < span.end) total += scores[m][i];
  }
  return total;
}

struct SmallInstance {
  hotspan::Graph graph;
  hotspan::Dataset dataset;
  double p = 0.0;     // generating probability
  double rate = 0.0;  // generating delay rate
};

// Randomized small instance (<= 50 nodes, <= 3 episodes) with at least one
// parent-child arc, drawn from (p, rate) in [0.05, 0.5] x [0.5, 2].
inline SmallInstance make_small_instance(std::uint64_t seed) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    hotspan::Rng rng(hotspan::derive_seed(seed, attempt));
    const int n = 5 + static_cast<int>(rng.uniform_index(46));
    double degree = 1.0 + 3.0 * rng.uniform01();
    degree = std::min(degree, static_cast<double>(n - 1));
    const double p = 0.05 + 0.45 * rng.uniform01();
    const double rate = 0.5 + 1.5 * rng.uniform01();
    const int episodes = 1 + static_cast<int>(rng.uniform_index(3));
    const double horizon = 5.0 + 10.0 * rng.uniform01();
    try {
      const hotspan::Graph g = hotspan::generate_random_graph(n, degree, rng.raw());
      hotspan::SimulateOptions opts;
      opts.min_active = 2;
      opts.max_attempts = 64;
      const hotspan::Dataset d = hotspan::simulate_dataset(
          g, hotspan::PiecewiseSchedule::uniform(p, rate), episodes, horizon, rng.raw(), opts);
      const hotspan::ParentCache cache(g, d);
      if (cache.total_arcs() >= 1) return {g, d, p, rate};
    } catch (const std::exception&) {
      // Dead cascade or degenerate draw; redraw with the next derived seed.
    }
  }
}

}  // namespace support
