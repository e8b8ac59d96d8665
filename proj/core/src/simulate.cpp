#include "hotspan/simulate.hpp"

#include <queue>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "hotspan/errors.hpp"
#include "hotspan/rng.hpp"

namespace hotspan {

namespace {

// (arrival time, attempting node, target node); tuple order gives a
// deterministic tie-break so traces do not depend on heap internals.
using Arrival = std::tuple<double, int, int>;

Episode run_cascade(const Graph& g, const PiecewiseSchedule& sched, int source, double horizon,
                    Rng& rng) {
  Episode ep;
  ep.source = source;
  ep.horizon = horizon;
  std::vector<char> active(static_cast<std::size_t>(g.node_count()), 0);
  std::priority_queue<Arrival, std::vector<Arrival>, std::greater<>> queue;

  const auto attempt_neighbors = [&](int u, double t) {
    const double p = sched.value_at(t);
    // Fixed neighbor order keeps the draw sequence seed-stable.
    for (int v : g.out_neighbors(u)) {
      if (active[static_cast<std::size_t>(v)]) continue;
      if (!rng.bernoulli(p)) continue;
      const double arrival = t + rng.exponential(sched.rate());
      if (arrival <= horizon) queue.emplace(arrival, u, v);
    }
  };

  active[static_cast<std::size_t>(source)] = 1;
  ep.activations.push_back({source, 0.0});
  attempt_neighbors(source, 0.0);
  while (!queue.empty()) {
    const auto [t, u, v] = queue.top();
    queue.pop();
    (void)u;
    if (active[static_cast<std::size_t>(v)]) continue;  // beaten by an earlier parent
    active[static_cast<std::size_t>(v)] = 1;
    ep.activations.push_back({v, t});
    attempt_neighbors(v, t);
  }
  return ep;
}

}  // namespace

Episode simulate_episode(const Graph& g, const PiecewiseSchedule& sched, int source,
                         double horizon, std::uint64_t seed) {
  if (source < 0 || source >= g.node_count())
    throw std::invalid_argument("simulate_episode: source out of range");
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate_episode: horizon must be positive");
  Rng rng(seed);
  return run_cascade(g, sched, source, horizon, rng);
}

Dataset simulate_dataset(const Graph& g, const PiecewiseSchedule& sched, int episode_count,
                         double horizon, std::uint64_t seed, const SimulateOptions& options) {
  if (episode_count <= 0)
    throw std::invalid_argument("simulate_dataset: episode count must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("simulate_dataset: horizon must be positive");
  if (options.min_active < 1 || options.max_attempts < 1)
    throw std::invalid_argument("simulate_dataset: options must be positive");
  Dataset d;
  d.node_count = g.node_count();
  for (int m = 0; m < episode_count; ++m) {
    const std::uint64_t episode_seed = derive_seed(seed, static_cast<std::uint64_t>(m));
    bool accepted = false;
    for (int attempt = 0; attempt < options.max_attempts; ++attempt) {
      Rng rng(derive_seed(episode_seed, static_cast<std::uint64_t>(attempt)));
      const int source = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(g.node_count())));
      Episode ep = run_cascade(g, sched, source, horizon, rng);
      if (static_cast<int>(ep.activations.size()) >= options.min_active) {
        d.episodes.push_back(std::move(ep));
        accepted = true;
        break;
      }
      ++d.resimulations;
    }
    if (!accepted)
      throw data_error("simulate_dataset: episode " + std::to_string(m) + " stayed below " +
                       std::to_string(options.min_active) + " activations after " +
                       std::to_string(options.max_attempts) + " attempts");
  }
  return d;
}

double default_horizon(const Span& span) { return 3.0 * span.end; }

}  // namespace hotspan
