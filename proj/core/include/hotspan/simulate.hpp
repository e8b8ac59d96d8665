#pragma once

#include <cstdint>

#include "hotspan/episode.hpp"
#include "hotspan/graph.hpp"
#include "hotspan/schedule.hpp"

namespace hotspan {

struct SimulateOptions {
  int min_active = 10;      // episodes smaller than this are redrawn
  int max_attempts = 1000;  // redraws per episode before giving up
};

/**
 * Runs one cascade from `source` at time 0.  When a node u activates at time
 * t, every neighbor v still inactive at t receives one attempt: success with
 * probability sched.value_at(t) and, on success, arrival at t + Exp(rate)
 * delay.  The earliest successful arrival at or before the horizon activates
 * v.  Deterministic given the seed.
 */
Episode simulate_episode(const Graph& g, const PiecewiseSchedule& sched, int source,
                         double horizon, std::uint64_t seed);

/**
 * Draws `episode_count` independent episodes with uniform-random sources and
 * per-episode seeds derived from `seed`.  An episode with fewer than
 * options.min_active activations is redrawn (fresh source, derived seed);
 * Dataset::resimulations counts the redraws.  Throws data_error if one
 * episode exhausts options.max_attempts.
 */
Dataset simulate_dataset(const Graph& g, const PiecewiseSchedule& sched, int episode_count,
                         double horizon, std::uint64_t seed, const SimulateOptions& options = {});

/** Default observation window for a hot-span schedule: three times span.end. */
double default_horizon(const Span& span);

}  // namespace hotspan
