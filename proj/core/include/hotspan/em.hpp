#pragma once

#include <atomic>
#include <optional>
#include <vector>

#include "hotspan/parent_cache.hpp"
#include "hotspan/schedule.hpp"

namespace hotspan {

struct EmConfig {
  double tol = 1e-8;       // stop when |ΔL| drops below this
  int max_iter = 1000;
  double p_min = 1e-6;     // probabilities clamped to [p_min, 1 - p_min]
  std::optional<double> p0;  // default: 0.5·min(1, 1/mean out-degree)
  std::optional<double> r0;  // default: 1 / mean parent-child delay
  std::atomic<long>* invocations = nullptr;  // bumped once per fit call
};

struct FitResult {
  std::vector<double> boundaries;     // echoed segment boundaries
  std::vector<double> segment_probs;  // one per segment
  std::vector<double> group_probs;    // one per free probability parameter
  double rate = 0.0;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  int rate_update_skips = 0;          // iterations that kept the previous rate
  std::vector<double> trace;          // log-likelihood at each visited iterate

  /** Uniform-fit estimate; requires exactly one group. */
  double p() const;
  /** Span-fit estimates; require exactly two groups (normal, hot). */
  double p1() const;
  double p2() const;
  /** The fitted probability profile. */
  PiecewiseSchedule schedule() const;
};

/**
 * Latent-variable posteriors at fixed parameters, in cache iteration order.
 * alpha/beta are per parent arc (episode, child, arc); alpha is the posterior
 * that this parent's attempt activated the child, beta the posterior that a
 * non-responsible attempt succeeded but was scheduled too late.  beta_g is
 * per failure group: the posterior that an attempt on a never-activated
 * neighbor succeeded but falls beyond the window.
 */
struct Responsibilities {
  std::vector<double> alpha;
  std::vector<double> beta;
  std::vector<double> beta_g;
};

Responsibilities compute_responsibilities(const ParentCache& cache,
                                          const PiecewiseSchedule& sched);

/** Single diffusion probability and delay rate. */
FitResult fit_uniform(const ParentCache& cache, const EmConfig& config = {});

/**
 * Two probabilities: hot for links whose attempting node activated inside
 * [span.start, span.end), normal elsewhere; shared rate.  Throws fit_error
 * when either population is empty.
 */
FitResult fit_span(const ParentCache& cache, const Span& span, const EmConfig& config = {});

/** One probability per segment between the given ascending boundaries. */
FitResult fit_piecewise(const ParentCache& cache, const std::vector<double>& boundaries,
                        const EmConfig& config = {});

}  // namespace hotspan
