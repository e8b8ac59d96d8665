#pragma once

#include <vector>

#include "hotspan/parent_cache.hpp"
#include "hotspan/schedule.hpp"

namespace hotspan {

/**
 * Log-likelihood of the cached episodes under a piecewise-constant diffusion
 * probability.  Each active non-source node contributes the log-density of
 * being activated at its observed time by one of its parents; each active
 * node contributes, per never-activated out-neighbor, the log-probability
 * that the attempt produced no activation inside the window.  The probability
 * on a link is the schedule value at the ATTEMPTING node's activation time.
 *
 * All schedule probabilities must lie in (0, 1) strictly; rate > 0.
 */
double log_likelihood(const ParentCache& cache, const PiecewiseSchedule& sched);

/** Single probability everywhere. */
double log_likelihood_uniform(const ParentCache& cache, double p, double rate);

/** Probability p2 for attempts whose source activated in [span.start, span.end), else p1. */
double log_likelihood_span(const ParentCache& cache, double p1, double p2, double rate,
                           const Span& span);

/**
 * Per-node gradient scores: scores[m][i] is the derivative of the
 * log-likelihood with respect to a probability private to the outgoing links
 * of episode m's i-th activated node, evaluated at the schedule.  Zero for
 * nodes whose out-links never enter the likelihood.
 */
struct GradientTable {
  std::vector<std::vector<double>> scores;

  double total() const;
};

GradientTable link_gradient(const ParentCache& cache, const PiecewiseSchedule& sched);

/** One likelihood term's derivative with respect to its own link probability. */
struct LinkGradient {
  int episode = -1;
  int source_index = -1;  // activation index of the attempting node
  int source = -1;        // node id of the attempting node
  int target = -1;        // node id of the attempted neighbor
  bool failure = false;   // true: never-activated target, false: activated child
  double value = 0.0;
};

/** Flat per-link view of the same derivatives, for oracle comparisons. */
std::vector<LinkGradient> per_link_gradients(const ParentCache& cache,
                                             const PiecewiseSchedule& sched);

}  // namespace hotspan
