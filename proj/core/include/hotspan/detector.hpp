#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hotspan/em.hpp"
#include "hotspan/episode.hpp"
#include "hotspan/parent_cache.hpp"
#include "hotspan/schedule.hpp"

namespace hotspan {

/** Sorted distinct activation times pooled over all episodes. */
struct CandidateSet {
  std::vector<double> time_points;

  /** Number of candidate spans: one per ordered pair of time points. */
  std::size_t pair_count() const {
    const std::size_t n = time_points.size();
    return n * (n - 1) / 2;
  }
};

/** Throws detect_error when fewer than 2 distinct times exist. */
CandidateSet collect_time_points(const Dataset& data);
CandidateSet collect_time_points(const ParentCache& cache);

/**
 * Cumulative gradient scores over the candidate grid at the uniform estimate
 * (p, rate): prefix[k] sums the per-node scores of all activations strictly
 * before times[k], and prefix[times.size()] holds the total.  The summed
 * score over span [times[i], times[j]] is prefix[j] - prefix[i]; the total
 * vanishes at the maximum-likelihood estimate.
 */
struct PrefixScores {
  std::vector<double> times;
  std::vector<double> prefix;  // times.size() + 1 entries
};

PrefixScores gradient_prefix(const ParentCache& cache, double p, double rate);

/** Endpoint pair maximizing prefix[end] - prefix[start] with start < end. */
struct IntervalResult {
  std::size_t start = 0;
  std::size_t end = 0;
  double value = 0.0;
};

/**
 * O(N) search via the running minimum prefix.  Ties resolve to the earliest
 * start, then the shortest interval.  Requires at least 2 entries.
 */
IntervalResult max_prefix_interval(std::span<const double> prefix);

/** Reference O(N²) pair scan with the identical tie-breaking. */
IntervalResult max_prefix_interval_exhaustive(std::span<const double> prefix);

struct DetectOptions {
  EmConfig em;
  // Fitted spans with |p2 - p1| / p1 below this are flagged as weak evidence.
  double weak_evidence_threshold = 0.1;
};

struct DetectionReport {
  std::string method;  // "proposed" or "naive"
  Span span;
  double p1 = 0.0;
  double p2 = 0.0;
  double rate = 0.0;
  double objective = 0.0;  // summed gradient score at the span (proposed) or best log-likelihood (naive)
  double relative_uplift = 0.0;
  bool weak_evidence = false;
  long em_invocations = 0;
  double wall_seconds = 0.0;
  std::size_t candidate_count = 0;  // distinct time points
  std::optional<double> uniform_p;     // first-stage estimates (proposed only)
  std::optional<double> uniform_rate;
  int naive_k = 0;
  std::uint64_t naive_seed = 0;
};

/**
 * Two-stage detection: fit the uniform model, locate the span maximizing the
 * summed gradient score over the candidate grid, then fit the two-probability
 * model on that span.  Exactly 2 EM runs.
 */
DetectionReport detect_proposed(const ParentCache& cache, const DetectOptions& options = {});

/**
 * Baseline: draw k of the candidate time points without replacement (seeded),
 * fit the two-probability model on every ordered pair, and keep the span with
 * the highest log-likelihood.  Exactly k(k-1)/2 EM runs.
 */
DetectionReport detect_naive(const ParentCache& cache, int k, std::uint64_t seed,
                             const DetectOptions& options = {});

/** Sum of absolute endpoint differences. */
double span_error(const Span& detected, const Span& truth);

/** Sum of relative probability errors; truth values must be positive. */
double prob_error(double p1_hat, double p2_hat, double p1_true, double p2_true);

}  // namespace hotspan
