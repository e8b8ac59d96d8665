#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hotspan/em.hpp"
#include "hotspan/parent_cache.hpp"

namespace hotspan {

enum class SplitCriterion { mdl, aic };

struct MultispanOptions {
  EmConfig em;
  SplitCriterion criterion = SplitCriterion::mdl;
};

/** One attempted boundary insertion. */
struct SegmentationStep {
  double boundary = 0.0;
  double log_likelihood = 0.0;  // of the trial fit including the boundary
  double score = 0.0;           // criterion value of the trial model
  bool accepted = false;
};

struct SegmentationState {
  std::vector<double> boundaries;     // accepted interior boundaries, ascending
  std::vector<double> segment_probs;  // one per segment
  double rate = 0.0;
  double log_likelihood = 0.0;
  double score = 0.0;                 // criterion value of the accepted model
  std::vector<SegmentationStep> history;
  std::string stop_reason;            // "criterion-rejected", "max-segments" or "no-candidate"
  long em_invocations = 0;

  int segments() const { return static_cast<int>(boundaries.size()) + 1; }
};

/**
 * Description length of a fitted piecewise model: -L̂ plus half the parameter
 * count (J probabilities, J-1 boundaries, one rate) times log of the total
 * activation count.
 */
double description_length(double log_likelihood, int segments, std::size_t n_obs);

/** Penalized likelihood on the same half scale: -L̂ + parameter count. */
double aic_score(double log_likelihood, int segments);

/**
 * Greedy recursive segmentation.  Starting from the single-segment fit, each
 * round scores every interior candidate time t of every segment by the
 * absolute summed gradient score over [t, segment end) at the current fit,
 * inserts the best-scoring boundary, refits, and keeps it only if the
 * criterion improves.  Previously accepted boundaries are never moved.  One
 * EM run per attempted insertion plus one for the initial fit.
 */
SegmentationState detect_multispan(const ParentCache& cache, int max_segments,
                                   const MultispanOptions& options = {});

}  // namespace hotspan
