#include "hotspan/multispan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "hotspan/errors.hpp"
#include "hotspan/likelihood.hpp"

namespace hotspan {

double description_length(double log_likelihood, int segments, std::size_t n_obs) {
  if (segments < 1 || n_obs < 1)
    throw std::invalid_argument("description_length: need segments >= 1 and n_obs >= 1");
  // Free quantities: `segments` probabilities, segments-1 boundaries, one rate.
  const double kappa = 2.0 * static_cast<double>(segments);
  return -log_likelihood + 0.5 * kappa * std::log(static_cast<double>(n_obs));
}

double aic_score(double log_likelihood, int segments) {
  if (segments < 1) throw std::invalid_argument("aic_score: need segments >= 1");
  return -log_likelihood + 2.0 * static_cast<double>(segments);
}

namespace {

struct Candidate {
  double time = 0.0;
  double magnitude = -1.0;  // |summed score over [time, segment end)|
};

// Best interior split per the suffix-anchored rule: pooled activations are
// grouped into segments of the current fit; within a segment, each distinct
// time after the segment's first is scored by the absolute gradient sum over
// [time, segment end).  Ties keep the earliest time.
Candidate best_candidate(const ParentCache& cache, const std::vector<double>& boundaries,
                         const GradientTable& table) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> entries;
  for (std::size_t m = 0; m < cache.episodes().size(); ++m) {
    const auto& acts = cache.episodes()[m].activations;
    for (std::size_t i = 0; i < acts.size(); ++i) entries.emplace_back(acts[i].time, m, i);
  }
  std::sort(entries.begin(), entries.end());

  Candidate best;
  std::size_t begin = 0;
  for (std::size_t seg = 0; seg <= boundaries.size(); ++seg) {
    const double seg_end = seg < boundaries.size() ? boundaries[seg]
                                                   : std::numeric_limits<double>::infinity();
    std::size_t end = begin;
    while (end < entries.size() && std::get<0>(entries[end]) < seg_end) ++end;
    if (end - begin >= 2) {
      // Suffix sums over the segment's entries, evaluated at each distinct
      // time strictly after the segment's first.
      double suffix = 0.0;
      std::vector<std::pair<double, double>> at_time;  // (time, suffix sum from that time)
      for (std::size_t k = end; k-- > begin;) {
        const auto& [t, m, i] = entries[k];
        suffix += table.scores[m][i];
        if (k == begin || std::get<0>(entries[k - 1]) != t) at_time.emplace_back(t, suffix);
      }
      std::reverse(at_time.begin(), at_time.end());
      for (std::size_t k = 1; k < at_time.size(); ++k) {  // skip the segment's first time
        const double magnitude = std::abs(at_time[k].second);
        if (magnitude > best.magnitude) best = {at_time[k].first, magnitude};
      }
    }
    begin = end;
  }
  return best;
}

}  // namespace

SegmentationState detect_multispan(const ParentCache& cache, int max_segments,
                                   const MultispanOptions& options) {
  if (max_segments < 1)
    throw std::invalid_argument("detect_multispan: max_segments must be >= 1");
  std::atomic<long> invocations{0};
  EmConfig em = options.em;
  em.invocations = &invocations;
  const std::size_t n_obs = cache.total_activations();
  const auto criterion = [&](double ll, int segments) {
    return options.criterion == SplitCriterion::mdl ? description_length(ll, segments, n_obs)
                                                    : aic_score(ll, segments);
  };

  SegmentationState state;
  FitResult fit = fit_piecewise(cache, {}, em);
  state.score = criterion(fit.log_likelihood, 1);
  state.stop_reason = "max-segments";
  while (static_cast<int>(state.boundaries.size()) + 1 < max_segments) {
    const GradientTable table = link_gradient(cache, fit.schedule());
    const Candidate candidate = best_candidate(cache, state.boundaries, table);
    if (candidate.magnitude < 0.0) {
      state.stop_reason = "no-candidate";
      break;
    }
    std::vector<double> trial_boundaries = state.boundaries;
    trial_boundaries.insert(
        std::upper_bound(trial_boundaries.begin(), trial_boundaries.end(), candidate.time),
        candidate.time);
    FitResult trial;
    double trial_score = std::numeric_limits<double>::infinity();
    bool fittable = true;
    try {
      trial = fit_piecewise(cache, trial_boundaries, em);
      trial_score = criterion(trial.log_likelihood, static_cast<int>(trial_boundaries.size()) + 1);
    } catch (const fit_error&) {
      // The split strands a pair-free partition; an unfittable model has
      // infinite description length, so the criterion rejects it.
      fittable = false;
    }
    const bool accepted = fittable && trial_score < state.score;
    state.history.push_back({candidate.time,
                             fittable ? trial.log_likelihood
                                      : -std::numeric_limits<double>::infinity(),
                             trial_score, accepted});
    if (!accepted) {
      state.stop_reason = "criterion-rejected";
      break;
    }
    state.boundaries = std::move(trial_boundaries);
    state.score = trial_score;
    fit = std::move(trial);
  }

  state.segment_probs = fit.segment_probs;
  state.rate = fit.rate;
  state.log_likelihood = fit.log_likelihood;
  state.em_invocations = invocations.load();
  if (options.em.invocations) options.em.invocations->fetch_add(invocations.load());
  return state;
}

}  // namespace hotspan
