#include "hotspan/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "hotspan/errors.hpp"
#include "hotspan/likelihood.hpp"
#include "hotspan/rng.hpp"

namespace hotspan {

namespace {

CandidateSet dedup_sorted(std::vector<double> times) {
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  if (times.size() < 2)
    throw detect_error("candidate set: need at least 2 distinct activation times");
  return CandidateSet{std::move(times)};
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void fill_fit_fields(DetectionReport& report, const FitResult& fit, double threshold) {
  report.p1 = fit.p1();
  report.p2 = fit.p2();
  report.rate = fit.rate;
  report.relative_uplift = std::abs(fit.p2() - fit.p1()) / fit.p1();
  report.weak_evidence = report.relative_uplift < threshold;
}

}  // namespace

CandidateSet collect_time_points(const Dataset& data) {
  std::vector<double> times;
  for (const auto& ep : data.episodes)
    for (const auto& a : ep.activations) times.push_back(a.time);
  return dedup_sorted(std::move(times));
}

CandidateSet collect_time_points(const ParentCache& cache) {
  std::vector<double> times;
  for (const auto& ep : cache.episodes())
    for (const auto& a : ep.activations) times.push_back(a.time);
  return dedup_sorted(std::move(times));
}

PrefixScores gradient_prefix(const ParentCache& cache, double p, double rate) {
  const GradientTable table = link_gradient(cache, PiecewiseSchedule::uniform(p, rate));
  // Pool (time, score) with a full ordering so the summation order is fixed.
  std::vector<std::tuple<double, std::size_t, std::size_t>> entries;
  for (std::size_t m = 0; m < cache.episodes().size(); ++m) {
    const auto& acts = cache.episodes()[m].activations;
    for (std::size_t i = 0; i < acts.size(); ++i) entries.emplace_back(acts[i].time, m, i);
  }
  std::sort(entries.begin(), entries.end());

  PrefixScores out;
  out.times = collect_time_points(cache).time_points;
  out.prefix.reserve(out.times.size() + 1);
  double running = 0.0;
  std::size_t next = 0;
  for (double t : out.times) {
    while (next < entries.size() && std::get<0>(entries[next]) < t) {
      const auto& [time, m, i] = entries[next];
      (void)time;
      running += table.scores[m][i];
      ++next;
    }
    out.prefix.push_back(running);
  }
  for (; next < entries.size(); ++next) {
    const auto& [time, m, i] = entries[next];
    (void)time;
    running += table.scores[m][i];
  }
  out.prefix.push_back(running);
  return out;
}

IntervalResult max_prefix_interval(std::span<const double> prefix) {
  if (prefix.size() < 2)
    throw std::invalid_argument("max_prefix_interval: need at least 2 entries");
  IntervalResult best{0, 1, prefix[1] - prefix[0]};
  std::size_t min_index = 0;  // earliest index attaining the running minimum
  for (std::size_t j = 1; j < prefix.size(); ++j) {
    const double value = prefix[j] - prefix[min_index];
    if (value > best.value) best = {min_index, j, value};
    if (prefix[j] < prefix[min_index]) min_index = j;
  }
  return best;
}

IntervalResult max_prefix_interval_exhaustive(std::span<const double> prefix) {
  if (prefix.size() < 2)
    throw std::invalid_argument("max_prefix_interval: need at least 2 entries");
  IntervalResult best{0, 1, prefix[1] - prefix[0]};
  for (std::size_t i = 0; i < prefix.size(); ++i)
    for (std::size_t j = i + 1; j < prefix.size(); ++j)
      if (prefix[j] - prefix[i] > best.value) best = {i, j, prefix[j] - prefix[i]};
  return best;
}

DetectionReport detect_proposed(const ParentCache& cache, const DetectOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  std::atomic<long> invocations{0};
  EmConfig em = options.em;
  em.invocations = &invocations;

  const FitResult uniform = fit_uniform(cache, em);
  const PrefixScores scores = gradient_prefix(cache, uniform.p(), uniform.rate);
  // Span endpoints come from observed time points only; the synthetic total
  // slot at the back is not a valid endpoint.
  const std::span<const double> endpoints(scores.prefix.data(), scores.times.size());
  const IntervalResult interval = max_prefix_interval(endpoints);
  const Span span{scores.times[interval.start], scores.times[interval.end]};
  const FitResult fit = fit_span(cache, span, em);

  DetectionReport report;
  report.method = "proposed";
  report.span = span;
  report.objective = interval.value;
  report.candidate_count = scores.times.size();
  report.uniform_p = uniform.p();
  report.uniform_rate = uniform.rate;
  fill_fit_fields(report, fit, options.weak_evidence_threshold);
  if (options.em.invocations) options.em.invocations->fetch_add(invocations.load());
  report.em_invocations = invocations.load();
  report.wall_seconds = elapsed_seconds(start);
  return report;
}

DetectionReport detect_naive(const ParentCache& cache, int k, std::uint64_t seed,
                             const DetectOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const CandidateSet candidates = collect_time_points(cache);
  if (k < 2 || static_cast<std::size_t>(k) > candidates.time_points.size())
    throw std::invalid_argument("detect_naive: k must be in [2, distinct time count]");
  std::atomic<long> invocations{0};
  EmConfig em = options.em;
  em.invocations = &invocations;

  Rng rng(seed);
  std::vector<double> picked =
      sample_without_replacement(candidates.time_points, static_cast<std::size_t>(k), rng);
  std::sort(picked.begin(), picked.end());

  bool found = false;
  FitResult best_fit;
  Span best_span;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    for (std::size_t j = i + 1; j < picked.size(); ++j) {
      const Span span{picked[i], picked[j]};
      try {
        FitResult fit = fit_span(cache, span, em);
        if (!found || fit.log_likelihood > best_fit.log_likelihood) {
          found = true;
          best_fit = std::move(fit);
          best_span = span;
        }
      } catch (const fit_error&) {
        // Degenerate span (an empty partition); skip, the EM attempt counts.
      }
    }
  }
  if (!found) throw detect_error("detect_naive: every candidate span failed to fit");

  DetectionReport report;
  report.method = "naive";
  report.span = best_span;
  report.objective = best_fit.log_likelihood;
  report.candidate_count = candidates.time_points.size();
  report.naive_k = k;
  report.naive_seed = seed;
  fill_fit_fields(report, best_fit, options.weak_evidence_threshold);
  if (options.em.invocations) options.em.invocations->fetch_add(invocations.load());
  report.em_invocations = invocations.load();
  report.wall_seconds = elapsed_seconds(start);
  return report;
}

double span_error(const Span& detected, const Span& truth) {
  return std::abs(detected.start - truth.start) + std::abs(detected.end - truth.end);
}

double prob_error(double p1_hat, double p2_hat, double p1_true, double p2_true) {
  if (!(p1_true > 0.0) || !(p2_true > 0.0))
    throw std::invalid_argument("prob_error: true probabilities must be positive");
  return std::abs(p1_hat - p1_true) / p1_true + std::abs(p2_hat - p2_true) / p2_true;
}

}  // namespace hotspan
