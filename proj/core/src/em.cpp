#include "hotspan/em.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hotspan/errors.hpp"
#include "hotspan/likelihood.hpp"

namespace hotspan {

double FitResult::p() const {
  if (group_probs.size() != 1) throw std::logic_error("FitResult::p: not a uniform fit");
  return group_probs[0];
}

double FitResult::p1() const {
  if (group_probs.size() != 2) throw std::logic_error("FitResult::p1: not a span fit");
  return group_probs[0];
}

double FitResult::p2() const {
  if (group_probs.size() != 2) throw std::logic_error("FitResult::p2: not a span fit");
  return group_probs[1];
}

PiecewiseSchedule FitResult::schedule() const {
  return PiecewiseSchedule(boundaries, segment_probs, rate);
}

namespace {

// Pair population flattened once per fit; group indices replace per-iteration
// schedule lookups, and failure links sharing a source collapse to one entry.
struct CompiledArc {
  double delay;
  int group;
};

struct CompiledChild {
  std::size_t arc_begin;
  std::size_t arc_end;
};

struct CompiledFailure {
  double window;
  int group;
  double count;
};

struct CompiledPairs {
  std::vector<CompiledArc> arcs;
  std::vector<CompiledChild> children;
  std::vector<CompiledFailure> failures;
  std::vector<std::size_t> group_pairs;  // pair population per group
};

CompiledPairs compile_pairs(const ParentCache& cache, const std::vector<double>& boundaries,
                            const std::vector<int>& segment_to_group, int n_groups) {
  // Segment j covers [boundaries[j-1], boundaries[j]); same convention as
  // PiecewiseSchedule::segment_index.
  const auto group_at = [&](double t) {
    const auto it = std::upper_bound(boundaries.begin(), boundaries.end(), t);
    return segment_to_group[static_cast<std::size_t>(it - boundaries.begin())];
  };
  CompiledPairs out;
  out.group_pairs.assign(static_cast<std::size_t>(n_groups), 0);
  for (const auto& ep : cache.episodes()) {
    for (const auto& child : ep.children) {
      CompiledChild cc{out.arcs.size(), 0};
      for (const auto& arc : child.arcs) {
        const double tu = ep.activations[static_cast<std::size_t>(arc.parent_index)].time;
        const int g = group_at(tu);
        out.arcs.push_back({arc.delay, g});
        out.group_pairs[static_cast<std::size_t>(g)]++;
      }
      cc.arc_end = out.arcs.size();
      out.children.push_back(cc);
    }
    for (const auto& f : ep.failures) {
      const double tv = ep.activations[static_cast<std::size_t>(f.source_index)].time;
      const int g = group_at(tv);
      out.failures.push_back({f.window, g, static_cast<double>(f.targets.size())});
      out.group_pairs[static_cast<std::size_t>(g)] += f.targets.size();
    }
  }
  return out;
}

// Log-likelihood and posterior accumulators at one parameter setting,
// gathered in a single pass so each pair pays one exponential.
struct PassResult {
  double ll = 0.0;
  std::vector<double> success_mass;  // Σ α + (1-α)β + β^g per group
  double alpha_sum = 0.0;
  double weighted_delay = 0.0;       // Σ αδ + (1-α)βδ + β^g·τ
};

PassResult em_pass(const CompiledPairs& pairs, const std::vector<double>& probs, double rate,
                   std::vector<double>& scratch_ratio, std::vector<double>& scratch_beta) {
  PassResult out;
  out.success_mass.assign(probs.size(), 0.0);
  for (const auto& child : pairs.children) {
    scratch_ratio.clear();
    scratch_beta.clear();
    double ratio_sum = 0.0;
    double log_surv = 0.0;
    for (std::size_t a = child.arc_begin; a < child.arc_end; ++a) {
      const auto& arc = pairs.arcs[a];
      const double p = probs[static_cast<std::size_t>(arc.group)];
      const double q = std::exp(-rate * arc.delay);
      const double survival = (1.0 - p) + p * q;
      scratch_ratio.push_back(p * rate * q / survival);
      scratch_beta.push_back(p * q / survival);
      ratio_sum += scratch_ratio.back();
      log_surv += std::log(survival);
    }
    out.ll += std::log(ratio_sum) + log_surv;
    for (std::size_t a = child.arc_begin; a < child.arc_end; ++a) {
      const auto& arc = pairs.arcs[a];
      const std::size_t k = a - child.arc_begin;
      const double alpha = scratch_ratio[k] / ratio_sum;
      const double late = (1.0 - alpha) * scratch_beta[k];
      out.success_mass[static_cast<std::size_t>(arc.group)] += alpha + late;
      out.alpha_sum += alpha;
      out.weighted_delay += (alpha + late) * arc.delay;
    }
  }
  for (const auto& f : pairs.failures) {
    const double p = probs[static_cast<std::size_t>(f.group)];
    const double q = std::exp(-rate * f.window);
    const double g = (1.0 - p) + p * q;
    const double beta_g = p * q / g;
    out.ll += f.count * std::log(g);
    out.success_mass[static_cast<std::size_t>(f.group)] += f.count * beta_g;
    out.weighted_delay += f.count * beta_g * f.window;
  }
  if (!std::isfinite(out.ll)) throw fit_error("fit: non-finite log-likelihood during EM");
  return out;
}

FitResult fit_grouped(const ParentCache& cache, const std::vector<double>& boundaries,
                      const std::vector<int>& segment_to_group, int n_groups,
                      const std::vector<std::string>& group_names, const EmConfig& config) {
  if (config.invocations) config.invocations->fetch_add(1);
  if (!(config.tol > 0.0) || config.max_iter < 1 || !(config.p_min > 0.0) ||
      !(config.p_min < 0.5))
    throw std::invalid_argument("fit: invalid convergence configuration");
  if (cache.total_pairs() == 0) throw fit_error("fit: no parent-child or failure pairs");

  const CompiledPairs pairs = compile_pairs(cache, boundaries, segment_to_group, n_groups);
  for (int g = 0; g < n_groups; ++g)
    if (pairs.group_pairs[static_cast<std::size_t>(g)] == 0)
      throw fit_error("fit: empty partition: " + group_names[static_cast<std::size_t>(g)] +
                      " has no pairs");

  double p_init = config.p0.value_or(0.5 * std::min(1.0, 1.0 / cache.mean_out_degree()));
  p_init = std::clamp(p_init, config.p_min, 1.0 - config.p_min);
  double rate = config.r0.value_or(cache.mean_delay() > 0.0 ? 1.0 / cache.mean_delay() : 1.0);
  if (!(p_init > 0.0) || !(p_init < 1.0) || !(rate > 0.0) || !std::isfinite(rate))
    throw std::invalid_argument("fit: initial parameters out of range");

  FitResult result;
  result.boundaries = boundaries;
  std::vector<double> probs(static_cast<std::size_t>(n_groups), p_init);
  std::vector<double> scratch_ratio, scratch_beta;

  PassResult pass = em_pass(pairs, probs, rate, scratch_ratio, scratch_beta);
  result.trace.push_back(pass.ll);
  double prev_ll = pass.ll;
  for (int iter = 0; iter < config.max_iter; ++iter) {
    for (int g = 0; g < n_groups; ++g) {
      const double ratio = pass.success_mass[static_cast<std::size_t>(g)] /
                           static_cast<double>(pairs.group_pairs[static_cast<std::size_t>(g)]);
      probs[static_cast<std::size_t>(g)] = std::clamp(ratio, config.p_min, 1.0 - config.p_min);
    }
    if (pass.alpha_sum > 0.0 && pass.weighted_delay > 0.0)
      rate = pass.alpha_sum / pass.weighted_delay;
    else
      result.rate_update_skips++;
    pass = em_pass(pairs, probs, rate, scratch_ratio, scratch_beta);
    result.trace.push_back(pass.ll);
    result.iterations = iter + 1;
    if (std::abs(pass.ll - prev_ll) < config.tol) {
      result.converged = true;
      prev_ll = pass.ll;
      break;
    }
    prev_ll = pass.ll;
  }

  result.group_probs = probs;
  const auto& stg = segment_to_group;
  result.segment_probs.resize(stg.size());
  for (std::size_t s = 0; s < stg.size(); ++s)
    result.segment_probs[s] = probs[static_cast<std::size_t>(stg[s])];
  result.rate = rate;
  // Canonical evaluation so the reported value matches log_likelihood exactly.
  result.log_likelihood = log_likelihood(cache, result.schedule());
  return result;
}

}  // namespace

Responsibilities compute_responsibilities(const ParentCache& cache,
                                          const PiecewiseSchedule& sched) {
  Responsibilities out;
  const double rate = sched.rate();
  std::vector<double> ratios;
  for (const auto& ep : cache.episodes()) {
    for (const auto& child : ep.children) {
      ratios.clear();
      double ratio_sum = 0.0;
      for (const auto& arc : child.arcs) {
        const double tu = ep.activations[static_cast<std::size_t>(arc.parent_index)].time;
        const double p = sched.value_at(tu);
        const double q = std::exp(-rate * arc.delay);
        const double survival = (1.0 - p) + p * q;
        ratios.push_back(p * rate * q / survival);
        ratio_sum += ratios.back();
        out.beta.push_back(p * q / survival);
      }
      for (double r : ratios) out.alpha.push_back(r / ratio_sum);
    }
    for (const auto& f : ep.failures) {
      const double tv = ep.activations[static_cast<std::size_t>(f.source_index)].time;
      const double p = sched.value_at(tv);
      const double q = std::exp(-rate * f.window);
      out.beta_g.push_back(p * q / ((1.0 - p) + p * q));
    }
  }
  return out;
}

FitResult fit_uniform(const ParentCache& cache, const EmConfig& config) {
  return fit_grouped(cache, {}, {0}, 1, {"uniform"}, config);
}

FitResult fit_span(const ParentCache& cache, const Span& span, const EmConfig& config) {
  if (!(span.start < span.end))
    throw std::invalid_argument("fit_span: span start must precede end");
  // Segments (-inf,T1), [T1,T2), [T2,inf); the outer two share the normal
  // probability, the middle one is the hot probability.
  return fit_grouped(cache, {span.start, span.end}, {0, 1, 0}, 2, {"normal span", "hot span"},
                     config);
}

FitResult fit_piecewise(const ParentCache& cache, const std::vector<double>& boundaries,
                        const EmConfig& config) {
  if (!std::is_sorted(boundaries.begin(), boundaries.end(),
                      [](double a, double b) { return a <= b; }))
    throw std::invalid_argument("fit_piecewise: boundaries must be strictly increasing");
  const int segments = static_cast<int>(boundaries.size()) + 1;
  std::vector<int> identity(static_cast<std::size_t>(segments));
  std::vector<std::string> names(static_cast<std::size_t>(segments));
  for (int s = 0; s < segments; ++s) {
    identity[static_cast<std::size_t>(s)] = s;
    names[static_cast<std::size_t>(s)] = "segment " + std::to_string(s);
  }
  return fit_grouped(cache, boundaries, identity, segments, names, config);
}

}  // namespace hotspan
