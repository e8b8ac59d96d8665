#include "hotspan/likelihood.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "hotspan/errors.hpp"

namespace hotspan {

namespace {

void check_schedule(const PiecewiseSchedule& sched) {
  for (double p : sched.probs())
    if (!(p > 0.0) || !(p < 1.0))
      throw std::invalid_argument("likelihood: probability " + std::to_string(p) +
                                  " outside (0, 1)");
}

// Shared per-arc quantities.  q = e^{-r·delay}; survival = 1 - p·(1 - q),
// accumulated as (1-p) + p·q so both addends stay positive.
struct ArcTerms {
  double q;         // e^{-r·delay}
  double density;   // p·r·q: chance the attempt lands exactly at the child time
  double survival;  // chance the attempt has not landed by the child time
};

ArcTerms arc_terms(double p, double rate, double delay) {
  const double q = std::exp(-rate * delay);
  return {q, p * rate * q, (1.0 - p) + p * q};
}

}  // namespace

double log_likelihood(const ParentCache& cache, const PiecewiseSchedule& sched) {
  check_schedule(sched);
  double total = 0.0;
  for (const auto& ep : cache.episodes()) {
    for (const auto& child : ep.children) {
      double ratio_sum = 0.0;  // Σ density/survival over candidate parents
      double log_surv = 0.0;
      for (const auto& arc : child.arcs) {
        const double tu = ep.activations[static_cast<std::size_t>(arc.parent_index)].time;
        const auto t = arc_terms(sched.value_at(tu), sched.rate(), arc.delay);
        ratio_sum += t.density / t.survival;
        log_surv += std::log(t.survival);
      }
      total += std::log(ratio_sum) + log_surv;
    }
    for (const auto& f : ep.failures) {
      const double tv = ep.activations[static_cast<std::size_t>(f.source_index)].time;
      const double p = sched.value_at(tv);
      const double g = (1.0 - p) + p * std::exp(-sched.rate() * f.window);
      total += static_cast<double>(f.targets.size()) * std::log(g);
    }
  }
  if (!std::isfinite(total)) throw fit_error("likelihood: non-finite log-likelihood");
  return total;
}

double log_likelihood_uniform(const ParentCache& cache, double p, double rate) {
  return log_likelihood(cache, PiecewiseSchedule::uniform(p, rate));
}

double log_likelihood_span(const ParentCache& cache, double p1, double p2, double rate,
                           const Span& span) {
  return log_likelihood(cache, PiecewiseSchedule::hot_span(p1, p2, span, rate));
}

double GradientTable::total() const {
  double t = 0.0;
  for (const auto& ep : scores)
    for (double s : ep) t += s;
  return t;
}

namespace {

// Walks every likelihood term once and reports the derivative of that term
// with respect to the probability on its own link.  For an activated child
// with parent sum A = Σ density/survival, the parent-u term differentiates to
// (density'·survival - density·survival')/survival² / A + survival'/survival
// with density' = r·q and survival' = -(1 - q).
template <typename Emit>
void for_each_link_gradient(const ParentCache& cache, const PiecewiseSchedule& sched,
                            Emit&& emit) {
  const double rate = sched.rate();
  for (std::size_t m = 0; m < cache.episodes().size(); ++m) {
    const auto& ep = cache.episodes()[m];
    for (const auto& child : ep.children) {
      double ratio_sum = 0.0;
      for (const auto& arc : child.arcs) {
        const double tu = ep.activations[static_cast<std::size_t>(arc.parent_index)].time;
        const auto t = arc_terms(sched.value_at(tu), rate, arc.delay);
        ratio_sum += t.density / t.survival;
      }
      for (const auto& arc : child.arcs) {
        const double tu = ep.activations[static_cast<std::size_t>(arc.parent_index)].time;
        const auto t = arc_terms(sched.value_at(tu), rate, arc.delay);
        const double one_minus_q = -std::expm1(-rate * arc.delay);
        const double density_d = rate * t.q;
        const double survival_d = -one_minus_q;
        const double value =
            (density_d * t.survival - t.density * survival_d) / (t.survival * t.survival) /
                ratio_sum +
            survival_d / t.survival;
        emit(static_cast<int>(m), arc.parent_index, child.child_index, false, value);
      }
    }
    for (const auto& f : ep.failures) {
      const double tv = ep.activations[static_cast<std::size_t>(f.source_index)].time;
      const double p = sched.value_at(tv);
      const double one_minus_q = -std::expm1(-rate * f.window);
      const double g = (1.0 - p) + p * std::exp(-rate * f.window);
      const double value = -one_minus_q / g;
      for (int w : f.targets) emit(static_cast<int>(m), f.source_index, -1, true, value, w);
    }
  }
}

}  // namespace

GradientTable link_gradient(const ParentCache& cache, const PiecewiseSchedule& sched) {
  check_schedule(sched);
  GradientTable table;
  table.scores.reserve(cache.episodes().size());
  for (const auto& ep : cache.episodes()) table.scores.emplace_back(ep.activations.size(), 0.0);
  for_each_link_gradient(cache, sched,
                         [&](int m, int source_index, int, bool, double value, int = -1) {
                           table.scores[static_cast<std::size_t>(m)]
                                       [static_cast<std::size_t>(source_index)] += value;
                         });
  return table;
}

std::vector<LinkGradient> per_link_gradients(const ParentCache& cache,
                                             const PiecewiseSchedule& sched) {
  check_schedule(sched);
  std::vector<LinkGradient> out;
  for_each_link_gradient(
      cache, sched,
      [&](int m, int source_index, int child_index, bool failure, double value, int target = -1) {
        const auto& ep = cache.episodes()[static_cast<std::size_t>(m)];
        LinkGradient lg;
        lg.episode = m;
        lg.source_index = source_index;
        lg.source = ep.activations[static_cast<std::size_t>(source_index)].node;
        lg.target = failure ? target
                            : ep.activations[static_cast<std::size_t>(child_index)].node;
        lg.failure = failure;
        lg.value = value;
        out.push_back(lg);
      });
  return out;
}

}  // namespace hotspan
