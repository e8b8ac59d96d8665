#include "hotspan/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hotspan {

PiecewiseSchedule::PiecewiseSchedule(std::vector<double> boundaries, std::vector<double> probs,
                                     double rate)
    : boundaries_(std::move(boundaries)), probs_(std::move(probs)), rate_(rate) {
  if (probs_.empty()) throw std::invalid_argument("PiecewiseSchedule: need at least one segment");
  if (probs_.size() != boundaries_.size() + 1)
    throw std::invalid_argument("PiecewiseSchedule: expected " +
                                std::to_string(boundaries_.size() + 1) + " probabilities, got " +
                                std::to_string(probs_.size()));
  for (double b : boundaries_)
    if (!std::isfinite(b)) throw std::invalid_argument("PiecewiseSchedule: non-finite boundary");
  if (!std::is_sorted(boundaries_.begin(), boundaries_.end(),
                      [](double a, double b) { return a <= b; }))
    throw std::invalid_argument("PiecewiseSchedule: boundaries must be strictly increasing");
  for (double p : probs_)
    if (!(p > 0.0) || p > 1.0)
      throw std::invalid_argument("PiecewiseSchedule: probability " + std::to_string(p) +
                                  " outside (0, 1]");
  if (!(rate_ > 0.0) || !std::isfinite(rate_))
    throw std::invalid_argument("PiecewiseSchedule: rate must be positive and finite");
}

PiecewiseSchedule PiecewiseSchedule::uniform(double p, double rate) {
  return PiecewiseSchedule({}, {p}, rate);
}

PiecewiseSchedule PiecewiseSchedule::hot_span(double p1, double p2, const Span& span, double rate) {
  if (!(span.start < span.end))
    throw std::invalid_argument("PiecewiseSchedule::hot_span: span start must precede end");
  return PiecewiseSchedule({span.start, span.end}, {p1, p2, p1}, rate);
}

std::size_t PiecewiseSchedule::segment_index(double t) const {
  // First boundary strictly greater than t; segment ends are exclusive.
  const auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), t);
  return static_cast<std::size_t>(it - boundaries_.begin());
}

double PiecewiseSchedule::value_at(double t) const { return probs_[segment_index(t)]; }

}  // namespace hotspan
