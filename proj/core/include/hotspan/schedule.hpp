#pragma once

#include <cstddef>
#include <vector>

namespace hotspan {

/** Half-open time interval [start, end). */
struct Span {
  double start = 0.0;
  double end = 0.0;

  friend bool operator==(const Span&, const Span&) = default;
};

/**
 * Piecewise-constant diffusion-probability profile with a single delay rate.
 *
 * J segments are separated by J-1 strictly increasing interior boundaries;
 * segment j covers [boundary[j-1], boundary[j]) with the outer segments
 * extending to -inf and +inf.  Probabilities lie in (0, 1]; rate is positive.
 */
class PiecewiseSchedule {
 public:
  PiecewiseSchedule(std::vector<double> boundaries, std::vector<double> probs, double rate);

  /** Constant probability everywhere (one segment, no boundaries). */
  static PiecewiseSchedule uniform(double p, double rate);

  /** Probability p2 on [span.start, span.end), p1 elsewhere. */
  static PiecewiseSchedule hot_span(double p1, double p2, const Span& span, double rate);

  /** Index of the segment containing time t. */
  std::size_t segment_index(double t) const;

  /** Diffusion probability in effect at time t. */
  double value_at(double t) const;

  std::size_t segment_count() const { return probs_.size(); }
  const std::vector<double>& boundaries() const { return boundaries_; }
  const std::vector<double>& probs() const { return probs_; }
  double rate() const { return rate_; }

 private:
  std::vector<double> boundaries_;
  std::vector<double> probs_;
  double rate_;
};

}  // namespace hotspan
