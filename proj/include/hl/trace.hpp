#pragma once

#include <vector>

namespace hl {

/// Nonnegative step function of time: value k holds on [times[k], times[k+1]).
class StepTrace {
 public:
  StepTrace() : times_{0.0}, cumulative_{0.0} {}
  /// times.size() == values.size() + 1, times[0] == 0, strictly increasing.
  StepTrace(std::vector<double> times, std::vector<double> values);
  /// Constant value on [0, t_end].
  static StepTrace constant(double value, double t_end);

  void append(double t_end, double value);

  double end_time() const { return times_.back(); }
  int intervals() const { return static_cast<int>(values_.size()); }
  double start(int k) const { return times_[k]; }
  double end(int k) const { return times_[k + 1]; }
  double value(int k) const { return values_[k]; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

  /// Integral over [0, t]; t clamped to [0, end_time()].
  double integral(double t) const;
  double integral(double t0, double t1) const { return integral(t1) - integral(t0); }

 private:
  std::vector<double> times_;
  std::vector<double> values_;
  std::vector<double> cumulative_;
};

}  // namespace hl
