#include "hl/trace.hpp"

#include <algorithm>
#include <cmath>

#include "hl/errors.hpp"

namespace hl {

StepTrace::StepTrace(std::vector<double> times, std::vector<double> values)
    : times_(std::move(times)), values_(std::move(values)) {
  if (times_.size() != values_.size() + 1 || times_.front() != 0.0) {
    throw ConfigError("step trace needs times[0] = 0 and one more time than values");
  }
  cumulative_.assign(times_.size(), 0.0);
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!(times_[k + 1] > times_[k])) {
      throw ConfigError("step trace times must be strictly increasing");
    }
    if (!(values_[k] >= 0.0) || !std::isfinite(values_[k])) {
      throw ConfigError("step trace values must be finite and nonnegative");
    }
    cumulative_[k + 1] = cumulative_[k] + values_[k] * (times_[k + 1] - times_[k]);
  }
}

StepTrace StepTrace::constant(double value, double t_end) {
  return StepTrace({0.0, t_end}, {value});
}

void StepTrace::append(double t_end, double value) {
  if (!(t_end > times_.back())) {
    throw ConfigError("step trace times must be strictly increasing");
  }
  if (!(value >= 0.0) || !std::isfinite(value)) {
    throw ConfigError("step trace values must be finite and nonnegative");
  }
  cumulative_.push_back(cumulative_.back() + value * (t_end - times_.back()));
  times_.push_back(t_end);
  values_.push_back(value);
}

double StepTrace::integral(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= times_.back()) return cumulative_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - times_.begin()) - 1;
  return cumulative_[k] + values_[k] * (t - times_[k]);
}

}  // namespace hl
