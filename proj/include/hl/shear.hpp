#pragma once

#include <limits>
#include <utility>
#include <vector>

namespace hl {

struct ShearPiece {
  double t_start = 0.0;
  double b = 0.0;
};

/// Piecewise-constant shear rate b(t); the last piece extends to infinity.
class ShearProtocol {
 public:
  ShearProtocol() : pieces_{{0.0, 0.0}}, chi_at_start_{0.0} {}
  /// Throws ConfigError unless starts are strictly increasing from 0.
  explicit ShearProtocol(std::vector<ShearPiece> pieces);
  static ShearProtocol constant(double b) { return ShearProtocol({{0.0, b}}); }

  const std::vector<ShearPiece>& pieces() const { return pieces_; }
  double b_at(double t) const;
  double max_abs_b() const;
  bool identically_zero() const;

  /// chi(t) = integral of b over [0, t]; exact.
  double chi(double t) const;

  /// Mean of b over [t0, t1]; exactly the piece value inside one piece.
  double mean_rate(double t0, double t1) const;

  /// Integral of b^2 over [0, T].
  double l2_norm_sq(double T) const;

  /// Range of chi over [t0, t1] (extremes sit at breakpoints or endpoints).
  std::pair<double, double> chi_range(double t0, double t1) const;

  /// inf{t >= 0 : chi(t) in [lo, hi]}, infinity if never.
  double first_entry_time(double lo, double hi) const;
  /// inf{t >= 0 : chi(t) outside [lo, hi]}, infinity if never.
  double first_exit_time(double lo, double hi) const;

 private:
  double piece_end(std::size_t k) const {
    return k + 1 < pieces_.size() ? pieces_[k + 1].t_start
                                  : std::numeric_limits<double>::infinity();
  }

  std::vector<ShearPiece> pieces_;
  std::vector<double> chi_at_start_;
};

/// Free-function spelling of ShearProtocol::chi; rejects t < 0.
double shear_integral(const ShearProtocol& protocol, double t);

}  // namespace hl
