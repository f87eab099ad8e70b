#include "hl/shear.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hl/errors.hpp"

namespace hl {

ShearProtocol::ShearProtocol(std::vector<ShearPiece> pieces)
    : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw ConfigError("shear protocol has no pieces");
  if (pieces_.front().t_start != 0.0) {
    throw ConfigError("first shear piece must start at t = 0");
  }
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    if (!std::isfinite(pieces_[k].b) || !std::isfinite(pieces_[k].t_start)) {
      throw ConfigError("shear piece values must be finite");
    }
    if (k > 0 && !(pieces_[k].t_start > pieces_[k - 1].t_start)) {
      std::ostringstream os;
      os << "shear piece starts must be strictly increasing (piece " << k
         << " starts at " << pieces_[k].t_start << ")";
      throw ConfigError(os.str());
    }
  }
  chi_at_start_.resize(pieces_.size(), 0.0);
  for (std::size_t k = 1; k < pieces_.size(); ++k) {
    chi_at_start_[k] =
        chi_at_start_[k - 1] +
        pieces_[k - 1].b * (pieces_[k].t_start - pieces_[k - 1].t_start);
  }
}

double ShearProtocol::b_at(double t) const {
  std::size_t k = 0;
  while (k + 1 < pieces_.size() && pieces_[k + 1].t_start <= t) ++k;
  return pieces_[k].b;
}

double ShearProtocol::max_abs_b() const {
  double m = 0.0;
  for (const auto& p : pieces_) m = std::max(m, std::abs(p.b));
  return m;
}

bool ShearProtocol::identically_zero() const {
  return std::all_of(pieces_.begin(), pieces_.end(),
                     [](const ShearPiece& p) { return p.b == 0.0; });
}

double ShearProtocol::chi(double t) const {
  std::size_t k = 0;
  while (k + 1 < pieces_.size() && pieces_[k + 1].t_start <= t) ++k;
  return chi_at_start_[k] + pieces_[k].b * (t - pieces_[k].t_start);
}

double ShearProtocol::mean_rate(double t0, double t1) const {
  std::size_t k = 0;
  while (k + 1 < pieces_.size() && pieces_[k + 1].t_start <= t0) ++k;
  if (piece_end(k) >= t1) return pieces_[k].b;
  return (chi(t1) - chi(t0)) / (t1 - t0);
}

double ShearProtocol::l2_norm_sq(double T) const {
  double s = 0.0;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const double a = pieces_[k].t_start;
    const double e = std::min(piece_end(k), T);
    if (e > a) s += pieces_[k].b * pieces_[k].b * (e - a);
  }
  return s;
}

std::pair<double, double> ShearProtocol::chi_range(double t0,
                                                   double t1) const {
  double lo = std::min(chi(t0), chi(t1));
  double hi = std::max(chi(t0), chi(t1));
  for (const auto& p : pieces_) {
    if (p.t_start > t0 && p.t_start < t1) {
      const double c = chi(p.t_start);
      lo = std::min(lo, c);
      hi = std::max(hi, c);
    }
  }
  return {lo, hi};
}

double ShearProtocol::first_entry_time(double lo, double hi) const {
  const double inf = std::numeric_limits<double>::infinity();
  if (!(hi >= lo)) return inf;
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const double t0 = pieces_[k].t_start;
    const double c0 = chi_at_start_[k];
    const double b = pieces_[k].b;
    if (c0 >= lo && c0 <= hi) return t0;
    double t = inf;
    if (c0 < lo && b > 0.0) t = t0 + (lo - c0) / b;
    if (c0 > hi && b < 0.0) t = t0 + (hi - c0) / b;
    if (t < piece_end(k)) return t;
  }
  return inf;
}

double ShearProtocol::first_exit_time(double lo, double hi) const {
  const double inf = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < pieces_.size(); ++k) {
    const double t0 = pieces_[k].t_start;
    const double c0 = chi_at_start_[k];
    const double b = pieces_[k].b;
    if (c0 < lo || c0 > hi) return t0;
    double t = inf;
    if (b > 0.0) t = t0 + (hi - c0) / b;
    if (b < 0.0) t = t0 + (lo - c0) / b;
    if (t < piece_end(k)) return t;
  }
  return inf;
}

double shear_integral(const ShearProtocol& protocol, double t) {
  if (!(t >= 0.0)) throw ConfigError("shear_integral requires t >= 0");
  return protocol.chi(t);
}

}  // namespace hl
