#include "hl/analytic.hpp"

#include <algorithm>
#include <array>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <sstream>

#include "hl/errors.hpp"

namespace hl {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();
constexpr double kSqrtPi = boost::math::constants::root_pi<double>();
constexpr double kReach = 12.0;  // kernel support cut, in units of eta

// Correction to the ramp x_+ in the second antiderivative of phi_eta.
double ramp_correction(double x, double eta) {
  const double ax = std::abs(x);
  return eta * eta * gaussian_kernel(eta, x) - ax * normal_cdf(-ax / eta);
}

// Weight of source cell j in target cell i for offset d = c_i - c_j - shift.
double cell_weight(double d, double h, double eta) {
  const double hat = std::max(0.0, 1.0 - std::abs(d) / h);
  if (eta == 0.0) return hat;
  const double corr = ramp_correction(d + h, eta) - 2.0 * ramp_correction(d, eta) +
                      ramp_correction(d - h, eta);
  return std::max(0.0, hat + corr / h);
}

}  // namespace

double gaussian_kernel(double eta, double x) {
  if (!(eta > 0.0)) throw ConfigError("gaussian_kernel requires eta > 0");
  const double u = x / eta;
  return std::exp(-0.5 * u * u) / (eta * std::sqrt(2.0 * kPi));
}

double erfc_paper(double z) { return 0.5 * kSqrtPi * std::erfc(z); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

DensityField smear(const DensityField& field, double eta, double shift) {
  if (!(eta >= 0.0) || !std::isfinite(eta) || !std::isfinite(shift)) {
    throw ConfigError("smear requires a finite eta >= 0 and finite shift");
  }
  const StressGrid& g = field.grid();
  const int n = g.n_cells();
  const double h = g.cell_width();
  // Offsets m = i - j with a nonzero weight.
  const double reach = h + kReach * eta;
  const int m_lo = static_cast<int>(std::floor((shift - reach) / h)) - 1;
  const int m_hi = static_cast<int>(std::ceil((shift + reach) / h)) + 1;
  std::vector<double> w(m_hi - m_lo + 1);
  for (int m = m_lo; m <= m_hi; ++m) w[m - m_lo] = cell_weight(m * h - shift, h, eta);

  std::vector<double> out(n, 0.0);
  for (int j = 0; j < n; ++j) {
    const double pj = field[j];
    if (pj == 0.0) continue;
    const int i0 = std::max(0, j + m_lo);
    const int i1 = std::min(n - 1, j + m_hi);
    for (int i = i0; i <= i1; ++i) out[i] += pj * w[i - j - m_lo];
  }
  return DensityField(g, std::move(out));
}

namespace {

// Adds weight times the cell averages of a normal(x0, eta) law to out,
// touching only cells within reach of x0.
void add_point_source(const StressGrid& grid, double x0, double eta, double weight,
                      std::vector<double>& out) {
  const int n = grid.n_cells();
  const int k = grid.cells_per_unit();
  const double h = grid.cell_width();
  const double L = grid.half_width();
  if (eta == 0.0) {
    const double u = (x0 + L) * k;
    if (u < 0.0 || u > n) return;
    const double fl = std::floor(u);
    const int i = static_cast<int>(fl);
    if (u == fl) {
      if (i - 1 >= 0) out[i - 1] += weight * 0.5 / h;
      if (i < n) out[i] += weight * 0.5 / h;
    } else {
      out[i] += weight / h;
    }
    return;
  }
  const double reach = kReach * eta + h;
  const int i0 = std::max(0, static_cast<int>(std::floor((x0 - reach + L) * k)));
  const int i1 = std::min(n - 1, static_cast<int>(std::ceil((x0 + reach + L) * k)));
  if (i0 > i1) return;
  // Tail probability beyond each edge on its own side of x0. Cell masses
  // difference tails away from the mean, which keeps far cells accurate.
  auto tail = [&](int e) {
    const double z = (grid.edge(e) - x0) / eta;
    return z <= 0.0 ? normal_cdf(z) : normal_cdf(-z);
  };
  double zl = grid.edge(i0) - x0;
  double cl = tail(i0);
  for (int i = i0; i <= i1; ++i) {
    const double zr = grid.edge(i + 1) - x0;
    const double cr = tail(i + 1);
    double m;
    if (zl >= 0.0) {
      m = cl - cr;
    } else if (zr <= 0.0) {
      m = cr - cl;
    } else {
      m = 1.0 - cl - cr;
    }
    out[i] += weight * m / h;
    zl = zr;
    cl = cr;
  }
}

}  // namespace

std::vector<double> point_source(const StressGrid& grid, double x0,
                                 double eta) {
  std::vector<double> v(grid.n_cells(), 0.0);
  add_point_source(grid, x0, eta, 1.0, v);
  return v;
}

EnvelopePair envelopes(const DensityField& p0, const StepTrace& a_history,
                       const StepTrace& dq_history,
                       const ShearProtocol& protocol, double t, double alpha) {
  if (!(t >= 0.0) || t > a_history.end_time() * (1 + 1e-12) ||
      t > dq_history.end_time() * (1 + 1e-12)) {
    std::ostringstream os;
    os << "envelope time " << t << " outside the coefficient history [0, "
       << std::min(a_history.end_time(), dq_history.end_time()) << "]";
    throw ConfigError(os.str());
  }
  const StressGrid& g = p0.grid();
  const double a_t = a_history.integral(t);
  const double chi_t = protocol.chi(t);
  DensityField heat = smear(p0, std::sqrt(2.0 * a_t), chi_t);

  std::vector<double> lower = heat.values();
  const double decay = std::exp(-t);
  for (double& v : lower) v *= decay;

  std::vector<double> upper = heat.values();
  auto add_source = [&](double s, double weight) {
    const double rem = std::max(0.0, a_t - a_history.integral(s));
    add_point_source(g, chi_t - protocol.chi(s), std::sqrt(2.0 * rem), weight, upper);
  };

  using boost::math::quadrature::gauss;
  for (int k = 0; k < dq_history.intervals(); ++k) {
    const double sa = dq_history.start(k);
    const double sb = std::min(dq_history.end(k), t);
    if (!(sb > sa)) break;
    const double dq = dq_history.value(k);
    if (dq == 0.0) continue;
    const double scale = dq / alpha;
    const double rem_b = std::max(0.0, a_t - a_history.integral(sb));
    const double growth = a_history.integral(sa, sb);
    if (rem_b > 10.0 * growth) {
      // Kernel width nearly constant over the interval.
      const auto& x = gauss<double, 3>::abscissa();
      const auto& w = gauss<double, 3>::weights();
      const double mid = 0.5 * (sa + sb);
      const double half = 0.5 * (sb - sa);
      add_source(mid, scale * half * w[0]);
      for (std::size_t q = 1; q < x.size(); ++q) {
        add_source(mid - half * x[q], scale * half * w[q]);
        add_source(mid + half * x[q], scale * half * w[q]);
      }
    } else {
      // s = sb - v^2 resolves the width collapsing like sqrt(sb - s).
      const auto& x = gauss<double, 8>::abscissa();
      const auto& w = gauss<double, 8>::weights();
      const double vmax = std::sqrt(sb - sa);
      const double half = 0.5 * vmax;
      for (std::size_t q = 0; q < x.size(); ++q) {
        for (double sgn : {-1.0, 1.0}) {
          const double v = half + sgn * half * x[q];
          add_source(sb - v * v, scale * half * w[q] * 2.0 * v);
        }
      }
    }
  }
  return EnvelopePair{DensityField(g, std::move(lower)),
                      DensityField(g, std::move(upper)), t};
}

DensityField heat_reconstruct_width(const DensityField& p0, double x_integral,
                                    double gamma, double t) {
  if (!(x_integral >= 0.0)) throw ConfigError("heat_reconstruct needs a nonnegative D integral");
  const double decay = std::exp(-gamma * t);
  DensityField w = x_integral == 0.0 ? p0 : smear(p0, std::sqrt(2.0 * x_integral), 0.0);
  std::vector<double> v = w.values();
  for (double& x : v) x *= decay;
  return DensityField(p0.grid(), std::move(v));
}

DensityField heat_reconstruct(const DensityField& p0, const StepTrace& d_trace,
                              double gamma, double t) {
  if (!(t >= 0.0) || t > d_trace.end_time() * (1 + 1e-12)) {
    throw ConfigError("heat_reconstruct time outside the fluidity trace");
  }
  return heat_reconstruct_width(p0, d_trace.integral(t), gamma, t);
}

double min_outside_mass(const DensityField& p0, const ShearProtocol& protocol,
                        double T) {
  const auto [c_lo, c_hi] = protocol.chi_range(0.0, T);
  double best = std::min(mass_outside_shifted(p0, c_lo), mass_outside_shifted(p0, c_hi));
  // Kinks of the piecewise-linear map c -> outside mass.
  const StressGrid& g = p0.grid();
  for (int i = 0; i <= g.n_cells(); ++i) {
    for (double c : {-1.0 - g.edge(i), 1.0 - g.edge(i)}) {
      if (c > c_lo && c < c_hi) best = std::min(best, mass_outside_shifted(p0, c));
    }
  }
  return best;
}

BoundsReport apriori_bounds(const DensityField& p0,
                            const ShearProtocol& protocol, double alpha,
                            double T) {
  if (!(T > 0.0)) throw ConfigError("apriori_bounds requires T > 0");
  if (!(alpha > 0.0)) throw ConfigError("apriori_bounds requires alpha > 0");
  BoundsReport r;
  const Observables o = observables(p0, alpha);
  const double pmax = p0.max_value();
  const double sqT = std::sqrt(T);
  const double k = 2.0 * std::sqrt(1.0 + alpha) / kSqrtPi;

  r.linf_bound = pmax + std::sqrt(alpha / kPi) * sqT;
  r.c1 = o.abs_moment + sqT * (k + std::sqrt(protocol.l2_norm_sq(T))) +
         (2.0 / 3.0) * T * sqT * (1.0 + k);
  r.c2 = pmax + std::sqrt(alpha) * sqT / kSqrtPi;
  r.c3 = pmax * (0.5 + T) + std::sqrt(alpha) / kSqrtPi * T * sqT;

  if (o.fluidity == 0.0) {
    r.degenerate = true;
    r.nu1 = 0.0;
    r.nu = 0.0;
    return r;
  }

  double s_lo = 0.0;
  double s_hi = 0.0;
  p0.support(s_lo, s_hi);
  r.t_star_input = protocol.first_entry_time(-1.0 - s_lo, 1.0 - s_hi);
  const double t_star = r.t_star_input;

  auto nu1_at = [&](double tt) {
    return 0.5 * alpha * std::exp(-tt) * min_outside_mass(p0, protocol, tt);
  };

  if (std::isinf(t_star) || T < 0.5 * t_star) {
    r.nu1 = nu1_at(T);
    r.nu = r.nu1;
    return r;
  }

  r.nu1 = nu1_at(0.5 * t_star);
  const double width = std::sqrt(2.0 * t_star * r.nu1);
  // The bracket is even in chi(t) - chi(t*) and grows with its modulus.
  const auto [lo, hi] = protocol.chi_range(0.5 * t_star, T);
  const double chi_s = protocol.chi(t_star);
  const double c = chi_s < lo ? lo - chi_s : (chi_s > hi ? chi_s - hi : 0.0);
  const double bracket = width > 0.0
                             ? erfc_paper((2.0 + c) / width) + erfc_paper((2.0 - c) / width)
                             : 0.0;
  r.nu2 = alpha / kSqrtPi * std::exp(-T) * bracket;
  r.nu = std::min(r.nu1, r.nu2);
  return r;
}

}  // namespace hl
