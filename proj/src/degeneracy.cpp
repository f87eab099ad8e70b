#include "hl/degeneracy.hpp"

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "hl/analytic.hpp"
#include "hl/errors.hpp"

namespace hl {

namespace {

constexpr double kSqrtPi = boost::math::constants::root_pi<double>();

// Antiderivative of erfc_paper, u erfc_paper(u) - exp(-u^2) / 2.
//
// The two terms cancel to relative order 1/u^2, so for u >= 8 the
// asymptotic series of the bracket in -(exp(-u^2)/2) (1 - sqrt(pi) u erfcx(u))
// is summed instead; its terms shrink until k ~ u^2.
double erfc_antiderivative(double u) {
  if (u < 8.0) return u * erfc_paper(u) - 0.5 * std::exp(-u * u);
  const double w = 1.0 / (2.0 * u * u);
  double term = w;
  double sum = w;
  for (int k = 2; k < 60; ++k) {
    term *= -(2.0 * k - 1.0) * w;
    sum += term;
    if (std::abs(term) < 1e-18 * sum) break;
  }
  return -0.5 * std::exp(-u * u) * sum;
}

void require_degenerate(const DensityField& p0, double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
  if (fluidity(p0.values(), p0.grid(), alpha) > 0.0) {
    throw ConfigError(
        "degeneracy analysis needs D(p0) = 0 (support inside [-1, 1])");
  }
}

double f_unchecked(const DensityField& p0, double x, double alpha) {
  if (x == 0.0) return 0.0;
  const StressGrid& g = p0.grid();
  const double r = 2.0 * std::sqrt(x);
  double s = 0.0;
  const int i0 = g.inner_begin();
  const int i1 = g.inner_end();
  double g1_left = erfc_antiderivative((1.0 + g.edge(i0)) / r);
  double g2_left = erfc_antiderivative((1.0 - g.edge(i0)) / r);
  for (int j = i0; j < i1; ++j) {
    const double e = g.edge(j + 1);
    const double g1_right = erfc_antiderivative((1.0 + e) / r);
    const double g2_right = erfc_antiderivative((1.0 - e) / r);
    if (p0[j] > 0.0) {
      s += p0[j] * ((g1_right - g1_left) + (g2_left - g2_right));
    }
    g1_left = g1_right;
    g2_left = g2_right;
  }
  return alpha / kSqrtPi * r * s;
}

// Integral of 1/F over [a, b] via x = u^2, which tames the sqrt head.
//
// The u range is mapped onto [0, 1] first: the adaptive rule compares an
// unscaled local error against a tolerance scaled by the interval length,
// so very short intervals would otherwise always bisect to the depth limit.
double inverse_f_integral(const DensityField& p0, double alpha, double a,
                          double b) {
  using boost::math::quadrature::gauss_kronrod;
  if (!(b > a)) return 0.0;
  const double ua = std::sqrt(a);
  const double w = std::sqrt(b) - ua;
  auto f = [&](double s) {
    const double u = ua + w * s;
    return 2.0 * u / f_unchecked(p0, u * u, alpha);
  };
  return w * gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 12, 1e-11);
}

// G(z) = integral_0^z dx/F with the power-law head below x_head exact.
struct Cumulative {
  const DensityField& p0;
  double alpha;
  double x_head = 0.0;
  double beta = 0.0;
  double g_head = 0.0;

  Cumulative(const DensityField& field, double a) : p0(field), alpha(a) {
    const double h = p0.grid().cell_width();
    x_head = std::min(1e-10, 1e-4 * h * h);
    const double f1 = f_unchecked(p0, x_head, alpha);
    const double f0 = f_unchecked(p0, 0.25 * x_head, alpha);
    if (!(f0 > 0.0) || !(f1 > 0.0)) {
      beta = std::numeric_limits<double>::infinity();
      g_head = std::numeric_limits<double>::infinity();
      return;
    }
    beta = std::log(f1 / f0) / std::log(4.0);
    g_head = beta < 1.0 ? x_head / ((1.0 - beta) * f1)
                        : std::numeric_limits<double>::infinity();
  }

  bool finite() const { return std::isfinite(g_head); }

  // Inverse of the head: z with G(z) = target <= g_head.
  double head_inverse(double target) const {
    return x_head * std::pow(target / g_head, 1.0 / (1.0 - beta));
  }
};

}  // namespace

double f_eval(const DensityField& p0, double x, double alpha) {
  if (!(x >= 0.0)) throw ConfigError("f_eval requires x >= 0");
  require_degenerate(p0, alpha);
  return f_unchecked(p0, x, alpha);
}

double f_uniform_closed(double x, double alpha) {
  if (!(x > 0.0)) throw ConfigError("f_uniform_closed requires x > 0");
  const double sx = std::sqrt(x);
  return 2.0 * alpha / kSqrtPi *
         (erfc_paper(1.0 / sx) - 0.5 * sx * std::exp(-1.0 / x) + 0.5 * sx);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Unique:
      return "Unique";
    case Verdict::NonUnique:
      return "NonUnique";
    case Verdict::Inconclusive:
      return "Inconclusive";
  }
  return "Inconclusive";
}

double critical_time(const DensityField& p0, const ShearProtocol& protocol) {
  if (fluidity(p0.values(), p0.grid(), 1.0) > 0.0) {
    throw ConfigError("critical_time needs D(p0) = 0");
  }
  double lo = 0.0;
  double hi = 0.0;
  if (!p0.support(lo, hi)) return std::numeric_limits<double>::infinity();
  return protocol.first_exit_time(-1.0 - lo, 1.0 - hi);
}

DegeneracyReport classify(const DensityField& p0, double alpha,
                          const ShearProtocol& protocol) {
  require_degenerate(p0, alpha);
  DegeneracyReport r;
  r.t_c = critical_time(p0, protocol);
  if (p0.mass() == 0.0) {
    r.verdict = Verdict::Unique;
    r.reason = "zero field: F vanishes identically";
    return r;
  }

  constexpr int kPoints = 61;
  std::vector<double> lx(kPoints);
  std::vector<double> lf(kPoints);
  bool underflow = false;
  for (int i = 0; i < kPoints; ++i) {
    lx[i] = std::log(10.0) * (-8.0 + 6.0 * i / (kPoints - 1));
    const double f = f_unchecked(p0, std::exp(lx[i]), alpha);
    if (!(f > 0.0)) {
      underflow = true;
    } else {
      lf[i] = std::log(f);
    }
  }
  if (underflow) {
    r.verdict = Verdict::Unique;
    r.super_power_decay = true;
    r.small_x_exponent = std::numeric_limits<double>::infinity();
    r.reason = "F underflows near 0: decay faster than any power";
    return r;
  }

  double mx = 0.0;
  double my = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    mx += lx[i];
    my += lf[i];
  }
  mx /= kPoints;
  my /= kPoints;
  double sxx = 0.0;
  double sxy = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (lf[i] - my);
  }
  const double beta = sxy / sxx;
  double ss = 0.0;
  for (int i = 0; i < kPoints; ++i) {
    const double e = lf[i] - (my + beta * (lx[i] - mx));
    ss += e * e;
  }
  r.small_x_exponent = beta;
  r.fit_residual = std::sqrt(ss / kPoints);

  const double slope_small = (lf[1] - lf[0]) / (lx[1] - lx[0]);
  const double slope_large =
      (lf[kPoints - 1] - lf[kPoints - 2]) / (lx[kPoints - 1] - lx[kPoints - 2]);
  if (slope_small > 2.0 && slope_small > slope_large + 1.0) {
    r.verdict = Verdict::Unique;
    r.super_power_decay = true;
    r.reason = "local exponent grows toward x = 0: decay faster than any power";
    return r;
  }

  constexpr double kCleanFit = 1e-2;
  constexpr double kMargin = 0.05;
  if (r.fit_residual < kCleanFit && beta < 1.0 - kMargin) {
    Cumulative g(p0, alpha);
    if (g.finite()) {
      r.criterion_integral = g.g_head + inverse_f_integral(p0, alpha, g.x_head, 1.0);
    }
    r.verdict = Verdict::NonUnique;
    r.reason = "clean power fit with exponent below 1";
    return r;
  }
  if (r.fit_residual < kCleanFit && beta > 1.0 + kMargin) {
    r.verdict = Verdict::Unique;
    r.reason = "clean power fit with exponent above 1";
    return r;
  }

  // Decade increments of the cutoff integral over [10^-(j+1), 10^-j].
  std::vector<double> inc;
  double total = 0.0;
  for (int j = 0; j < 12; ++j) {
    const double d = inverse_f_integral(p0, alpha, std::pow(10.0, -(j + 1)),
                                        std::pow(10.0, -j));
    inc.push_back(d);
    total += d;
  }
  bool converging = true;
  bool diverging = true;
  double ratio = 0.0;
  for (std::size_t j = inc.size() - 3; j < inc.size(); ++j) {
    ratio = inc[j] / inc[j - 1];
    converging = converging && ratio < 0.8;
    diverging = diverging && ratio > 0.95;
  }
  if (converging) {
    r.verdict = Verdict::NonUnique;
    r.criterion_integral = total + inc.back() * ratio / (1.0 - ratio);
    r.reason = "cutoff integrals converge geometrically";
  } else if (diverging) {
    r.verdict = Verdict::Unique;
    r.reason = "cutoff integrals grow without bound";
  } else {
    r.verdict = Verdict::Inconclusive;
    r.reason = "exponent near 1 and cutoff increments neither shrink nor persist";
  }
  return r;
}

double EscapeProfile::z_at(double t) const {
  if (!(t >= 0.0) || t > horizon() * (1 + 1e-12)) {
    throw ConfigError("escape profile queried outside [0, horizon]");
  }
  const double dt = times_[1] - times_[0];
  const int n = static_cast<int>(times_.size()) - 1;
  const int k = std::min(n - 1, static_cast<int>(std::floor(t / dt)));
  const double s = (t - times_[k]) / dt;
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * z_[k] + h10 * dt * rate_[k] + h01 * z_[k + 1] + h11 * dt * rate_[k + 1];
}

double EscapeProfile::ode_residual(const DensityField& p0) const {
  const int n = static_cast<int>(times_.size()) - 1;
  if (n < 4) throw ConfigError("ode_residual needs at least 4 intervals");
  const double dt = times_[1] - times_[0];
  double worst = 0.0;
  for (int k = 0; k <= n; ++k) {
    double d;
    if (k >= 2 && k <= n - 2) {
      d = (-z_[k + 2] + 8 * z_[k + 1] - 8 * z_[k - 1] + z_[k - 2]) / (12 * dt);
    } else if (k < 2) {
      d = (-25 * z_[k] + 48 * z_[k + 1] - 36 * z_[k + 2] + 16 * z_[k + 3] -
           3 * z_[k + 4]) / (12 * dt);
    } else {
      d = (25 * z_[k] - 48 * z_[k - 1] + 36 * z_[k - 2] - 16 * z_[k - 3] +
           3 * z_[k - 4]) / (12 * dt);
    }
    const double rhs = std::exp(-gamma_ * times_[k]) * f_unchecked(p0, z_[k], alpha_);
    worst = std::max(worst, std::abs(d - rhs));
  }
  return worst;
}

EscapeProfile escape_profile(const DensityField& p0, double alpha, double gamma,
                             double T, int n_knots) {
  if (!(gamma >= 0.0)) throw ConfigError("escape_profile requires gamma >= 0");
  if (!(T > 0.0)) throw ConfigError("escape_profile requires T > 0");
  if (n_knots < 4) throw ConfigError("escape_profile needs at least 4 knots");
  const DegeneracyReport rep = classify(p0, alpha);
  if (rep.verdict != Verdict::NonUnique) {
    throw ConfigError(std::string("escape profile exists only for non-unique data; verdict ") +
                      to_string(rep.verdict));
  }
  Cumulative g(p0, alpha);
  if (!g.finite()) throw NumericalError("head of the criterion integral diverges");

  EscapeProfile ep;
  ep.gamma_ = gamma;
  ep.alpha_ = alpha;
  ep.times_.resize(n_knots + 1);
  ep.z_.assign(n_knots + 1, 0.0);
  ep.rate_.assign(n_knots + 1, 0.0);

  auto target = [&](double t) { return gamma == 0.0 ? t : -std::expm1(-gamma * t) / gamma; };

  double z_prev = 0.0;
  double g_prev = 0.0;
  for (int k = 1; k <= n_knots; ++k) {
    const double t = T * k / n_knots;
    ep.times_[k] = t;
    const double rk = target(t);
    double z;
    if (rk <= g.g_head) {
      z = g.head_inverse(rk);
    } else {
      if (z_prev < g.x_head) {
        z_prev = g.x_head;
        g_prev = g.g_head;
      }
      auto residual = [&](double zz) {
        return g_prev + inverse_f_integral(p0, alpha, z_prev, zz) - rk;
      };
      const double f_prev = f_unchecked(p0, z_prev, alpha);
      double step = std::max((rk - g_prev) * f_prev, 1e-3 * z_prev);
      double hi = z_prev + step;
      while (residual(hi) < 0.0) {
        step *= 2.0;
        hi = z_prev + step;
        if (!std::isfinite(hi)) throw NumericalError("escape profile bracket failed");
      }
      auto fn = [&](double zz) {
        return std::make_pair(residual(zz), 1.0 / f_unchecked(p0, zz, alpha));
      };
      std::uintmax_t iters = 100;
      const double guess = std::min(hi, z_prev + (rk - g_prev) * f_prev);
      z = boost::math::tools::newton_raphson_iterate(fn, guess, z_prev, hi, 48, iters);
      if (iters >= 100) throw NumericalError("escape profile inversion did not converge");
      g_prev = rk;
      z_prev = z;
    }
    ep.z_[k] = z;
    ep.rate_[k] = std::exp(-gamma * t) * f_unchecked(p0, z, alpha);
  }
  return ep;
}

DensityField branch_solution(const DensityField& p0,
                             const EscapeProfile& profile, double t0, double t) {
  if (!(t0 >= 0.0)) throw ConfigError("branch_solution requires t0 >= 0");
  if (t <= t0) return p0;
  return heat_reconstruct_width(p0, profile.z_at(t - t0), profile.gamma(), t - t0);
}

DensityField branch_solution(const DensityField& p0, double alpha, double gamma,
                             double t0, double t) {
  if (t <= t0) return p0;
  const EscapeProfile ep = escape_profile(p0, alpha, gamma, t - t0);
  return branch_solution(p0, ep, t0, t);
}

}  // namespace hl
