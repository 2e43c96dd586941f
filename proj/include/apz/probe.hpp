#pragma once

/// @file probe.hpp
/// Direct evaluation of an exponential sum on the strip, minimum-modulus
/// scanning along vertical lines, and membership testing through the phase
/// torus: on the line Re s = sigma the values of f accumulate exactly at
///     F(sigma, theta) = sum_j a_j m_j(sigma) e^(i theta_j)
/// with theta ranging over the closure of {(lambda_j t) mod 2pi : t real},
/// which for rationally independent exponents is the subtorus parameterized
/// by the basis coordinates. A point sigma belongs to the projection set
/// exactly when that torus minimum vanishes.

#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "basis.hpp"
#include "core.hpp"

namespace apz::probe {

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace detail {

/// Shared summation core: sum of a_j e^(lambda_j sigma) e^(i phase(j)) with
/// Kahan compensation. Both public evaluators run this exact op sequence, so
/// eval_f(sigma + it) and eval_aux at theta_j = lambda_j * t agree bitwise.
template <typename PhaseFn>
inline std::complex<double> sum_with_phases(const ExponentialSum& f, double sigma,
                                            PhaseFn&& phase) {
  double re = 0.0, im = 0.0;
  double cre = 0.0, cim = 0.0;  // Kahan compensation
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double m = std::exp(f.terms[j].exponent * sigma);
    if (!std::isfinite(m))
      throw NumericError("eval: term modulus leaves double range at sigma = " +
                         std::to_string(sigma));
    const double th = phase(j);
    const std::complex<double> term =
        f.terms[j].coeff * std::complex<double>(m * std::cos(th), m * std::sin(th));
    double y = term.real() - cre;
    double t = re + y;
    cre = (t - re) - y;
    re = t;
    y = term.imag() - cim;
    t = im + y;
    cim = (t - im) - y;
    im = t;
  }
  return {re, im};
}

}  // namespace detail

/// f at the phase point (sigma, theta): sum of a_j e^(lambda_j sigma) e^(i theta_j).
/// The line evaluator eval_f routes through the same core with
/// theta_j = lambda_j * t, so the two paths agree bitwise at t-phases.
inline std::complex<double> eval_aux(const ExponentialSum& f, double sigma,
                                     const std::vector<double>& phases) {
  if (phases.size() != f.size())
    throw ValidationError("eval_aux: one phase per term required");
  return detail::sum_with_phases(f, sigma, [&](std::size_t j) { return phases[j]; });
}

inline std::complex<double> eval_f(const ExponentialSum& f, std::complex<double> s) {
  const double t = s.imag();
  return detail::sum_with_phases(f, s.real(),
                                 [&](std::size_t j) { return f.terms[j].exponent * t; });
}

/// Derivative sum_j a_j lambda_j e^(lambda_j s).
inline std::complex<double> eval_df(const ExponentialSum& f, std::complex<double> s) {
  std::complex<double> acc = 0.0;
  for (const Term& t : f.terms)
    acc += t.coeff * t.exponent * std::exp(t.exponent * s);
  return acc;
}

// ---------------------------------------------------------------------------
// Minimum-modulus scan along a vertical segment
// ---------------------------------------------------------------------------

struct ScanResult {
  double t = 0.0;
  double value = kInf;  // |f(sigma + i t)| at the refined minimum
  std::size_t samples = 0;
};

/// Scans |f(sigma + it)| over [t_lo, t_hi] with a step tied to the phase
/// speed (spread of the exponents), then refines the best sample by golden
/// section. A probe, not a certificate: it can only ever overestimate the
/// true line infimum.
inline ScanResult min_modulus_scan(const ExponentialSum& f, double sigma, double t_lo,
                                   double t_hi, const Tolerances& tol) {
  require_valid(tol);
  if (!(t_lo < t_hi)) throw ValidationError("min_modulus_scan: empty t range");
  double spread = 0.0;
  for (const Term& t : f.terms) spread = std::max(spread, std::abs(t.exponent));
  double step = tol.scan_step > 0.0 ? tol.scan_step
                                    : kPi / (16.0 * std::max(1.0, spread));
  const double span = t_hi - t_lo;
  std::size_t n = static_cast<std::size_t>(std::ceil(span / step)) + 1;
  if (n > 4'000'000) {
    n = 4'000'000;
    step = span / static_cast<double>(n - 1);
  }
  auto modulus = [&](double t) { return std::abs(eval_f(f, {sigma, t})); };

  ScanResult out;
  out.samples = n;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t_lo + static_cast<double>(k) * step;
    const double v = modulus(std::min(t, t_hi));
    if (v < out.value) {
      out.value = v;
      out.t = std::min(t, t_hi);
    }
  }
  // Golden-section refinement around the best sample.
  double a = std::max(t_lo, out.t - step);
  double b = std::min(t_hi, out.t + step);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = modulus(x1), f2 = modulus(x2);
  for (int it = 0; it < 90 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = modulus(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = modulus(x2);
    }
  }
  const double tm = f1 < f2 ? x1 : x2;
  const double vm = std::min(f1, f2);
  if (vm < out.value) {
    out.value = vm;
    out.t = tm;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Torus membership
// ---------------------------------------------------------------------------

struct PhaseAssignment {
  std::vector<double> theta;  // one phase per term, the zero-exponent term pinned at 0
  double residual = kInf;     // |F(sigma, theta)| in absolute units
};

struct TorusMembership {
  bool member = false;
  double min_modulus = kInf;    // best |F| found (absolute units)
  double relative_min = kInf;   // best |F| / sum_j m_j(sigma)
  PhaseAssignment best;
  int restarts = 0;
  std::vector<std::string> notes;
};

namespace detail {

/// Phase parameterization of the closure torus: theta_j = sum_k M_jk x_k with
/// x_k ranging over [0, 2pi D_k), D_k the lcm of the column's denominators.
/// Extended periods absorb non-integral (rational) coordinate rows.
struct TorusParam {
  std::vector<std::vector<double>> coef;  // coef[j][k]
  std::vector<double> period;             // 2pi D_k
};

inline TorusParam torus_param(const ExponentialSum& f) {
  const std::optional<basis::BasisRepresentation> rep = basis::representation(f);
  if (!rep)
    throw ValidationError(
        "torus membership needs a coordinate representation or declared independence");
  const std::size_t k = rep->matrix.empty() ? 0 : rep->matrix.front().size();
  TorusParam out;
  out.coef.assign(f.size(), std::vector<double>(k, 0.0));
  out.period.assign(k, 2.0 * kPi);
  for (std::size_t col = 0; col < k; ++col) {
    BigInt lcm_den = 1;
    for (std::size_t j = 0; j < f.size(); ++j) {
      const Rational& c = rep->matrix[j][col];
      out.coef[j][col] = to_double(c);
      lcm_den = lcm(lcm_den, BigInt(denominator(c)));
    }
    const double d = lcm_den.convert_to<double>();
    if (!(d >= 1.0) || d > 1e6)
      throw NumericError("torus membership: extended period overflows sane bounds");
    out.period[col] = 2.0 * kPi * d;
  }
  return out;
}

}  // namespace detail

/// Minimizes |F(sigma, theta)| over the closure torus by seeded multi-restart
/// coordinate descent. Coordinates touched by exactly one term are solved in
/// closed form (align that term against the rest); the others fall back to a
/// phase-grid sweep plus parabolic refinement. Membership threshold: relative
/// minimum at most 1e-8.
inline TorusMembership torus_membership(const ExponentialSum& f, double sigma,
                                        const Tolerances& tol) {
  require_valid(tol);
  if (f.terms.empty()) throw ValidationError("torus_membership: sum has no terms");
  const detail::TorusParam par = detail::torus_param(f);
  const std::size_t n = f.size();
  const std::size_t kdim = par.period.size();

  // Relative moduli keep the arithmetic in range whatever the strip.
  double peak = -kInf;
  for (std::size_t j = 0; j < n; ++j) peak = std::max(peak, f.log_modulus(j, sigma));
  std::vector<std::complex<double>> unit(n);  // a_j m_j / (|a_p| m_p), unit-peak scale
  double rel_total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double rel = std::exp(f.log_modulus(j, sigma) - peak);
    unit[j] = f.terms[j].coeff / std::abs(f.terms[j].coeff) * rel;
    rel_total += rel;
  }

  auto eval_at = [&](const std::vector<double>& x, std::vector<double>& theta) {
    double re = 0.0, im = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      double th = 0.0;
      for (std::size_t c = 0; c < kdim; ++c) th += par.coef[j][c] * x[c];
      theta[j] = th;
      const double ct = std::cos(th), st = std::sin(th);
      re += unit[j].real() * ct - unit[j].imag() * st;
      im += unit[j].real() * st + unit[j].imag() * ct;
    }
    return std::hypot(re, im);
  };

  // For a coordinate touched by exactly one term, the best phase is exact.
  std::vector<int> sole_user(kdim, -1);
  for (std::size_t c = 0; c < kdim; ++c) {
    int user = -1, count = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (par.coef[j][c] != 0.0) {
        user = static_cast<int>(j);
        ++count;
      }
    if (count == 1) sole_user[c] = user;
  }

  TorusMembership out;
  std::vector<double> theta(n), best_theta(n);
  const int restarts = kdim == 0 ? 1 : 32;
  for (int r = 0; r < restarts; ++r) {
    ++out.restarts;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(r + 1) + 12345);
    std::vector<double> x(kdim);
    for (std::size_t c = 0; c < kdim; ++c) {
      std::uniform_real_distribution<double> dist(0.0, par.period[c]);
      x[c] = r == 0 ? 0.0 : dist(rng);
    }
    double cur = eval_at(x, theta);
    for (int sweep = 0; sweep < 200; ++sweep) {
      bool improved = false;
      for (std::size_t c = 0; c < kdim; ++c) {
        double cand_x = x[c];
        double cand_v = cur;
        if (sole_user[c] >= 0) {
          // Rest of the sum with term j's contribution removed, then align.
          const std::size_t j = static_cast<std::size_t>(sole_user[c]);
          double th_j = 0.0;
          for (std::size_t cc = 0; cc < kdim; ++cc) th_j += par.coef[j][cc] * x[cc];
          const std::complex<double> tj =
              unit[j] * std::complex<double>(std::cos(th_j), std::sin(th_j));
          double re = 0.0, im = 0.0;
          for (std::size_t jj = 0; jj < n; ++jj) {
            double th = 0.0;
            for (std::size_t cc = 0; cc < kdim; ++cc) th += par.coef[jj][cc] * x[cc];
            re += unit[jj].real() * std::cos(th) - unit[jj].imag() * std::sin(th);
            im += unit[jj].real() * std::sin(th) + unit[jj].imag() * std::cos(th);
          }
          const std::complex<double> rest(re - tj.real(), im - tj.imag());
          const double want = std::arg(-rest);  // target phase of term j's full value
          const double base = std::arg(unit[j]);
          const double partial = th_j - par.coef[j][c] * x[c];
          double xk = (want - base - partial) / par.coef[j][c];
          xk = std::fmod(xk, par.period[c]);
          if (xk < 0.0) xk += par.period[c];
          std::vector<double> xt = x;
          xt[c] = xk;
          const double v = eval_at(xt, theta);
          if (v < cand_v) {
            cand_v = v;
            cand_x = xk;
          }
        } else {
          const int grid = std::max(8, tol.phase_grid);
          std::vector<double> xt = x;
          double g_best_x = x[c], g_best_v = cur;
          for (int g = 0; g < grid; ++g) {
            xt[c] = par.period[c] * static_cast<double>(g) / static_cast<double>(grid);
            const double v = eval_at(xt, theta);
            if (v < g_best_v) {
              g_best_v = v;
              g_best_x = xt[c];
            }
          }
          // Parabolic sharpening of the grid winner.
          double h = par.period[c] / static_cast<double>(grid);
          double xc = g_best_x;
          for (int round = 0; round < 6; ++round) {
            xt[c] = xc - h;
            const double vl = eval_at(xt, theta);
            xt[c] = xc + h;
            const double vr = eval_at(xt, theta);
            const double denom = vl - 2.0 * g_best_v + vr;
            double shift = denom > 0.0 ? 0.5 * h * (vl - vr) / denom : 0.0;
            shift = std::clamp(shift, -h, h);
            xt[c] = xc + shift;
            const double vs = eval_at(xt, theta);
            if (vs < g_best_v) {
              g_best_v = vs;
              xc = xt[c];
            }
            h *= 0.25;
          }
          if (g_best_v < cand_v) {
            cand_v = g_best_v;
            cand_x = xc;
          }
        }
        if (cand_v < cur - 1e-18) {
          cur = cand_v;
          x[c] = cand_x;
          improved = true;
        }
      }
      if (!improved && sweep > 1) break;
    }
    if (cur < out.relative_min) {
      out.relative_min = cur;
      eval_at(x, best_theta);
      out.best.theta = best_theta;
    }
  }
  for (double& th : out.best.theta) {
    th = std::fmod(th, 2.0 * kPi);
    if (th < 0.0) th += 2.0 * kPi;
  }
  out.min_modulus = out.relative_min * std::exp(peak);
  out.best.residual = out.min_modulus;
  out.relative_min /= rel_total;
  out.member = out.relative_min <= 1e-8;
  return out;
}

}  // namespace apz::probe
