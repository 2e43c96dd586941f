#pragma once

/// @file rset.hpp
/// The real projection set R of the zeros of a validated exponential sum,
/// restricted to a vertical strip, computed from the per-term dominance
/// inequalities
///     m_j(sigma) <= sum_{i != j} m_i(sigma),   m_i(sigma) = |a_i| e^(lambda_i sigma).
/// A point fails to belong exactly when some term strictly dominates the rest,
/// so R within the strip is the complement of the union over j of
/// { B_j < 0 },  B_j(sigma) = sum_{i != j} m_i / m_j - 1.
///
/// Everything here is evaluated in log space: with ell_i = log m_i the
/// monotone-equivalent function L_j = logsumexp_{i != j}(ell_i) - ell_j has the
/// same sign, the same roots and the same convexity as B_j, but stays finite
/// across exponent ranges where m-space arithmetic under/overflows. B values
/// are reported via expm1(L).
///
/// Certification model: a sign decision counts as certified when the evaluated
/// band (tail widening plus a rounding bound) clears zero by cert_margin.
/// A tail bound only ever adds mass to the numerator sum, so the truncated
/// value is a lower envelope and log(sum + epsilon) an upper envelope.

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"

namespace apz::rset {

// ---------------------------------------------------------------------------
// Reporting-level moduli (m space; throws when doubles cannot hold them)
// ---------------------------------------------------------------------------

/// Term moduli at a point. Every m_j must stay inside double range; leaving it
/// is reported, never saturated.
struct TermModuli {
  double sigma = 0.0;
  std::vector<double> m;
  double total = 0.0;
  double tail_epsilon = 0.0;
};

inline TermModuli term_moduli(const ExponentialSum& f, double sigma) {
  if (f.terms.empty()) throw ValidationError("term_moduli: sum has no terms");
  TermModuli out;
  out.sigma = sigma;
  out.tail_epsilon = f.tail_epsilon();
  out.m.reserve(f.size());
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double m = std::exp(f.log_modulus(j, sigma));
    if (std::isinf(m))
      throw NumericError("term modulus overflow at sigma = " + std::to_string(sigma));
    if (m == 0.0)
      throw NumericError("term modulus underflow to 0 at sigma = " + std::to_string(sigma));
    out.m.push_back(m);
    out.total += m;
  }
  if (std::isinf(out.total))
    throw NumericError("total modulus overflow at sigma = " + std::to_string(sigma));
  return out;
}

// ---------------------------------------------------------------------------
// Log-space evaluation internals
// ---------------------------------------------------------------------------

namespace detail {

/// Absolute rounding bound for one evaluation of L_j at sigma. Dominated by
/// the |lambda * sigma| products feeding the log-moduli.
inline double eval_error(const ExponentialSum& f, double sigma) {
  double scale = 0.0;
  for (const Term& t : f.terms) {
    const double s = std::abs(t.exponent * sigma) + std::abs(std::log(std::abs(t.coeff)));
    if (s > scale) scale = s;
  }
  const double eps = std::numeric_limits<double>::epsilon();
  return eps * (8.0 * static_cast<double>(f.size()) + 4.0 * scale + 8.0);
}

/// Value and derivative of one envelope of L_j at sigma.
/// widened == false: L = log(sum_{i != j} m_i) - ell_j        (lower envelope)
/// widened == true : L = log(sum_{i != j} m_i + eps) - ell_j  (upper envelope)
/// j < 0 evaluates log of the full sum (plus eps when widened) — used for the
/// total-mass checks. Values may be -inf (empty numerator), never NaN.
struct EnvelopePoint {
  double value = 0.0;
  double deriv = 0.0;
};

inline EnvelopePoint eval_envelope(const ExponentialSum& f, int j, double sigma, bool widened) {
  const double log_eps =
      (widened && f.tail) ? std::log(f.tail->epsilon) : -kInf;
  double peak = log_eps;
  const std::size_t n = f.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) == j) continue;
    peak = std::max(peak, f.log_modulus(i, sigma));
  }
  EnvelopePoint out;
  if (peak == -kInf) {  // nothing in the numerator
    out.value = -kInf;
    out.deriv = 0.0;
    if (j >= 0) out.deriv -= f.terms[j].exponent;
    return out;
  }
  double wsum = 0.0;
  double lambda_wsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<int>(i) == j) continue;
    const double w = std::exp(f.log_modulus(i, sigma) - peak);
    wsum += w;
    lambda_wsum += f.terms[i].exponent * w;
  }
  if (log_eps != -kInf) wsum += std::exp(log_eps - peak);  // tail mass, exponent 0
  out.value = peak + std::log(wsum);
  out.deriv = lambda_wsum / wsum;
  if (j >= 0) {
    out.value -= f.log_modulus(j, sigma);
    out.deriv -= f.terms[j].exponent;
  }
  return out;
}

/// Slope limits of the envelope as sigma -> -inf / +inf. The tail mass is
/// sigma-independent, so when widened it contributes slope 0 to the numerator.
struct SlopeLimits {
  double lo = 0.0;  // limit of L' at -inf
  double hi = 0.0;  // limit of L' at +inf
};

inline SlopeLimits slope_limits(const ExponentialSum& f, int j, bool widened) {
  double lmin = kInf, lmax = -kInf;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (static_cast<int>(i) == j) continue;
    lmin = std::min(lmin, f.terms[i].exponent);
    lmax = std::max(lmax, f.terms[i].exponent);
  }
  if (widened && f.tail) {
    lmin = std::min(lmin, 0.0);
    lmax = std::max(lmax, 0.0);
  }
  const double lj = j >= 0 ? f.terms[j].exponent : 0.0;
  return {lmin - lj, lmax - lj};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// b_value: certified enclosure of B_j(sigma)
// ---------------------------------------------------------------------------

/// Certified enclosure of B_j(sigma) = sum_{i != j} m_i / m_j - 1, widened by
/// the tail bound ([B, B + eps/m_j]) and padded by the rounding bound.
struct BValue {
  int j = 0;
  double lo = 0.0;
  double hi = 0.0;
};

inline BValue b_value(const ExponentialSum& f, int j, double sigma) {
  if (j < 0 || static_cast<std::size_t>(j) >= f.size())
    throw ValidationError("b_value: term index out of range");
  if (!std::isfinite(f.terms[j].exponent * sigma))
    throw NumericError("b_value: exponent * sigma leaves double range");
  const double err = detail::eval_error(f, sigma);
  const double lo = detail::eval_envelope(f, j, sigma, /*widened=*/false).value;
  const double hi = f.tail ? detail::eval_envelope(f, j, sigma, /*widened=*/true).value : lo;
  return {j, std::expm1(lo - err), std::expm1(hi + err)};
}

// ---------------------------------------------------------------------------
// Root isolation for one dominance function
// ---------------------------------------------------------------------------

/// Isolating bracket for one boundary root; signs are certified at both ends
/// and hi - lo <= root_tol.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

namespace detail {

/// Scan of one convex envelope over the strip: certified sign of its minimum,
/// its negative set (an interval, possibly running into the strip edges), and
/// isolating brackets plus polished roots for the finite boundaries.
struct EnvelopeScan {
  int min_sign = +1;          // -1, 0 (unresolved within margin), +1
  double min_loc = 0.0;
  double min_value = kInf;
  bool has_negative = false;
  double neg_lo = 0.0, neg_hi = 0.0;  // negative set within the strip (open)
  bool lo_edge = false, hi_edge = false;
  std::vector<Bracket> brackets;      // left root first when both present
  std::vector<double> roots;
};

struct EnvelopeFn {
  const ExponentialSum* f;
  int j;
  bool widened;

  EnvelopePoint operator()(double sigma) const { return eval_envelope(*f, j, sigma, widened); }
};

// Expands from `start` in `dir` (+1/-1) until pred(point) holds; returns the
// point, or nullopt when the bound is hit (treated by callers as "no sign
// change within double range").
template <typename Pred>
inline std::optional<double> expand_until(double start, int dir, double limit, Pred pred) {
  double step = 1.0;
  double x = start;
  for (int it = 0; it < 4000; ++it) {
    x = start + dir * step;
    if (std::abs(x) > limit) return std::nullopt;
    if (pred(x)) return x;
    step *= 2.0;
  }
  return std::nullopt;
}

struct RootFind {
  Bracket bracket;
  double root = 0.0;
};

/// Bisects to an isolating bracket of width <= root_tol, then polishes with
/// damped Newton clamped to the bracket.
inline RootFind isolate_root(const EnvelopeFn& F, double neg_pt, double pos_pt, double root_tol) {
  for (int it = 0; it < 600 && std::abs(pos_pt - neg_pt) > root_tol; ++it) {
    const double mid = 0.5 * (neg_pt + pos_pt);
    if (mid == neg_pt || mid == pos_pt) break;
    (F(mid).value < 0 ? neg_pt : pos_pt) = mid;
  }
  RootFind out;
  out.bracket = {std::min(neg_pt, pos_pt), std::max(neg_pt, pos_pt)};
  double x = 0.5 * (neg_pt + pos_pt);
  EnvelopePoint p = F(x);
  for (int it = 0; it < 16; ++it) {
    if (p.deriv == 0.0 || !std::isfinite(p.value)) break;
    double step = p.value / p.deriv;
    double xn = x - step;
    if (xn < out.bracket.lo || xn > out.bracket.hi) break;  // keep the certificate
    EnvelopePoint pn = F(xn);
    if (std::abs(pn.value) >= std::abs(p.value)) break;
    x = xn;
    p = pn;
    if (std::abs(step) <= std::abs(x) * 1e-17 + 1e-300) break;
  }
  out.root = x;
  return out;
}

inline EnvelopeScan scan_envelope(const ExponentialSum& f, int j, const VerticalStrip& strip,
                                  bool widened, double margin, double root_tol) {
  const EnvelopeFn F{&f, j, widened};
  const SlopeLimits slopes = slope_limits(f, j, widened);
  EnvelopeScan out;

  constexpr double kRange = 1e30;  // |sigma| beyond which we refuse to probe
  const double lo_cap = std::isfinite(strip.alpha) ? strip.alpha : -kRange;
  const double hi_cap = std::isfinite(strip.beta) ? strip.beta : kRange;
  const double anchor = std::isfinite(strip.alpha)
                            ? (std::isfinite(strip.beta) ? 0.5 * (strip.alpha + strip.beta)
                                                         : strip.alpha + 1.0)
                            : (std::isfinite(strip.beta) ? strip.beta - 1.0 : 0.0);

  // Locate the minimizer of the convex envelope within [lo_cap, hi_cap].
  double min_loc;
  if (slopes.lo >= 0.0) {
    min_loc = lo_cap;
  } else if (slopes.hi <= 0.0) {
    min_loc = hi_cap;
  } else {
    double a, b;  // F'(a) < 0 <= F'(b)
    if (F(anchor).deriv < 0.0) {
      a = anchor;
      auto bb = expand_until(anchor, +1, kRange, [&](double x) { return F(x).deriv >= 0.0; });
      b = bb.value_or(hi_cap);
    } else {
      b = anchor;
      auto aa = expand_until(anchor, -1, kRange, [&](double x) { return F(x).deriv < 0.0; });
      a = aa.value_or(lo_cap);
    }
    a = std::max(a, lo_cap);
    b = std::min(b, hi_cap);
    for (int it = 0; it < 400 && b - a > root_tol * (1.0 + std::abs(a) + std::abs(b)); ++it) {
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b) break;
      (F(mid).deriv < 0.0 ? a : b) = mid;
    }
    min_loc = std::clamp(0.5 * (a + b), lo_cap, hi_cap);
  }
  out.min_loc = min_loc;
  out.min_value = F(min_loc).value;

  if (out.min_value < -margin)
    out.min_sign = -1;
  else if (out.min_value > margin)
    out.min_sign = +1;
  else
    out.min_sign = 0;
  if (out.min_sign >= 0) return out;  // no certified negative set

  // Negative set boundaries, one side at a time.
  out.has_negative = true;

  // Left boundary.
  if (min_loc <= lo_cap) {
    out.neg_lo = strip.alpha;
    out.lo_edge = true;
  } else {
    const double at_edge = F(lo_cap).value;
    if (at_edge < 0.0) {
      out.neg_lo = strip.alpha;  // the gap runs into the strip edge
      out.lo_edge = true;
    } else {
      double pos_pt = lo_cap;
      if (!std::isfinite(strip.alpha)) {
        // find a certified-positive point left of the minimizer
        auto pp = expand_until(min_loc, -1, kRange,
                               [&](double x) { return F(x).value > margin; });
        if (!pp) {  // could not bracket within range: treat as running to -inf
          out.neg_lo = -kInf;
          out.lo_edge = true;
        } else {
          pos_pt = *pp;
        }
      }
      if (!out.lo_edge) {
        RootFind rf = isolate_root(F, min_loc, pos_pt, root_tol);
        out.brackets.push_back(rf.bracket);
        out.roots.push_back(rf.root);
        out.neg_lo = rf.root;
      }
    }
  }

  // Right boundary.
  if (min_loc >= hi_cap) {
    out.neg_hi = strip.beta;
    out.hi_edge = true;
  } else {
    const double at_edge = F(hi_cap).value;
    if (at_edge < 0.0) {
      out.neg_hi = strip.beta;
      out.hi_edge = true;
    } else {
      double pos_pt = hi_cap;
      if (!std::isfinite(strip.beta)) {
        auto pp = expand_until(min_loc, +1, kRange,
                               [&](double x) { return F(x).value > margin; });
        if (!pp) {
          out.neg_hi = kInf;
          out.hi_edge = true;
        } else {
          pos_pt = *pp;
        }
      }
      if (!out.hi_edge) {
        RootFind rf = isolate_root(F, min_loc, pos_pt, root_tol);
        out.brackets.push_back(rf.bracket);
        out.roots.push_back(rf.root);
        out.neg_hi = rf.root;
      }
    }
  }
  return out;
}

}  // namespace detail

/// Root structure of one dominance function B_j over the strip: isolating
/// brackets (width <= root_tol) and polished roots for the boundary points,
/// and the certified negative set { B_j < 0 } within the strip, whose ends are
/// either roots or strip edges.
struct BRoots {
  int j = 0;
  std::vector<Bracket> brackets;
  std::vector<double> roots;
  std::optional<std::pair<double, double>> negative_interval;
  bool lo_is_edge = false;
  bool hi_is_edge = false;
  bool min_sign_certified = true;  // false when the minimum straddles the margin
  double min_location = 0.0;
  double min_value = 0.0;  // in L units: log(B+1)
};

inline BRoots b_roots(const ExponentialSum& f, int j, const VerticalStrip& strip,
                      const Tolerances& tol) {
  require_valid(tol);
  if (j < 0 || static_cast<std::size_t>(j) >= f.size())
    throw ValidationError("b_roots: term index out of range");
  if (!(strip.alpha < strip.beta)) throw ValidationError("b_roots: empty strip");
  const double margin =
      tol.cert_margin + detail::eval_error(f, std::isfinite(strip.alpha) ? strip.alpha : 0.0) +
      detail::eval_error(f, std::isfinite(strip.beta) ? strip.beta : 0.0);
  const detail::EnvelopeScan scan =
      detail::scan_envelope(f, j, strip, /*widened=*/f.tail.has_value(), margin, tol.root_tol);
  BRoots out;
  out.j = j;
  out.brackets = scan.brackets;
  out.roots = scan.roots;
  out.min_sign_certified = scan.min_sign != 0;
  out.min_location = scan.min_loc;
  out.min_value = scan.min_value;
  out.lo_is_edge = scan.lo_edge;
  out.hi_is_edge = scan.hi_edge;
  if (scan.has_negative) {
    const double lo = std::max(scan.neg_lo, strip.alpha);
    const double hi = std::min(scan.neg_hi, strip.beta);
    if (lo < hi) out.negative_interval = {lo, hi};
  }
  return out;
}

// ---------------------------------------------------------------------------
// inf_modulus: distance from 0 to the closure of the value set on a line
// ---------------------------------------------------------------------------

/// Exact distance from 0 to the set of values f can approach on the vertical
/// line Re s = sigma, for independent exponents: max(0, 2 max_j m_j - sum m).
/// Computed in log space so it only fails when the answer itself leaves double
/// range (reported).
inline double inf_modulus(const ExponentialSum& f, double sigma) {
  if (f.terms.empty()) throw ValidationError("inf_modulus: sum has no terms");
  double peak = -kInf;
  for (std::size_t i = 0; i < f.size(); ++i) peak = std::max(peak, f.log_modulus(i, sigma));
  double rel_sum = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    rel_sum += std::exp(f.log_modulus(i, sigma) - peak);
  if (rel_sum >= 2.0) return 0.0;
  const double d = std::exp(peak + std::log(2.0 - rel_sum));
  if (std::isinf(d)) throw NumericError("inf_modulus overflow at sigma = " + std::to_string(sigma));
  return d;
}

/// Tail-widened certified enclosure of inf_modulus, collapsed by callers to
/// its midpoint when a single number is needed.
struct InfModulusEnclosure {
  double lo = 0.0;
  double hi = 0.0;
  bool straddles_zero = false;
};

inline InfModulusEnclosure inf_modulus_enclosure(const ExponentialSum& f, double sigma) {
  if (f.terms.empty()) throw ValidationError("inf_modulus_enclosure: sum has no terms");
  if (!std::isfinite(sigma))
    throw ValidationError("inf_modulus_enclosure: sigma must be finite");
  double peak_log = -kInf;
  for (std::size_t i = 0; i < f.size(); ++i)
    peak_log = std::max(peak_log, f.log_modulus(i, sigma));
  if (!std::isfinite(peak_log))
    throw NumericError("term modulus out of range at sigma = " + std::to_string(sigma));
  double rel_total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i)
    rel_total += std::exp(f.log_modulus(i, sigma) - peak_log);
  const double eps = f.tail_epsilon();
  const double eps_rel = eps > 0.0 ? std::exp(std::log(eps) - peak_log) : 0.0;
  if (std::isinf(eps_rel))
    throw NumericError("tail bound dwarfs every kept term at sigma = " + std::to_string(sigma));
  // Omitted terms each weigh at most eps, so the true peak lies in
  // [peak, max(peak, eps)] and the true total in [total, total + eps].
  // Work relative to the largest kept modulus so tiny terms shed weight
  // instead of underflowing the whole computation.
  const double q_lo = 2.0 - rel_total - eps_rel;
  const double q_hi = 2.0 * std::max(1.0, eps_rel) - rel_total;
  auto rescale = [&](double q) {
    if (q <= 0.0) return 0.0;
    const double v = std::exp(peak_log + std::log(q));
    if (std::isinf(v))
      throw NumericError("inf_modulus overflow at sigma = " + std::to_string(sigma));
    // Positivity is established even when the magnitude underflows.
    return v > 0.0 ? v : std::numeric_limits<double>::denorm_min();
  };
  return {rescale(q_lo), rescale(q_hi), q_lo < 0.0 && q_hi > 0.0};
}

// ---------------------------------------------------------------------------
// Membership classification of a single point
// ---------------------------------------------------------------------------

enum class PointKind { Interior, Boundary, Exterior };

struct BoundaryClass {
  PointKind kind = PointKind::Interior;
  std::optional<int> equality_index;  // set for Boundary
};

/// Raised when the dominance values at a point cannot be classified: at least
/// two of them sit inside the certification margin (for at least three terms
/// only one equality can ever hold, so this signals broken inputs or an
/// absurd margin).
class AmbiguousBoundaryError : public std::runtime_error {
 public:
  std::vector<int> indices;
  explicit AmbiguousBoundaryError(std::vector<int> idx)
      : std::runtime_error("boundary classification ambiguous: " +
                           std::to_string(idx.size()) +
                           " dominance values inside the certification margin"),
        indices(std::move(idx)) {}
};

inline BoundaryClass classify_boundary(const ExponentialSum& f, double sigma,
                                       const Tolerances& tol) {
  require_valid(tol);
  if (f.terms.empty()) throw ValidationError("classify_boundary: sum has no terms");
  const double margin = tol.cert_margin + detail::eval_error(f, sigma);
  std::vector<int> borderline;
  std::vector<int> negative;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double lo = detail::eval_envelope(f, static_cast<int>(j), sigma, false).value - margin;
    const double hi = f.tail
                          ? detail::eval_envelope(f, static_cast<int>(j), sigma, true).value + margin
                          : detail::eval_envelope(f, static_cast<int>(j), sigma, false).value + margin;
    if (hi < 0.0)
      negative.push_back(static_cast<int>(j));
    else if (lo <= 0.0)
      borderline.push_back(static_cast<int>(j));
  }
  if (borderline.size() >= 2 || (!borderline.empty() && !negative.empty())) {
    std::vector<int> all = negative;
    all.insert(all.end(), borderline.begin(), borderline.end());
    throw AmbiguousBoundaryError(std::move(all));
  }
  if (!negative.empty()) return {PointKind::Exterior, std::nullopt};
  if (borderline.size() == 1) return {PointKind::Boundary, borderline.front()};
  return {PointKind::Interior, std::nullopt};
}

// ---------------------------------------------------------------------------
// compute_rset: the projection set as a union of intervals
// ---------------------------------------------------------------------------

namespace detail {

struct Gap {
  double lo, hi;
  int j;
  bool lo_edge, hi_edge;
};

}  // namespace detail

inline RSetResult compute_rset(const ExponentialSum& f, const VerticalStrip& strip,
                               const Tolerances& tol) {
  require_valid(tol);
  if (!(strip.alpha < strip.beta)) throw ValidationError("compute_rset: empty strip");
  if (f.terms.empty()) throw ValidationError("compute_rset: sum has no terms");

  RSetResult out;

  // Single explicit term, no tail: the modulus never vanishes anywhere.
  if (f.size() == 1 && !f.tail) {
    out.certified = true;
    return out;
  }

  // Two explicit terms, no tail: the zeros fill one vertical line exactly;
  // no independence hypothesis is involved.
  if (f.size() == 2 && !f.tail) {
    const Term& t0 = f.terms[0];
    const Term& t1 = f.terms[1];
    const double sigma_star = (std::log(std::abs(t0.coeff)) - std::log(std::abs(t1.coeff))) /
                              (t1.exponent - t0.exponent);
    if (strip.contains(sigma_star)) {
      Interval iv;
      iv.lo = iv.hi = sigma_star;
      iv.lo_kind = iv.hi_kind = EndpointKind::Boundary;
      iv.lo_attribution = 0;  // the low-exponent term dominates left of the line
      iv.hi_attribution = 1;
      out.intervals.push_back(iv);
      out.a_f = out.b_f = sigma_star;
    }
    out.certified = true;
    return out;
  }

  // General path. Gather the certified negative set of every dominance
  // function; the projection set is the complement within the strip.
  std::vector<detail::Gap> gaps;
  bool all_certified = true;
  const bool widening = f.tail.has_value();

  for (std::size_t j = 0; j < f.size(); ++j) {
    const BRoots br = b_roots(f, static_cast<int>(j), strip, tol);
    if (!br.min_sign_certified) {
      // Tangent minimum: the sign of min B_j is unresolved, so a gap may or
      // may not open here. Record the candidate region, certified off.
      all_certified = false;
      const double w = std::max(tol.root_tol, 1e3 * tol.cert_margin);
      Interval band;
      band.lo = std::max(strip.alpha, br.min_location - w);
      band.hi = std::min(strip.beta, br.min_location + w);
      out.uncertified_regions.push_back(band);
      out.caveats.push_back("sign of min B_" + std::to_string(j) +
                            " unresolved within the certification margin near sigma = " +
                            std::to_string(br.min_location));
      continue;
    }
    if (br.negative_interval) {
      gaps.push_back({br.negative_interval->first, br.negative_interval->second,
                      static_cast<int>(j), br.lo_is_edge, br.hi_is_edge});
    }
    if (widening && br.negative_interval) {
      // Width of the band between the widened and unwidened boundaries; where
      // it exceeds root_tol the exact boundary location is tail-limited.
      const detail::EnvelopeScan plain = detail::scan_envelope(
          f, static_cast<int>(j), strip, /*widened=*/false,
          tol.cert_margin + detail::eval_error(f, br.min_location), tol.root_tol);
      if (plain.has_negative) {
        const double lo_band = std::abs(std::max(plain.neg_lo, strip.alpha) -
                                        br.negative_interval->first);
        const double hi_band = std::abs(std::min(plain.neg_hi, strip.beta) -
                                        br.negative_interval->second);
        if (lo_band > tol.root_tol && !br.lo_is_edge) {
          all_certified = false;
          Interval band;
          band.lo = std::min(plain.neg_lo, br.negative_interval->first);
          band.hi = std::max(plain.neg_lo, br.negative_interval->first);
          out.uncertified_regions.push_back(band);
          out.caveats.push_back("tail widening leaves the lower boundary of gap " +
                                std::to_string(j) + " uncertain beyond root_tol");
        }
        if (hi_band > tol.root_tol && !br.hi_is_edge) {
          all_certified = false;
          Interval band;
          band.lo = std::min(plain.neg_hi, br.negative_interval->second);
          band.hi = std::max(plain.neg_hi, br.negative_interval->second);
          out.uncertified_regions.push_back(band);
          out.caveats.push_back("tail widening leaves the upper boundary of gap " +
                                std::to_string(j) + " uncertain beyond root_tol");
        }
      }
    }
  }

  // With a tail, the omitted terms' own dominance inequalities hold wherever
  // the explicit mass is at least 2 epsilon (each omitted modulus is <= eps).
  if (widening) {
    const VerticalStrip& v = f.tail->valid_on;
    if (!(v.alpha <= strip.alpha && strip.beta <= v.beta)) {
      all_certified = false;
      out.caveats.push_back("tail bound is only valid on part of the working strip");
    }
    const detail::EnvelopeScan total = detail::scan_envelope(
        f, /*j=*/-1, strip, /*widened=*/false, 0.0, tol.root_tol);
    const double min_log_total = total.min_value;
    if (!(min_log_total > std::log(2.0 * f.tail->epsilon) + tol.cert_margin)) {
      all_certified = false;
      out.caveats.push_back(
          "explicit mass drops below 2*epsilon somewhere in the strip: omitted-term "
          "inequalities not certified there");
    }
  }

  // Sort gaps and check the structural disjointness (two terms can never
  // dominate at once, so certified negative sets cannot meet).
  std::sort(gaps.begin(), gaps.end(),
            [](const detail::Gap& a, const detail::Gap& b) { return a.lo < b.lo; });
  for (std::size_t k = 1; k < gaps.size(); ++k) {
    if (gaps[k].lo < gaps[k - 1].hi) {
      all_certified = false;
      out.caveats.push_back("overlapping certified gaps detected (terms " +
                            std::to_string(gaps[k - 1].j) + ", " + std::to_string(gaps[k].j) +
                            "): merged defensively");
      gaps[k - 1].hi = std::max(gaps[k - 1].hi, gaps[k].hi);
      gaps[k - 1].hi_edge = gaps[k - 1].hi_edge || gaps[k].hi_edge;
      gaps.erase(gaps.begin() + static_cast<std::ptrdiff_t>(k));
      --k;
    }
  }

  // Complement within the open strip.
  double cursor = strip.alpha;
  std::optional<int> cursor_attr;
  auto flush_piece = [&](double hi, std::optional<int> hi_attr, bool hi_is_edge) {
    if (!(cursor < hi)) return;
    Interval iv;
    iv.lo = cursor;
    iv.hi = hi;
    iv.lo_kind = cursor_attr ? EndpointKind::Boundary : EndpointKind::StripEdge;
    iv.hi_kind = hi_is_edge ? EndpointKind::StripEdge : EndpointKind::Boundary;
    iv.lo_attribution = cursor_attr;
    iv.hi_attribution = hi_attr;
    out.intervals.push_back(iv);
  };
  for (const detail::Gap& g : gaps) {
    flush_piece(g.lo, g.j, /*hi_is_edge=*/false);
    if (g.hi > cursor) {
      cursor = g.hi;
      cursor_attr = g.hi_edge ? std::nullopt : std::optional<int>(g.j);
    }
    if (g.hi_edge) cursor = strip.beta;  // gap runs out of the strip
  }
  flush_piece(strip.beta, std::nullopt, /*hi_is_edge=*/true);

  if (!out.intervals.empty()) {
    out.a_f = out.intervals.front().lo;
    out.b_f = out.intervals.back().hi;
  }

  // Certification: emptiness rests on reverse-triangle domination alone;
  // a nonempty set additionally needs verified independence for membership.
  if (!out.intervals.empty()) {
    switch (f.independence) {
      case Independence::Verified:
        break;
      case Independence::DeclaredOnly:
        all_certified = false;
        out.caveats.push_back(
            "independence declared but not exactly verified: membership relies on the "
            "declaration");
        break;
      case Independence::Dependent:
        all_certified = false;
        out.caveats.push_back(
            "exponents are rationally dependent: the computed set certifiably contains every "
            "zero projection, but membership of its points is not implied");
        break;
      case Independence::None:
        all_certified = false;
        out.caveats.push_back(
            "no independence information: the computed set certifiably contains every zero "
            "projection, but membership of its points is not implied");
        break;
    }
  }
  out.certified = all_certified;
  return out;
}

// ---------------------------------------------------------------------------
// Nonemptiness helpers
// ---------------------------------------------------------------------------

/// For a finite sum (entire function) with at least three rationally
/// independent exponents, the projection set over the whole plane is nonempty;
/// the witness search scans expanding strips for a point where every dominance
/// inequality holds. The witness is returned whenever one is found, whether or
/// not the hypotheses guarantee it a priori.
struct NonemptyCheck {
  bool guaranteed = false;
  std::optional<double> witness;
  std::vector<std::string> notes;
};

inline NonemptyCheck check_nonempty_entire(const ExponentialSum& f, const Tolerances& tol) {
  NonemptyCheck out;
  if (f.tail) out.notes.push_back("truncated series: the finite-sum hypothesis fails");
  if (f.size() < 2) {
    if (f.size() == 1) out.notes.push_back("a single term never vanishes");
    return out;
  }
  if (f.size() == 2 && !f.tail) {
    // Exact: two-term sums vanish on one vertical line.
    out.guaranteed = true;
    const double sigma_star =
        (std::log(std::abs(f.terms[0].coeff)) - std::log(std::abs(f.terms[1].coeff))) /
        (f.terms[1].exponent - f.terms[0].exponent);
    out.witness = sigma_star;
    return out;
  }
  switch (f.independence) {
    case Independence::Verified:
    case Independence::DeclaredOnly:
      out.guaranteed = !f.tail && f.size() >= 3;
      break;
    case Independence::Dependent:
      out.notes.push_back("exponents are rationally dependent: nonemptiness not guaranteed");
      break;
    case Independence::None:
      out.notes.push_back("independence unknown: nonemptiness not guaranteed");
      break;
  }
  for (double half = 4.0; half <= 1.1e12; half *= 4.0) {
    RSetResult r = compute_rset(f, {-half, half}, tol);
    if (!r.intervals.empty()) {
      // Pick the point of the set closest to 0.
      double best = r.intervals.front().lo;
      for (const Interval& iv : r.intervals) {
        if (0.0 >= iv.lo && 0.0 <= iv.hi) {
          best = 0.0;
          break;
        }
        for (double cand : {iv.lo, iv.hi})
          if (std::abs(cand) < std::abs(best)) best = cand;
      }
      out.witness = best;
      break;
    }
  }
  if (!out.witness) out.notes.push_back("no witness found on expanding strips");
  return out;
}

/// Dominance conditions at the finite strip edges: at an edge x the condition
/// reads  sum_i m_i(x) > 2 sup_i m_i(x). If either holds (with at least three
/// independent exponents, the strip being the maximal strip of the series),
/// the projection set is nonempty.
struct EdgeConditions {
  bool applicable_low = false, applicable_high = false;
  bool cond_low = false, cond_high = false;
  double sum_low = 0.0, twice_sup_low = 0.0;
  double sum_high = 0.0, twice_sup_high = 0.0;
  bool implies_nonempty = false;
  std::vector<std::string> notes;
};

inline EdgeConditions strip_edge_conditions(const ExponentialSum& f, const VerticalStrip& strip,
                                            const Tolerances& tol) {
  require_valid(tol);
  if (f.terms.empty()) throw ValidationError("strip_edge_conditions: sum has no terms");
  EdgeConditions out;
  const double log_eps = f.tail ? std::log(f.tail->epsilon) : -kInf;

  auto evaluate = [&](double edge, bool& cond, double& sum_out, double& twice_sup_out) {
    double peak = -kInf;
    for (std::size_t i = 0; i < f.size(); ++i) peak = std::max(peak, f.log_modulus(i, edge));
    const double lse = detail::eval_envelope(f, -1, edge, /*widened=*/false).value;
    // The true sup over all terms (omitted included) is at most
    // max(peak, eps); the true sum is at least the explicit sum.
    const double sup_hi = std::max(peak, log_eps);
    const double margin = tol.cert_margin + detail::eval_error(f, edge);
    cond = lse > std::log(2.0) + sup_hi + margin;
    if (!cond && lse > std::log(2.0) + sup_hi - margin)
      out.notes.push_back("edge condition at sigma = " + std::to_string(edge) +
                          " is a tie within the certification margin: not established");
    sum_out = std::exp(lse);
    twice_sup_out = 2.0 * std::exp(sup_hi);
  };

  if (std::isfinite(strip.alpha)) {
    out.applicable_low = true;
    evaluate(strip.alpha, out.cond_low, out.sum_low, out.twice_sup_low);
  }
  if (std::isfinite(strip.beta)) {
    out.applicable_high = true;
    evaluate(strip.beta, out.cond_high, out.sum_high, out.twice_sup_high);
  }

  const bool hypotheses =
      f.size() >= 3 && (f.independence == Independence::Verified ||
                        f.independence == Independence::DeclaredOnly);
  if (!hypotheses)
    out.notes.push_back("nonemptiness implication needs at least three independent exponents");
  out.notes.push_back("implication assumes the strip is the maximal strip of the series");
  out.implies_nonempty = hypotheses && (out.cond_low || out.cond_high);
  return out;
}

}  // namespace apz::rset
