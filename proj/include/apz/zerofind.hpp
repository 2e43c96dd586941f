#pragma once

/// @file zerofind.hpp
/// Argument-principle zero location for exponential sums on rectangles, and
/// the cross-check of located zeros against the computed projection set.
///
/// Winding numbers come from a certified phase walk: a boundary segment is
/// accepted only when a derivative bound confines the image to a zero-free
/// disk (|f' | * len <= 0.8 |f(a)| along the piece), which makes the principal
/// argument difference the true phase increment. Otherwise the segment is
/// bisected. A clearance floor relative to the total term mass rejects
/// boundaries that pass too close to a zero; callers retry with slightly
/// perturbed rectangles.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "core.hpp"
#include "probe.hpp"
#include "rset.hpp"

namespace apz::zerofind {

struct Rectangle {
  double sigma_lo = 0.0, sigma_hi = 0.0;
  double t_lo = 0.0, t_hi = 0.0;

  double width() const { return sigma_hi - sigma_lo; }
  double height() const { return t_hi - t_lo; }
  Complex center() const { return {0.5 * (sigma_lo + sigma_hi), 0.5 * (t_lo + t_hi)}; }
};

/// The boundary of the requested rectangle passes too close to a zero (below
/// the clearance floor 1e-13 * sum of term moduli), or a phase step could not
/// be resolved. Carries the offending point.
class ClearanceError : public NumericError {
 public:
  Complex where;
  ClearanceError(const std::string& what, Complex z) : NumericError(what), where(z) {}
};

struct WindingResult {
  int winding = 0;
  double min_log_clearance = kInf;  // min over boundary of log(|f| / sum m_i)
  std::size_t evaluations = 0;
};

namespace detail {

constexpr double kLogClearanceFloor = -29.933606208922594;  // log(1e-13)

struct BudgetExhausted {};

struct WalkContext {
  const ExponentialSum* f = nullptr;
  std::size_t evaluations = 0;
  std::size_t max_evaluations = static_cast<std::size_t>(-1);
  double min_log_clearance = kInf;
};

inline double log_total_mass(const ExponentialSum& f, double sigma) {
  return rset::detail::eval_envelope(f, /*j=*/-1, sigma, /*widened=*/false).value;
}

/// Upper bound for |f'| on a segment whose real parts lie between s1 and s2:
/// each term's modulus is monotone in sigma, so its max sits at an end.
inline double sup_df_bound(const ExponentialSum& f, double s1, double s2) {
  double acc = 0.0;
  for (const Term& t : f.terms) {
    const double m = std::max(std::exp(t.exponent * s1), std::exp(t.exponent * s2));
    acc += std::abs(t.coeff) * std::abs(t.exponent) * m;
  }
  if (!std::isfinite(acc)) throw NumericError("derivative bound overflow");
  return acc;
}

struct BoundaryPoint {
  Complex z;
  Complex w;
  double aw = 0.0;  // |w|
};

inline BoundaryPoint eval_checked(WalkContext& ctx, Complex z) {
  if (ctx.evaluations >= ctx.max_evaluations) throw BudgetExhausted{};
  ++ctx.evaluations;
  const Complex w = probe::eval_f(*ctx.f, z);
  const double aw = std::abs(w);
  const double rel = std::log(aw) - log_total_mass(*ctx.f, z.real());
  ctx.min_log_clearance = std::min(ctx.min_log_clearance, rel);
  if (!(rel >= kLogClearanceFloor))
    throw ClearanceError("boundary clearance below floor at Re = " + std::to_string(z.real()) +
                             ", Im = " + std::to_string(z.imag()),
                         z);
  return {z, w, aw};
}

inline double walk_segment(WalkContext& ctx, const BoundaryPoint& a, const BoundaryPoint& b,
                           int depth) {
  const double len = std::abs(b.z - a.z);
  const double bound = sup_df_bound(*ctx.f, a.z.real(), b.z.real());
  if (bound * len <= 0.8 * a.aw) {
    // Image confined to the disk around f(a) missing 0: the principal value
    // is the exact increment and lies strictly inside (-pi/2, pi/2).
    return std::arg(b.w * std::conj(a.w));
  }
  if (depth >= 48)
    throw ClearanceError("phase step could not be resolved near Re = " +
                             std::to_string(a.z.real()) + ", Im = " + std::to_string(a.z.imag()),
                         a.z);
  const BoundaryPoint mid = eval_checked(ctx, 0.5 * (a.z + b.z));
  return walk_segment(ctx, a, mid, depth + 1) + walk_segment(ctx, mid, b, depth + 1);
}

inline int winding_with_ctx(WalkContext& ctx, const Rectangle& rect) {
  const BoundaryPoint c00 = eval_checked(ctx, {rect.sigma_lo, rect.t_lo});
  const BoundaryPoint c10 = eval_checked(ctx, {rect.sigma_hi, rect.t_lo});
  const BoundaryPoint c11 = eval_checked(ctx, {rect.sigma_hi, rect.t_hi});
  const BoundaryPoint c01 = eval_checked(ctx, {rect.sigma_lo, rect.t_hi});
  double total = 0.0;
  total += walk_segment(ctx, c00, c10, 0);
  total += walk_segment(ctx, c10, c11, 0);
  total += walk_segment(ctx, c11, c01, 0);
  total += walk_segment(ctx, c01, c00, 0);
  const double turns = total / (2.0 * kPi);
  const long w = std::lround(turns);
  if (std::abs(turns - static_cast<double>(w)) > 0.25)
    throw ClearanceError("phase walk failed to close around the rectangle", rect.center());
  if (w < 0)
    throw NumericError("negative winding number: phase walk corrupted");
  return static_cast<int>(w);
}

}  // namespace detail

/// Number of zeros (with multiplicity) of f inside the rectangle, certified by
/// the adaptive phase walk described above.
inline WindingResult winding_number(const ExponentialSum& f, const Rectangle& rect,
                                    const Tolerances& tol) {
  require_valid(tol);
  if (f.terms.empty()) throw ValidationError("winding_number: sum has no terms");
  if (!(rect.sigma_lo < rect.sigma_hi) || !(rect.t_lo < rect.t_hi))
    throw ValidationError("winding_number: empty rectangle");
  if (!std::isfinite(rect.sigma_lo) || !std::isfinite(rect.sigma_hi) ||
      !std::isfinite(rect.t_lo) || !std::isfinite(rect.t_hi))
    throw ValidationError("winding_number: rectangle must be finite");
  detail::WalkContext ctx;
  ctx.f = &f;
  WindingResult out;
  try {
    out.winding = detail::winding_with_ctx(ctx, rect);
  } catch (const detail::BudgetExhausted&) {
    throw NumericError("winding_number: evaluation budget exhausted");
  }
  out.min_log_clearance = ctx.min_log_clearance;
  out.evaluations = ctx.evaluations;
  return out;
}

// ---------------------------------------------------------------------------
// Zero location by quadrisection
// ---------------------------------------------------------------------------

struct ZeroRecord {
  Complex z;
  int multiplicity = 1;
  double residual = 0.0;       // |f(z)|
  bool newton_converged = false;
};

struct ZeroSearch {
  std::vector<ZeroRecord> zeros;
  int total_winding = 0;
  bool complete = true;
  std::size_t evaluations = 0;
  std::vector<std::string> notes;
};

namespace detail {

inline std::optional<Complex> newton_polish(const ExponentialSum& f, Complex z0, double root_tol,
                                            WalkContext& ctx) {
  try {
    Complex z = z0;
    double fz = std::abs(probe::eval_f(f, z));
    ++ctx.evaluations;
    for (int it = 0; it < 60; ++it) {
      const Complex d = probe::eval_df(f, z);
      if (std::abs(d) == 0.0) return std::nullopt;
      Complex step = probe::eval_f(f, z) / d;
      ++ctx.evaluations;
      for (int h = 0; h < 12; ++h) {
        const double trial = std::abs(probe::eval_f(f, z - step));
        ++ctx.evaluations;
        if (trial < fz || std::abs(step) < 1e-300) {
          z -= step;
          fz = trial;
          break;
        }
        step *= 0.5;
        if (h == 11) return std::nullopt;
      }
      if (std::abs(step) <= 0.2 * root_tol) return z;
      if (ctx.evaluations >= ctx.max_evaluations) throw BudgetExhausted{};
    }
    return std::nullopt;
  } catch (const NumericError&) {
    // The iteration wandered out of evaluable range; subdivision will retry.
    return std::nullopt;
  }
}

}  // namespace detail

/// Locates the zeros of f in the rectangle: recursive quadrisection driven by
/// winding numbers, with a Newton handoff once a count-one box is small, and a
/// verification winding around every polished zero. Rectangles whose boundary
/// hits the clearance floor are retried slightly perturbed (outward growth for
/// the outer boundary, shifted split lines inside), so zeros within a few
/// root_tol of the requested boundary may be picked up or dropped — they are
/// degenerate for the count either way.
inline ZeroSearch locate_zeros(const ExponentialSum& f, const Rectangle& rect,
                               const Tolerances& tol,
                               std::size_t max_evaluations = 40'000'000) {
  require_valid(tol);
  if (f.terms.empty()) throw ValidationError("locate_zeros: sum has no terms");
  if (!(rect.sigma_lo < rect.sigma_hi) || !(rect.t_lo < rect.t_hi))
    throw ValidationError("locate_zeros: empty rectangle");

  detail::WalkContext ctx;
  ctx.f = &f;
  ctx.max_evaluations = max_evaluations;

  ZeroSearch out;

  // Outer boundary, grown outward on clearance failures.
  Rectangle outer = rect;
  int outer_w = 0;
  {
    const double grow[] = {0.0, 3.0, 7.0, 13.0};
    bool ok = false;
    std::string last;
    for (double g : grow) {
      outer = {rect.sigma_lo - g * tol.root_tol, rect.sigma_hi + g * tol.root_tol,
               rect.t_lo - g * tol.root_tol, rect.t_hi + g * tol.root_tol};
      try {
        outer_w = detail::winding_with_ctx(ctx, outer);
        ok = true;
        if (g != 0.0)
          out.notes.push_back("outer boundary grown by " + std::to_string(g) +
                              " * root_tol to clear a nearby zero");
        break;
      } catch (const ClearanceError& e) {
        last = e.what();
      } catch (const detail::BudgetExhausted&) {
        out.complete = false;
        out.evaluations = ctx.evaluations;
        out.notes.push_back("evaluation budget exhausted on the outer boundary");
        return out;
      }
    }
    if (!ok) throw ClearanceError("outer boundary unresolvable: " + last, rect.center());
  }
  out.total_winding = outer_w;

  struct Item {
    Rectangle r;
    int w;
  };
  std::vector<Item> stack;
  if (outer_w > 0) stack.push_back({outer, outer_w});

  const double handoff = 4096.0 * tol.root_tol;
  // Multi-zero boxes this small stop subdividing and are recorded as one
  // cluster (after a multiplicity-aware polish). Kept well above root_tol:
  // near an m-fold zero the phase walk costs ~ dim^(1-m) evaluations, so
  // driving boxes smaller would burn the whole budget for no information.
  const double cluster_dim = std::max(1e4 * tol.root_tol, 1e-3);

  try {
    while (!stack.empty()) {
      const Item item = stack.back();
      stack.pop_back();
      const Rectangle& r = item.r;
      const double dim = std::max(r.width(), r.height());

      if (item.w == 1 && dim <= handoff) {
        const auto z = detail::newton_polish(f, r.center(), tol.root_tol, ctx);
        if (z && z->real() >= r.sigma_lo - tol.root_tol &&
            z->real() <= r.sigma_hi + tol.root_tol && z->imag() >= r.t_lo - tol.root_tol &&
            z->imag() <= r.t_hi + tol.root_tol) {
          bool verified = false;
          try {
            const Rectangle vbox{z->real() - 2.0 * tol.root_tol, z->real() + 2.0 * tol.root_tol,
                                 z->imag() - 2.0 * tol.root_tol, z->imag() + 2.0 * tol.root_tol};
            verified = detail::winding_with_ctx(ctx, vbox) == 1;
          } catch (const NumericError&) {
            verified = false;  // fall back to quadrisection
          }
          if (verified) {
            out.zeros.push_back({*z, 1, std::abs(probe::eval_f(f, *z)), true});
            ++ctx.evaluations;
            continue;
          }
        }
      }

      auto record_cluster = [&] {
        // Sharpen the location first: for an m-fold zero, z - m f/f' converges
        // quadratically, and for a tight cluster it still lands inside it. The
        // result is recorded unverified either way.
        Complex zc = r.center();
        try {
          Complex z = zc;
          for (int it = 0; it < 60 && ctx.evaluations + 2 <= ctx.max_evaluations; ++it) {
            ctx.evaluations += 2;
            const Complex fz = probe::eval_f(f, z);
            if (fz == Complex{0.0, 0.0}) {
              zc = z;
              break;
            }
            const Complex dfz = probe::eval_df(f, z);
            if (dfz == Complex{0.0, 0.0}) break;
            const Complex step = static_cast<double>(item.w) * fz / dfz;
            z -= step;
            if (std::abs(z - r.center()) > 4.0 * dim) break;  // diverging: keep the center
            if (std::abs(step) <= 0.25 * tol.root_tol) {
              zc = z;
              break;
            }
          }
        } catch (const NumericError&) {
        }
        out.zeros.push_back({zc, item.w, std::abs(probe::eval_f(f, zc)), false});
        ++ctx.evaluations;
        if (item.w > 1)
          out.notes.push_back("multiplicity " + std::to_string(item.w) +
                              " recorded for an unresolved cluster box");
      };

      if (dim <= tol.root_tol || (item.w >= 2 && dim <= cluster_dim)) {
        // Either a box of side root_tol, or several unseparated zeros in a
        // small box: a genuine multiple zero, or a pair too close for the
        // clearance floor to slice between.
        record_cluster();
        continue;
      }

      // Quadrisect, shifting the split lines off any zero they graze. Small
      // absolute shifts clear simple zeros; dimension-relative ones are needed
      // for multiple zeros, whose dead zone scales like a root of the
      // clearance floor.
      const double offs[] = {0.0,
                             3.0 * tol.root_tol,
                             -3.0 * tol.root_tol,
                             13.0 * tol.root_tol,
                             -13.0 * tol.root_tol,
                             0.07 * dim,
                             -0.07 * dim,
                             0.16 * dim,
                             -0.16 * dim,
                             0.29 * dim,
                             -0.29 * dim};
      bool split_done = false;
      for (double off : offs) {
        double sm = 0.5 * (r.sigma_lo + r.sigma_hi) + off;
        double tm = 0.5 * (r.t_lo + r.t_hi) + off;
        if (!(sm > r.sigma_lo && sm < r.sigma_hi)) sm = 0.5 * (r.sigma_lo + r.sigma_hi);
        if (!(tm > r.t_lo && tm < r.t_hi)) tm = 0.5 * (r.t_lo + r.t_hi);
        const Rectangle kids[4] = {
            {r.sigma_lo, sm, r.t_lo, tm},
            {sm, r.sigma_hi, r.t_lo, tm},
            {r.sigma_lo, sm, tm, r.t_hi},
            {sm, r.sigma_hi, tm, r.t_hi},
        };
        try {
          int ws[4];
          int total = 0;
          for (int c = 0; c < 4; ++c) {
            ws[c] = detail::winding_with_ctx(ctx, kids[c]);
            total += ws[c];
          }
          if (total != item.w) continue;  // a zero sat on a split line; shift and retry
          for (int c = 0; c < 4; ++c)
            if (ws[c] > 0) stack.push_back({kids[c], ws[c]});
          split_done = true;
          break;
        } catch (const ClearanceError&) {
          continue;
        }
      }
      if (!split_done) {
        if (dim <= cluster_dim) {
          // The winding around this box is exact; only separation failed.
          record_cluster();
        } else {
          out.complete = false;
          out.notes.push_back("subdivision unresolvable near Re = " +
                              std::to_string(r.center().real()) + ", Im = " +
                              std::to_string(r.center().imag()) + ": " +
                              std::to_string(item.w) + " zero(s) unlocated there");
        }
      }
    }
  } catch (const detail::BudgetExhausted&) {
    out.complete = false;
    out.notes.push_back("evaluation budget exhausted; zero list truncated");
  }

  // Merge duplicate records (a polished zero can be claimed by two adjacent
  // boxes when it sits within root_tol of their shared edge).
  std::sort(out.zeros.begin(), out.zeros.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    if (a.z.imag() != b.z.imag()) return a.z.imag() < b.z.imag();
    return a.z.real() < b.z.real();
  });
  for (std::size_t i = 1; i < out.zeros.size();) {
    if (std::abs(out.zeros[i].z - out.zeros[i - 1].z) < tol.root_tol) {
      out.zeros[i - 1].multiplicity =
          std::max(out.zeros[i - 1].multiplicity, out.zeros[i].multiplicity);
      if (out.zeros[i].residual < out.zeros[i - 1].residual) out.zeros[i - 1] = out.zeros[i];
      out.zeros.erase(out.zeros.begin() + static_cast<std::ptrdiff_t>(i));
      out.notes.push_back("merged duplicate zero records near a shared box edge");
    } else {
      ++i;
    }
  }

  out.evaluations = ctx.evaluations;
  return out;
}

// ---------------------------------------------------------------------------
// Cross-check against the projection set
// ---------------------------------------------------------------------------

/// Every zero's real part must land inside the computed set (the containment
/// direction of the dominance characterization holds unconditionally, so a
/// violation beyond root_tol is a genuine defect in one of the two pipelines).
struct CrosscheckReport {
  RSetResult rset;
  ZeroSearch search;
  bool sound = true;
  double max_distance = 0.0;
  std::vector<std::pair<Complex, double>> violations;  // zero and its distance
  std::vector<std::size_t> zeros_per_interval;
  std::vector<std::string> notes;
};

inline CrosscheckReport crosscheck_rset(const ExponentialSum& f, const VerticalStrip& strip,
                                        double t_max, const Tolerances& tol,
                                        std::size_t max_evaluations = 40'000'000) {
  require_valid(tol);
  if (!strip.finite())
    throw ValidationError("crosscheck_rset: a finite strip is required");
  if (!(t_max > 0)) throw ValidationError("crosscheck_rset: t_max must be positive");

  CrosscheckReport out;
  out.rset = rset::compute_rset(f, strip, tol);
  out.search =
      locate_zeros(f, {strip.alpha, strip.beta, 0.0, t_max}, tol, max_evaluations);
  out.zeros_per_interval.assign(out.rset.intervals.size(), 0);

  for (const ZeroRecord& zr : out.search.zeros) {
    const double d = rset_distance(out.rset, zr.z.real());
    out.max_distance = std::max(out.max_distance, d);
    if (d > tol.root_tol) {
      out.sound = false;
      out.violations.emplace_back(zr.z, d);
    }
    for (std::size_t i = 0; i < out.rset.intervals.size(); ++i) {
      const Interval& iv = out.rset.intervals[i];
      if (zr.z.real() >= iv.lo - tol.root_tol && zr.z.real() <= iv.hi + tol.root_tol) {
        out.zeros_per_interval[i] += static_cast<std::size_t>(zr.multiplicity);
        break;
      }
    }
  }
  if (!out.search.complete)
    out.notes.push_back("zero search incomplete: the comparison covers the zeros found");
  for (std::size_t i = 0; i < out.zeros_per_interval.size(); ++i) {
    if (out.zeros_per_interval[i] == 0)
      out.notes.push_back("interval " + std::to_string(i) +
                          " collected no zeros up to t_max (ordinates may simply lie higher)");
  }
  if (f.tail)
    out.notes.push_back(
        "zeros are zeros of the truncated sum; the tail may move them by O(epsilon)");
  return out;
}

}  // namespace apz::zerofind
