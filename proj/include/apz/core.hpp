#pragma once

/// @file core.hpp
/// Value types for exponential sums f(s) = sum_j a_j e^(lambda_j s) on a
/// vertical strip, tolerance knobs, and the result types for the real
/// projection set R of the zero set. validate_sum() is the single entry point
/// that establishes every representation invariant the numeric modules rely on.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rational.hpp"

namespace apz {

using Complex = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

/// Raised when an input violates a representation invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a computation leaves double range (overflow is reported, never
/// silently saturated).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Named real number g_k used as a coordinate axis for exponents.
struct BasisSymbol {
  std::string name;
  double value = 0.0;
};

/// One term a e^(lambda s). `coords` (when present) expresses lambda exactly
/// over the declared basis symbols as rationals: lambda = sum_k coords[k]*g_k.
struct Term {
  Complex coeff{0.0, 0.0};
  double exponent = 0.0;
  std::optional<RationalVector> coords;
};

/// Open vertical strip alpha < Re s < beta; either side may be infinite.
struct VerticalStrip {
  double alpha = -kInf;
  double beta = kInf;

  bool contains(double sigma) const { return sigma > alpha && sigma < beta; }
  bool finite() const { return std::isfinite(alpha) && std::isfinite(beta); }
};

/// Certified bound on the moduli of omitted terms of a truncated series:
/// sum over omitted j of |a_j| e^(lambda_j sigma) <= epsilon for all sigma in
/// valid_on.
struct TailBound {
  double epsilon = 0.0;
  VerticalStrip valid_on;
};

/// How much is known about rational independence of the nonzero exponents.
enum class Independence {
  None,          // nothing declared, no coordinates
  DeclaredOnly,  // declared by the input, no exact coordinates to check
  Verified,      // exact coordinates present and full rank over Q
  Dependent,     // exact coordinates present and rank-deficient
};

inline const char* to_string(Independence s) {
  switch (s) {
    case Independence::None: return "none";
    case Independence::DeclaredOnly: return "declared-only";
    case Independence::Verified: return "verified";
    case Independence::Dependent: return "dependent";
  }
  return "?";
}

/// A validated exponential sum. Construct via validate_sum(); afterwards the
/// terms are sorted by strictly increasing exponent, coefficients are nonzero,
/// coordinate vectors (if any) are consistent, and `independence` is set.
struct ExponentialSum {
  std::vector<Term> terms;
  std::vector<BasisSymbol> basis_symbols;
  bool independence_declared = false;
  std::optional<TailBound> tail;
  Independence independence = Independence::None;

  std::size_t size() const { return terms.size(); }
  double tail_epsilon() const { return tail ? tail->epsilon : 0.0; }
  bool has_coords() const { return !terms.empty() && terms.front().coords.has_value(); }

  /// log |a_j| + lambda_j * sigma; finite for every representable sigma.
  double log_modulus(std::size_t j, double sigma) const {
    const Term& t = terms[j];
    return std::log(std::abs(t.coeff)) + t.exponent * sigma;
  }
};

/// Tolerance knobs shared by all numeric operations.
struct Tolerances {
  double root_tol = 1e-9;     // width of isolating brackets / box sides
  double cert_margin = 1e-12; // relative margin for certified sign decisions
  int phase_grid = 512;       // samples per torus coordinate sweep
  double scan_step = 0.0;     // vertical-line scan step; 0 = adaptive
};

inline void require_valid(const Tolerances& tol) {
  if (!(tol.root_tol > 0) || !std::isfinite(tol.root_tol))
    throw ValidationError("root_tol must be positive and finite");
  if (!(tol.cert_margin > 0) || !std::isfinite(tol.cert_margin))
    throw ValidationError("cert_margin must be positive and finite");
  if (tol.phase_grid < 8) throw ValidationError("phase_grid must be at least 8");
  if (tol.scan_step < 0 || !std::isfinite(tol.scan_step))
    throw ValidationError("scan_step must be >= 0 (0 selects the adaptive step)");
}

/// How an interval of the projection set ends.
enum class EndpointKind {
  Boundary,   // closed endpoint produced by a dominance equality
  StripEdge,  // the interval runs into the strip edge (open end)
};

/// One maximal interval of the computed projection set, closed at Boundary
/// endpoints. `*_attribution` is the 0-based index (into the sorted term list)
/// of the term whose dominance inequality produces that endpoint.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  EndpointKind lo_kind = EndpointKind::Boundary;
  EndpointKind hi_kind = EndpointKind::Boundary;
  std::optional<int> lo_attribution;
  std::optional<int> hi_attribution;

  double width() const { return hi - lo; }
};

/// The projection set restricted to the open working strip, as a finite union
/// of intervals sorted by position, plus certification metadata. For the empty
/// set, a_f/b_f keep the inf/sup-of-empty-set conventions (+inf / -inf).
struct RSetResult {
  std::vector<Interval> intervals;
  double a_f = kInf;
  double b_f = -kInf;
  bool certified = false;
  std::vector<Interval> uncertified_regions;
  std::vector<std::string> caveats;

  bool empty() const { return intervals.empty(); }
};

/// Distance from sigma to the computed set (0 when inside an interval).
inline double rset_distance(const RSetResult& r, double sigma) {
  double best = kInf;
  for (const Interval& iv : r.intervals) {
    if (sigma >= iv.lo && sigma <= iv.hi) return 0.0;
    best = std::min(best, std::min(std::abs(sigma - iv.lo), std::abs(sigma - iv.hi)));
  }
  return best;
}

namespace detail {

inline bool all_zero(const RationalVector& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
}

}  // namespace detail

/// Validates and normalizes a sum description:
///  - coefficients nonzero and finite, exponents finite;
///  - terms sorted by strictly increasing exponent (duplicates rejected);
///  - coordinate vectors all-or-none, sized to the declared basis, and
///    consistent with the zero exponent (coords == 0 iff exponent == 0);
///  - `independence` classified, using the exact rank of the nonzero-exponent
///    coordinate rows when coordinates are present. A declared independence
///    that the exact check refutes is an error.
/// Idempotent: validating a validated sum returns an identical value.
inline ExponentialSum validate_sum(ExponentialSum raw) {
  if (raw.terms.empty()) throw ValidationError("sum has no terms");
  for (const Term& t : raw.terms) {
    if (!std::isfinite(t.coeff.real()) || !std::isfinite(t.coeff.imag()))
      throw ValidationError("coefficient must be finite");
    if (std::abs(t.coeff) == 0.0) throw ValidationError("zero coefficient");
    if (!std::isfinite(t.exponent)) throw ValidationError("exponent must be finite");
  }

  std::stable_sort(raw.terms.begin(), raw.terms.end(),
                   [](const Term& a, const Term& b) { return a.exponent < b.exponent; });
  for (std::size_t j = 1; j < raw.terms.size(); ++j) {
    if (raw.terms[j].exponent == raw.terms[j - 1].exponent)
      throw ValidationError("duplicate exponent " + std::to_string(raw.terms[j].exponent));
  }

  // Basis symbols: unique nonempty names, finite values.
  for (std::size_t k = 0; k < raw.basis_symbols.size(); ++k) {
    const BasisSymbol& g = raw.basis_symbols[k];
    if (g.name.empty()) throw ValidationError("basis symbol with empty name");
    if (!std::isfinite(g.value)) throw ValidationError("basis symbol value must be finite");
    for (std::size_t l = 0; l < k; ++l)
      if (raw.basis_symbols[l].name == g.name)
        throw ValidationError("duplicate basis symbol \"" + g.name + "\"");
  }

  const std::size_t with_coords =
      static_cast<std::size_t>(std::count_if(raw.terms.begin(), raw.terms.end(),
                                             [](const Term& t) { return t.coords.has_value(); }));
  if (with_coords != 0 && with_coords != raw.terms.size())
    throw ValidationError("coordinates must be given for all terms or for none");
  if (with_coords != 0 && raw.basis_symbols.empty())
    throw ValidationError("coordinates given but no basis symbols declared");

  if (with_coords != 0) {
    std::vector<RationalVector> nonzero_rows;
    for (const Term& t : raw.terms) {
      if (t.coords->size() != raw.basis_symbols.size())
        throw ValidationError("coordinate vector size does not match basis symbol count");
      const bool zero_vec = detail::all_zero(*t.coords);
      if (zero_vec != (t.exponent == 0.0))
        throw ValidationError("coordinates must be all zero exactly for the zero exponent");
      if (!zero_vec) nonzero_rows.push_back(*t.coords);
    }
    const RankResult rank = rational_rank(nonzero_rows);
    if (rank.dependence.empty()) {
      raw.independence = Independence::Verified;
    } else if (raw.independence_declared) {
      std::string cert;
      for (const Rational& q : rank.dependence) cert += format_rational(q) + " ";
      throw ValidationError("declared independence contradicted by exact rank check; "
                            "dependence certificate: " + cert);
    } else {
      raw.independence = Independence::Dependent;
    }
  } else {
    raw.independence =
        raw.independence_declared ? Independence::DeclaredOnly : Independence::None;
  }

  if (raw.tail) {
    if (!(raw.tail->epsilon >= 0) || !std::isfinite(raw.tail->epsilon))
      throw ValidationError("tail epsilon must be finite and >= 0");
    if (!(raw.tail->valid_on.alpha < raw.tail->valid_on.beta))
      throw ValidationError("tail validity strip must be nonempty");
    if (raw.tail->epsilon == 0.0) raw.tail.reset();  // a zero bound carries no information
  }

  return raw;
}

}  // namespace apz
