#pragma once

/// @file rational.hpp
/// Exact rational arithmetic helpers: parsing/formatting of "p/q" strings and
/// exact linear algebra over Q (rank, dependence certificates, span solves).
/// Used for exponent coordinate vectors, where floating point must never decide
/// independence questions.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace apz {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using RationalVector = std::vector<Rational>;

/// Parses "p/q" or a bare integer "p" into a canonical rational.
/// Throws std::invalid_argument on malformed input or zero denominator.
inline Rational parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  const std::string num_text = slash == std::string::npos ? text : text.substr(0, slash);
  const std::string den_text =
      slash == std::string::npos ? std::string("1") : text.substr(slash + 1);
  // cpp_int accepts the empty string as 0, so screen it out explicitly.
  if (num_text.empty() || den_text.empty())
    throw std::invalid_argument("malformed rational: \"" + text + "\"");
  try {
    BigInt num(num_text);
    BigInt den(den_text);
    if (den == 0) throw std::invalid_argument("rational with zero denominator: " + text);
    if (den < 0) {  // cpp_rational requires a positive denominator
      den = -den;
      num = -num;
    }
    return Rational(num, den);
  } catch (const std::runtime_error&) {
    throw std::invalid_argument("malformed rational: \"" + text + "\"");
  }
}

/// Canonical "p/q" form: reduced, denominator positive, e.g. "-1/2", "3/1", "0/1".
inline std::string format_rational(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

/// Scales a rational vector to a primitive integer vector whose first nonzero
/// entry is positive. Identity on the zero vector.
inline RationalVector primitive_integer_form(RationalVector v) {
  BigInt lcm_den = 1;
  for (const auto& q : v) lcm_den = boost::multiprecision::lcm(lcm_den, denominator(q));
  BigInt gcd_num = 0;
  for (auto& q : v) {
    q *= lcm_den;  // now integral
    gcd_num = boost::multiprecision::gcd(gcd_num, numerator(q));
  }
  if (gcd_num == 0) return v;
  int sign = 0;
  for (const auto& q : v) {
    if (q != 0) {
      sign = q > 0 ? 1 : -1;
      break;
    }
  }
  for (auto& q : v) q /= (sign < 0 ? -gcd_num : gcd_num);
  return v;
}

/// Exact rank of a family of rational row vectors.
/// When the family is dependent, `dependence` holds a nonzero primitive integer
/// combination q (first nonzero entry positive) with sum_i q_i * rows[i] = 0 —
/// the first such relation met when scanning rows in order.
struct RankResult {
  int rank = 0;
  RationalVector dependence;  // empty iff the family is independent
};

namespace detail {

struct EchelonRow {
  RationalVector vec;    // reduced row, leading entry at column `pivot`
  RationalVector combo;  // expression of `vec` over the original rows
  std::size_t pivot = 0;
};

// Reduces `vec` (with bookkeeping row `combo`) against the echelon rows.
inline void reduce_against(std::vector<EchelonRow>& ech, RationalVector& vec,
                           RationalVector& combo) {
  for (const auto& row : ech) {
    const Rational& lead = vec[row.pivot];
    if (lead == 0) continue;
    const Rational factor = lead / row.vec[row.pivot];
    for (std::size_t c = 0; c < vec.size(); ++c) vec[c] -= factor * row.vec[c];
    for (std::size_t c = 0; c < combo.size(); ++c) combo[c] -= factor * row.combo[c];
  }
}

inline std::optional<std::size_t> first_nonzero(const RationalVector& v) {
  for (std::size_t c = 0; c < v.size(); ++c)
    if (v[c] != 0) return c;
  return std::nullopt;
}

}  // namespace detail

inline RankResult rational_rank(const std::vector<RationalVector>& rows) {
  RankResult out;
  if (rows.empty()) return out;
  const std::size_t width = rows.front().size();
  std::vector<detail::EchelonRow> ech;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) throw std::invalid_argument("ragged coordinate matrix");
    RationalVector vec = rows[i];
    RationalVector combo(rows.size(), Rational(0));
    combo[i] = 1;
    detail::reduce_against(ech, vec, combo);
    if (auto pivot = detail::first_nonzero(vec)) {
      ech.push_back({std::move(vec), std::move(combo), *pivot});
    } else if (out.dependence.empty()) {
      out.dependence = primitive_integer_form(std::move(combo));
    }
  }
  out.rank = static_cast<int>(ech.size());
  return out;
}

/// Solves sum_i x_i * basis[i] = target exactly. The basis rows must be
/// linearly independent. Returns nullopt when target is outside the span.
inline std::optional<RationalVector> solve_in_span(const std::vector<RationalVector>& basis,
                                                   const RationalVector& target) {
  std::vector<detail::EchelonRow> ech;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    RationalVector vec = basis[i];
    RationalVector combo(basis.size(), Rational(0));
    combo[i] = 1;
    detail::reduce_against(ech, vec, combo);
    const auto pivot = detail::first_nonzero(vec);
    if (!pivot) throw std::invalid_argument("solve_in_span: dependent basis rows");
    ech.push_back({std::move(vec), std::move(combo), *pivot});
  }
  RationalVector rem = target;
  RationalVector coeffs(basis.size(), Rational(0));
  for (const auto& row : ech) {
    const Rational& lead = rem[row.pivot];
    if (lead == 0) continue;
    const Rational factor = lead / row.vec[row.pivot];
    for (std::size_t c = 0; c < rem.size(); ++c) rem[c] -= factor * row.vec[c];
    for (std::size_t c = 0; c < coeffs.size(); ++c) coeffs[c] += factor * row.combo[c];
  }
  if (detail::first_nonzero(rem)) return std::nullopt;
  return coeffs;
}

}  // namespace apz
