#pragma once

/// @file basis.hpp
/// Natural basis extraction for exponent sets with declared exact coordinates:
/// greedy scan over the terms, exact rational elimination, dependence
/// certificates, and integrality of the resulting representation.

#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "rational.hpp"

namespace apz::basis {

/// Verdict of the exact Q-linear independence check.
struct IndependenceCheck {
  bool independent = false;
  /// For a dependent family: nonzero primitive integer q with
  /// sum_i q_i * vectors[i] = 0 (first nonzero entry positive).
  RationalVector certificate;
};

/// Exact rank test over Q of the given coordinate vectors, in order.
inline IndependenceCheck check_rational_independence(const std::vector<RationalVector>& vectors) {
  const RankResult r = rational_rank(vectors);
  return {r.dependence.empty(), r.dependence};
}

/// Result of the greedy natural-basis scan. `matrix` has one row per input
/// term giving its exact expansion over the chosen basis elements, so rows at
/// `basis_indices` form the identity pattern in order. A zero exponent gets an
/// all-zero row and never joins the basis.
struct BasisRepresentation {
  std::vector<int> basis_indices;             // 0-based indices of chosen terms
  std::vector<RationalVector> matrix;         // terms x chosen-basis expansion
  bool integral = false;                      // all entries have denominator 1
};

/// True when every expansion coefficient is an integer.
inline bool is_integral(const BasisRepresentation& rep) {
  for (const auto& row : rep.matrix)
    for (const auto& q : row)
      if (denominator(q) != 1) return false;
  return true;
}

/// Greedy natural-basis construction: scan terms in order, adding a term's
/// exponent to the basis iff its coordinate vector is independent of the
/// vectors already chosen. Requires one coordinate vector per exponent.
/// Throws ValidationError for a zero coordinate vector on a nonzero exponent
/// (and vice versa: a zero exponent must have the zero vector).
inline BasisRepresentation natural_basis(const std::vector<RationalVector>& coords,
                                         const std::vector<double>& exponents) {
  if (coords.size() != exponents.size())
    throw ValidationError("natural_basis: one coordinate vector per exponent required");
  BasisRepresentation rep;
  std::vector<RationalVector> chosen;
  for (std::size_t j = 0; j < coords.size(); ++j) {
    const bool zero_vec = detail::all_zero(coords[j]);
    if (zero_vec != (exponents[j] == 0.0)) {
      throw ValidationError(zero_vec
                                ? "zero coordinate vector for a term whose exponent is nonzero"
                                : "nonzero coordinate vector declared for the zero exponent");
    }
    if (zero_vec) continue;
    std::vector<RationalVector> trial = chosen;
    trial.push_back(coords[j]);
    if (rational_rank(trial).dependence.empty()) {
      chosen.push_back(coords[j]);
      rep.basis_indices.push_back(static_cast<int>(j));
    }
  }
  rep.matrix.reserve(coords.size());
  for (std::size_t j = 0; j < coords.size(); ++j) {
    if (detail::all_zero(coords[j])) {
      rep.matrix.emplace_back(chosen.size(), Rational(0));
      continue;
    }
    auto row = solve_in_span(chosen, coords[j]);
    if (!row)  // cannot happen: the greedy scan added anything outside the span
      throw ValidationError("natural_basis: internal span failure");
    rep.matrix.push_back(std::move(*row));
  }
  rep.integral = is_integral(rep);
  return rep;
}

/// Natural basis of a validated sum. With exact coordinates present this is
/// the greedy scan above. Without coordinates, a sum whose independence is
/// declared gets the representation that declaration means: every nonzero
/// exponent is its own basis element (unit-vector rows, integral).
/// Returns nullopt when no representation is justified (nothing declared).
inline std::optional<BasisRepresentation> representation(const ExponentialSum& f) {
  if (f.has_coords()) {
    std::vector<RationalVector> coords;
    std::vector<double> exponents;
    coords.reserve(f.size());
    for (const Term& t : f.terms) {
      coords.push_back(*t.coords);
      exponents.push_back(t.exponent);
    }
    return natural_basis(coords, exponents);
  }
  if (!f.independence_declared) return std::nullopt;
  BasisRepresentation rep;
  std::size_t width = 0;
  for (const Term& t : f.terms)
    if (t.exponent != 0.0) ++width;
  std::size_t slot = 0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    RationalVector row(width, Rational(0));
    if (f.terms[j].exponent != 0.0) {
      row[slot] = 1;
      rep.basis_indices.push_back(static_cast<int>(j));
      ++slot;
    }
    rep.matrix.push_back(std::move(row));
  }
  rep.integral = true;
  return rep;
}

}  // namespace apz::basis
