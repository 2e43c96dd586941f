#pragma once

// Shared test inputs: the bundled data files and a reproducible generator of
// random exponential sums matching the shape the library is specified for.

#include <algorithm>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "apz/core.hpp"
#include "apz/docfile.hpp"

#ifndef APZ_DATA_DIR
#error "APZ_DATA_DIR must point at the bundled data directory"
#endif

namespace corpus {

inline apz::docfile::SumDocument load(const std::string& name) {
  return apz::docfile::load(std::string(APZ_DATA_DIR) + "/" + name);
}

inline const std::vector<std::string>& data_files() {
  static const std::vector<std::string> files = {
      "zeta3-primes.json",
      "zeta4-dependent.json",
      "two-term.json",
      "dominated-strip.json",
  };
  return files;
}

inline apz::VerticalStrip wide_strip() { return {-3.0, 3.0}; }

/// Random sum with term count in [n_min, n_max], moduli in [0.1, 10], free
/// phases, and strictly increasing exponents in (-3, 3). Generic real draws
/// carry no rational relations, so independence is declared. A minimum
/// exponent gap keeps the draws away from the measure-zero degeneracies the
/// generator is not meant to probe.
inline apz::ExponentialSum random_sum(std::mt19937_64& rng, int n_min, int n_max) {
  std::uniform_int_distribution<int> count(n_min, n_max);
  std::uniform_real_distribution<double> modulus(0.1, 10.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * 3.14159265358979323846);
  std::uniform_real_distribution<double> expo(-3.0, 3.0);
  const int n = count(rng);
  for (;;) {
    std::vector<double> lambda(static_cast<std::size_t>(n));
    for (double& l : lambda) l = expo(rng);
    std::sort(lambda.begin(), lambda.end());
    bool spaced = true;
    for (int i = 1; i < n; ++i)
      if (lambda[static_cast<std::size_t>(i)] - lambda[static_cast<std::size_t>(i - 1)] < 1e-3)
        spaced = false;
    if (!spaced) continue;
    apz::ExponentialSum f;
    for (int i = 0; i < n; ++i) {
      apz::Term t;
      t.coeff = std::polar(modulus(rng), phase(rng));
      t.exponent = lambda[static_cast<std::size_t>(i)];
      f.terms.push_back(t);
    }
    f.independence_declared = true;
    return apz::validate_sum(f);
  }
}

}  // namespace corpus
