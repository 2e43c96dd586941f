#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "apz/probe.hpp"
#include "apz/rset.hpp"
#include "corpus.hpp"
#include "oracles.hpp"

using namespace apz;

TEST_CASE("direct and phase-parameterized evaluation agree bit for bit") {
  const ExponentialSum f = corpus::load("zeta3-primes.json").sum;
  for (double t : {0.0, 0.1, 3.7, 55.0, -12.25}) {
    for (double sigma : {-1.0, 0.0, 0.4, 2.5}) {
      std::vector<double> theta(f.size());
      for (std::size_t j = 0; j < f.size(); ++j) theta[j] = f.terms[j].exponent * t;
      const Complex a = probe::eval_aux(f, sigma, theta);
      const Complex b = probe::eval_f(f, {sigma, t});
      CHECK(a.real() == b.real());
      CHECK(a.imag() == b.imag());
    }
  }
}

TEST_CASE("evaluation rejects mis-sized phase vectors") {
  const ExponentialSum f = corpus::load("zeta3-primes.json").sum;
  CHECK_THROWS_AS(probe::eval_aux(f, 0.0, std::vector<double>{0.0}), ValidationError);
}

TEST_CASE("derivative evaluation matches a finite difference") {
  const ExponentialSum f = corpus::load("zeta3-primes.json").sum;
  const Complex s{0.3, 7.2};
  const double h = 1e-6;
  const Complex fd = (probe::eval_f(f, s + Complex{h, 0.0}) - probe::eval_f(f, s - Complex{h, 0.0})) /
                     Complex{2.0 * h, 0.0};
  const Complex d = probe::eval_df(f, s);
  CHECK(std::abs(d - fd) < 1e-7);
}

TEST_CASE("vertical line scan finds the lowest zero of a two-term sum") {
  const ExponentialSum f = corpus::load("two-term.json").sum;
  const probe::ScanResult r = probe::min_modulus_scan(f, 0.0, 3.0, 6.0, Tolerances{});
  CHECK(r.t == Catch::Approx(oracles::kTwoTermZeroT).margin(1e-9));
  CHECK(r.value < 1e-12);
  CHECK(r.samples > 0);

  // Off the critical line the scan can only confirm a positive floor.
  const probe::ScanResult off = probe::min_modulus_scan(f, 1.0, 0.0, 20.0, Tolerances{});
  CHECK(off.value >= 0.5 - 1e-9);  // |1 + 2^{-1-it}| >= 1 - 1/2
}

TEST_CASE("torus membership matches the dominance characterization") {
  const ExponentialSum f = corpus::load("zeta3-primes.json").sum;
  const Tolerances tol;

  for (double sigma : {0.0, 0.3, -0.5}) {
    const probe::TorusMembership m = probe::torus_membership(f, sigma, tol);
    CHECK(m.member);
    CHECK(m.relative_min <= 1e-8);
    // The reported phase assignment reproduces the residual it claims.
    const Complex v = probe::eval_aux(f, sigma, m.best.theta);
    CHECK(std::abs(v) == Catch::Approx(m.best.residual).margin(1e-12));
  }

  for (double sigma : {2.0, -2.0}) {
    const probe::TorusMembership m = probe::torus_membership(f, sigma, tol);
    CHECK_FALSE(m.member);
    // For verified-independent phases the true minimum is the distance bound.
    CHECK(m.min_modulus == Catch::Approx(rset::inf_modulus(f, sigma)).margin(1e-6));
  }
}

TEST_CASE("rational dependence restricts the phase torus") {
  // 1 + 2^{-s} + 3^{-s} + 4^{-s}: the phase of 4^{-s} is locked to twice the
  // phase of 2^{-s}. At sigma = 2 the locked minimum is 1 - 1/4 - 1/9 + 1/16
  // = 101/144, strictly above what unconstrained phases could reach.
  const ExponentialSum f = corpus::load("zeta4-dependent.json").sum;
  const Tolerances tol;

  const probe::TorusMembership outside = probe::torus_membership(f, 2.0, tol);
  CHECK_FALSE(outside.member);
  CHECK(outside.min_modulus == Catch::Approx(101.0 / 144.0).margin(1e-6));
  const double unconstrained = 2.0 - (1.0 + 1.0 / 4.0 + 1.0 / 9.0 + 1.0 / 16.0);
  CHECK(outside.min_modulus > unconstrained + 0.1);

  const probe::TorusMembership inside = probe::torus_membership(f, 0.0, tol);
  CHECK(inside.member);
  CHECK(inside.relative_min <= 1e-8);
}

TEST_CASE("membership probing needs phase structure") {
  // No coordinates and no independence declaration: the closure torus is
  // unknown, which is an input error, not a numeric one.
  const ExponentialSum f = corpus::load("two-term.json").sum;
  CHECK_THROWS_AS(probe::torus_membership(f, 0.0, Tolerances{}), ValidationError);
}
