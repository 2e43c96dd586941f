// Acceptance gate: one line per criterion, PASS or FAIL, with the measured
// evidence. Exits nonzero when any criterion fails. Oracles come from
// oracles.hpp and are independent of the library internals.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "apz/probe.hpp"
#include "apz/rset.hpp"
#include "apz/zerofind.hpp"
#include "corpus.hpp"
#include "oracles.hpp"

using namespace apz;

namespace {

int g_failures = 0;

struct Line {
  int id;
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
  void emit() const {
    std::printf("CRITERION %d: %s — %s\n", id, pass ? "PASS" : "FAIL",
                detail.empty() ? "ok" : detail.c_str());
    if (!pass) ++g_failures;
  }
};

double seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct TimeBudget {
  Line& line;
  double budget;
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  ~TimeBudget() {
    const double dt = seconds(t0);
    line.note(fmt(dt) + " s (budget " + fmt(budget) + " s)");
    if (dt > budget) line.fail("over time budget");
  }
};

const std::vector<ExponentialSum>& random_corpus() {
  static const std::vector<ExponentialSum> sums = [] {
    std::mt19937_64 rng(0xA5EEDULL);
    std::vector<ExponentialSum> out;
    out.reserve(200);
    for (int i = 0; i < 200; ++i) out.push_back(corpus::random_sum(rng, 3, 8));
    return out;
  }();
  return sums;
}

double b_mid(const ExponentialSum& f, int j, double sigma) {
  const rset::BValue b = rset::b_value(f, j, sigma);
  return 0.5 * (b.lo + b.hi);
}

// --- 1: endpoints of the three-term model sum against independent roots ----
void criterion1() {
  Line line{1};
  {
    TimeBudget tb{line, 1.0};
    const auto loaded = corpus::load("zeta3-primes.json");
    const RSetResult r = rset::compute_rset(loaded.sum, loaded.strip, Tolerances{});
    if (r.intervals.size() != 1) line.fail("expected one interval, got " +
                                           std::to_string(r.intervals.size()));
    if (!r.certified) line.fail("not certified");
    if (!r.intervals.empty()) {
      const double oracle_right = oracles::dominance_root_23();
      if (std::abs(oracle_right - oracles::kDominanceRoot23) > 1e-12)
        line.fail("oracle drifted from its frozen value");
      const double dl = std::abs(r.intervals[0].lo - oracles::kLeftEndpoint23);
      const double dr = std::abs(r.intervals[0].hi - oracle_right);
      line.note("left off by " + fmt(dl) + ", right off by " + fmt(dr));
      if (dl > 1e-12) line.fail("left endpoint misses -1 beyond 1e-12");
      if (dr > 1e-9) line.fail("right endpoint misses the bisection root beyond 1e-9");
    }
  }
  line.emit();
}

// --- 2: boundary endpoints carry exactly one dominance equality ------------
void criterion2() {
  Line line{2};
  {
    TimeBudget tb{line, 30.0};
    const Tolerances tol;
    const auto loaded = corpus::load("zeta3-primes.json");
    const rset::BoundaryClass left = rset::classify_boundary(loaded.sum, -1.0, tol);
    const rset::BoundaryClass right =
        rset::classify_boundary(loaded.sum, oracles::kDominanceRoot23, tol);
    if (left.kind != rset::PointKind::Boundary || left.equality_index != 0)
      line.fail("left model endpoint not attributed to term 0");
    if (right.kind != rset::PointKind::Boundary || right.equality_index != 2)
      line.fail("right model endpoint not attributed to term 2");

    std::size_t endpoints = 0;
    const VerticalStrip strip = corpus::wide_strip();
    for (std::size_t i = 0; i < random_corpus().size() && line.pass; ++i) {
      const ExponentialSum& f = random_corpus()[i];
      const RSetResult r = rset::compute_rset(f, strip, tol);
      for (const Interval& iv : r.intervals) {
        for (int side = 0; side < 2; ++side) {
          const bool is_boundary =
              (side == 0 ? iv.lo_kind : iv.hi_kind) == EndpointKind::Boundary;
          const double sigma = side == 0 ? iv.lo : iv.hi;
          const auto attr = side == 0 ? iv.lo_attribution : iv.hi_attribution;
          if (!is_boundary || !std::isfinite(sigma)) continue;
          ++endpoints;
          int small = 0, small_idx = -1;
          for (std::size_t j = 0; j < f.size(); ++j) {
            if (std::abs(b_mid(f, static_cast<int>(j), sigma)) <= 1e-9) {
              ++small;
              small_idx = static_cast<int>(j);
            }
          }
          if (small != 1) {
            line.fail("sum " + std::to_string(i) + ": " + std::to_string(small) +
                      " near-zero dominance values at sigma = " + fmt(sigma));
          } else if (!attr || *attr != small_idx) {
            line.fail("sum " + std::to_string(i) + ": attribution disagrees at sigma = " +
                      fmt(sigma));
          }
        }
      }
    }
    line.note(std::to_string(endpoints) + " random endpoints checked, 200 sums");
  }
  line.emit();
}

// --- 3: each dominance function crosses zero at most twice and is convex ---
void criterion3() {
  Line line{3};
  {
    const Tolerances tol;
    const VerticalStrip strip = corpus::wide_strip();
    std::size_t checked = 0;
    for (std::size_t i = 0; i < random_corpus().size() && line.pass; ++i) {
      const ExponentialSum& f = random_corpus()[i];
      for (std::size_t j = 0; j < f.size() && line.pass; ++j) {
        const rset::BRoots br = rset::b_roots(f, static_cast<int>(j), strip, tol);
        if (br.roots.size() > 2)
          line.fail("sum " + std::to_string(i) + " term " + std::to_string(j) + " has " +
                    std::to_string(br.roots.size()) + " roots");
        // Finite-difference convexity on an even grid of 1000 points.
        const int n = 1000;
        std::vector<double> b(static_cast<std::size_t>(n));
        const double lo = strip.alpha + 1e-6, hi = strip.beta - 1e-6;
        for (int k = 0; k < n; ++k)
          b[static_cast<std::size_t>(k)] =
              b_mid(f, static_cast<int>(j), lo + (hi - lo) * k / (n - 1));
        for (int k = 1; k + 1 < n; ++k) {
          const double second = b[static_cast<std::size_t>(k - 1)] +
                                b[static_cast<std::size_t>(k + 1)] -
                                2.0 * b[static_cast<std::size_t>(k)];
          const double scale = std::max(
              {1.0, std::abs(b[static_cast<std::size_t>(k - 1)]),
               std::abs(b[static_cast<std::size_t>(k)]),
               std::abs(b[static_cast<std::size_t>(k + 1)])});
          if (second < -1e-7 * scale) {
            line.fail("sum " + std::to_string(i) + " term " + std::to_string(j) +
                      ": convexity violated at grid point " + std::to_string(k));
            break;
          }
        }
        ++checked;
      }
    }
    line.note(std::to_string(checked) + " dominance functions, 1000-point grids");
  }
  line.emit();
}

// --- 4: intervals are never degenerate slivers -----------------------------
void criterion4() {
  Line line{4};
  {
    const Tolerances tol;
    const VerticalStrip strip = corpus::wide_strip();
    std::size_t intervals = 0;
    double min_width = kInf;
    for (const ExponentialSum& f : random_corpus()) {
      const RSetResult r = rset::compute_rset(f, strip, tol);
      for (const Interval& iv : r.intervals) {
        ++intervals;
        min_width = std::min(min_width, iv.width());
        if (!(iv.width() > 10.0 * tol.root_tol)) {
          line.fail("interval of width " + fmt(iv.width()) + " at sigma = " + fmt(iv.lo));
          break;
        }
      }
    }
    line.note(std::to_string(intervals) + " intervals, narrowest " + fmt(min_width));
  }
  line.emit();
}

// --- 5: interior gaps have a unique dominant term with bracketing roots ----
void criterion5() {
  Line line{5};
  {
    const Tolerances tol;
    const VerticalStrip strip = corpus::wide_strip();
    std::size_t gaps = 0;
    for (std::size_t i = 0; i < random_corpus().size() && line.pass; ++i) {
      const ExponentialSum& f = random_corpus()[i];

      std::vector<rset::BRoots> all;
      for (std::size_t j = 0; j < f.size(); ++j)
        all.push_back(rset::b_roots(f, static_cast<int>(j), strip, tol));

      // Certified negative intervals must be pairwise disjoint.
      std::vector<std::pair<double, double>> negs;
      for (const auto& br : all)
        if (br.negative_interval) negs.push_back(*br.negative_interval);
      std::sort(negs.begin(), negs.end());
      for (std::size_t k = 1; k < negs.size(); ++k)
        if (negs[k].first < negs[k - 1].second)
          line.fail("sum " + std::to_string(i) + ": overlapping dominance gaps");

      const RSetResult r = rset::compute_rset(f, strip, tol);
      for (std::size_t k = 1; k < r.intervals.size(); ++k) {
        const double glo = r.intervals[k - 1].hi;
        const double ghi = r.intervals[k].lo;
        ++gaps;
        int owners = 0, owner = -1;
        for (std::size_t j = 0; j < all.size(); ++j) {
          const auto& ni = all[j].negative_interval;
          if (ni && ni->first <= glo + tol.root_tol && ni->second >= ghi - tol.root_tol) {
            ++owners;
            owner = static_cast<int>(j);
          }
        }
        if (owners != 1) {
          line.fail("sum " + std::to_string(i) + ": gap claimed by " + std::to_string(owners) +
                    " terms");
          continue;
        }
        const auto& roots = all[static_cast<std::size_t>(owner)].roots;
        bool left_root = false, right_root = false;
        for (double x : roots) {
          if (std::abs(x - glo) <= 2.0 * tol.root_tol) left_root = true;
          if (std::abs(x - ghi) <= 2.0 * tol.root_tol) right_root = true;
        }
        if (roots.size() != 2 || !left_root || !right_root)
          line.fail("sum " + std::to_string(i) + ": gap not bracketed by two roots of term " +
                    std::to_string(owner));
      }
    }
    line.note(std::to_string(gaps) + " interior gaps across 200 sums");
    if (gaps == 0) line.fail("corpus produced no interior gap to examine");
  }
  line.emit();
}

// --- 6: every sum with zeros yields a checkable witness ---------------------
void criterion6() {
  Line line{6};
  {
    const Tolerances tol;
    std::size_t witnesses = 0;

    auto check_witness = [&](const ExponentialSum& f, const std::string& tag) {
      const rset::NonemptyCheck c = rset::check_nonempty_entire(f, tol);
      if (!c.witness) {
        line.fail(tag + ": no witness produced");
        return;
      }
      ++witnesses;
      for (std::size_t j = 0; j < f.size(); ++j)
        if (rset::b_value(f, static_cast<int>(j), *c.witness).hi < -1e-9) {
          line.fail(tag + ": witness violates dominance bound for term " + std::to_string(j));
          break;
        }
    };

    check_witness(corpus::load("zeta3-primes.json").sum, "model sum");
    check_witness(corpus::load("zeta4-dependent.json").sum, "dependent sum");
    check_witness(corpus::load("two-term.json").sum, "two-term sum");
    for (std::size_t i = 0; i < random_corpus().size() && line.pass; ++i)
      check_witness(random_corpus()[i], "sum " + std::to_string(i));

    // The truncated series has no zeros on its strip and must say so
    // rather than invent a witness inside it.
    const auto dom = corpus::load("dominated-strip.json");
    const rset::NonemptyCheck c = rset::check_nonempty_entire(dom.sum, tol);
    if (c.guaranteed) line.fail("truncated series wrongly guaranteed nonempty");

    line.note(std::to_string(witnesses) + " witnesses checked against every dominance bound");
  }
  line.emit();
}

// --- 7: the dominated truncated series certifies an empty set --------------
void criterion7() {
  Line line{7};
  {
    TimeBudget tb{line, 5.0};
    const auto loaded = corpus::load("dominated-strip.json");
    const RSetResult r = rset::compute_rset(loaded.sum, loaded.strip, Tolerances{});
    if (!r.empty()) line.fail("set not empty");
    if (!r.certified) line.fail("emptiness not certified");

    int dominant = -1;
    for (std::size_t j = 0; j < loaded.sum.size(); ++j)
      if (loaded.sum.terms[j].exponent == 1.0) dominant = static_cast<int>(j);
    if (dominant < 0) {
      line.fail("dominating unit-exponent term not found");
    } else {
      for (int g = 0; g < 64; ++g) {
        const double sigma =
            loaded.strip.alpha + (loaded.strip.beta - loaded.strip.alpha) * (g + 0.5) / 64.0;
        if (!(rset::b_value(loaded.sum, dominant, sigma).hi < 0.0)) {
          line.fail("dominance of the unit term not certified at sigma = " + fmt(sigma));
          break;
        }
      }
    }
  }
  line.emit();
}

// --- 8: located zeros project into the dominance intervals -----------------
void criterion8() {
  Line line{8};
  {
    TimeBudget tb{line, 60.0};
    const Tolerances tol;
    std::vector<std::pair<std::string, ExponentialSum>> cases;
    cases.emplace_back("model sum", corpus::load("zeta3-primes.json").sum);
    std::mt19937_64 rng(0xC0FFEEULL);
    for (int i = 0; i < 10; ++i)
      cases.emplace_back("random " + std::to_string(i), corpus::random_sum(rng, 3, 5));

    std::size_t zeros = 0;
    double worst = 0.0;
    for (const auto& [tag, f] : cases) {
      const zerofind::CrosscheckReport cc =
          zerofind::crosscheck_rset(f, corpus::wide_strip(), 200.0, tol);
      if (!cc.search.complete) {
        line.fail(tag + ": search incomplete");
        break;
      }
      if (!cc.sound) {
        line.fail(tag + ": " + std::to_string(cc.violations.size()) +
                  " zeros project outside the set");
        break;
      }
      zeros += cc.search.zeros.size();
      worst = std::max(worst, cc.max_distance);
    }
    line.note(std::to_string(zeros) + " zeros over 11 sums, worst projection distance " +
              fmt(worst));
    if (worst > tol.root_tol) line.fail("projection distance exceeds root_tol");
  }
  line.emit();
}

// --- 9: the line distance matches an exhaustive torus search (3 terms) -----
void criterion9() {
  Line line{9};
  {
    std::vector<ExponentialSum> cases;
    cases.push_back(corpus::load("zeta3-primes.json").sum);
    std::mt19937_64 rng(0xBEEFULL);
    for (int i = 0; i < 4; ++i) cases.push_back(corpus::random_sum(rng, 3, 3));

    double worst = 0.0;
    for (std::size_t c = 0; c < cases.size() && line.pass; ++c) {
      const ExponentialSum& f = cases[c];
      for (int k = 0; k < 20; ++k) {
        const double sigma = -2.8 + 5.6 * k / 19.0;
        double m[3];
        for (int j = 0; j < 3; ++j)
          m[j] = std::abs(f.terms[static_cast<std::size_t>(j)].coeff) *
                 std::exp(f.terms[static_cast<std::size_t>(j)].exponent * sigma);
        const double oracle = oracles::torus_min_modulus3(m[0], m[1], m[2]);
        const double lib = rset::inf_modulus(f, sigma);
        const double diff = std::abs(oracle - lib);
        worst = std::max(worst, diff);
        if (diff > 1e-3) {
          line.fail("sum " + std::to_string(c) + " at sigma = " + fmt(sigma) +
                    ": |oracle - library| = " + fmt(diff));
          break;
        }
      }
    }
    line.note("5 sums x 20 lines, worst deviation " + fmt(worst));
  }
  line.emit();
}

// --- 10: invariances: shift, global rotation, exponential factor ----------
void criterion10() {
  Line line{10};
  {
    const Tolerances tol;
    const auto loaded = corpus::load("zeta3-primes.json");
    const RSetResult base = rset::compute_rset(loaded.sum, loaded.strip, tol);

    // Shift s -> s + c: the set translates by -c... seen from the original
    // coordinates, endpoints move by exactly -c.
    const double c = 0.37;
    ExponentialSum shifted = loaded.sum;
    for (Term& t : shifted.terms) t.coeff *= std::exp(t.exponent * c);
    shifted = validate_sum(shifted);
    const RSetResult rs = rset::compute_rset(
        shifted, {loaded.strip.alpha - c, loaded.strip.beta - c}, tol);
    if (rs.intervals.size() != 1 ||
        std::abs(rs.intervals[0].lo - (base.intervals[0].lo - c)) > 1e-12 ||
        std::abs(rs.intervals[0].hi - (base.intervals[0].hi - c)) > 1e-12)
      line.fail("shift moved endpoints by the wrong amount");

    // Global rotation of all coefficients: nothing changes.
    ExponentialSum rotated = loaded.sum;
    for (Term& t : rotated.terms) t.coeff *= std::polar(1.0, 1.1);
    rotated = validate_sum(rotated);
    const RSetResult rr = rset::compute_rset(rotated, loaded.strip, tol);
    if (rr.intervals.size() != 1 ||
        std::abs(rr.intervals[0].lo - base.intervals[0].lo) > 1e-12 ||
        std::abs(rr.intervals[0].hi - base.intervals[0].hi) > 1e-12)
      line.fail("global rotation moved the set");

    // Multiplying by e^{mu s} shifts every exponent; zeros are untouched.
    // The coordinate system gains one symbol for mu so it stays consistent.
    const double mu = 0.53;
    ExponentialSum scaled = loaded.sum;
    scaled.basis_symbols.push_back({"mu", mu});
    for (Term& t : scaled.terms) {
      t.exponent += mu;
      if (t.coords) t.coords->push_back(Rational(1));
    }
    scaled = validate_sum(scaled);
    const RSetResult rm = rset::compute_rset(scaled, loaded.strip, tol);
    if (rm.intervals.size() != 1 ||
        std::abs(rm.intervals[0].lo - base.intervals[0].lo) > 1e-12 ||
        std::abs(rm.intervals[0].hi - base.intervals[0].hi) > 1e-12)
      line.fail("exponential factor moved the set");

    const zerofind::Rectangle box{-1.4, 1.4, 0.5, 30.0};
    const int w0 = zerofind::winding_number(loaded.sum, box, tol).winding;
    const int w1 = zerofind::winding_number(scaled, box, tol).winding;
    line.note("winding " + std::to_string(w0) + " before and " + std::to_string(w1) +
              " after the factor");
    if (w0 != w1) line.fail("winding number not invariant under the factor");
    if (w0 <= 0) line.fail("test box unexpectedly holds no zeros");
  }
  line.emit();
}

// --- 11: winding numbers and the first explicit zeros ----------------------
void criterion11() {
  Line line{11};
  {
    const Tolerances tol;
    ExponentialSum e1;
    e1.terms.push_back({{-1.0, 0.0}, 0.0, std::nullopt});
    e1.terms.push_back({{1.0, 0.0}, 1.0, std::nullopt});
    e1 = validate_sum(e1);
    const int w_origin = zerofind::winding_number(e1, {-1.0, 1.0, -1.0, 1.0}, tol).winding;
    const int w_between = zerofind::winding_number(e1, {-1.0, 1.0, 1.0, 5.0}, tol).winding;
    const int w_2pi = zerofind::winding_number(e1, {-1.0, 1.0, 5.0, 7.0}, tol).winding;
    line.note("windings " + std::to_string(w_origin) + "/" + std::to_string(w_between) + "/" +
              std::to_string(w_2pi));
    if (w_origin != 1 || w_between != 0 || w_2pi != 1) line.fail("winding sequence wrong");

    const ExponentialSum two = corpus::load("two-term.json").sum;
    const zerofind::ZeroSearch s = zerofind::locate_zeros(two, {-1.0, 1.0, 3.0, 6.0}, tol);
    if (s.zeros.size() != 1) {
      line.fail("expected one zero of the two-term sum in the box");
    } else {
      const double dt = std::abs(s.zeros[0].z.imag() - oracles::kTwoTermZeroT);
      const double dr = std::abs(s.zeros[0].z.real());
      line.note("zero offset " + fmt(std::max(dt, dr)));
      if (dt > 1e-9 || dr > 1e-9) line.fail("zero misses pi/ln 2 beyond 1e-9");
    }
  }
  line.emit();
}

void run(int id, void (*fn)()) {
  try {
    fn();
  } catch (const std::exception& e) {
    Line line{id};
    line.fail(std::string("unhandled exception: ") + e.what());
    line.emit();
  }
}

}  // namespace

int main() {
  run(1, criterion1);
  run(2, criterion2);
  run(3, criterion3);
  run(4, criterion4);
  run(5, criterion5);
  run(6, criterion6);
  run(7, criterion7);
  run(8, criterion8);
  run(9, criterion9);
  run(10, criterion10);
  run(11, criterion11);
  if (g_failures == 0)
    std::printf("all 11 criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", g_failures);
  return g_failures;
}
