#pragma once

/// @file commands.hpp
/// Command implementations behind the CLI: each takes a description-file path
/// plus options and writes deterministic JSON (or CSV) to the given stream.
/// Exit codes: 0 ok, 1 property violation (verify), 2 input error,
/// 3 uncertified result under --strict.
///
/// Output conventions: JSON objects have alphabetically ordered keys and
/// shortest-roundtrip numbers; +/-infinity is encoded as "inf"/"-inf" strings;
/// CSV uses "%.17g". Interval endpoint attributions are 0-based indices into
/// the validated (exponent-sorted) term list, null at a strip edge.

#include <array>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "basis.hpp"
#include "core.hpp"
#include "probe.hpp"
#include "rset.hpp"
#include "docfile.hpp"
#include "zerofind.hpp"

namespace apz::commands {

using nlohmann::json;

/// Options shared by the commands. `tol`, when set, drives both root_tol and
/// cert_margin (the CLI exposes a single accuracy knob).
struct CommonOptions {
  std::optional<double> tol;
  bool strict = false;
  std::optional<std::string> out;
};

inline Tolerances make_tolerances(const std::optional<double>& t) {
  Tolerances tol;
  if (t) {
    tol.root_tol = *t;
    tol.cert_margin = *t;
  }
  require_valid(tol);
  return tol;
}

namespace detail {

inline json json_real(double x) {
  if (x == kInf) return json("inf");
  if (x == -kInf) return json("-inf");
  return json(x);
}

inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline int write_output(const json& doc, const std::optional<std::string>& out_path,
                        std::ostream& fallback, std::ostream& err) {
  const std::string text = doc.dump(2) + "\n";
  if (out_path) {
    std::ofstream f(*out_path);
    if (!f) {
      err << "error: cannot write \"" << *out_path << "\"\n";
      return 2;
    }
    f << text;
  } else {
    fallback << text;
  }
  return 0;
}

}  // namespace detail

inline json rset_to_json(const RSetResult& r) {
  json intervals = json::array();
  for (const Interval& iv : r.intervals) {
    json ji;
    ji["lo"] = detail::json_real(iv.lo);
    ji["hi"] = detail::json_real(iv.hi);
    ji["lo_attribution"] = iv.lo_attribution ? json(*iv.lo_attribution) : json(nullptr);
    ji["hi_attribution"] = iv.hi_attribution ? json(*iv.hi_attribution) : json(nullptr);
    intervals.push_back(std::move(ji));
  }
  json doc;
  doc["intervals"] = std::move(intervals);
  doc["a_f"] = detail::json_real(r.a_f);
  doc["b_f"] = detail::json_real(r.b_f);
  doc["certified"] = r.certified;
  doc["caveats"] = r.caveats;
  return doc;
}

// ---------------------------------------------------------------------------
// rset
// ---------------------------------------------------------------------------

inline int cmd_rset(const std::string& path, const CommonOptions& opt, std::ostream& out,
                    std::ostream& err) {
  try {
    const docfile::SumDocument loaded = docfile::load(path);
    const Tolerances tol = make_tolerances(opt.tol);
    const RSetResult r = rset::compute_rset(loaded.sum, loaded.strip, tol);
    const int rc = detail::write_output(rset_to_json(r), opt.out, out, err);
    if (rc != 0) return rc;
    if (opt.strict && !r.certified) {
      err << "error: result not certified (--strict)\n";
      return 3;
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

// ---------------------------------------------------------------------------
// zeros
// ---------------------------------------------------------------------------

inline int cmd_zeros(const std::string& path, const std::optional<std::array<double, 4>>& box,
                     const CommonOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    const docfile::SumDocument loaded = docfile::load(path);
    const Tolerances tol = make_tolerances(opt.tol);
    zerofind::Rectangle rect;
    if (box) {
      rect = {(*box)[0], (*box)[1], (*box)[2], (*box)[3]};
    } else {
      if (!loaded.strip.finite())
        throw ValidationError("zeros: --box is required when the strip is infinite");
      rect = {loaded.strip.alpha, loaded.strip.beta, 0.0, 50.0};
    }
    if (!(rect.sigma_lo < rect.sigma_hi) || !(rect.t_lo < rect.t_hi))
      throw ValidationError("zeros: box must satisfy sigma0 < sigma1 and t0 < t1");
    const zerofind::ZeroSearch zs = zerofind::locate_zeros(loaded.sum, rect, tol);
    json doc = json::array();
    for (const zerofind::ZeroRecord& z : zs.zeros) {
      json jz;
      jz["re"] = z.z.real();
      jz["im"] = z.z.imag();
      jz["multiplicity"] = z.multiplicity;
      jz["residual"] = z.residual;
      doc.push_back(std::move(jz));
    }
    if (!zs.complete)
      err << "warning: zero search incomplete (budget); list may be missing zeros\n";
    return detail::write_output(doc, opt.out, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyOptions {
  std::optional<double> tol;
  bool strict = false;
  std::optional<std::string> out;
  double tmax = 50.0;
  int grid = 64;
};

namespace detail {

struct Check {
  std::string name;
  bool passed = true;
  std::string note;
};

inline void fail(std::vector<Check>& checks, const std::string& name, const std::string& note) {
  checks.push_back({name, false, note});
}

inline void pass(std::vector<Check>& checks, const std::string& name, const std::string& note) {
  checks.push_back({name, true, note});
}

/// Runs one check body; a numeric or validation failure inside it fails that
/// check instead of aborting the whole report.
template <class Fn>
inline void guarded(std::vector<Check>& checks, const std::string& name, Fn&& fn) {
  try {
    fn();
  } catch (const NumericError& e) {
    fail(checks, name, std::string("aborted: ") + e.what());
  } catch (const ValidationError& e) {
    fail(checks, name, std::string("aborted: ") + e.what());
  }
}

}  // namespace detail

/// Cross-validates the projection set on its own strip:
///  - per-term negative intervals pairwise disjoint;
///  - no isolated interval (width > 10 root_tol), except the exact two-term
///    vertical line;
///  - every dominance-boundary endpoint classifies as a boundary with the
///    matching equality index;
///  - located zeros' real parts all land inside the set (up to --tmax);
///  - sampled sigma grid: certified term dominance never occurs inside the
///    set, and every certified-gap interior point has a certified dominant
///    term and positive distance bound.
inline int cmd_verify(const std::string& path, const VerifyOptions& vopt, std::ostream& out,
                      std::ostream& err) {
  try {
    const docfile::SumDocument loaded = docfile::load(path);
    if (vopt.grid < 2 || !(vopt.tmax > 0.0))
      throw ValidationError("verify: --grid must be >= 2 and --tmax positive");
    const Tolerances tol = make_tolerances(vopt.tol);
    const ExponentialSum& f = loaded.sum;
    const VerticalStrip& strip = loaded.strip;

    std::vector<detail::Check> checks;
    const RSetResult r = rset::compute_rset(f, strip, tol);

    // Gap disjointness across terms.
    detail::guarded(checks, "gaps-disjoint", [&] {
      std::vector<std::pair<double, double>> negs;
      for (std::size_t j = 0; j < f.size(); ++j) {
        const rset::BRoots br = rset::b_roots(f, static_cast<int>(j), strip, tol);
        if (br.negative_interval) negs.push_back(*br.negative_interval);
      }
      std::sort(negs.begin(), negs.end());
      bool ok = true;
      for (std::size_t i = 1; i < negs.size(); ++i)
        if (negs[i].first < negs[i - 1].second) ok = false;
      if (ok)
        detail::pass(checks, "gaps-disjoint",
                     std::to_string(negs.size()) + " certified gap(s), pairwise disjoint");
      else
        detail::fail(checks, "gaps-disjoint", "two certified negative intervals overlap");
    });

    // No isolated points.
    {
      const bool two_term_line = f.size() == 2 && !f.tail;
      bool ok = true;
      for (const Interval& iv : r.intervals)
        if (!(iv.width() > 10.0 * tol.root_tol)) ok = false;
      if (two_term_line)
        detail::pass(checks, "no-isolated-point",
                     "skipped: a two-term sum vanishes on a single vertical line");
      else if (ok)
        detail::pass(checks, "no-isolated-point",
                     "all intervals wider than 10 * root_tol");
      else
        detail::fail(checks, "no-isolated-point", "a degenerate interval was produced");
    }

    // Boundary classification at every dominance endpoint.
    {
      bool ok = true;
      std::string note = "all boundary endpoints classified with matching equality index";
      try {
        for (const Interval& iv : r.intervals) {
          if (iv.lo_kind == EndpointKind::Boundary && std::isfinite(iv.lo) &&
              !(f.size() == 2 && !f.tail)) {
            const rset::BoundaryClass c = rset::classify_boundary(f, iv.lo, tol);
            if (c.kind != rset::PointKind::Boundary ||
                c.equality_index != iv.lo_attribution) {
              ok = false;
              note = "endpoint " + detail::fmt17(iv.lo) + " misclassified";
            }
          }
          if (iv.hi_kind == EndpointKind::Boundary && std::isfinite(iv.hi) &&
              !(f.size() == 2 && !f.tail)) {
            const rset::BoundaryClass c = rset::classify_boundary(f, iv.hi, tol);
            if (c.kind != rset::PointKind::Boundary ||
                c.equality_index != iv.hi_attribution) {
              ok = false;
              note = "endpoint " + detail::fmt17(iv.hi) + " misclassified";
            }
          }
        }
      } catch (const rset::AmbiguousBoundaryError& e) {
        ok = false;
        note = e.what();
      } catch (const NumericError& e) {
        ok = false;
        note = std::string("aborted: ") + e.what();
      }
      (ok ? detail::pass : detail::fail)(checks, "boundary-classification", note);
    }

    // Zero projections inside the set.
    detail::guarded(checks, "zero-projections-inside", [&] {
      VerticalStrip window = strip;
      if (!window.finite()) {
        const double lo = r.empty() ? -2.0 : r.a_f - 1.0;
        const double hi = r.empty() ? 2.0 : r.b_f + 1.0;
        window.alpha = std::max(window.alpha, std::isfinite(lo) ? lo : -2.0);
        window.beta = std::min(window.beta, std::isfinite(hi) ? hi : 2.0);
      }
      const zerofind::CrosscheckReport cc =
          zerofind::crosscheck_rset(f, window, vopt.tmax, tol);
      if (cc.sound) {
        std::string note = std::to_string(cc.search.zeros.size()) +
                           " zero(s) located; max projection distance " +
                           detail::fmt17(cc.max_distance);
        if (r.empty() && r.certified && cc.search.zeros.empty())
          note = "empty set certified; no zeros located";
        detail::pass(checks, "zero-projections-inside", note);
      } else {
        detail::fail(checks, "zero-projections-inside",
                     std::to_string(cc.violations.size()) +
                         " zero(s) project outside the computed set");
      }
    });

    // Grid consistency of dominance signs and the distance bound.
    detail::guarded(checks, "grid-consistency", [&] {
      const double lo = std::isfinite(strip.alpha) ? strip.alpha : (r.empty() ? -2.0 : r.a_f - 1.0);
      const double hi = std::isfinite(strip.beta) ? strip.beta : (r.empty() ? 2.0 : r.b_f + 1.0);
      bool ok = true;
      std::string note = "dominance signs and distance bound consistent at " +
                         std::to_string(vopt.grid) + " grid points";
      for (int g = 0; g < vopt.grid && ok; ++g) {
        const double sigma =
            lo + (hi - lo) * (static_cast<double>(g) + 0.5) / static_cast<double>(vopt.grid);
        if (!strip.contains(sigma)) continue;
        const double dist = rset_distance(r, sigma);
        bool interior = false;
        for (const Interval& iv : r.intervals)
          if (sigma > iv.lo + 2.0 * tol.root_tol && sigma < iv.hi - 2.0 * tol.root_tol)
            interior = true;
        const bool deep_gap = dist > 2.0 * tol.root_tol;
        if (!interior && !deep_gap) continue;  // too close to a boundary to test
        int certified_negative = -1;
        for (std::size_t j = 0; j < f.size(); ++j) {
          if (rset::b_value(f, static_cast<int>(j), sigma).hi < 0.0) {
            certified_negative = static_cast<int>(j);
            break;
          }
        }
        const rset::InfModulusEnclosure enc = rset::inf_modulus_enclosure(f, sigma);
        if (interior) {
          if (certified_negative >= 0) {
            ok = false;
            note = "certified dominant term inside the set at sigma = " + detail::fmt17(sigma);
          } else if (enc.lo > 0.0) {
            ok = false;
            note = "positive distance bound inside the set at sigma = " + detail::fmt17(sigma);
          }
        } else if (deep_gap) {
          if (certified_negative < 0 && r.certified) {
            ok = false;
            note = "no certified dominant term in a gap at sigma = " + detail::fmt17(sigma);
          } else if (!(enc.hi > 0.0)) {
            ok = false;
            note = "zero distance bound certified inside a gap at sigma = " +
                   detail::fmt17(sigma);
          }
        }
      }
      (ok ? detail::pass : detail::fail)(checks, "grid-consistency", note);
    });

    bool all_passed = true;
    json jchecks = json::array();
    for (const detail::Check& c : checks) {
      all_passed = all_passed && c.passed;
      json jc;
      jc["name"] = c.name;
      jc["passed"] = c.passed;
      jc["note"] = c.note;
      jchecks.push_back(std::move(jc));
    }
    json doc;
    doc["checks"] = std::move(jchecks);
    doc["passed"] = all_passed;
    doc["rset"] = rset_to_json(r);
    const int rc = detail::write_output(doc, vopt.out, out, err);
    if (rc != 0) return rc;
    if (!all_passed) {
      for (const detail::Check& c : checks)
        if (!c.passed) err << "failed: " << c.name << " — " << c.note << "\n";
      return 1;
    }
    if (vopt.strict && !r.certified) {
      err << "error: result not certified (--strict)\n";
      return 3;
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

// ---------------------------------------------------------------------------
// profile
// ---------------------------------------------------------------------------

inline int cmd_profile(const std::string& path, double lo, double hi, int n, std::ostream& out,
                       std::ostream& err) {
  try {
    const docfile::SumDocument loaded = docfile::load(path);
    if (!std::isfinite(lo) || !std::isfinite(hi) || n < 1 || (n > 1 && !(lo < hi)) ||
        (n == 1 && lo != hi))
      throw ValidationError("profile: need lo < hi with n >= 2, or lo == hi with n == 1");
    const ExponentialSum& f = loaded.sum;
    std::string header = "sigma,inf_modulus";
    for (std::size_t j = 1; j <= f.size(); ++j) header += ",B_" + std::to_string(j);
    out << header << "\n";
    for (int g = 0; g < n; ++g) {
      const double sigma =
          n == 1 ? lo : lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(n - 1);
      std::string row = detail::fmt17(sigma) + "," + detail::fmt17(rset::inf_modulus(f, sigma));
      for (std::size_t j = 0; j < f.size(); ++j) {
        const rset::BValue b = rset::b_value(f, static_cast<int>(j), sigma);
        row += "," + detail::fmt17(0.5 * (b.lo + b.hi));
      }
      out << row << "\n";
    }
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

// ---------------------------------------------------------------------------
// basis
// ---------------------------------------------------------------------------

inline int cmd_basis(const std::string& path, const CommonOptions& opt, std::ostream& out,
                     std::ostream& err) {
  try {
    const docfile::SumDocument loaded = docfile::load(path);
    const std::optional<basis::BasisRepresentation> rep = basis::representation(loaded.sum);
    json doc;
    doc["independence"] = to_string(loaded.sum.independence);
    if (rep) {
      doc["basis_indices"] = rep->basis_indices;
      json matrix = json::array();
      for (const RationalVector& row : rep->matrix) {
        json jrow = json::array();
        for (const Rational& q : row) jrow.push_back(format_rational(q));
        matrix.push_back(std::move(jrow));
      }
      doc["matrix"] = std::move(matrix);
      doc["integral"] = rep->integral;
    } else {
      doc["basis_indices"] = json(nullptr);
      doc["matrix"] = json(nullptr);
      doc["integral"] = json(nullptr);
    }
    return detail::write_output(doc, opt.out, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace apz::commands
