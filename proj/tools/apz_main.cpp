// Command-line front end: subcommand dispatch only; all behavior lives in
// apz/commands.hpp so the test suite can drive the same code paths.

#include <array>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <apz/commands.hpp>

int main(int argc, char** argv) {
  CLI::App app{"Real projections of zeros of exponential sums on vertical strips"};
  app.require_subcommand(1);

  // rset
  auto* rset = app.add_subcommand(
      "rset", "Compute the projection set of the zero set as certified intervals (JSON)");
  std::string rset_path;
  apz::commands::CommonOptions rset_opt;
  double rset_tol = 0.0;
  std::string rset_out;
  rset->add_option("input", rset_path, "sum description file")->required();
  auto* rset_tol_opt = rset->add_option("--tol", rset_tol, "root_tol and cert_margin");
  rset->add_flag("--strict", rset_opt.strict, "exit 3 when the result is not certified");
  auto* rset_out_opt = rset->add_option("--out", rset_out, "write JSON to this file");

  // zeros
  auto* zeros = app.add_subcommand("zeros", "Locate zeros in a rectangle (JSON list)");
  std::string zeros_path;
  apz::commands::CommonOptions zeros_opt;
  double zeros_tol = 0.0;
  std::string zeros_out;
  std::vector<double> zeros_box;
  zeros->add_option("input", zeros_path, "sum description file")->required();
  zeros->add_option("--box", zeros_box, "sigma0 sigma1 t0 t1")->expected(4);
  auto* zeros_tol_opt = zeros->add_option("--tol", zeros_tol, "root_tol and cert_margin");
  auto* zeros_out_opt = zeros->add_option("--out", zeros_out, "write JSON to this file");

  // verify
  auto* verify = app.add_subcommand(
      "verify", "Cross-validate the projection set against located zeros (JSON report)");
  std::string verify_path;
  apz::commands::VerifyOptions verify_opt;
  double verify_tol = 0.0;
  std::string verify_out;
  verify->add_option("input", verify_path, "sum description file")->required();
  verify->add_option("--tmax", verify_opt.tmax, "zero search height (default 50)");
  verify->add_option("--grid", verify_opt.grid, "consistency grid size (default 64)");
  auto* verify_tol_opt = verify->add_option("--tol", verify_tol, "root_tol and cert_margin");
  verify->add_flag("--strict", verify_opt.strict, "exit 3 when the result is not certified");
  auto* verify_out_opt = verify->add_option("--out", verify_out, "write JSON to this file");

  // profile
  auto* profile =
      app.add_subcommand("profile", "CSV of inf_modulus and dominance values over a sigma grid");
  std::string profile_path;
  std::vector<double> sigma_grid;
  profile->add_option("input", profile_path, "sum description file")->required();
  profile->add_option("--sigma-grid", sigma_grid, "lo hi n")->expected(3)->required();

  // basis
  auto* basis = app.add_subcommand("basis", "Natural basis report for the exponent set (JSON)");
  std::string basis_path;
  apz::commands::CommonOptions basis_opt;
  std::string basis_out;
  basis->add_option("input", basis_path, "sum description file")->required();
  auto* basis_out_opt = basis->add_option("--out", basis_out, "write JSON to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (rset->parsed()) {
    if (rset_tol_opt->count() > 0) rset_opt.tol = rset_tol;
    if (rset_out_opt->count() > 0) rset_opt.out = rset_out;
    return apz::commands::cmd_rset(rset_path, rset_opt, std::cout, std::cerr);
  }
  if (zeros->parsed()) {
    if (zeros_tol_opt->count() > 0) zeros_opt.tol = zeros_tol;
    if (zeros_out_opt->count() > 0) zeros_opt.out = zeros_out;
    std::optional<std::array<double, 4>> box;
    if (zeros_box.size() == 4) box = {zeros_box[0], zeros_box[1], zeros_box[2], zeros_box[3]};
    return apz::commands::cmd_zeros(zeros_path, box, zeros_opt, std::cout, std::cerr);
  }
  if (verify->parsed()) {
    if (verify_tol_opt->count() > 0) verify_opt.tol = verify_tol;
    if (verify_out_opt->count() > 0) verify_opt.out = verify_out;
    return apz::commands::cmd_verify(verify_path, verify_opt, std::cout, std::cerr);
  }
  if (profile->parsed()) {
    const double n_raw = sigma_grid[2];
    if (!(n_raw >= 1.0) || n_raw != std::floor(n_raw) || n_raw > 1e7) {
      std::cerr << "error: --sigma-grid n must be a positive integer\n";
      return 2;
    }
    return apz::commands::cmd_profile(profile_path, sigma_grid[0], sigma_grid[1],
                                      static_cast<int>(n_raw), std::cout, std::cerr);
  }
  if (basis->parsed()) {
    if (basis_out_opt->count() > 0) basis_opt.out = basis_out;
    return apz::commands::cmd_basis(basis_path, basis_opt, std::cout, std::cerr);
  }
  return 2;
}
