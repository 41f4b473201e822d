#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "kundt/specfile.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kundt CSI metric and Killing-vector verification tool"};
  app.require_subcommand(1);

  // check
  std::string check_path;
  kundt::CheckOptions copts;
  double tol = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  auto* check = app.add_subcommand("check", "verify a metric/candidate spec file");
  check->add_option("spec", check_path, "spec file path")->required();
  auto* tol_opt = check->add_option("--tol", tol, "residual tolerance override");
  auto* smp_opt = check->add_option("--samples", samples, "sample count override");
  auto* seed_opt = check->add_option("--seed", seed, "sampling seed override");

  // generate
  std::string gen_label, gen_out = "family.spec";
  kundt::FamilyParams params;
  std::string branch = "+", zeta20, zeta3, h0, w13;
  auto* gen = app.add_subcommand("generate", "emit a spec file for a named family");
  gen->add_option("case", gen_label, "family label (e.g. 1.2.1b, 2-null)")->required();
  gen->add_option("--sigma", params.sigma, "sigma (-1, 0, or 1)");
  gen->add_option("--c1", params.c1, "first solution constant");
  gen->add_option("--c2", params.c2, "second solution constant");
  gen->add_option("--c3", params.c3, "third solution constant");
  gen->add_option("--branch", branch, "sign branch (+ or -)");
  gen->add_option("--zeta20", zeta20, "candidate zeta20 expression");
  gen->add_option("--zeta3", zeta3, "constant zeta3 value");
  gen->add_option("--h0", h0, "H0 expression");
  gen->add_option("--w13", w13, "W1_3 expression");
  gen->add_option("--dim", params.dim, "spacetime dimension (default 4)");
  gen->add_option("--out", gen_out, "output path");

  // oracle
  std::string oracle_path;
  int points = 20;
  auto* oracle = app.add_subcommand("oracle", "frame-vs-coordinate curvature comparison");
  oracle->add_option("spec", oracle_path, "spec file path")->required();
  oracle->add_option("--points", points, "number of comparison points");

  CLI11_PARSE(app, argc, argv);

  kundt::ToolReport rep;
  if (check->parsed()) {
    if (*tol_opt) copts.tol = tol;
    if (*smp_opt) copts.samples = samples;
    if (*seed_opt) copts.seed = seed;
    rep = kundt::run_check(check_path, copts);
  } else if (gen->parsed()) {
    params.branch = branch.empty() ? '+' : branch[0];
    if (!zeta20.empty()) params.zeta20 = zeta20;
    if (!zeta3.empty()) params.zeta3 = zeta3;
    if (!h0.empty()) params.h0 = h0;
    if (!w13.empty()) params.w13 = w13;
    rep = kundt::run_generate(gen_label, params, gen_out);
  } else {
    rep = kundt::run_oracle(oracle_path, points);
  }
  std::fputs(rep.text.c_str(), stdout);
  return rep.exit_code;
}
