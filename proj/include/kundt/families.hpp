#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kundt/killing.hpp"

namespace kundt {

struct FamilyError : std::runtime_error {
  explicit FamilyError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// A constructed (metric, candidate) pair together with the x3 interval
// on which the construction is valid and safe to sample.
struct Family {
  std::string label;
  KundtMetric metric;
  Coframe frame;
  KillingCandidate cand;
  Interval x3{-1.0, 1.0};
  std::map<std::string, double> params;

  SampleRanges ranges() const;  // default ranges with x3 clipped to the interval
};

// v-independent metric admitting the null direction itself as the isometry.
Family case_1_1_1(const Expr& H0, const std::vector<Expr>& W0, const ExprMatrix& gT,
                  int dim);

// Null isometry zeta = zeta2 * l with sigma < 0; the gradient of
// ln(zeta2) fixes the v-linear metric profiles and must satisfy
// sum_i (D_i ln zeta2)^2 = -4 sigma.
Family case_1_1_2(const Expr& zeta2, const ExprMatrix& gT, double sigma, int dim,
                  const Expr& H0 = Expr(0.0), const std::vector<Expr>& W0 = {});

// zeta = n + (sigma* v^2/8)(2/..) l with u-independent profiles and
// sigma* bounded away from zero.
Family case_1_2_1a(const std::vector<Expr>& W1, const std::vector<Expr>& W0,
                   double sigma, const ExprMatrix& gT, int dim);

// sigma* = 0 branch: H = 0 and W picks up a -u transport term.
Family case_1_2_1b(const Expr& zeta20, const std::vector<Expr>& W1,
                   const std::vector<Expr>& w_lower, double sigma,
                   const ExprMatrix& gT, int dim);

// Constant-zeta3 subfamily of the sigma* = 0, zeta3 != 0 branch.
Family case_1_2_2a(double zeta3, const Expr& zeta20, const std::vector<Expr>& W1,
                   double sigma, const ExprMatrix& gT, int dim,
                   const std::vector<Expr>& W0n = {});

// sigma* > 0, zeta3 = 1 branch; all profiles transported along u + x3.
Family case_1_2_2b(const Expr& zeta20, const std::vector<Expr>& W1,
                   const std::vector<Expr>& W0n, double sigma, const ExprMatrix& gT,
                   int dim);

// Null isometry families of the second branch (Gamma(2)_3 = 0),
// parametrized by the linear-solution constants and the sign branch.
Family case_2_null(int sigma, double c1, double c2, char branch, int dim);

// Timelike families of the second branch; zeta20 may be zero or any
// member of the compatible closed-form family (checked numerically).
Family case_2_timelike(int sigma, double c1, double c2, double c3, int dim,
                       const Expr& zeta20 = Expr(0.0));

// Residual expressions for the second-branch reduction: the linear
// second-order equation for w = (D3 zeta1)^(-1/2) and the sigma*
// identity sigma* = 2 D3 D3 ln(D3 zeta1) implied by it.
struct OdeWitness {
  Expr ode_residual{0.0};         // w'' + sigma w
  Expr sigma_star_residual{0.0};  // sigma* - 2 D3(D3^2 zeta1 / D3 zeta1)
};
OdeWitness verify_ode_zeta1(int sigma, const Expr& zeta1_sqrt_inv);

// Decision-tree classification of a (metric, candidate) pair.
struct CaseReport {
  std::string label = "unclassified";
  std::map<std::string, double> branch_residuals;
  Causality causal = Causality::Mixed;
  double tol = 0.0;
};

CaseReport classify(const KundtMetric& K, const Coframe& C,
                    const KillingCandidate& cand, const std::vector<Point>& samples,
                    double tol = 1e-7);

const std::vector<std::string>& family_labels();

// Parameter-driven construction used by the command-line generator;
// unknown labels and invalid parameters raise FamilyError naming the
// violated constraint.
struct FamilyParams {
  int dim = 4;
  double sigma = 0.0;
  double c1 = 1.0, c2 = 0.0, c3 = 2.0;
  char branch = '+';
  std::optional<std::string> zeta20;
  std::optional<std::string> zeta3;
  std::optional<std::string> h0;
  std::optional<std::string> w13;
};

Family make_family(const std::string& label, const FamilyParams& params);

}  // namespace kundt
