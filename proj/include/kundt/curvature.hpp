#pragma once

#include <map>
#include <string>
#include <vector>

#include "kundt/geometry.hpp"

namespace kundt {

// Frame connection components and their v-expansion coefficients.
struct ConnectionTable {
  // Gamma_21i = Gamma_i12 = Gamma_i21 = W_i,v / 2
  std::vector<Expr> Gamma_21i;
  Expr Gamma_212{0.0};              // D1 H
  std::vector<Expr> Gamma_2i2;      // Di H - D2 W_i
  ExprMatrix A;                     // A_ij, antisymmetric
  std::vector<ExprMatrix> D;        // D[i](j,k) = D_ijk
  std::vector<ExprMatrix> Gamma_t;  // Gamma_t[i](j,k) = Gamma_ijk

  // v-expansion: Gamma_2i2 = G2_i v^2/8 + G1_i v + G0_i,
  //              A_ij      = A1_ij v + A0_ij.
  std::vector<Expr> G2, G1, G0;
  ExprMatrix A1, A0;
};

ConnectionTable connection_table(const KundtMetric& K, const Coframe& C);

// Transverse covariant derivative of the W covector, frame projected:
// W_{i;j} built from the Levi-Civita connection of gT.
ExprMatrix frame_W_cov_deriv(const KundtMetric& K, const Coframe& C);

// Symbolic Expr tensor with 4 transverse frame indices.
struct Tensor4E {
  int n = 0;
  std::vector<Expr> d;
  explicit Tensor4E(int n_ = 0) : n(n_), d(static_cast<std::size_t>(n_ * n_ * n_ * n_), Expr(0.0)) {}
  Expr& at(int a, int b, int c, int e) {
    return d[static_cast<std::size_t>(((a * n + b) * n + c) * n + e)];
  }
  const Expr& at(int a, int b, int c, int e) const {
    return d[static_cast<std::size_t>(((a * n + b) * n + c) * n + e)];
  }
};

// The linearly independent boost-weight >= 0 Riemann components.
struct RiemannBW {
  std::vector<Expr> R121i;
  Expr R1212{0.0};
  ExprMatrix R12ij;
  ExprMatrix R1i2j;
  Tensor4E Rtrans;  // transverse block, frame indices
};

RiemannBW riemann_components(const KundtMetric& K, const Coframe& C);

struct CSI0Report {
  bool passes = false;
  double tol = 0.0;
  double max_W_vv = 0.0;            // |W_i,vv| maximum (zero condition)
  double sigma_measured = 0.0;      // mean of H_,vv - (1/4) W_i,v W^i,v
  double sigma_spread = 0.0;        // max-min of the same (constancy)
  Eigen::MatrixXd a_measured;       // antisymmetrized W_{[i;j],v} means
  double a_spread = 0.0;
  Eigen::MatrixXd s_measured;       // symmetrized condition means
  double s_spread = 0.0;
  double rtrans_spread = 0.0;       // transverse curvature constancy
  std::map<std::string, double> residuals;  // per-condition summary
};

CSI0Report csi0_check(const KundtMetric& K, const Coframe& C,
                      const std::vector<Point>& samples, double tol);

struct KundtVectorReport {
  bool form_holds = false;   // gradient of l stays in the allowed span
  bool L_ij_zero = false;    // transverse block vanishes
  double max_violation = 0.0;
  double max_L11 = 0.0;
  double max_L1i = 0.0;
  double max_Li1 = 0.0;
};

KundtVectorReport kundt_vector_check(const KundtMetric& K, const Coframe& C,
                                     const std::vector<Point>& samples, double tol);

// Numeric rank-4 tensor, all indices lowered.
struct Tensor4 {
  int n = 0;
  std::vector<double> d;
  explicit Tensor4(int n_ = 0) : n(n_), d(static_cast<std::size_t>(n_ * n_ * n_ * n_), 0.0) {}
  double& at(int a, int b, int c, int e) {
    return d[static_cast<std::size_t>(((a * n + b) * n + c) * n + e)];
  }
  double at(int a, int b, int c, int e) const {
    return d[static_cast<std::size_t>(((a * n + b) * n + c) * n + e)];
  }
};

// A coordinate vector field with cached symbolic partials.
struct CoordVectorField {
  ExprVector comps;             // size N
  std::vector<ExprVector> d;    // d[a](c) = comps(c) differentiated along coord a
};
CoordVectorField make_vector_field(int dim, ExprVector comps);

// Ground-truth curvature from the assembled coordinate metric:
// symbolic differentiation once, numeric evaluation per point.
class CoordinateOracle {
 public:
  CoordinateOracle(const KundtMetric& K, const Coframe& C);

  int dim() const { return N_; }
  Eigen::MatrixXd metric(const Point& p) const;
  // Gamma[a](b,c) = \Gamma^a_{bc}
  std::vector<Eigen::MatrixXd> christoffel(const Point& p) const;
  Tensor4 riemann(const Point& p) const;           // R_abcd
  Eigen::MatrixXd lie_derivative(const CoordVectorField& zeta, const Point& p) const;
  Eigen::MatrixXd nabla_lower(const CoordVectorField& zeta, const Point& p) const;
  Eigen::MatrixXd nabla_l(const Point& p) const;   // grad of l = du

 private:
  struct Numeric;
  Numeric at(const Point& p) const;

  int N_;
  ExprMatrix g_;
  std::vector<ExprMatrix> dg_;
  std::vector<std::vector<ExprMatrix>> ddg_;
};

// Projection of a lowered rank-4 tensor onto frame vectors E
// (columns are frame vectors in coordinates).
Tensor4 project_riemann(const Tensor4& R, const Eigen::MatrixXd& E);

// One-shot conveniences over CoordinateOracle (construct the oracle
// once when evaluating many points).
Tensor4 riemann_oracle(const KundtMetric& K, const Coframe& C, const Point& p);
Eigen::MatrixXd lie_derivative_oracle(const KundtMetric& K, const Coframe& C,
                                      const ExprVector& vec, const Point& p);

struct OracleComparison {
  double max_dev = 0.0;      // |frame - sign*oracle| / (1 + scale)
  int global_sign = 1;
  bool sign_consistent = true;
  bool within_tol = false;
};

// Frame-formula components vs frame-projected coordinate oracle at the
// given points; one global sign is extracted and applied everywhere.
OracleComparison compare_riemann(const KundtMetric& K, const Coframe& C,
                                 const std::vector<Point>& samples, double rel_tol);

}  // namespace kundt
