#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "kundt/sampling.hpp"
#include "kundt/types.hpp"

namespace kundt {

using expr::Expr;

struct GeometryError : std::runtime_error {
  explicit GeometryError(std::string msg) : std::runtime_error(std::move(msg)) {}
};

// Kundt metric data in the split form
//   w_e(u,v,x) = v*W1[e] + W0[e]
//   H(u,v,x)   = sigma_star * v^2/8 + v*H1 + H0
// with sigma_star = 4*sigma + g^{ef} W1_e W1_f.  W1/W0/H1/H0 are
// nominally v-free; nothing enforces that, so checks can diagnose
// nonconforming inputs.
struct KundtMetric {
  int dim = 4;          // N >= 4
  double sigma = 0.0;   // constant of the H v^2-coefficient
  std::vector<Expr> W1; // size N-2, functions of (u, x^e)
  std::vector<Expr> W0;
  Expr H1{0.0};
  Expr H0{0.0};
  ExprMatrix gT;        // transverse metric, (N-2)x(N-2), functions of (x^e)

  int transverse_dim() const { return dim - 2; }

  // Full coordinate profile w_e; e is 0-based (coordinate x_{e+3}).
  Expr W(int e) const;

  static KundtMetric flat(int dim);  // zero W/H profiles, identity gT
};

// Upper-triangular coframe factor M (MᵀM = gT) and its inverse.
// Frame-vector coefficients are m_i^e = Minv(e, i).
struct Coframe {
  ExprMatrix M;
  ExprMatrix Minv;
};

// Upper-triangular symbolic square root of gT.  Exact for diagonal
// input; Cholesky recursion with sqrt nodes otherwise.  Requires a
// constant gT_33 entry and numeric positive definiteness at probe
// points.
Coframe build_coframe(const ExprMatrix& gT);

// sigma* = 4 sigma + g^{ef} W1_e W1_f as an expression over (u, x).
Expr sigma_star(const KundtMetric& K, const Coframe& C);

// H assembled per the split form above.
Expr assembled_H(const KundtMetric& K, const Coframe& C);

// Frame components W_i = m_i^e w_e and their v-coefficients.
Expr frame_W(const KundtMetric& K, const Coframe& C, int i);   // i 0-based
Expr frame_W1(const KundtMetric& K, const Coframe& C, int i);
Expr frame_W0(const KundtMetric& K, const Coframe& C, int i);

// Directional derivatives along the frame dual to {n, l, m^i}:
//   D1 f = f_,v
//   D2 f = f_,u - H f_,v
//   Di f = m_i^e (f_,e - w_e f_,v)
// frame_index is 1, 2, or 3..N.
Expr frame_derivative(const KundtMetric& K, const Coframe& C, int frame_index,
                      const Expr& f);

// Spatial-gradient frame derivative for v-independent f (no w-term).
Expr transverse_derivative(const Coframe& C, int i, const Expr& f);  // i 0-based

// Full N x N coordinate metric, coordinate order (u, v, x3..xN).
ExprMatrix coordinate_metric(const KundtMetric& K, const Coframe& C);

// zeta^a d_a = zeta1 (d_u - H d_v) + zeta2 d_v + zeta_i m_i^e (d_e - w_e d_v);
// returns the N coordinate components.
ExprVector frame_to_coordinate(const KundtMetric& K, const Coframe& C,
                               const Expr& zeta1, const Expr& zeta2,
                               const std::vector<Expr>& zeta_t);

// Numeric frame vectors at a point; column a holds e_{a+1} in
// coordinate components.
Eigen::MatrixXd frame_vectors(const KundtMetric& K, const Coframe& C,
                              const Point& p);

// Kundt-form-preserving coordinate transformations.
struct SpatialAffine {
  Eigen::MatrixXd A;   // x' = A x + b, constant Jacobian
  Eigen::VectorXd b;
};
struct VShift {
  Expr h;  // v' = v + h(u, x)
};
struct UAffine {
  double scale = 1.0;  // u' = scale*u + offset, v' = v/scale
  double offset = 0.0;
};
using Transform = std::variant<SpatialAffine, VShift, UAffine>;

KundtMetric apply_transform(const KundtMetric& K, const Transform& T);
Point map_point(const Transform& T, const Point& p);

}  // namespace kundt
