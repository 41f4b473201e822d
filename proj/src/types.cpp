#include "kundt/types.hpp"

namespace kundt {

Eigen::MatrixXd evaluate(const ExprMatrix& m, const expr::Bindings& b) {
  Eigen::MatrixXd out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).eval(b);
  return out;
}

Eigen::VectorXd evaluate(const ExprVector& v, const expr::Bindings& b) {
  Eigen::VectorXd out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i).eval(b);
  return out;
}

ExprMatrix differentiate(const ExprMatrix& m, const std::string& sym) {
  ExprMatrix out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = m(i, j).diff(sym);
  return out;
}

ExprMatrix upper_triangular_inverse(const ExprMatrix& r) {
  using expr::Expr;
  const Eigen::Index n = r.rows();
  ExprMatrix inv(n, n);
  inv.setConstant(Expr(0.0));
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    inv(j, j) = Expr(1.0) / r(j, j);
    for (Eigen::Index i = j - 1; i >= 0; --i) {
      Expr s(0.0);
      for (Eigen::Index k = i + 1; k <= j; ++k) s = s + r(i, k) * inv(k, j);
      inv(i, j) = -s / r(i, i);
    }
  }
  return inv;
}

}  // namespace kundt
