#pragma once

#include <Eigen/Dense>

#include "kundt/expr.hpp"

namespace Eigen {

// Lets Eigen dense types carry symbolic scalars (storage, sums,
// products, transposes).  Pivoted decompositions are not usable on
// Expr and are never invoked on symbolic matrices here.
template <>
struct NumTraits<kundt::expr::Expr> {
  using Real = kundt::expr::Expr;
  using NonInteger = kundt::expr::Expr;
  using Literal = kundt::expr::Expr;
  using Nested = kundt::expr::Expr;
  enum {
    IsComplex = 0,
    IsInteger = 0,
    IsSigned = 1,
    RequireInitialization = 1,
    ReadCost = 1,
    AddCost = 8,
    MulCost = 8,
  };
  static inline Real epsilon() { return kundt::expr::Expr(0.0); }
  static inline Real dummy_precision() { return kundt::expr::Expr(0.0); }
  static inline int digits10() { return 0; }
};

}  // namespace Eigen

namespace kundt {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using ExprMatrix = Matrix<expr::Expr>;
using ExprVector = Vector<expr::Expr>;

// Coefficient-wise numeric evaluation of a symbolic matrix.
Eigen::MatrixXd evaluate(const ExprMatrix& m, const expr::Bindings& b);
Eigen::VectorXd evaluate(const ExprVector& v, const expr::Bindings& b);

// Coefficient-wise derivative.
ExprMatrix differentiate(const ExprMatrix& m, const std::string& sym);

// Inverse of an upper-triangular symbolic matrix by back substitution.
ExprMatrix upper_triangular_inverse(const ExprMatrix& r);

}  // namespace kundt
