#include "kundt/geometry.hpp"

#include <cmath>

namespace kundt {

using expr::Bindings;
using expr::EvalError;

Expr KundtMetric::W(int e) const {
  return Expr::symbol("v") * W1[static_cast<std::size_t>(e)] +
         W0[static_cast<std::size_t>(e)];
}

KundtMetric KundtMetric::flat(int dim) {
  KundtMetric K;
  K.dim = dim;
  K.sigma = 0.0;
  K.W1.assign(static_cast<std::size_t>(dim - 2), Expr(0.0));
  K.W0.assign(static_cast<std::size_t>(dim - 2), Expr(0.0));
  K.H1 = Expr(0.0);
  K.H0 = Expr(0.0);
  K.gT = ExprMatrix(dim - 2, dim - 2);
  for (int i = 0; i < dim - 2; ++i)
    for (int j = 0; j < dim - 2; ++j) K.gT(i, j) = Expr(i == j ? 1.0 : 0.0);
  return K;
}

namespace {

// sqrt specialized for metric entries (positive by assumption):
// numbers fold, exp(t) -> exp(t/2), b^p -> b^(p/2), products split.
Expr symbolic_sqrt(const Expr& e) {
  using expr::NodeKind;
  if (e.is_number()) {
    double v = e.number_value();
    if (v < 0.0) throw GeometryError("sqrt of negative constant " + e.str());
    return Expr(std::sqrt(v));
  }
  if (e.kind() == NodeKind::Apply && e.func() == expr::Func::Exp)
    return exp(Expr(0.5) * e.child(0));
  if (e.kind() == NodeKind::Pow && e.child(1).is_number())
    return pow(e.child(0), Expr(e.child(1).number_value() / 2.0));
  if (e.kind() == NodeKind::Mul)
    return symbolic_sqrt(e.child(0)) * symbolic_sqrt(e.child(1));
  return sqrt(e);
}

bool is_diagonal(const ExprMatrix& g) {
  for (Eigen::Index i = 0; i < g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.cols(); ++j)
      if (i != j && !g(i, j).is_number(0.0)) return false;
  return true;
}

std::vector<Bindings> probe_bindings(int tdim) {
  std::vector<Bindings> out;
  const double probes[][2] = {{0.3, -0.4}, {1.1, 0.7}, {-0.8, 1.3}, {2.1, -1.6}};
  for (auto& pr : probes) {
    Bindings b;
    b.set("u", pr[0] * 0.5);
    b.set("v", pr[1] * 0.5);
    for (int e = 0; e < tdim; ++e)
      b.set("x" + std::to_string(e + 3), pr[(e + 1) % 2] + 0.1 * e);
    out.push_back(std::move(b));
  }
  return out;
}

}  // namespace

Coframe build_coframe(const ExprMatrix& gT) {
  const Eigen::Index n = gT.rows();
  if (n != gT.cols() || n < 1) throw GeometryError("transverse metric must be square");
  if (!gT(0, 0).symbols().empty())
    throw GeometryError("non-constant g_33 entry: " + gT(0, 0).str());

  // Numeric positive definiteness at probe points (skipping points
  // outside an entry's domain).
  int checked = 0;
  for (const auto& b : probe_bindings(static_cast<int>(n))) {
    Eigen::MatrixXd g;
    try {
      g = evaluate(gT, b);
    } catch (const EvalError&) {
      continue;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(g);
    if (llt.info() != Eigen::Success)
      throw GeometryError("transverse metric not positive definite at probe point");
    ++checked;
  }
  if (checked == 0)
    throw GeometryError("transverse metric could not be evaluated at any probe point");

  Coframe C;
  C.M = ExprMatrix(n, n);
  C.M.setConstant(Expr(0.0));
  if (is_diagonal(gT)) {
    for (Eigen::Index i = 0; i < n; ++i) C.M(i, i) = symbolic_sqrt(gT(i, i));
  } else {
    // Upper-triangular Cholesky factor: MᵀM = gT.
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i <= j; ++i) {
        Expr s = gT(i, j);
        for (Eigen::Index k = 0; k < i; ++k) s = s - C.M(k, i) * C.M(k, j);
        if (i == j)
          C.M(i, i) = symbolic_sqrt(expr::simplify(s));
        else
          C.M(i, j) = expr::simplify(s) / C.M(i, i);
      }
    }
  }
  C.Minv = upper_triangular_inverse(C.M);
  return C;
}

Expr sigma_star(const KundtMetric& K, const Coframe& C) {
  Expr s(0.0);
  const int n = K.transverse_dim();
  for (int i = 0; i < n; ++i) {
    Expr Wi = frame_W1(K, C, i);
    s = s + Wi * Wi;
  }
  return Expr(4.0 * K.sigma) + s;
}

Expr assembled_H(const KundtMetric& K, const Coframe& C) {
  Expr v = Expr::symbol("v");
  return sigma_star(K, C) * v * v / Expr(8.0) + v * K.H1 + K.H0;
}

Expr frame_W1(const KundtMetric& K, const Coframe& C, int i) {
  Expr s(0.0);
  for (int e = 0; e < K.transverse_dim(); ++e)
    s = s + C.Minv(e, i) * K.W1[static_cast<std::size_t>(e)];
  return s;
}

Expr frame_W0(const KundtMetric& K, const Coframe& C, int i) {
  Expr s(0.0);
  for (int e = 0; e < K.transverse_dim(); ++e)
    s = s + C.Minv(e, i) * K.W0[static_cast<std::size_t>(e)];
  return s;
}

Expr frame_W(const KundtMetric& K, const Coframe& C, int i) {
  return Expr::symbol("v") * frame_W1(K, C, i) + frame_W0(K, C, i);
}

Expr frame_derivative(const KundtMetric& K, const Coframe& C, int frame_index,
                      const Expr& f) {
  if (frame_index == 1) return f.diff("v");
  if (frame_index == 2) return f.diff("u") - assembled_H(K, C) * f.diff("v");
  const int i = frame_index - 3;
  if (i < 0 || i >= K.transverse_dim())
    throw GeometryError("frame index out of range: " + std::to_string(frame_index));
  Expr fv = f.diff("v");
  Expr s(0.0);
  for (int e = 0; e < K.transverse_dim(); ++e) {
    Expr de = f.diff("x" + std::to_string(e + 3)) - K.W(e) * fv;
    s = s + C.Minv(e, i) * de;
  }
  return s;
}

Expr transverse_derivative(const Coframe& C, int i, const Expr& f) {
  Expr s(0.0);
  for (Eigen::Index e = 0; e < C.Minv.rows(); ++e)
    s = s + C.Minv(e, i) * f.diff("x" + std::to_string(e + 3));
  return s;
}

ExprMatrix coordinate_metric(const KundtMetric& K, const Coframe& C) {
  const int N = K.dim;
  ExprMatrix g(N, N);
  g.setConstant(Expr(0.0));
  g(0, 0) = Expr(2.0) * assembled_H(K, C);
  g(0, 1) = Expr(1.0);
  g(1, 0) = Expr(1.0);
  for (int e = 0; e < K.transverse_dim(); ++e) {
    g(0, 2 + e) = K.W(e);
    g(2 + e, 0) = K.W(e);
    for (int f = 0; f < K.transverse_dim(); ++f) g(2 + e, 2 + f) = K.gT(e, f);
  }
  return g;
}

ExprVector frame_to_coordinate(const KundtMetric& K, const Coframe& C,
                               const Expr& zeta1, const Expr& zeta2,
                               const std::vector<Expr>& zeta_t) {
  const int N = K.dim;
  const int n = K.transverse_dim();
  ExprVector out(N);
  out.setConstant(Expr(0.0));
  out(0) = zeta1;
  Expr vcomp = zeta2 - zeta1 * assembled_H(K, C);
  for (int i = 0; i < n; ++i) {
    if (zeta_t[static_cast<std::size_t>(i)].is_number(0.0)) continue;
    for (int e = 0; e < n; ++e) {
      Expr mie = C.Minv(e, i);
      out(2 + e) = out(2 + e) + zeta_t[static_cast<std::size_t>(i)] * mie;
      vcomp = vcomp - zeta_t[static_cast<std::size_t>(i)] * mie * K.W(e);
    }
  }
  out(1) = vcomp;
  return out;
}

Eigen::MatrixXd frame_vectors(const KundtMetric& K, const Coframe& C,
                              const Point& p) {
  const int N = K.dim;
  const int n = K.transverse_dim();
  Bindings b = bind_point(p);
  Eigen::MatrixXd E = Eigen::MatrixXd::Zero(N, N);
  E(1, 0) = 1.0;                                   // e_1 = d_v
  E(0, 1) = 1.0;                                   // e_2 = d_u - H d_v
  E(1, 1) = -assembled_H(K, C).eval(b);
  Eigen::MatrixXd minv = evaluate(C.Minv, b);
  for (int i = 0; i < n; ++i) {
    double wsum = 0.0;
    for (int e = 0; e < n; ++e) {
      double mie = minv(e, i);
      E(2 + e, 2 + i) = mie;
      wsum += mie * K.W(e).eval(b);
    }
    E(1, 2 + i) = -wsum;
  }
  return E;
}

// ---------------------------------------------------------------------------
// Transformations

namespace {

KundtMetric apply_spatial(const KundtMetric& K, const SpatialAffine& T) {
  const int n = K.transverse_dim();
  if (T.A.rows() != n || T.A.cols() != n)
    throw GeometryError("spatial transform dimension mismatch");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(T.A);
  if (!lu.isInvertible()) throw GeometryError("spatial Jacobian not invertible");
  Eigen::MatrixXd Ainv = lu.inverse();

  // x_old = Ainv (x_new - b), expressed in the new symbols.
  std::map<std::string, Expr> subs;
  for (int e = 0; e < n; ++e) {
    Expr xe(0.0);
    for (int f = 0; f < n; ++f)
      xe = xe + Expr(Ainv(e, f)) * (Expr::symbol("x" + std::to_string(f + 3)) -
                                    Expr(T.b(f)));
    subs["x" + std::to_string(e + 3)] = xe;
  }

  KundtMetric out = K;
  auto sub = [&](const Expr& e) { return expr::simplify(e.substitute(subs)); };
  out.H1 = sub(K.H1);
  out.H0 = sub(K.H0);
  for (int e = 0; e < n; ++e) {
    Expr w1(0.0), w0(0.0);
    for (int f = 0; f < n; ++f) {
      w1 = w1 + sub(K.W1[static_cast<std::size_t>(f)]) * Expr(Ainv(f, e));
      w0 = w0 + sub(K.W0[static_cast<std::size_t>(f)]) * Expr(Ainv(f, e));
    }
    out.W1[static_cast<std::size_t>(e)] = w1;
    out.W0[static_cast<std::size_t>(e)] = w0;
  }
  out.gT = ExprMatrix(n, n);
  for (int e = 0; e < n; ++e)
    for (int f = 0; f < n; ++f) {
      Expr s(0.0);
      for (int g = 0; g < n; ++g)
        for (int h = 0; h < n; ++h)
          s = s + sub(K.gT(g, h)) * Expr(Ainv(g, e)) * Expr(Ainv(h, f));
      out.gT(e, f) = expr::simplify(s);
    }
  return out;
}

KundtMetric apply_vshift(const KundtMetric& K, const VShift& T) {
  if (T.h.depends_on("v"))
    throw GeometryError("v-shift function must not depend on v");
  const int n = K.transverse_dim();
  Coframe C = build_coframe(K.gT);
  Expr sstar = sigma_star(K, C);
  const Expr& h = T.h;

  KundtMetric out = K;
  for (int e = 0; e < n; ++e) {
    // W'_e = W_e(v'-h) - h_,e splits as W1 v' + (W0 - h W1 - h_,e).
    out.W0[static_cast<std::size_t>(e)] = expr::simplify(
        K.W0[static_cast<std::size_t>(e)] - h * K.W1[static_cast<std::size_t>(e)] -
        h.diff("x" + std::to_string(e + 3)));
  }
  out.H1 = expr::simplify(K.H1 - sstar * h / Expr(4.0));
  out.H0 = expr::simplify(K.H0 - K.H1 * h + sstar * h * h / Expr(8.0) - h.diff("u"));
  return out;
}

KundtMetric apply_uaffine(const KundtMetric& K, const UAffine& T) {
  if (T.scale == 0.0) throw GeometryError("u-reparametrization requires g_,u != 0");
  const double a = T.scale;
  // u_old = (u_new - offset)/a.
  std::map<std::string, Expr> subs{
      {"u", (Expr::symbol("u") - Expr(T.offset)) / Expr(a)}};
  auto sub = [&](const Expr& e) { return expr::simplify(e.substitute(subs)); };

  KundtMetric out = K;
  for (int e = 0; e < K.transverse_dim(); ++e) {
    out.W1[static_cast<std::size_t>(e)] = sub(K.W1[static_cast<std::size_t>(e)]);
    out.W0[static_cast<std::size_t>(e)] =
        sub(K.W0[static_cast<std::size_t>(e)]) / Expr(a);
  }
  out.H1 = sub(K.H1) / Expr(a);
  out.H0 = sub(K.H0) / Expr(a * a);
  ExprMatrix gT = K.gT;
  for (Eigen::Index i = 0; i < gT.rows(); ++i)
    for (Eigen::Index j = 0; j < gT.cols(); ++j) gT(i, j) = sub(K.gT(i, j));
  out.gT = gT;
  return out;
}

}  // namespace

KundtMetric apply_transform(const KundtMetric& K, const Transform& T) {
  return std::visit(
      [&](const auto& t) -> KundtMetric {
        using Tt = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<Tt, SpatialAffine>) return apply_spatial(K, t);
        else if constexpr (std::is_same_v<Tt, VShift>) return apply_vshift(K, t);
        else return apply_uaffine(K, t);
      },
      T);
}

Point map_point(const Transform& T, const Point& p) {
  return std::visit(
      [&](const auto& t) -> Point {
        using Tt = std::decay_t<decltype(t)>;
        Point q = p;
        if constexpr (std::is_same_v<Tt, SpatialAffine>) {
          q.x = t.A * p.x + t.b;
        } else if constexpr (std::is_same_v<Tt, VShift>) {
          q.v = p.v + t.h.eval(bind_point(p));
        } else {
          q.u = t.scale * p.u + t.offset;
          q.v = p.v / t.scale;
        }
        return q;
      },
      T);
}

}  // namespace kundt
