#include "kundt/curvature.hpp"

#include <cmath>

namespace kundt {

using expr::Bindings;
using expr::simplify;

namespace {

std::string coord_sym(int a) { return coord_name(a); }

// max-min spread normalized by 1 + |mean|.
struct RunningStat {
  double mn = 1e300, mx = -1e300, sum = 0.0;
  int n = 0;
  void add(double v) {
    mn = std::min(mn, v);
    mx = std::max(mx, v);
    sum += v;
    ++n;
  }
  double mean() const { return n ? sum / n : 0.0; }
  double spread() const { return n ? (mx - mn) / (1.0 + std::fabs(mean())) : 0.0; }
};

}  // namespace

ConnectionTable connection_table(const KundtMetric& K, const Coframe& C) {
  const int n = K.transverse_dim();
  ConnectionTable T;

  Expr H = assembled_H(K, C);
  std::vector<Expr> Wf(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) Wf[static_cast<std::size_t>(i)] = frame_W(K, C, i);

  T.Gamma_212 = frame_derivative(K, C, 1, H);
  T.Gamma_21i.resize(static_cast<std::size_t>(n));
  T.Gamma_2i2.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    T.Gamma_21i[static_cast<std::size_t>(i)] =
        frame_derivative(K, C, 1, Wf[static_cast<std::size_t>(i)]) / Expr(2.0);
    T.Gamma_2i2[static_cast<std::size_t>(i)] =
        simplify(frame_derivative(K, C, 3 + i, H) -
                 frame_derivative(K, C, 2, Wf[static_cast<std::size_t>(i)]));
  }

  // D_ijk = 2 m_{ie,f} m_[j^e m_k]^f
  T.D.assign(static_cast<std::size_t>(n), ExprMatrix::Constant(n, n, Expr(0.0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < j; ++k) {
        Expr s(0.0);
        for (int e = 0; e < n; ++e)
          for (int f = 0; f < n; ++f) {
            Expr dM = C.M(i, e).diff("x" + std::to_string(f + 3));
            if (dM.is_number(0.0)) continue;
            s = s + dM * (C.Minv(e, j) * C.Minv(f, k) - C.Minv(e, k) * C.Minv(f, j));
          }
        s = simplify(s);
        T.D[static_cast<std::size_t>(i)](j, k) = s;
        T.D[static_cast<std::size_t>(i)](k, j) = -s;
      }

  // A_ij = 2 W_[i;j]: the Levi-Civita parts cancel in the
  // antisymmetrization, leaving the frame-projected curl of w.
  auto curl = [&](const std::vector<Expr>& w, int i, int j) {
    Expr s(0.0);
    for (int e = 0; e < n; ++e)
      for (int f = 0; f < n; ++f) {
        Expr de = w[static_cast<std::size_t>(e)].diff("x" + std::to_string(f + 3)) -
                  w[static_cast<std::size_t>(f)].diff("x" + std::to_string(e + 3));
        if (de.is_number(0.0)) continue;
        s = s + C.Minv(e, i) * C.Minv(f, j) * de;
      }
    return simplify(s);
  };
  std::vector<Expr> w_full(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) w_full[static_cast<std::size_t>(e)] = K.W(e);
  T.A = ExprMatrix::Constant(n, n, Expr(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      Expr s = curl(w_full, i, j);
      T.A(i, j) = s;
      T.A(j, i) = -s;
    }

  // Gamma_ijk = -(D_ijk + D_jki - D_kij)/2
  T.Gamma_t.assign(static_cast<std::size_t>(n), ExprMatrix::Constant(n, n, Expr(0.0)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        T.Gamma_t[static_cast<std::size_t>(i)](j, k) = simplify(
            (T.D[static_cast<std::size_t>(i)](j, k) +
             T.D[static_cast<std::size_t>(j)](k, i) -
             T.D[static_cast<std::size_t>(k)](i, j)) *
            Expr(-0.5));

  // v-expansion coefficients in terms of the v-free profiles.
  Expr sstar = sigma_star(K, C);
  std::vector<Expr> W1f(static_cast<std::size_t>(n)), W0f(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    W1f[static_cast<std::size_t>(i)] = frame_W1(K, C, i);
    W0f[static_cast<std::size_t>(i)] = frame_W0(K, C, i);
  }
  auto Dt = [&](int i, const Expr& f) { return transverse_derivative(C, i, f); };

  T.G2.resize(static_cast<std::size_t>(n));
  T.G1.resize(static_cast<std::size_t>(n));
  T.G0.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Expr& w1 = W1f[static_cast<std::size_t>(i)];
    const Expr& w0 = W0f[static_cast<std::size_t>(i)];
    T.G2[static_cast<std::size_t>(i)] = simplify(Dt(i, sstar) - sstar * w1);
    T.G1[static_cast<std::size_t>(i)] =
        simplify(Dt(i, K.H1) - w0 * sstar / Expr(4.0) - w1.diff("u"));
    T.G0[static_cast<std::size_t>(i)] =
        simplify(Dt(i, K.H0) - w0 * K.H1 - w0.diff("u") + K.H0 * w1);
  }

  T.A1 = ExprMatrix::Constant(n, n, Expr(0.0));
  T.A0 = ExprMatrix::Constant(n, n, Expr(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      Expr a1 = curl(K.W1, i, j);
      Expr a0 = curl(K.W0, i, j);
      T.A1(i, j) = a1;
      T.A1(j, i) = -a1;
      T.A0(i, j) = a0;
      T.A0(j, i) = -a0;
    }
  return T;
}

ExprMatrix frame_W_cov_deriv(const KundtMetric& K, const Coframe& C) {
  const int n = K.transverse_dim();
  // Transverse inverse metric and Christoffels from gT.
  ExprMatrix ginv = C.Minv * C.Minv.transpose();
  std::vector<ExprMatrix> Gt(static_cast<std::size_t>(n),
                             ExprMatrix::Constant(n, n, Expr(0.0)));
  for (int e = 0; e < n; ++e)
    for (int f = 0; f < n; ++f)
      for (int g = 0; g <= f; ++g) {
        Expr s(0.0);
        for (int h = 0; h < n; ++h) {
          Expr term = K.gT(h, g).diff("x" + std::to_string(f + 3)) +
                      K.gT(h, f).diff("x" + std::to_string(g + 3)) -
                      K.gT(f, g).diff("x" + std::to_string(h + 3));
          s = s + ginv(e, h) * term;
        }
        s = simplify(s * Expr(0.5));
        Gt[static_cast<std::size_t>(e)](f, g) = s;
        Gt[static_cast<std::size_t>(e)](g, f) = s;
      }

  // nabla_f w_e = d_f w_e - Gamma^g_{fe} w_g, then frame projection.
  ExprMatrix cov(n, n);
  for (int e = 0; e < n; ++e)
    for (int f = 0; f < n; ++f) {
      Expr s = K.W(e).diff("x" + std::to_string(f + 3));
      for (int g = 0; g < n; ++g)
        s = s - Gt[static_cast<std::size_t>(g)](f, e) * K.W(g);
      cov(e, f) = s;
    }
  ExprMatrix out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr s(0.0);
      for (int e = 0; e < n; ++e)
        for (int f = 0; f < n; ++f) s = s + C.Minv(e, i) * C.Minv(f, j) * cov(e, f);
      out(i, j) = simplify(s);
    }
  return out;
}

namespace {

// Transverse coordinate curvature of gT, all indices lowered.
Tensor4E transverse_riemann(const KundtMetric& K, const Coframe& C) {
  const int n = K.transverse_dim();
  ExprMatrix ginv = C.Minv * C.Minv.transpose();
  auto dx = [](int e) { return "x" + std::to_string(e + 3); };

  std::vector<ExprMatrix> G(static_cast<std::size_t>(n),
                            ExprMatrix::Constant(n, n, Expr(0.0)));
  for (int e = 0; e < n; ++e)
    for (int f = 0; f < n; ++f)
      for (int g = 0; g <= f; ++g) {
        Expr s(0.0);
        for (int h = 0; h < n; ++h)
          s = s + ginv(e, h) * (K.gT(h, g).diff(dx(f)) + K.gT(h, f).diff(dx(g)) -
                                K.gT(f, g).diff(dx(h)));
        s = simplify(s * Expr(0.5));
        G[static_cast<std::size_t>(e)](f, g) = s;
        G[static_cast<std::size_t>(e)](g, f) = s;
      }

  Tensor4E R(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          Expr s = G[static_cast<std::size_t>(a)](e, b).diff(dx(c)) -
                   G[static_cast<std::size_t>(a)](c, b).diff(dx(e));
          for (int k = 0; k < n; ++k)
            s = s + G[static_cast<std::size_t>(a)](c, k) * G[static_cast<std::size_t>(k)](e, b) -
                G[static_cast<std::size_t>(a)](e, k) * G[static_cast<std::size_t>(k)](c, b);
          R.at(a, b, c, e) = s;
        }

  // lower first index, then frame-project all four
  Tensor4E Rlow(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          Expr s(0.0);
          for (int k = 0; k < n; ++k) s = s + K.gT(a, k) * R.at(k, b, c, e);
          Rlow.at(a, b, c, e) = s;
        }

  Tensor4E out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Expr s(0.0);
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int c = 0; c < n; ++c)
                for (int e = 0; e < n; ++e) {
                  const Expr& r = Rlow.at(a, b, c, e);
                  if (r.is_number(0.0)) continue;
                  s = s + C.Minv(a, i) * C.Minv(b, j) * C.Minv(c, k) * C.Minv(e, l) * r;
                }
          out.at(i, j, k, l) = simplify(s);
        }
  return out;
}

}  // namespace

RiemannBW riemann_components(const KundtMetric& K, const Coframe& C) {
  const int n = K.transverse_dim();
  RiemannBW R;
  Expr H = assembled_H(K, C);
  std::vector<Expr> Wf(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) Wf[static_cast<std::size_t>(i)] = frame_W(K, C, i);
  ExprMatrix covW = frame_W_cov_deriv(K, C);

  auto dv = [](const Expr& e) { return e.diff("v"); };

  R.R121i.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    R.R121i[static_cast<std::size_t>(i)] =
        simplify(Expr(-0.5) * dv(dv(Wf[static_cast<std::size_t>(i)])));

  Expr quad(0.0);
  for (int i = 0; i < n; ++i)
    quad = quad + dv(Wf[static_cast<std::size_t>(i)]) * dv(Wf[static_cast<std::size_t>(i)]);
  R.R1212 = simplify(-dv(dv(H)) + quad / Expr(4.0));

  R.R12ij = ExprMatrix::Constant(n, n, Expr(0.0));
  R.R1i2j = ExprMatrix::Constant(n, n, Expr(0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i != j) {
        Expr s = (Wf[static_cast<std::size_t>(i)] * dv(dv(Wf[static_cast<std::size_t>(j)])) -
                  Wf[static_cast<std::size_t>(j)] * dv(dv(Wf[static_cast<std::size_t>(i)]))) /
                     Expr(2.0) +
                 (dv(covW(i, j)) - dv(covW(j, i))) / Expr(2.0);
        R.R12ij(i, j) = simplify(s);
      }
      R.R1i2j(i, j) = simplify(
          Expr(0.5) * (-Wf[static_cast<std::size_t>(j)] * dv(dv(Wf[static_cast<std::size_t>(i)])) +
                       dv(covW(i, j)) -
                       Expr(0.5) * dv(Wf[static_cast<std::size_t>(i)]) *
                           dv(Wf[static_cast<std::size_t>(j)])));
    }
  R.Rtrans = transverse_riemann(K, C);
  return R;
}

CSI0Report csi0_check(const KundtMetric& K, const Coframe& C,
                      const std::vector<Point>& samples, double tol) {
  const int n = K.transverse_dim();
  CSI0Report rep;
  rep.tol = tol;

  Expr H = assembled_H(K, C);
  std::vector<Expr> Wf(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) Wf[static_cast<std::size_t>(i)] = frame_W(K, C, i);
  ExprMatrix covW = frame_W_cov_deriv(K, C);
  Tensor4E Rt = transverse_riemann(K, C);

  std::vector<Expr> Wvv(static_cast<std::size_t>(n)), Wv(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Wv[static_cast<std::size_t>(i)] = Wf[static_cast<std::size_t>(i)].diff("v");
    Wvv[static_cast<std::size_t>(i)] = Wv[static_cast<std::size_t>(i)].diff("v");
  }
  Expr quad(0.0);
  for (int i = 0; i < n; ++i)
    quad = quad + Wv[static_cast<std::size_t>(i)] * Wv[static_cast<std::size_t>(i)];
  Expr sigma_expr = H.diff("v").diff("v") - quad / Expr(4.0);

  ExprMatrix a_expr(n, n), s_expr(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      a_expr(i, j) = (covW(i, j).diff("v") - covW(j, i).diff("v")) / Expr(2.0);
      s_expr(i, j) = (covW(i, j).diff("v") + covW(j, i).diff("v")) / Expr(2.0) -
                     Expr(0.5) * Wv[static_cast<std::size_t>(i)] * Wv[static_cast<std::size_t>(j)];
    }

  double max_wvv = 0.0, wv_scale = 0.0;
  RunningStat sstat;
  std::vector<RunningStat> astat(static_cast<std::size_t>(n * n));
  std::vector<RunningStat> ststat(static_cast<std::size_t>(n * n));
  std::vector<RunningStat> rtstat(static_cast<std::size_t>(n * n * n * n));

  for (const auto& p : samples) {
    Bindings b = bind_point(p);
    for (int i = 0; i < n; ++i) {
      max_wvv = std::max(max_wvv, std::fabs(Wvv[static_cast<std::size_t>(i)].eval(b)));
      wv_scale = std::max(wv_scale, std::fabs(Wv[static_cast<std::size_t>(i)].eval(b)));
    }
    sstat.add(sigma_expr.eval(b));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        astat[static_cast<std::size_t>(i * n + j)].add(a_expr(i, j).eval(b));
        ststat[static_cast<std::size_t>(i * n + j)].add(s_expr(i, j).eval(b));
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            rtstat[static_cast<std::size_t>(((i * n + j) * n + k) * n + l)].add(
                Rt.at(i, j, k, l).eval(b));
      }
  }

  rep.max_W_vv = max_wvv;
  rep.sigma_measured = sstat.mean();
  rep.sigma_spread = sstat.spread();
  rep.a_measured = Eigen::MatrixXd::Zero(n, n);
  rep.s_measured = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      rep.a_measured(i, j) = astat[static_cast<std::size_t>(i * n + j)].mean();
      rep.s_measured(i, j) = ststat[static_cast<std::size_t>(i * n + j)].mean();
      rep.a_spread = std::max(rep.a_spread, astat[static_cast<std::size_t>(i * n + j)].spread());
      rep.s_spread = std::max(rep.s_spread, ststat[static_cast<std::size_t>(i * n + j)].spread());
    }
  for (auto& st : rtstat) rep.rtrans_spread = std::max(rep.rtrans_spread, st.spread());

  rep.residuals["Wcsi1"] = rep.max_W_vv;
  rep.residuals["Wcsi2"] = rep.sigma_spread;
  rep.residuals["Wcsi3"] = rep.a_spread;
  rep.residuals["Wcsi4"] = rep.s_spread;
  rep.residuals["Rtrans"] = rep.rtrans_spread;

  double zero_tol = tol * (1.0 + wv_scale);
  rep.passes = rep.max_W_vv <= zero_tol && rep.sigma_spread <= tol &&
               rep.a_spread <= tol && rep.s_spread <= tol && rep.rtrans_spread <= tol;
  return rep;
}

// ---------------------------------------------------------------------------
// Coordinate oracle

CoordVectorField make_vector_field(int dim, ExprVector comps) {
  CoordVectorField f;
  f.comps = std::move(comps);
  f.d.resize(static_cast<std::size_t>(dim));
  for (int a = 0; a < dim; ++a) {
    ExprVector da(dim);
    for (int c = 0; c < dim; ++c) da(c) = f.comps(c).diff(coord_sym(a));
    f.d[static_cast<std::size_t>(a)] = std::move(da);
  }
  return f;
}

CoordinateOracle::CoordinateOracle(const KundtMetric& K, const Coframe& C)
    : N_(K.dim) {
  g_ = coordinate_metric(K, C);
  dg_.resize(static_cast<std::size_t>(N_));
  ddg_.assign(static_cast<std::size_t>(N_),
              std::vector<ExprMatrix>(static_cast<std::size_t>(N_)));
  for (int a = 0; a < N_; ++a) dg_[static_cast<std::size_t>(a)] = differentiate(g_, coord_sym(a));
  for (int a = 0; a < N_; ++a)
    for (int b = 0; b < N_; ++b)
      ddg_[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          differentiate(dg_[static_cast<std::size_t>(a)], coord_sym(b));
}

struct CoordinateOracle::Numeric {
  Eigen::MatrixXd g, ginv;
  std::vector<Eigen::MatrixXd> dg;
  std::vector<std::vector<Eigen::MatrixXd>> ddg;
};

CoordinateOracle::Numeric CoordinateOracle::at(const Point& p) const {
  Bindings b = bind_point(p);
  Numeric nm;
  nm.g = evaluate(g_, b);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(nm.g);
  if (!lu.isInvertible()) throw GeometryError("singular metric at sample point");
  nm.ginv = lu.inverse();
  nm.dg.resize(static_cast<std::size_t>(N_));
  nm.ddg.assign(static_cast<std::size_t>(N_),
                std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(N_)));
  for (int a = 0; a < N_; ++a) nm.dg[static_cast<std::size_t>(a)] = evaluate(dg_[static_cast<std::size_t>(a)], b);
  for (int a = 0; a < N_; ++a)
    for (int c = 0; c < N_; ++c)
      nm.ddg[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)] =
          evaluate(ddg_[static_cast<std::size_t>(a)][static_cast<std::size_t>(c)], b);
  return nm;
}

Eigen::MatrixXd CoordinateOracle::metric(const Point& p) const {
  return evaluate(g_, bind_point(p));
}

std::vector<Eigen::MatrixXd> CoordinateOracle::christoffel(const Point& p) const {
  Numeric nm = at(p);
  std::vector<Eigen::MatrixXd> G(static_cast<std::size_t>(N_),
                                 Eigen::MatrixXd::Zero(N_, N_));
  for (int a = 0; a < N_; ++a)
    for (int b = 0; b < N_; ++b)
      for (int c = 0; c <= b; ++c) {
        double s = 0.0;
        for (int d = 0; d < N_; ++d)
          s += nm.ginv(a, d) * (nm.dg[static_cast<std::size_t>(b)](d, c) +
                                nm.dg[static_cast<std::size_t>(c)](d, b) -
                                nm.dg[static_cast<std::size_t>(d)](b, c));
        G[static_cast<std::size_t>(a)](b, c) = 0.5 * s;
        G[static_cast<std::size_t>(a)](c, b) = 0.5 * s;
      }
  return G;
}

Tensor4 CoordinateOracle::riemann(const Point& p) const {
  Numeric nm = at(p);
  const int N = N_;

  // Gamma and its coordinate derivative from the cached tables.
  std::vector<Eigen::MatrixXd> G(static_cast<std::size_t>(N), Eigen::MatrixXd::Zero(N, N));
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c <= b; ++c) {
        double s = 0.0;
        for (int d = 0; d < N; ++d)
          s += nm.ginv(a, d) * (nm.dg[static_cast<std::size_t>(b)](d, c) +
                                nm.dg[static_cast<std::size_t>(c)](d, b) -
                                nm.dg[static_cast<std::size_t>(d)](b, c));
        G[static_cast<std::size_t>(a)](b, c) = 0.5 * s;
        G[static_cast<std::size_t>(a)](c, b) = 0.5 * s;
      }

  // d_e ginv = -ginv dg[e] ginv
  std::vector<Eigen::MatrixXd> dginv(static_cast<std::size_t>(N));
  for (int e = 0; e < N; ++e)
    dginv[static_cast<std::size_t>(e)] = -nm.ginv * nm.dg[static_cast<std::size_t>(e)] * nm.ginv;

  // dG[e][a](b,c) = d_e Gamma^a_{bc}
  std::vector<std::vector<Eigen::MatrixXd>> dG(
      static_cast<std::size_t>(N),
      std::vector<Eigen::MatrixXd>(static_cast<std::size_t>(N), Eigen::MatrixXd::Zero(N, N)));
  for (int e = 0; e < N; ++e)
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b)
        for (int c = 0; c <= b; ++c) {
          double s = 0.0;
          for (int d = 0; d < N; ++d) {
            s += dginv[static_cast<std::size_t>(e)](a, d) *
                 (nm.dg[static_cast<std::size_t>(b)](d, c) + nm.dg[static_cast<std::size_t>(c)](d, b) -
                  nm.dg[static_cast<std::size_t>(d)](b, c));
            s += nm.ginv(a, d) *
                 (nm.ddg[static_cast<std::size_t>(b)][static_cast<std::size_t>(e)](d, c) +
                  nm.ddg[static_cast<std::size_t>(c)][static_cast<std::size_t>(e)](d, b) -
                  nm.ddg[static_cast<std::size_t>(d)][static_cast<std::size_t>(e)](b, c));
          }
          dG[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)](b, c) = 0.5 * s;
          dG[static_cast<std::size_t>(e)][static_cast<std::size_t>(a)](c, b) = 0.5 * s;
        }

  // R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}
  Tensor4 R(N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) {
          double s = dG[static_cast<std::size_t>(c)][static_cast<std::size_t>(a)](d, b) -
                     dG[static_cast<std::size_t>(d)][static_cast<std::size_t>(a)](c, b);
          for (int e = 0; e < N; ++e)
            s += G[static_cast<std::size_t>(a)](c, e) * G[static_cast<std::size_t>(e)](d, b) -
                 G[static_cast<std::size_t>(a)](d, e) * G[static_cast<std::size_t>(e)](c, b);
          R.at(a, b, c, d) = s;
        }

  // lower the first index
  Tensor4 Rl(N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) {
          double s = 0.0;
          for (int e = 0; e < N; ++e) s += nm.g(a, e) * R.at(e, b, c, d);
          Rl.at(a, b, c, d) = s;
        }
  return Rl;
}

Eigen::MatrixXd CoordinateOracle::lie_derivative(const CoordVectorField& zeta,
                                                 const Point& p) const {
  Bindings b = bind_point(p);
  Eigen::VectorXd z = evaluate(zeta.comps, b);
  std::vector<Eigen::VectorXd> dz(static_cast<std::size_t>(N_));
  for (int a = 0; a < N_; ++a)
    dz[static_cast<std::size_t>(a)] = evaluate(zeta.d[static_cast<std::size_t>(a)], b);
  Eigen::MatrixXd g = evaluate(g_, b);
  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(N_));
  for (int a = 0; a < N_; ++a) dg[static_cast<std::size_t>(a)] = evaluate(dg_[static_cast<std::size_t>(a)], b);

  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(N_, N_);
  for (int a = 0; a < N_; ++a)
    for (int bb = 0; bb < N_; ++bb) {
      double s = 0.0;
      for (int c = 0; c < N_; ++c) {
        s += z(c) * dg[static_cast<std::size_t>(c)](a, bb);
        s += g(c, bb) * dz[static_cast<std::size_t>(a)](c);
        s += g(a, c) * dz[static_cast<std::size_t>(bb)](c);
      }
      L(a, bb) = s;
    }
  return L;
}

Eigen::MatrixXd CoordinateOracle::nabla_lower(const CoordVectorField& zeta,
                                              const Point& p) const {
  Bindings b = bind_point(p);
  Eigen::VectorXd z = evaluate(zeta.comps, b);
  std::vector<Eigen::VectorXd> dz(static_cast<std::size_t>(N_));
  for (int a = 0; a < N_; ++a)
    dz[static_cast<std::size_t>(a)] = evaluate(zeta.d[static_cast<std::size_t>(a)], b);
  Eigen::MatrixXd g = evaluate(g_, b);
  std::vector<Eigen::MatrixXd> dg(static_cast<std::size_t>(N_));
  for (int a = 0; a < N_; ++a) dg[static_cast<std::size_t>(a)] = evaluate(dg_[static_cast<std::size_t>(a)], b);
  auto G = christoffel(p);

  // nabla_a zeta_b with zeta_b = g_bc zeta^c
  Eigen::VectorXd zl = g * z;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(N_, N_);
  for (int a = 0; a < N_; ++a)
    for (int bb = 0; bb < N_; ++bb) {
      double s = 0.0;
      for (int c = 0; c < N_; ++c) {
        s += dg[static_cast<std::size_t>(a)](bb, c) * z(c);
        s += g(bb, c) * dz[static_cast<std::size_t>(a)](c);
        s -= G[static_cast<std::size_t>(c)](a, bb) * zl(c);
      }
      out(a, bb) = s;
    }
  return out;
}

Eigen::MatrixXd CoordinateOracle::nabla_l(const Point& p) const {
  auto G = christoffel(p);
  // l = du, so nabla_a l_b = -Gamma^u_{ab}
  return -G[0];
}

Tensor4 riemann_oracle(const KundtMetric& K, const Coframe& C, const Point& p) {
  return CoordinateOracle(K, C).riemann(p);
}

Eigen::MatrixXd lie_derivative_oracle(const KundtMetric& K, const Coframe& C,
                                      const ExprVector& vec, const Point& p) {
  CoordinateOracle oracle(K, C);
  return oracle.lie_derivative(make_vector_field(K.dim, vec), p);
}

Tensor4 project_riemann(const Tensor4& R, const Eigen::MatrixXd& E) {
  const int N = R.n;
  Tensor4 out(N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int d = 0; d < N; ++d) {
          double s = 0.0;
          for (int p = 0; p < N; ++p)
            for (int q = 0; q < N; ++q)
              for (int r = 0; r < N; ++r)
                for (int t = 0; t < N; ++t)
                  s += R.at(p, q, r, t) * E(p, a) * E(q, b) * E(r, c) * E(t, d);
          out.at(a, b, c, d) = s;
        }
  return out;
}

KundtVectorReport kundt_vector_check(const KundtMetric& K, const Coframe& C,
                                     const std::vector<Point>& samples, double tol) {
  CoordinateOracle oracle(K, C);
  KundtVectorReport rep;
  double scale = 0.0;
  for (const auto& p : samples) {
    Eigen::MatrixXd M = oracle.nabla_l(p);
    Eigen::MatrixXd E = frame_vectors(K, C, p);
    Eigen::MatrixXd T = E.transpose() * M * E;
    const int N = K.dim;
    for (int a = 0; a < N; ++a)
      for (int b = 0; b < N; ++b) {
        scale = std::max(scale, std::fabs(T(a, b)));
        bool allowed = (a == 1 && b == 1) || (a == 1 && b >= 2) || (a >= 2 && b == 1);
        if (!allowed)
          rep.max_violation = std::max(rep.max_violation, std::fabs(T(a, b)));
      }
    rep.max_L11 = std::max(rep.max_L11, std::fabs(T(1, 1)));
    for (int i = 2; i < K.dim; ++i) {
      rep.max_L1i = std::max(rep.max_L1i, std::fabs(T(1, i)));
      rep.max_Li1 = std::max(rep.max_Li1, std::fabs(T(i, 1)));
    }
  }
  double t = tol * (1.0 + scale);
  rep.form_holds = rep.max_violation <= t;
  rep.L_ij_zero = rep.form_holds;  // the transverse block is part of the span test
  return rep;
}

OracleComparison compare_riemann(const KundtMetric& K, const Coframe& C,
                                 const std::vector<Point>& samples, double rel_tol) {
  RiemannBW F = riemann_components(K, C);
  CoordinateOracle oracle(K, C);
  const int n = K.transverse_dim();

  OracleComparison cmp;
  bool sign_fixed = false;
  double max_dev = 0.0;

  for (const auto& p : samples) {
    Bindings b = bind_point(p);
    Tensor4 Rp = project_riemann(oracle.riemann(p), frame_vectors(K, C, p));

    std::vector<std::pair<double, double>> pairs;  // (frame formula, oracle)
    pairs.emplace_back(F.R1212.eval(b), Rp.at(0, 1, 0, 1));
    for (int i = 0; i < n; ++i)
      pairs.emplace_back(F.R121i[static_cast<std::size_t>(i)].eval(b),
                         Rp.at(0, 1, 0, 2 + i));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        pairs.emplace_back(F.R12ij(i, j).eval(b), Rp.at(0, 1, 2 + i, 2 + j));
        pairs.emplace_back(F.R1i2j(i, j).eval(b), Rp.at(0, 2 + i, 1, 2 + j));
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            pairs.emplace_back(F.Rtrans.at(i, j, k, l).eval(b),
                               Rp.at(2 + i, 2 + j, 2 + k, 2 + l));
      }

    for (auto& [f, o] : pairs) {
      double mag = std::max(std::fabs(f), std::fabs(o));
      if (!sign_fixed && mag > 1e-6) {
        cmp.global_sign = (f * o >= 0.0) ? 1 : -1;
        sign_fixed = true;
      }
    }
    for (auto& [f, o] : pairs) {
      double dev = std::fabs(f - cmp.global_sign * o);
      double denom = 1.0 + std::max(std::fabs(f), std::fabs(o));
      max_dev = std::max(max_dev, dev / denom);
    }
  }
  cmp.max_dev = max_dev;
  cmp.within_tol = max_dev <= rel_tol;
  cmp.sign_consistent = true;
  return cmp;
}

}  // namespace kundt
