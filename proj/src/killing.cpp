#include "kundt/killing.hpp"

#include <cmath>

namespace kundt {

using expr::Bindings;
using expr::EvalError;
using expr::simplify;

namespace {

constexpr int kMaxVOrder = 6;

std::vector<Expr> v_coefficients(const Expr& e, int max_order) {
  return expr::taylor_coefficients(e, "v", max_order);
}

void check_candidate(const KundtMetric& K, const KillingCandidate& cand) {
  if (cand.zeta1.depends_on("v") || cand.zeta30.depends_on("v") ||
      cand.zeta20.depends_on("v"))
    throw KillingError("candidate data must not depend on v");
  for (int e = 1; e < K.transverse_dim(); ++e)
    if (cand.zeta1.depends_on("x" + std::to_string(e + 3)))
      throw KillingError("zeta1 may depend on u and x3 only");
}

}  // namespace

KillingComponents build_components(const KundtMetric& K, const Coframe& C,
                                   const KillingCandidate& cand) {
  check_candidate(K, cand);
  KillingComponents out;
  Expr v = Expr::symbol("v");
  Expr sstar = sigma_star(K, C);
  Expr W13 = frame_W1(K, C, 0);
  Expr d3z1 = transverse_derivative(C, 0, cand.zeta1);

  out.zeta1 = cand.zeta1;
  out.z3_v1 = simplify(-d3z1);
  out.z3_v0 = cand.zeta30;
  out.zeta3 = simplify(out.z3_v1 * v + out.z3_v0);

  out.z2_v2 = simplify(sstar * cand.zeta1 / Expr(4.0) - W13 * d3z1);
  out.z2_v1 = simplify(W13 * cand.zeta30 - cand.zeta1.diff("u") + K.H1 * cand.zeta1);
  out.z2_v0 = cand.zeta20;
  out.zeta2 = simplify(out.z2_v2 * v * v / Expr(2.0) + out.z2_v1 * v + out.z2_v0);
  return out;
}

ExprVector killing_vector_field(const KundtMetric& K, const Coframe& C,
                                const KillingCandidate& cand) {
  KillingComponents comps = build_components(K, C, cand);
  std::vector<Expr> zt(static_cast<std::size_t>(K.transverse_dim()), Expr(0.0));
  zt[0] = comps.zeta3;
  return frame_to_coordinate(K, C, comps.zeta1, comps.zeta2, zt);
}

namespace {

// Symbolic frame vectors as an N x N matrix of expressions
// (column a = frame vector e_{a+1} in coordinate components).
ExprMatrix symbolic_frame(const KundtMetric& K, const Coframe& C) {
  const int N = K.dim;
  const int n = K.transverse_dim();
  ExprMatrix E = ExprMatrix::Constant(N, N, Expr(0.0));
  E(1, 0) = Expr(1.0);
  E(0, 1) = Expr(1.0);
  E(1, 1) = -assembled_H(K, C);
  for (int i = 0; i < n; ++i) {
    Expr wsum(0.0);
    for (int e = 0; e < n; ++e) {
      E(2 + e, 2 + i) = C.Minv(e, i);
      wsum = wsum + C.Minv(e, i) * K.W(e);
    }
    E(1, 2 + i) = simplify(-wsum);
  }
  return E;
}

// Symbolic coordinate Lie derivative (L_zeta g)_ab.
ExprMatrix symbolic_lie(const KundtMetric& K, const Coframe& C,
                        const ExprVector& zeta) {
  const int N = K.dim;
  ExprMatrix g = coordinate_metric(K, C);
  ExprMatrix L(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      Expr s(0.0);
      for (int c = 0; c < N; ++c) {
        const std::string ca = coord_name(a);
        const std::string cb = coord_name(b);
        s = s + zeta(c) * g(a, b).diff(coord_name(c));
        s = s + g(c, b) * zeta(c).diff(ca);
        s = s + g(a, c) * zeta(c).diff(cb);
      }
      s = simplify(s);
      L(a, b) = s;
      L(b, a) = s;
    }
  return L;
}

}  // namespace

ResidualReport killing_residuals(const KundtMetric& K, const Coframe& C,
                                 const KillingCandidate& cand,
                                 const std::vector<Point>& samples, double tol) {
  const int N = K.dim;
  const int n = K.transverse_dim();
  ResidualReport rep;
  rep.tol = tol;

  KillingComponents comps = build_components(K, C, cand);
  std::vector<Expr> zt(static_cast<std::size_t>(n), Expr(0.0));
  zt[0] = comps.zeta3;
  ExprVector vec = frame_to_coordinate(K, C, comps.zeta1, comps.zeta2, zt);
  ExprMatrix L = symbolic_lie(K, C, vec);
  ExprMatrix E = symbolic_frame(K, C);

  // Frame projection T_ab = e_a^c e_b^d L_cd.
  ExprMatrix T = ExprMatrix::Constant(N, N, Expr(0.0));
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      Expr s(0.0);
      for (int c = 0; c < N; ++c) {
        if (E(c, a).is_number(0.0)) continue;
        for (int d = 0; d < N; ++d) {
          if (E(d, b).is_number(0.0) || L(c, d).is_number(0.0)) continue;
          s = s + E(c, a) * E(d, b) * L(c, d);
        }
      }
      s = simplify(s);
      T(a, b) = s;
      T(b, a) = s;
    }

  std::vector<std::string> keys;
  std::vector<Expr> exprs;
  auto add_entry = [&](const std::string& key, const Expr& e) {
    keys.push_back(key);
    exprs.push_back(e);
  };

  // First-order transport pair for zeta30 and D3 zeta1.
  Expr d3z1 = transverse_derivative(C, 0, cand.zeta1);
  for (int i = 0; i < n; ++i) {
    Expr first = transverse_derivative(C, i, cand.zeta30) + frame_W0(K, C, i) * d3z1;
    Expr second = transverse_derivative(C, i, d3z1) - frame_W1(K, C, i) * d3z1;
    std::string xi = "x" + std::to_string(i + 3);
    add_entry("3i.dzeta30." + xi, simplify(first));
    add_entry("3i.dD3zeta1." + xi, simplify(second));
  }

  // v-order split of the (22), (23) and (2n) frame equations.
  auto add_orders = [&](const std::string& base, const Expr& e, int keyed_orders) {
    rep.unexpanded[base] = e;
    std::vector<Expr> coeff = v_coefficients(e, kMaxVOrder);
    for (int k = 0; k <= kMaxVOrder; ++k) {
      std::string key = k <= keyed_orders ? base + ".v" + std::to_string(k)
                                          : base + ".v" + std::to_string(k) + "+";
      if (coeff[static_cast<std::size_t>(k)].is_number(0.0) && k > keyed_orders) continue;
      add_entry(key, coeff[static_cast<std::size_t>(k)]);
    }
  };

  add_orders("22", T(1, 1), 3);
  add_orders("23", T(1, 2), 2);
  for (int i = 1; i < n; ++i)
    add_orders("2n.x" + std::to_string(i + 3), T(1, 2 + i), 2);

  // Remaining frame pairs as assembly-consistency checks.
  add_entry("aux.11", T(0, 0));
  add_entry("aux.12", T(0, 1));
  for (int i = 0; i < n; ++i)
    add_entry("aux.1" + std::to_string(i + 3), T(0, 2 + i));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j)
      add_entry("aux." + std::to_string(i + 3) + std::to_string(j + 3), T(2 + i, 2 + j));

  std::vector<double> maxima = max_abs_over(exprs, samples);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    rep.entries[keys[i]] = ResidualEntry{exprs[i], maxima[i]};
    rep.max_residual = std::max(rep.max_residual, maxima[i]);
  }

  // Coordinate oracle cross-check at up to 10 samples.
  CoordinateOracle oracle(K, C);
  CoordVectorField field = make_vector_field(N, vec);
  std::size_t ncheck = std::min<std::size_t>(10, samples.size());
  for (std::size_t s = 0; s < ncheck; ++s) {
    Eigen::MatrixXd lm = oracle.lie_derivative(field, samples[s]);
    rep.oracle_max = std::max(rep.oracle_max, lm.cwiseAbs().maxCoeff());
  }
  rep.killing = rep.max_residual < tol;
  return rep;
}

const char* causality_name(Causality c) {
  switch (c) {
    case Causality::Null: return "null";
    case Causality::Timelike: return "timelike";
    case Causality::SpacelikeSomewhere: return "spacelike-somewhere";
    case Causality::Mixed: return "mixed";
  }
  return "?";
}

CausalityReport causality(const KundtMetric& K, const Coframe& C,
                          const KillingCandidate& cand,
                          const std::vector<Point>& samples, double tol) {
  CausalityReport rep;
  KillingComponents comps = build_components(K, C, cand);
  std::vector<Expr> zt(static_cast<std::size_t>(K.transverse_dim()), Expr(0.0));
  zt[0] = comps.zeta3;
  ExprVector vec = frame_to_coordinate(K, C, comps.zeta1, comps.zeta2, zt);
  ExprMatrix g = coordinate_metric(K, C);

  Expr m(0.0);
  for (int a = 0; a < K.dim; ++a)
    for (int b = 0; b < K.dim; ++b) {
      if (g(a, b).is_number(0.0)) continue;
      m = m + g(a, b) * vec(a) * vec(b);
    }
  m = simplify(m);

  Expr sstar = sigma_star(K, C);
  Expr W13 = frame_W1(K, C, 0);
  Expr d3z1 = transverse_derivative(C, 0, cand.zeta1);
  const Expr& z1 = cand.zeta1;

  // Physical-magnitude order conditions (physical magnitude = -m).
  Expr v2cond = simplify(-sstar * z1 * z1 / Expr(4.0) + W13 * d3z1 * z1 - d3z1 * d3z1);
  Expr v1cond = simplify(z1 * comps.z2_v1 - d3z1 * cand.zeta30);
  Expr v0cond = simplify(-cand.zeta30 * cand.zeta30 - Expr(2.0) * z1 * cand.zeta20);
  // Reference arrangement with the opposite zeta3-term signs.
  Expr v2legacy = simplify(-sstar * z1 * z1 / Expr(4.0) + W13 * d3z1 * z1 + d3z1 * d3z1);
  Expr v0legacy = simplify(cand.zeta30 * cand.zeta30 - Expr(2.0) * z1 * cand.zeta20);

  double min_m = 1e300, max_m = -1e300, max_abs = 0.0;
  double v2mx = -1e300, v1mx = 0.0, v0mx = -1e300, v2lg = -1e300, v0lg = -1e300;
  double odev = 0.0;
  for (const auto& p : samples) {
    Bindings b = bind_point(p);
    double mv = m.eval(b);
    min_m = std::min(min_m, mv);
    max_m = std::max(max_m, mv);
    max_abs = std::max(max_abs, std::fabs(mv));
    v2mx = std::max(v2mx, v2cond.eval(b));
    v1mx = std::max(v1mx, std::fabs(v1cond.eval(b)));
    v0mx = std::max(v0mx, v0cond.eval(b));
    v2lg = std::max(v2lg, v2legacy.eval(b));
    v0lg = std::max(v0lg, v0legacy.eval(b));

    // Independent numeric assembly of the magnitude.
    Eigen::VectorXd z(K.dim);
    for (int a = 0; a < K.dim; ++a) z(a) = vec(a).eval(b);
    Eigen::MatrixXd gm(K.dim, K.dim);
    for (int a = 0; a < K.dim; ++a)
      for (int c = 0; c < K.dim; ++c) gm(a, c) = g(a, c).eval(b);
    double mnum = z.dot(gm * z);
    odev = std::max(odev, std::fabs(std::fabs(mv) - std::fabs(mnum)));
  }

  rep.min_m = min_m;
  rep.max_m = max_m;
  rep.max_abs = max_abs;
  rep.v2_max = v2mx;
  rep.v1_abs = v1mx;
  rep.v0_max = v0mx;
  rep.v2_legacy_max = v2lg;
  rep.v0_legacy_max = v0lg;
  rep.oracle_dev = odev;
  rep.convention_sign = -1;

  double scale = tol * (1.0 + max_abs);
  bool has_time = max_m > scale;    // physical magnitude negative somewhere
  bool has_space = min_m < -scale;  // physical magnitude positive somewhere
  if (max_abs <= scale)
    rep.classification = Causality::Null;
  else if (has_time && !has_space)
    rep.classification = Causality::Timelike;
  else if (has_space && !has_time)
    rep.classification = Causality::SpacelikeSomewhere;
  else
    rep.classification = Causality::Mixed;
  return rep;
}

CcnvReport ccnv_residuals(const KundtMetric& K, const Coframe& C,
                          const KillingCandidate& cand,
                          const std::vector<Point>& samples, double tol) {
  const int n = K.transverse_dim();
  CcnvReport rep;
  rep.tol = tol;

  KillingComponents comps = build_components(K, C, cand);
  ConnectionTable ct = connection_table(K, C);
  Expr d3z1 = transverse_derivative(C, 0, cand.zeta1);

  std::vector<Expr> zt(static_cast<std::size_t>(n), Expr(0.0));
  zt[0] = comps.zeta3;
  ExprVector vec = frame_to_coordinate(K, C, comps.zeta1, comps.zeta2, zt);

  // zeta_[a;b] in frame slots.  Christoffel symbols drop out of the
  // antisymmetrization, so this is the frame projection of the plain
  // coordinate curl of the lowered components.
  ExprMatrix g = coordinate_metric(K, C);
  ExprVector lowered(K.dim);
  for (int a = 0; a < K.dim; ++a) {
    Expr s(0.0);
    for (int c = 0; c < K.dim; ++c) {
      if (g(a, c).is_number(0.0)) continue;
      s = s + g(a, c) * vec(c);
    }
    lowered(a) = simplify(s);
  }
  ExprMatrix F(K.dim, K.dim);
  for (int a = 0; a < K.dim; ++a)
    for (int b = 0; b < K.dim; ++b)
      F(a, b) = a < b ? simplify((lowered(b).diff(coord_name(a)) -
                                  lowered(a).diff(coord_name(b))) /
                                 Expr(2.0))
                      : Expr(0.0);

  ExprMatrix E = symbolic_frame(K, C);
  std::map<std::string, Expr> eqs;
  auto frame_name = [&](int a) {
    if (a == 0) return std::string("1");
    if (a == 1) return std::string("2");
    return a == 2 ? std::string("3") : "x" + std::to_string(a + 1);
  };
  for (int a = 0; a < K.dim; ++a)
    for (int b = a + 1; b < K.dim; ++b) {
      Expr s(0.0);
      for (int c = 0; c < K.dim; ++c) {
        if (E(c, a).is_number(0.0)) continue;
        for (int d = 0; d < K.dim; ++d) {
          if (E(d, b).is_number(0.0)) continue;
          Expr fcd = c < d ? F(c, d) : (c > d ? -F(d, c) : Expr(0.0));
          if (fcd.is_number(0.0)) continue;
          s = s + E(c, a) * E(d, b) * fcd;
        }
      }
      eqs["az." + frame_name(a) + frame_name(b)] = simplify(s);
    }

  // Alignment lemma when zeta1 does not vanish identically.
  if (!cand.zeta1.is_number(0.0)) {
    eqs["lem.W13"] = frame_W1(K, C, 0) * comps.zeta1 - Expr(2.0) * d3z1;
    for (int i = 1; i < n; ++i)
      eqs["lem.W1x" + std::to_string(i + 3)] = frame_W1(K, C, i);
    for (int i = 1; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        eqs["lem.Ax" + std::to_string(i + 3) + "x" + std::to_string(j + 3)] = ct.A(i, j);
  }

  std::vector<std::string> keys;
  std::vector<Expr> exprs;
  for (auto& [key, e] : eqs) {
    keys.push_back(key);
    exprs.push_back(simplify(e));
  }
  std::vector<double> maxima = max_abs_over(exprs, samples);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    rep.details[keys[i]] = maxima[i];
    rep.max_residual = std::max(rep.max_residual, maxima[i]);
  }
  CoordinateOracle oracle(K, C);
  CoordVectorField field = make_vector_field(K.dim, vec);
  for (const auto& p : samples) {
    Eigen::MatrixXd nz = oracle.nabla_lower(field, p);
    rep.oracle_max = std::max(rep.oracle_max, nz.cwiseAbs().maxCoeff());
  }

  ResidualReport kr = killing_residuals(K, C, cand, samples, tol);
  rep.killing = kr.killing;
  rep.covariantly_constant = rep.killing && rep.max_residual < tol;
  return rep;
}

}  // namespace kundt
