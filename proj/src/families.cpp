#include "kundt/families.hpp"

#include <cmath>
#include <functional>

namespace kundt {

using expr::Bindings;
using expr::EvalError;
using expr::parse_expr;
using expr::simplify;

namespace {

Expr x3sym() { return Expr::symbol("x3"); }

ExprMatrix flat_gT(int dim) { return KundtMetric::flat(dim).gT; }

std::vector<Expr> zeros(int n) {
  return std::vector<Expr>(static_cast<std::size_t>(n), Expr(0.0));
}

std::vector<Expr> padded(std::vector<Expr> v, int n) {
  v.resize(static_cast<std::size_t>(n), Expr(0.0));
  return v;
}

double eval_or_nan(const Expr& e, const Bindings& b) {
  try {
    return e.eval(b);
  } catch (const EvalError&) {
    return std::nan("");
  }
}

// Max |e| over a coarse grid of (u, x) with the x3 range given.
double grid_max_abs(const Expr& e, int tdim, const Interval& x3r) {
  double mx = 0.0;
  for (int iu = 0; iu < 3; ++iu)
    for (int ix = 0; ix < 7; ++ix) {
      Bindings b;
      b.set("u", -1.0 + iu);
      b.set("v", 0.0);
      b.set("x3", x3r.lo + (x3r.hi - x3r.lo) * ix / 6.0);
      for (int ey = 1; ey < tdim; ++ey)
        b.set("x" + std::to_string(ey + 3), -1.0 + 0.7 * ix / 3.0 + 0.2 * ey);
      double v = eval_or_nan(e, b);
      if (std::isnan(v)) continue;
      mx = std::max(mx, std::fabs(v));
    }
  return mx;
}

void require_near_zero(const Expr& e, int tdim, const Interval& x3r, double tol,
                       const std::string& what) {
  double mx = grid_max_abs(e, tdim, x3r);
  if (mx > tol)
    throw FamilyError(what + " violated (residual " + std::to_string(mx) + ")");
}

void require_u_free(const Expr& e, const std::string& what) {
  if (e.depends_on("u") || e.depends_on("v"))
    throw FamilyError(what + " must be independent of u and v");
}

// Longest contiguous sub-interval of `base` on which pred holds.
Interval largest_true_interval(const std::function<bool(double)>& pred,
                               const Interval& base, int grid = 2001) {
  double best_lo = 0, best_hi = 0, cur_lo = 0;
  bool in_run = false;
  double best = -1.0;
  for (int i = 0; i <= grid; ++i) {
    double x = base.lo + (base.hi - base.lo) * i / grid;
    bool ok = pred(x);
    if (ok && !in_run) {
      in_run = true;
      cur_lo = x;
    }
    if ((!ok || i == grid) && in_run) {
      double hi = ok ? x : x - (base.hi - base.lo) / grid;
      in_run = false;
      if (hi - cur_lo > best) {
        best = hi - cur_lo;
        best_lo = cur_lo;
        best_hi = hi;
      }
    }
  }
  if (best <= 0.0) throw FamilyError("no sub-interval satisfies the constraint");
  return Interval{best_lo, best_hi};
}

Family finish(std::string label, KundtMetric K, KillingCandidate cand, Interval x3,
              std::map<std::string, double> params) {
  Family f;
  f.label = std::move(label);
  f.frame = build_coframe(K.gT);
  f.metric = std::move(K);
  f.cand = std::move(cand);
  f.x3 = x3;
  f.params = std::move(params);
  return f;
}

}  // namespace

SampleRanges Family::ranges() const {
  SampleRanges r = SampleRanges::defaults(metric.dim);
  r.x[0] = x3;
  return r;
}

// ---------------------------------------------------------------------------
// Case 1 constructors

Family case_1_1_1(const Expr& H0, const std::vector<Expr>& W0, const ExprMatrix& gT,
                  int dim) {
  if (H0.depends_on("v")) throw FamilyError("H0 must be v-independent");
  KundtMetric K;
  K.dim = dim;
  K.sigma = 0.0;
  K.W1 = zeros(dim - 2);
  K.W0 = padded(W0, dim - 2);
  for (auto& w : K.W0)
    if (w.depends_on("v")) throw FamilyError("W0 must be v-independent");
  K.H1 = Expr(0.0);
  K.H0 = H0;
  K.gT = gT;
  KillingCandidate cand{Expr(0.0), Expr(0.0), Expr(1.0)};
  return finish("1.1.1", std::move(K), cand, Interval{-1.0, 1.0}, {{"sigma", 0.0}});
}

Family case_1_1_2(const Expr& zeta2, const ExprMatrix& gT, double sigma, int dim,
                  const Expr& H0, const std::vector<Expr>& W0) {
  if (sigma >= 0.0) throw FamilyError("sigma must be negative");
  KundtMetric K;
  K.dim = dim;
  K.sigma = sigma;
  K.gT = gT;
  K.W1.resize(static_cast<std::size_t>(dim - 2));
  for (int e = 0; e < dim - 2; ++e)
    K.W1[static_cast<std::size_t>(e)] =
        simplify(-(zeta2.diff("x" + std::to_string(e + 3)) / zeta2));
  K.W0 = padded(W0, dim - 2);
  K.H1 = simplify(-(zeta2.diff("u") / zeta2));
  K.H0 = H0;

  // gradient-magnitude constraint: sum_i (D_i ln zeta2)^2 = -4 sigma
  Coframe C = build_coframe(gT);
  Expr constraint = Expr(4.0 * sigma);
  for (int i = 0; i < dim - 2; ++i) {
    Expr di = transverse_derivative(C, i, zeta2) / zeta2;
    constraint = constraint + di * di;
  }
  require_near_zero(simplify(constraint), dim - 2, Interval{-1.0, 1.0}, 1e-8,
                    "gradient-magnitude constraint on zeta2");

  KillingCandidate cand{Expr(0.0), Expr(0.0), zeta2};
  return finish("1.1.2", std::move(K), cand, Interval{-1.0, 1.0},
                {{"sigma", sigma}});
}

Family case_1_2_1a(const std::vector<Expr>& W1, const std::vector<Expr>& W0,
                   double sigma, const ExprMatrix& gT, int dim) {
  KundtMetric K;
  K.dim = dim;
  K.sigma = sigma;
  K.W1 = padded(W1, dim - 2);
  K.W0 = padded(W0, dim - 2);
  K.H1 = Expr(0.0);
  K.H0 = Expr(0.0);
  K.gT = gT;
  for (auto& w : K.W1) require_u_free(w, "W1 profile");
  for (auto& w : K.W0) require_u_free(w, "W0 profile");

  Coframe C = build_coframe(gT);
  double smin = 1e300;
  Expr sstar = sigma_star(K, C);
  for (int ix = 0; ix <= 12; ++ix) {
    Bindings b;
    b.set("u", 0.0);
    b.set("v", 0.0);
    for (int e = 0; e < dim - 2; ++e)
      b.set("x" + std::to_string(e + 3), -1.0 + ix / 6.0 + 0.05 * e);
    double v = eval_or_nan(sstar, b);
    if (!std::isnan(v)) smin = std::min(smin, std::fabs(v));
  }
  if (smin < 1e-8) throw FamilyError("sigma* vanishes at a sample point");

  KillingCandidate cand{Expr(1.0), Expr(0.0), Expr(0.0)};
  return finish("1.2.1a", std::move(K), cand, Interval{-1.0, 1.0},
                {{"sigma", sigma}});
}

Family case_1_2_1b(const Expr& zeta20, const std::vector<Expr>& W1,
                   const std::vector<Expr>& w_lower, double sigma,
                   const ExprMatrix& gT, int dim) {
  KundtMetric K;
  K.dim = dim;
  K.sigma = sigma;
  K.W1 = padded(W1, dim - 2);
  K.H1 = Expr(0.0);
  K.H0 = Expr(0.0);
  K.gT = gT;
  require_u_free(zeta20, "zeta20");
  for (auto& w : K.W1) require_u_free(w, "W1 profile");

  Coframe C = build_coframe(gT);
  require_near_zero(sigma_star(K, C), dim - 2, Interval{-1.0, 1.0}, 1e-8,
                    "sigma* = 0 requirement");
  if (grid_max_abs(zeta20, dim - 2, Interval{-1.0, 1.0}) > 0.0) {
    // sign check: zeta20 >= 0 over the default box
    for (int ix = 0; ix <= 12; ++ix) {
      Bindings b;
      b.set("u", 0.0);
      b.set("v", 0.0);
      for (int e = 0; e < dim - 2; ++e)
        b.set("x" + std::to_string(e + 3), -1.0 + ix / 6.0 + 0.07 * e);
      double v = eval_or_nan(zeta20, b);
      if (!std::isnan(v) && v < -1e-12)
        throw FamilyError("zeta20 must be non-negative on the sampling box");
    }
  }

  std::vector<Expr> wl = padded(w_lower, dim - 2);
  Expr u = Expr::symbol("u");
  K.W0.resize(static_cast<std::size_t>(dim - 2));
  for (int e = 0; e < dim - 2; ++e) {
    Expr de = zeta20.diff("x" + std::to_string(e + 3));
    K.W0[static_cast<std::size_t>(e)] = simplify(
        -(de + K.W1[static_cast<std::size_t>(e)] * zeta20) * u +
        wl[static_cast<std::size_t>(e)]);
  }

  KillingCandidate cand{Expr(1.0), Expr(0.0), zeta20};
  return finish("1.2.1b", std::move(K), cand, Interval{-1.0, 1.0},
                {{"sigma", sigma}});
}

Family case_1_2_2a(double zeta3, const Expr& zeta20, const std::vector<Expr>& W1,
                   double sigma, const ExprMatrix& gT, int dim,
                   const std::vector<Expr>& W0n) {
  if (zeta3 == 0.0) throw FamilyError("zeta3 must be nonzero");
  KundtMetric K;
  K.dim = dim;
  K.sigma = sigma;
  K.W1 = padded(W1, dim - 2);
  K.gT = gT;

  Coframe C = build_coframe(gT);
  require_near_zero(sigma_star(K, C), dim - 2, Interval{-1.0, 1.0}, 1e-8,
                    "sigma* = 0 requirement");
  // transport of the candidate data and profiles along D2 + zeta3 D3
  auto transport = [&](const Expr& f) {
    return simplify(f.diff("u") + Expr(zeta3) * transverse_derivative(C, 0, f));
  };
  require_near_zero(transport(zeta20), dim - 2, Interval{-1.0, 1.0}, 1e-8,
                    "transport equation for zeta20");
  for (auto& w : K.W1)
    require_near_zero(transport(w), dim - 2, Interval{-1.0, 1.0}, 1e-8,
                      "transport equation for W1");

  K.H1 = simplify(-frame_W1(K, C, 0) * Expr(zeta3));
  K.H0 = Expr(0.0);
  K.W0 = zeros(dim - 2);
  K.W0[0] = simplify(zeta20 / Expr(zeta3));
  std::vector<Expr> w0n = padded(W0n, dim - 2);
  for (int e = 1; e < dim - 2; ++e) {
    K.W0[static_cast<std::size_t>(e)] = w0n[static_cast<std::size_t>(e)];
    if (!K.W1[static_cast<std::size_t>(e)].is_number(0.0) &&
        !w0n[static_cast<std::size_t>(e)].is_number(0.0))
      require_near_zero(transport(w0n[static_cast<std::size_t>(e)]), dim - 2,
                        Interval{-1.0, 1.0}, 1e-8, "transport equation for W0");
  }

  KillingCandidate cand{Expr(1.0), Expr(zeta3), zeta20};
  return finish("1.2.2a", std::move(K), cand, Interval{-1.0, 1.0},
                {{"sigma", sigma}, {"zeta3", zeta3}});
}

Family case_1_2_2b(const Expr& zeta20, const std::vector<Expr>& W1,
                   const std::vector<Expr>& W0n, double sigma, const ExprMatrix& gT,
                   int dim) {
  KundtMetric K;
  K.dim = dim;
  K.sigma = sigma;
  K.W1 = padded(W1, dim - 2);
  K.gT = gT;

  Coframe C = build_coframe(gT);
  auto transport = [&](const Expr& f) {
    return simplify(f.diff("u") + transverse_derivative(C, 0, f));
  };
  require_near_zero(transport(zeta20), dim - 2, Interval{-1.0, 1.0}, 1e-8,
                    "transport equation for zeta20");
  for (auto& w : K.W1)
    require_near_zero(transport(w), dim - 2, Interval{-1.0, 1.0}, 1e-8,
                      "transport equation for W1");

  // sigma* must stay positive
  Expr sstar = sigma_star(K, C);
  for (int ix = 0; ix <= 12; ++ix) {
    Bindings b;
    b.set("u", -1.0 + ix / 6.0);
    b.set("v", 0.0);
    for (int e = 0; e < dim - 2; ++e) b.set("x" + std::to_string(e + 3), ix / 6.0 - 1.0);
    double v = eval_or_nan(sstar, b);
    if (!std::isnan(v) && v < 1e-8)
      throw FamilyError("sigma* must be positive on the sampling box");
  }

  K.H1 = simplify(-frame_W1(K, C, 0));
  K.H0 = Expr(0.0);
  K.W0 = zeros(dim - 2);
  K.W0[0] = zeta20;
  std::vector<Expr> w0n = padded(W0n, dim - 2);
  for (int e = 1; e < dim - 2; ++e) {
    K.W0[static_cast<std::size_t>(e)] = w0n[static_cast<std::size_t>(e)];
    if (!w0n[static_cast<std::size_t>(e)].is_number(0.0))
      require_near_zero(transport(w0n[static_cast<std::size_t>(e)]), dim - 2,
                        Interval{-1.0, 1.0}, 1e-8, "transport equation for W0");
  }

  KillingCandidate cand{Expr(1.0), Expr(1.0), zeta20};
  return finish("1.2.2b", std::move(K), cand, Interval{-1.0, 1.0},
                {{"sigma", sigma}});
}

// ---------------------------------------------------------------------------
// Case 2 machinery

namespace {

// w = (D3 zeta1)^(-1/2) base solutions of w'' = -sigma w.
Expr case2_w(int sigma, double c1, double c2) {
  Expr x = x3sym();
  if (sigma == 0) return Expr(c1) * x + Expr(c2);
  if (sigma < 0) return Expr(c1) * cosh(x) + Expr(c2) * sinh(x);
  return Expr(c1) * cos(x) + Expr(c2) * sin(x);
}

// Pole-free base interval for w > 0 (or all reals when w has no root).
Interval case2_base_interval(int sigma, double c1, double c2) {
  const double big = 8.0;
  if (sigma == 0) {
    double root = -c2 / c1;
    return c1 > 0 ? Interval{root, root + big} : Interval{root - big, root};
  }
  if (sigma > 0) {
    double phi = std::atan2(c1, c2);  // w = R sin(x + phi)
    return Interval{-phi, -phi + M_PI};
  }
  // sigma < 0: root exists when |c1| < |c2|
  if (std::fabs(c1) < std::fabs(c2)) {
    double root = std::atanh(-c1 / c2);
    return c2 > 0 ? Interval{root, root + big} : Interval{root - big, root};
  }
  return Interval{-2.5, 2.5};
}

struct Case2Core {
  KundtMetric K;
  Coframe C;
  Expr zeta1;
  Expr d3z1;
};

// The v-linear profile is D3 ln(D3 zeta1) = -2 w'/w for every member
// built on the base solution w; using w directly keeps the emitted
// expressions short.
Case2Core case2_metric_from_zeta1(int sigma, const Expr& zeta1, const Expr& w,
                                  int dim) {
  Case2Core core;
  core.K.dim = dim;
  core.K.sigma = sigma;
  core.K.gT = flat_gT(dim);
  core.zeta1 = zeta1;
  core.d3z1 = simplify(zeta1.diff("x3"));
  core.K.W1 = zeros(dim - 2);
  core.K.W1[0] = simplify(Expr(-2.0) * w.diff("x3") / w);
  core.K.W0 = zeros(dim - 2);
  core.K.H1 = Expr(0.0);
  core.K.H0 = Expr(0.0);
  core.C = build_coframe(core.K.gT);
  return core;
}

}  // namespace

Family case_2_null(int sigma, double c1, double c2, char branch, int dim) {
  if (branch != '+' && branch != '-') throw FamilyError("branch must be + or -");
  if (c1 == 0.0 && c2 == 0.0) throw FamilyError("(c1, c2) must not both vanish");
  const double sgn = branch == '+' ? 1.0 : -1.0;

  Expr zeta1(0.0);
  Interval base = case2_base_interval(sigma, c1, c2);
  if (sigma == 0) {
    if (c1 == 0.0) throw FamilyError("c1 must be nonzero for the flat branch");
    Expr w = case2_w(0, c1, c2);
    zeta1 = Expr(1.0) / (Expr(c1 * (1.0 + sgn * std::sqrt(2.0))) * w);
  } else if (sigma < 0) {
    // Exact closed forms exist only on the one-parameter slice c2 = 0.
    if (c2 != 0.0)
      throw FamilyError("null family requires c2 = 0 when sigma = -1");
    if (c1 <= 0.0) throw FamilyError("c1 must be positive when sigma = -1");
    Expr x = x3sym();
    zeta1 = Expr(1.0) /
            (Expr(c1 * c1) * cosh(x) * (sinh(x) + Expr(sgn) * cosh(x)));
    zeta1 = simplify(Expr(sgn) * zeta1);  // keep D3 zeta1 sign fixed per branch
  } else {
    // An everywhere-null member of this branch would need the square of a
    // real constant to equal a negative number; no instance exists.
    throw FamilyError("no null family exists for sigma = +1");
  }

  Expr wbase = sigma < 0 ? Expr(c1) * cosh(x3sym()) : case2_w(sigma, c1, c2);
  Case2Core core = case2_metric_from_zeta1(sigma, zeta1, wbase, dim);
  double inset = sigma == 0 ? 0.35 : 0.0;
  Interval sample{base.lo + inset, std::min(base.hi, base.lo + inset + 3.0)};

  KillingCandidate cand{core.zeta1, Expr(0.0), Expr(0.0)};
  return finish("2-null", std::move(core.K), cand, sample,
                {{"sigma", double(sigma)}, {"c1", c1}, {"c2", c2},
                 {"branch", sgn}});
}

Family case_2_timelike(int sigma, double c1, double c2, double c3, int dim,
                       const Expr& zeta20) {
  if (c1 == 0.0) throw FamilyError("c1 must be nonzero");
  Expr x = x3sym();
  Expr w = case2_w(sigma, c1, c2);
  Expr zeta1(0.0);
  if (sigma == 0)
    zeta1 = Expr(-1.0) / (Expr(c1) * w) + Expr(c3);
  else if (sigma < 0)
    zeta1 = sinh(x) / (Expr(c1) * w) + Expr(c3);
  else
    zeta1 = sin(x) / (Expr(c1) * w) + Expr(c3);

  Case2Core core = case2_metric_from_zeta1(sigma, zeta1, w, dim);

  // kv-magnitude order-v^2 condition in the reference arrangement must be
  // strictly negative on the sampling interval.
  Expr sstar = sigma_star(core.K, core.C);
  Expr tl_ineq = simplify(-sstar * zeta1 * zeta1 / Expr(4.0) +
                          core.K.W1[0] * core.d3z1 * zeta1 + core.d3z1 * core.d3z1);

  Interval base = case2_base_interval(sigma, c1, c2);
  double inset = 1e-3 + 0.15;
  Interval probe{base.lo + inset, base.hi - (sigma > 0 ? inset : 0.0)};
  if (probe.hi <= probe.lo) throw FamilyError("empty validity interval");
  auto ok = [&](double xv) {
    Bindings b;
    b.set("x3", xv);
    double t = eval_or_nan(tl_ineq, b);
    return std::isfinite(t) && t < -1e-10;
  };
  Interval region;
  try {
    region = largest_true_interval(ok, probe);
  } catch (const FamilyError&) {
    throw FamilyError("timelike magnitude inequality cannot be satisfied on the interval");
  }
  if (region.hi - region.lo < 0.05)
    throw FamilyError("timelike magnitude inequality region too narrow");
  Interval sample{region.lo + 0.01, std::min(region.hi - 0.01, region.lo + 3.0)};

  // Optional zeta20 and the induced H0.
  KillingCandidate cand{zeta1, Expr(0.0), Expr(0.0)};
  if (!zeta20.is_number(0.0)) {
    require_u_free(zeta20, "zeta20");
    // zeta1 * zeta20 >= 0 keeps the candidate non-spacelike at v = 0
    for (int i = 0; i <= 40; ++i) {
      double xv = sample.lo + (sample.hi - sample.lo) * i / 40.0;
      Bindings b;
      b.set("x3", xv);
      double z1 = eval_or_nan(zeta1, b);
      double z2 = eval_or_nan(zeta20, b);
      if (std::isfinite(z1) && std::isfinite(z2) && z1 * z2 < -1e-12)
        throw FamilyError("zeta1 * zeta20 must be non-negative on the interval");
    }
    // H0 from the algebraic relation; y = D3 ln(D3 zeta1)
    Expr y = core.K.W1[0];
    Expr dy = simplify(y.diff("x3"));
    Expr a = simplify(core.d3z1 / zeta1);
    Expr num = simplify((core.d3z1 * zeta20).diff("x3") -
                        Expr(0.5) * dy * zeta20 * zeta1);
    Expr den = simplify(zeta1 * zeta1 * (a.diff("x3") - Expr(0.5) * dy));
    Bindings b0;
    b0.set("x3", 0.5 * (sample.lo + sample.hi));
    double dv = eval_or_nan(den, b0);
    if (!std::isfinite(dv) || std::fabs(dv) < 1e-12)
      throw FamilyError("H0 denominator vanishes on the interval");
    core.K.H0 = simplify(num / den);
    cand.zeta20 = zeta20;
  }

  return finish("2-timelike", std::move(core.K), cand, sample,
                {{"sigma", double(sigma)}, {"c1", c1}, {"c2", c2}, {"c3", c3}});
}

OdeWitness verify_ode_zeta1(int sigma, const Expr& zeta1_sqrt_inv) {
  OdeWitness out;
  const Expr& w = zeta1_sqrt_inv;
  out.ode_residual = simplify(w.diff("x3").diff("x3") + Expr(double(sigma)) * w);
  Expr d3z1 = pow(w, -2);
  Expr y = simplify(d3z1.diff("x3") / d3z1);
  Expr sstar = Expr(4.0 * sigma) + y * y;
  out.sigma_star_residual = simplify(sstar - Expr(2.0) * y.diff("x3"));
  return out;
}

// ---------------------------------------------------------------------------
// Classifier

CaseReport classify(const KundtMetric& K, const Coframe& C,
                    const KillingCandidate& cand, const std::vector<Point>& samples,
                    double tol) {
  CaseReport rep;
  rep.tol = tol;

  Expr d3z1 = transverse_derivative(C, 0, cand.zeta1);
  Expr sstar = sigma_star(K, C);
  ConnectionTable ct = connection_table(K, C);

  auto max_at = [&](const Expr& e) {
    double m = 0.0;
    for (const auto& p : samples) m = std::max(m, std::fabs(e.eval(bind_point(p))));
    return m;
  };

  double r_d3 = max_at(d3z1);
  double r_z1 = max_at(cand.zeta1);
  double r_z30 = max_at(cand.zeta30);
  double r_sstar = max_at(sstar);
  double r_g23 = max_at(ct.G2[0]);
  rep.branch_residuals["D3zeta1"] = r_d3;
  rep.branch_residuals["zeta1"] = r_z1;
  rep.branch_residuals["zeta30"] = r_z30;
  rep.branch_residuals["sigma_star"] = r_sstar;
  rep.branch_residuals["Gamma2_3"] = r_g23;
  rep.branch_residuals["eq22.v3"] = max_at(simplify(ct.G2[0] * d3z1));

  CausalityReport cr = causality(K, C, cand, samples);
  rep.causal = cr.classification;

  auto zero = [&](double r) { return r <= tol; };

  if (zero(r_d3)) {
    if (zero(r_z1)) {
      if (!zero(r_z30)) return rep;  // outside the tree
      if (std::fabs(K.sigma) <= tol)
        rep.label = "1.1.1";
      else if (K.sigma < 0.0)
        rep.label = "1.1.2";
      return rep;
    }
    if (zero(r_z30))
      rep.label = zero(r_sstar) ? "1.2.1b" : "1.2.1a";
    else
      rep.label = zero(r_sstar) ? "1.2.2a" : "1.2.2b";
    return rep;
  }
  if (zero(r_g23)) {
    if (cr.classification == Causality::Null)
      rep.label = "2-null";
    else if (cr.classification == Causality::Timelike)
      rep.label = "2-timelike";
    return rep;
  }
  return rep;  // neither branch holds: unclassified
}

const std::vector<std::string>& family_labels() {
  static const std::vector<std::string> labels = {
      "1.1.1", "1.1.2", "1.2.1a", "1.2.1b", "1.2.2a", "1.2.2b", "2-null",
      "2-timelike"};
  return labels;
}

Family make_family(const std::string& label, const FamilyParams& P) {
  const int n = P.dim - 2;
  auto coords = coord_names(P.dim);
  auto parse = [&](const std::string& s) { return parse_expr(s, coords); };
  ExprMatrix gT = flat_gT(P.dim);

  if (label == "1.1.1") {
    Expr H0 = P.h0 ? parse(*P.h0) : parse("x3^2");
    return case_1_1_1(H0, zeros(n), gT, P.dim);
  }
  if (label == "1.1.2") {
    if (P.sigma >= 0.0) throw FamilyError("1.1.2 requires sigma < 0");
    double k = 2.0 * std::sqrt(-P.sigma);
    Expr z2 = P.zeta20 ? parse(*P.zeta20) : exp(Expr(k) * x3sym());
    return case_1_1_2(z2, gT, P.sigma, P.dim);
  }
  if (label == "1.2.1a") {
    std::vector<Expr> W1 = zeros(n);
    if (P.w13) W1[0] = parse(*P.w13);
    double sigma = (P.sigma == 0.0 && !P.w13) ? 1.0 : P.sigma;
    return case_1_2_1a(W1, zeros(n), sigma, gT, P.dim);
  }
  if (label == "1.2.1b") {
    std::vector<Expr> W1 = zeros(n);
    if (P.w13)
      W1[0] = parse(*P.w13);
    else if (P.sigma < 0.0)
      W1[0] = Expr(2.0 * std::sqrt(-P.sigma));
    Expr z20 = P.zeta20 ? parse(*P.zeta20) : Expr(1.0);
    return case_1_2_1b(z20, W1, zeros(n), P.sigma, gT, P.dim);
  }
  if (label == "1.2.2a") {
    double z3 = P.zeta3 ? std::stod(*P.zeta3) : 1.0;
    std::vector<Expr> W1 = zeros(n);
    if (P.w13)
      W1[0] = parse(*P.w13);
    else if (P.sigma < 0.0)
      W1[0] = Expr(2.0 * std::sqrt(-P.sigma));
    Expr z20 = P.zeta20 ? parse(*P.zeta20)
                        : simplify(pow(x3sym() - Expr(z3) * Expr::symbol("u"), 2) +
                                   Expr(1.0));
    return case_1_2_2a(z3, z20, W1, P.sigma, gT, P.dim);
  }
  if (label == "1.2.2b") {
    std::vector<Expr> W1 = zeros(n);
    W1[0] = P.w13 ? parse(*P.w13) : Expr(1.0);
    double sigma = (P.sigma == 0.0) ? 1.0 : P.sigma;
    Expr z20 = P.zeta20 ? parse(*P.zeta20)
                        : sin(x3sym() - Expr::symbol("u")) + Expr(2.0);
    return case_1_2_2b(z20, W1, zeros(n), sigma, gT, P.dim);
  }
  if (label == "2-null")
    return case_2_null(static_cast<int>(P.sigma), P.c1, P.c2, P.branch, P.dim);
  if (label == "2-timelike") {
    Expr z20 = P.zeta20 ? parse(*P.zeta20) : Expr(0.0);
    return case_2_timelike(static_cast<int>(P.sigma), P.c1, P.c2, P.c3, P.dim, z20);
  }
  throw FamilyError("unknown family label '" + label + "'");
}

}  // namespace kundt
