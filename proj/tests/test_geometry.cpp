#include <doctest.h>

#include <cmath>

#include "kundt/curvature.hpp"
#include "kundt/geometry.hpp"

using namespace kundt;
using expr::Bindings;
using expr::Expr;
using expr::simplify;

namespace {

Expr X3() { return Expr::symbol("x3"); }
Expr X4() { return Expr::symbol("x4"); }

KundtMetric case2_like_metric() {
  // second-branch shape: W_3 = -2v/x3, sigma* = 4/x3^2
  KundtMetric K = KundtMetric::flat(4);
  K.W1[0] = Expr(-2.0) / X3();
  return K;
}

double eval_R1212(const KundtMetric& K, const Coframe& C, const Point& p) {
  CoordinateOracle oracle(K, C);
  Tensor4 R = project_riemann(oracle.riemann(p), frame_vectors(K, C, p));
  return R.at(0, 1, 0, 1);
}

}  // namespace

TEST_CASE("build_coframe diagonal cases") {
  ExprMatrix g(2, 2);
  g(0, 0) = Expr(1.0);
  g(0, 1) = Expr(0.0);
  g(1, 0) = Expr(0.0);
  g(1, 1) = Expr(1.0);
  Coframe C = build_coframe(g);
  CHECK(C.M(0, 0).is_number(1.0));
  CHECK(C.M(1, 1).is_number(1.0));
  CHECK(C.M(0, 1).is_number(0.0));

  g(1, 1) = exp(Expr(2.0) * X4());
  Coframe C2 = build_coframe(g);
  CHECK(C2.M(1, 1).same_tree(exp(X4())));

  g(0, 0) = X3();
  CHECK_THROWS_AS(build_coframe(g), GeometryError);

  ExprMatrix bad(2, 2);
  bad(0, 0) = Expr(1.0);
  bad(0, 1) = Expr(2.0);
  bad(1, 0) = Expr(2.0);
  bad(1, 1) = Expr(1.0);  // eigenvalues 3, -1
  CHECK_THROWS_AS(build_coframe(bad), GeometryError);
}

TEST_CASE("build_coframe non-diagonal factorization reproduces gT") {
  ExprMatrix g(3, 3);
  g.setConstant(Expr(0.0));
  g(0, 0) = Expr(2.0);
  g(0, 1) = sin(X4()) * Expr(0.3);
  g(1, 0) = g(0, 1);
  g(1, 1) = Expr(2.0) + X4() * X4();
  g(2, 2) = Expr(1.0) + Expr(0.5) * tanh(X4());
  g(1, 2) = Expr(0.2);
  g(2, 1) = Expr(0.2);
  Coframe C = build_coframe(g);

  SplitMix64 rng(5);
  for (int k = 0; k < 100; ++k) {
    Bindings b;
    b.set("x3", rng.uniform(-2.0, 2.0));
    b.set("x4", rng.uniform(-2.0, 2.0));
    b.set("x5", rng.uniform(-2.0, 2.0));
    Eigen::MatrixXd M = evaluate(C.M, b);
    Eigen::MatrixXd G = evaluate(g, b);
    double dev = (M.transpose() * M - G).cwiseAbs().maxCoeff();
    CHECK(dev < 1e-10 * (1.0 + G.cwiseAbs().maxCoeff()));
    Eigen::MatrixXd I = evaluate(C.Minv, b) * M;
    CHECK((I - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);
  }
  // upper-triangular by construction
  CHECK(C.M(1, 0).is_number(0.0));
  CHECK(C.M(2, 0).is_number(0.0));
  CHECK(C.M(2, 1).is_number(0.0));
}

TEST_CASE("frame derivatives") {
  KundtMetric K = KundtMetric::flat(4);
  K.sigma = 0.5;
  K.H1 = Expr::symbol("u") * X3();
  Coframe C = build_coframe(K.gT);

  // D2 on a v-independent function is the plain u-derivative
  Expr f = sin(Expr::symbol("u")) * X3();
  CHECK(frame_derivative(K, C, 2, f).same_tree(f.diff("u")));

  // D1 H = sigma* v / 4 + H1
  Expr d1H = frame_derivative(K, C, 1, assembled_H(K, C));
  Expr expect = sigma_star(K, C) * Expr::symbol("v") / Expr(4.0) + K.H1;
  Bindings b{{"u", 0.7}, {"v", -0.4}, {"x3", 1.2}, {"x4", 0.1}};
  CHECK(d1H.eval(b) == doctest::Approx(expect.eval(b)).epsilon(1e-14));

  // D3 x3 with the identity frame and W = 0
  CHECK(frame_derivative(K, C, 3, X3()).is_number(1.0));
}

TEST_CASE("sigma_star") {
  KundtMetric K = KundtMetric::flat(4);
  K.sigma = 0.5;
  Coframe C = build_coframe(K.gT);
  CHECK(sigma_star(K, C).is_number(2.0));

  KundtMetric K2 = case2_like_metric();
  Coframe C2 = build_coframe(K2.gT);
  Expr s = sigma_star(K2, C2);
  Bindings b{{"u", 0.0}, {"v", 0.0}, {"x3", 2.0}, {"x4", 0.0}};
  CHECK(s.eval(b) == doctest::Approx(1.0));  // 4/x3^2 at x3 = 2

  KundtMetric K3 = KundtMetric::flat(4);
  K3.sigma = -1.0;
  K3.W1[0] = Expr(2.0);
  Coframe C3 = build_coframe(K3.gT);
  CHECK(sigma_star(K3, C3).is_number(0.0));
}

TEST_CASE("frame commutator [D3, Dn] vanishes on v-independent functions") {
  KundtMetric K = KundtMetric::flat(4);
  K.W1[0] = Expr(-2.0) / X3();
  K.W0[1] = sin(X3()) * X4();
  Coframe C = build_coframe(K.gT);
  SplitMix64 rng(3);
  for (int k = 0; k < 5; ++k) {
    Expr f = sin(X3() * Expr(rng.uniform(0.5, 1.5))) * X4() +
             exp(Expr(0.3) * X4()) * Expr(rng.uniform(-1.0, 1.0));
    Expr comm = frame_derivative(K, C, 3, frame_derivative(K, C, 4, f)) -
                frame_derivative(K, C, 4, frame_derivative(K, C, 3, f));
    for (int j = 0; j < 20; ++j) {
      Bindings b{{"u", rng.uniform(-1, 1)},
                 {"v", rng.uniform(-1, 1)},
                 {"x3", rng.uniform(0.5, 2.5)},
                 {"x4", rng.uniform(-1, 1)}};
      CHECK(std::fabs(comm.eval(b)) < 1e-12);
    }
  }
}

TEST_CASE("frame_to_coordinate") {
  KundtMetric K = KundtMetric::flat(4);
  Coframe C = build_coframe(K.gT);

  ExprVector ell = frame_to_coordinate(K, C, Expr(0.0), Expr(1.0),
                                       {Expr(0.0), Expr(0.0)});
  CHECK(ell(0).is_number(0.0));
  CHECK(ell(1).is_number(1.0));
  CHECK(ell(2).is_number(0.0));

  KundtMetric K2 = KundtMetric::flat(4);
  K2.sigma = 1.0;  // H = v^2/2
  Coframe C2 = build_coframe(K2.gT);
  ExprVector n = frame_to_coordinate(K2, C2, Expr(1.0), Expr(0.0),
                                     {Expr(0.0), Expr(0.0)});
  Bindings b{{"u", 0.0}, {"v", 1.3}, {"x3", 0.0}, {"x4", 0.0}};
  CHECK(n(0).is_number(1.0));
  CHECK(n(1).eval(b) == doctest::Approx(-0.5 * 1.3 * 1.3));

  ExprVector m3 = frame_to_coordinate(K, C, Expr(0.0), Expr(0.0),
                                      {Expr(1.0), Expr(0.0)});
  CHECK(m3(2).is_number(1.0));
  CHECK(m3(1).is_number(0.0));
}

TEST_CASE("v-shift transform") {
  // constant shift on a v-independent metric changes nothing
  KundtMetric K = KundtMetric::flat(4);
  K.H0 = X3() * X3();
  K.W0[0] = sin(X4());
  KundtMetric K2 = apply_transform(K, VShift{Expr(3.0)});
  Bindings bc{{"u", 0.4}, {"v", 0.0}, {"x3", 1.2}, {"x4", -0.6}};
  CHECK(K2.H0.eval(bc) == doctest::Approx(K.H0.eval(bc)).epsilon(1e-14));
  CHECK(K2.W0[0].eval(bc) == doctest::Approx(K.W0[0].eval(bc)).epsilon(1e-14));
  CHECK(K2.W0[1].is_number(0.0));

  // in general W0 picks up -h W1 - h_,e and H0 the matching terms
  KundtMetric K3 = KundtMetric::flat(4);
  K3.W1[0] = Expr(2.0);
  Expr h = Expr::symbol("u") * X3();
  KundtMetric K4 = apply_transform(K3, VShift{h});
  Bindings b{{"u", 0.5}, {"v", 0.0}, {"x3", 1.1}, {"x4", 0.0}};
  double expect = 0.0 - h.eval(b) * 2.0 - 0.5;  // -h W1_3 - h_,x3
  CHECK(K4.W0[0].eval(b) == doctest::Approx(expect));
  double sstar = sigma_star(K3, build_coframe(K3.gT)).eval(b);
  CHECK(K4.H0.eval(b) ==
        doctest::Approx(sstar * h.eval(b) * h.eval(b) / 8.0 - 1.1));
}

TEST_CASE("v-shift normalizes the second-branch W profiles") {
  // W0_e = -d_e(zeta30)/D3zeta1 is removed by h = -zeta30/D3zeta1
  Expr zeta1 = Expr(1.0) / X3();
  Expr d3z1 = zeta1.diff("x3");
  Expr zeta30 = X3() * X4();
  KundtMetric K = KundtMetric::flat(4);
  K.W1[0] = simplify(d3z1.diff("x3") / d3z1);
  K.W0[0] = simplify(Expr(0.0) - zeta30.diff("x3") / d3z1);
  K.W0[1] = simplify(Expr(0.0) - zeta30.diff("x4") / d3z1);
  KundtMetric K2 = apply_transform(K, VShift{simplify(Expr(0.0) - zeta30 / d3z1)});

  SplitMix64 rng(9);
  for (int k = 0; k < 20; ++k) {
    Bindings b{{"u", rng.uniform(-1, 1)},
               {"v", rng.uniform(-1, 1)},
               {"x3", rng.uniform(0.5, 2.0)},
               {"x4", rng.uniform(-1, 1)}};
    CHECK(std::fabs(K2.W0[0].eval(b)) < 1e-12);
    CHECK(std::fabs(K2.W0[1].eval(b)) < 1e-12);
    CHECK(std::fabs(K2.W1[1].eval(b)) < 1e-12);
    CHECK(K2.W1[0].eval(b) == doctest::Approx(K.W1[0].eval(b)));
  }
}

TEST_CASE("u-reparametrization with g = 2u halves W") {
  KundtMetric K = KundtMetric::flat(4);
  K.W0[0] = sin(X3());
  K.W0[1] = Expr::symbol("u");
  KundtMetric K2 = apply_transform(K, UAffine{2.0, 0.0});
  Bindings bnew{{"u", 1.0}, {"v", 0.0}, {"x3", 0.7}, {"x4", 0.0}};
  // the new point u' = 1 corresponds to old u = 0.5
  CHECK(K2.W0[0].eval(bnew) == doctest::Approx(std::sin(0.7) / 2.0));
  CHECK(K2.W0[1].eval(bnew) == doctest::Approx(0.5 / 2.0));
  CHECK(K2.H1.is_number(0.0));
}

TEST_CASE("transforms preserve R1212 at mapped points") {
  KundtMetric K = KundtMetric::flat(4);
  K.sigma = -1.0;
  K.W1[0] = Expr(2.0);
  K.W0[1] = sin(X3());
  K.H1 = Expr(0.3) * X3();
  K.H0 = X4() * X4();
  Coframe C = build_coframe(K.gT);

  std::vector<Transform> transforms;
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 0.4, -0.2, 1.3;
  Eigen::VectorXd off(2);
  off << 0.3, -0.6;
  transforms.push_back(SpatialAffine{A, off});
  transforms.push_back(VShift{Expr(0.4) * Expr::symbol("u") + Expr(0.2) * X3() * X3()});
  transforms.push_back(UAffine{2.0, 0.0});

  SplitMix64 rng(17);
  for (const auto& T : transforms) {
    KundtMetric K2 = apply_transform(K, T);
    Coframe C2 = build_coframe(K2.gT);
    for (int k = 0; k < 10; ++k) {
      Point p;
      p.u = rng.uniform(-1, 1);
      p.v = rng.uniform(-1, 1);
      p.x = Eigen::VectorXd(2);
      p.x << rng.uniform(-1, 1), rng.uniform(-1, 1);
      Point q = map_point(T, p);
      double r1 = eval_R1212(K, C, p);
      double r2 = eval_R1212(K2, C2, q);
      CHECK(std::fabs(r1 - r2) < 1e-8 * (1.0 + std::fabs(r1)));
    }
  }
}

TEST_CASE("transform argument validation") {
  KundtMetric K = KundtMetric::flat(4);
  Eigen::MatrixXd singular = Eigen::MatrixXd::Zero(2, 2);
  CHECK_THROWS_AS(
      apply_transform(K, SpatialAffine{singular, Eigen::VectorXd::Zero(2)}),
      GeometryError);
  CHECK_THROWS_AS(apply_transform(K, UAffine{0.0, 1.0}), GeometryError);
  CHECK_THROWS_AS(apply_transform(K, VShift{Expr::symbol("v")}), GeometryError);
}
