#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pmg/lfa.hpp"
#include "pmg/rng.hpp"
#include "pmg/smoother.hpp"

using namespace pmg;

namespace {

LevelGrid finest(int dim, int n) {
  GridSpec spec{dim, n};
  return build_hierarchy(spec,
                         plan_uniform(Coarsening::Standard, spec, 2, 2))[0];
}

void project_mean(std::vector<double>& v) {
  double m = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  for (double& x : v) x -= m;
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// sup over the sampling grid of the full-sweep amplification on the
// mean-free subspace: pairs containing the constant alias contribute only
// their non-constant diagonal entry
double lfa_sweep_sup(const LfaConfig& cfg, int M = 64) {
  const double pi = 3.14159265358979323846;
  auto node = [&](int j) { return (2.0 * pi * j) / M - pi; };
  double best = 0.0;
  auto val = [&](double t1, double t2) {
    const Mat2 s = smoother_pair_symbol(cfg, t1, t2);
    const bool self_zero = t1 == 0.0 && t2 == 0.0;
    const bool bar_zero = cfg.dim == 1 ? t1 == -pi : (t1 == -pi && t2 == -pi);
    if (self_zero) return std::abs(s[3]);
    if (bar_zero) return std::abs(s[0]);
    return spectral_radius(s);
  };
  if (cfg.dim == 1) {
    for (int j = 0; j < M; ++j) best = std::max(best, val(node(j), 0.0));
    return best;
  }
  for (int j1 = 0; j1 < M; ++j1)
    for (int j2 = 0; j2 < M; ++j2)
      best = std::max(best, val(node(j1), node(j2)));
  return best;
}

double measured_sweep_rate(int dim, int order, const SmootherConfig& cfg,
                           int n = 64, int sweeps = 30) {
  LevelGrid lv = finest(dim, n);
  LevelOp A = bind_stencil(builtin(dim, order), lv, order);
  SplitMix64 rng(4242);
  std::vector<double> u(A.n());
  for (double& x : u) x = rng.uniform_pm1();
  project_mean(u);
  const std::vector<double> f(A.n(), 0.0);
  std::vector<double> d(sweeps + 1);
  d[0] = norm(u);
  for (int k = 1; k <= sweeps; ++k) {
    sweep(cfg, A, u, f);
    project_mean(u);
    d[k] = norm(u);
  }
  return std::pow(d[sweeps] / d[sweeps - 10], 0.1);
}

}  // namespace

TEST_CASE("jacobi diagonal") {
  CHECK(jacobi_diagonal(builtin(2, 2), 0.125) == doctest::Approx(256.0));
  CHECK(jacobi_diagonal(builtin(2, 4), 0.5) ==
        doctest::Approx(5.0 * 4.0).epsilon(1e-15));
  Stencil off_center;
  off_center.a[{1, 0}] = 1.0;
  CHECK_THROWS_AS(jacobi_diagonal(off_center, 0.5), ValidationError);
}

TEST_CASE("jacobi sweep is the simultaneous damped update") {
  LevelGrid lv = finest(2, 8);
  LevelOp A = bind_stencil(builtin(2, 2), lv, 2);
  SplitMix64 rng(11);
  std::vector<double> u(A.n()), f(A.n());
  for (double& x : u) x = rng.uniform_pm1();
  for (double& x : f) x = rng.uniform_pm1();
  std::vector<double> want(A.n());
  for (int i = 0; i < A.n(); ++i)
    want[i] = u[i] + 0.8 * (f[i] - A.row_apply(i, u)) / A.diagv[i];
  sweep({SmootherKind::Jacobi, 0.8}, A, u, f);
  for (int i = 0; i < A.n(); ++i)
    CHECK(u[i] == doctest::Approx(want[i]).epsilon(1e-14));
}

TEST_CASE("red-black sweep updates odd-parity points first") {
  LevelGrid lv = finest(2, 8);
  LevelOp A = bind_stencil(builtin(2, 2), lv, 2);
  SplitMix64 rng(12);
  std::vector<double> u(A.n()), f(A.n());
  for (double& x : u) x = rng.uniform_pm1();
  for (double& x : f) x = rng.uniform_pm1();
  // emulate: red half on the old state, black half sees new red values
  std::vector<double> want = u;
  for (int i = 0; i < A.n(); ++i)
    if (lv.color[i] == 1)
      want[i] = u[i] + (f[i] - A.row_apply(i, u)) / A.diagv[i];
  std::vector<double> mid = want;
  for (int i = 0; i < A.n(); ++i)
    if (lv.color[i] == 0)
      want[i] = mid[i] + (f[i] - A.row_apply(i, mid)) / A.diagv[i];
  sweep({SmootherKind::RedBlackJacobi, 1.0}, A, u, f);
  for (int i = 0; i < A.n(); ++i)
    CHECK(u[i] == doctest::Approx(want[i]).epsilon(1e-13));
  // red points carry odd coordinate parity on the finest grid
  for (int i = 0; i < A.n(); ++i) {
    auto c = lv.fine_coords(i);
    CHECK(int(lv.color[i]) == int((c[0] + c[1]) % 2));
  }
}

TEST_CASE("gauss-seidel equals red-black jacobi on five-point operators") {
  LevelGrid lv = finest(2, 8);
  LevelOp A = bind_stencil(builtin(2, 2), lv, 2);
  SplitMix64 rng(13);
  std::vector<double> u(A.n()), f(A.n());
  for (double& x : u) x = rng.uniform_pm1();
  for (double& x : f) x = rng.uniform_pm1();
  auto v = u;
  sweep({SmootherKind::RedBlackGS, 0.9}, A, u, f);
  sweep({SmootherKind::RedBlackJacobi, 0.9}, A, v, f);
  for (int i = 0; i < A.n(); ++i) CHECK(u[i] == v[i]);
}

TEST_CASE("order-4/6 gauss-seidel resolves its lagged same-color couplings") {
  const double omega = 0.95;
  for (int order : {4, 6}) {
    CAPTURE(order);
    LevelGrid lv = finest(2, 16);
    LevelOp A = bind_stencil(builtin(2, order), lv, order);
    REQUIRE_FALSE(A.lag_nbr[0].empty());
    SplitMix64 rng(14);
    std::vector<double> u0(A.n()), f(A.n());
    for (double& x : u0) x = rng.uniform_pm1();
    for (double& x : f) x = rng.uniform_pm1();
    auto u = u0;
    sweep({SmootherKind::RedBlackGS, omega}, A, u, f);
    // the black half never touches red points, so the post-sweep state
    // splits into per-half increments; each half satisfies
    //   (D / omega) du + lag_coef (du at backward same-color offsets) = r
    // where r is that half's entry residual
    std::vector<double> mid = u0;
    for (int i = 0; i < A.n(); ++i)
      if (lv.color[i] == 1) mid[i] = u[i];
    for (int col : {1, 0}) {
      const std::vector<double>& base = col == 1 ? u0 : mid;
      for (int i = 0; i < A.n(); ++i) {
        if (lv.color[i] != col) continue;
        const double r = f[i] - A.row_apply(i, base);
        const double du = u[i] - u0[i];
        const double lhs =
            A.diagv[i] / omega * du +
            A.lag_coef * ((u[A.lag_nbr[0][i]] - u0[A.lag_nbr[0][i]]) +
                          (u[A.lag_nbr[1][i]] - u0[A.lag_nbr[1][i]]));
        CHECK(lhs == doctest::Approx(r).epsilon(1e-10));
      }
    }
    // the jacobi variant ignores the lag: du = omega r / D exactly
    auto v = u0;
    sweep({SmootherKind::RedBlackJacobi, omega}, A, v, f);
    double gap = 0.0;
    for (int i = 0; i < A.n(); ++i) gap = std::max(gap, std::abs(u[i] - v[i]));
    CHECK(gap > 1e-4);
    for (int i = 0; i < A.n(); ++i) {
      if (lv.color[i] != 1) continue;
      const double r = f[i] - A.row_apply(i, u0);
      CHECK(v[i] - u0[i] == doctest::Approx(omega * r / A.diagv[i]));
    }
  }
}

TEST_CASE("red-black kinds require a consistent checkerboard") {
  GridSpec spec{2, 64};
  auto ls = build_hierarchy(
      spec, plan_uniform(Coarsening::FactorR, spec, 2, 8, 3.0));
  REQUIRE_FALSE(ls[1].color_ok);
  LevelOp A = bind_stencil(builtin(2, 2), ls[1], 2);
  std::vector<double> u(A.n(), 0.0), f(A.n(), 1.0);
  CHECK_THROWS_AS(sweep({SmootherKind::RedBlackJacobi, 1.0}, A, u, f),
                  ValidationError);
  CHECK_THROWS_AS(sweep({SmootherKind::RedBlackGS, 1.0}, A, u, f),
                  ValidationError);
  CHECK_NOTHROW(sweep({SmootherKind::Jacobi, 0.8}, A, u, f));
}

TEST_CASE("sweep amplification matches the Fourier supremum") {
  struct Case {
    int dim;
    int order;
    SmootherConfig cfg;
    double sup;  // sampled supremum on the 64-point frequency grid
  };
  const Case cases[] = {
      {1, 2, {SmootherKind::RedBlackGS, 1.0}, 0.9903926402016152},
      {2, 2, {SmootherKind::RedBlackGS, 1.0}, 0.9951905233865025},
      {2, 2, {SmootherKind::Jacobi, 0.8}, 0.9980738906688787},
      {2, 4, {SmootherKind::RedBlackGS, 1.0}, 0.9961483236447192},
      {2, 4, {SmootherKind::RedBlackJacobi, 1.0}, 0.9958758004952605},
      {2, 6, {SmootherKind::RedBlackGS, 1.0}, 0.9964626072121374},
      {2, 6, {SmootherKind::RedBlackJacobi, 1.0}, 0.9960286012435771},
  };
  for (auto& c : cases) {
    CAPTURE(c.dim);
    CAPTURE(c.order);
    LfaConfig cfg;
    cfg.dim = c.dim;
    cfg.order = c.order;
    cfg.smoother = c.cfg;
    const double sup = lfa_sweep_sup(cfg);
    CHECK(sup == doctest::Approx(c.sup).epsilon(1e-9));
    const double rate = measured_sweep_rate(c.dim, c.order, c.cfg);
    CHECK(std::abs(rate - sup) < 0.02);
  }
}
