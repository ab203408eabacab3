#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "pmg/rng.hpp"
#include "pmg/transfer.hpp"

using namespace pmg;

namespace {

std::vector<LevelGrid> levels(int dim, int n, Coarsening kind, int depth,
                              double r = 2.0) {
  GridSpec spec{dim, n};
  return build_hierarchy(spec, plan_uniform(kind, spec, depth, 2, r));
}

double row_weight(const Transfer& t, int f, int c) {
  for (int k = t.rowptr[f]; k < t.rowptr[f + 1]; ++k)
    if (t.colidx[k] == c) return t.val[k];
  return 0.0;
}

}  // namespace

TEST_CASE("restriction is the weighted adjoint of interpolation") {
  struct Case {
    int dim;
    int n;
    Coarsening ck;
    TransferKind tk;
    double r;
  };
  const Case cases[] = {
      {1, 32, Coarsening::Standard, TransferKind::FullWeighting1D, 2.0},
      {2, 16, Coarsening::Standard, TransferKind::FullWeighting2D, 2.0},
      {2, 16, Coarsening::Standard, TransferKind::Cubic2D, 2.0},
      {2, 8, Coarsening::RedBlack, TransferKind::RedBlack2D, 2.0},
      {2, 16, Coarsening::FactorR, TransferKind::FactorRLinear, 2.0},
      {2, 20, Coarsening::FactorR, TransferKind::FactorRLinear, 1.6},
      {1, 24, Coarsening::FactorR, TransferKind::FactorRLinear, 2.4},
  };
  for (auto& c : cases) {
    auto ls = levels(c.dim, c.n, c.ck, 2, c.r);
    auto t = make_transfer(c.tk, ls[0], ls[1]);
    CHECK(adjoint_check(t, ls[0], ls[1], 6, 99) < 1e-12);
  }
}

TEST_CASE("point-count ratios") {
  auto std2 = levels(2, 16, Coarsening::Standard, 2);
  CHECK(make_transfer(TransferKind::FullWeighting2D, std2[0], std2[1]).rho ==
        4.0);
  auto rb = levels(2, 8, Coarsening::RedBlack, 2);
  CHECK(make_transfer(TransferKind::RedBlack2D, rb[0], rb[1]).rho == 2.0);
  auto d1 = levels(1, 16, Coarsening::Standard, 2);
  CHECK(make_transfer(TransferKind::FullWeighting1D, d1[0], d1[1]).rho == 2.0);
  auto fr = levels(2, 20, Coarsening::FactorR, 2, 1.6);  // 20 -> 12
  auto t = make_transfer(TransferKind::FactorRLinear, fr[0], fr[1]);
  CHECK(t.rho == doctest::Approx(400.0 / 144).epsilon(1e-15));
}

TEST_CASE("interpolation reproduces constants for every kind") {
  struct Case {
    int dim;
    int n;
    Coarsening ck;
    TransferKind tk;
    double r;
  };
  const Case cases[] = {
      {1, 32, Coarsening::Standard, TransferKind::FullWeighting1D, 2.0},
      {2, 16, Coarsening::Standard, TransferKind::FullWeighting2D, 2.0},
      {2, 16, Coarsening::Standard, TransferKind::Cubic2D, 2.0},
      {2, 8, Coarsening::RedBlack, TransferKind::RedBlack2D, 2.0},
      {2, 20, Coarsening::FactorR, TransferKind::FactorRLinear, 1.6},
  };
  for (auto& c : cases) {
    auto ls = levels(c.dim, c.n, c.ck, 2, c.r);
    auto t = make_transfer(c.tk, ls[0], ls[1]);
    std::vector<double> ones(ls[1].npts(), 1.0);
    for (double v : interpolate(t, ones))
      CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
    // consequence: restriction preserves the zero-mean subspace exactly
    SplitMix64 rng(7);
    std::vector<double> u(ls[0].npts());
    for (double& x : u) x = rng.uniform_pm1();
    double mean = std::accumulate(u.begin(), u.end(), 0.0) / u.size();
    for (double& x : u) x -= mean;
    auto ru = restrict_to_coarse(t, u);
    CHECK(std::abs(std::accumulate(ru.begin(), ru.end(), 0.0)) < 1e-12);
  }
}

TEST_CASE("full weighting rows") {
  auto ls = levels(1, 16, Coarsening::Standard, 2);
  auto t = make_transfer(TransferKind::FullWeighting1D, ls[0], ls[1]);
  // even fine points copy their coarse parent, odd points average neighbors
  CHECK(row_weight(t, 4, 2) == 1.0);
  CHECK(row_weight(t, 5, 2) == 0.5);
  CHECK(row_weight(t, 5, 3) == 0.5);
  CHECK(t.rowptr[6] - t.rowptr[5] == 2);
}

TEST_CASE("cubic rows carry the tensor interpolation weights") {
  auto ls = levels(2, 16, Coarsening::Standard, 2);
  auto t = make_transfer(TransferKind::Cubic2D, ls[0], ls[1]);
  // odd-odd fine point: 4x4 tensor of (-1/16, 9/16, 9/16, -1/16)
  const int f = ls[0].lat_of_fine[5 * 16 + 5];
  CHECK(t.rowptr[f + 1] - t.rowptr[f] == 16);
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  const double w[4] = {-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16};
  // reconstruct the four axis weights from the row entries at (2,2)+(o1,o2)
  for (int o1 = 0; o1 < 4; ++o1)
    for (int o2 = 0; o2 < 4; ++o2) {
      const int c1 = (2 + o1 - 1 + 8) % 8, c2 = (2 + o2 - 1 + 8) % 8;
      const int c = ls[1].lat_of_fine[(2 * c1) * 16 + 2 * c2];
      const double v = row_weight(t, f, c);
      CHECK(v == doctest::Approx(w[o1] * w[o2]).epsilon(1e-14));
      if (o1 == 0) s0 += v;
      if (o1 == 1) s1 += v;
      if (o1 == 2) s2 += v;
      if (o1 == 3) s3 += v;
    }
  // the axis rule annihilates cubics: sum w_k p(x_k) = p(0) at offsets
  // -3,-1,1,3 for p in {1, x, x^2, x^3}
  for (int deg = 0; deg <= 3; ++deg) {
    const double x[4] = {-3, -1, 1, 3};
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += w[k] * std::pow(x[k], deg);
    CHECK(s == doctest::Approx(deg == 0 ? 1.0 : 0.0).epsilon(1e-14));
  }
  // even-even fine point is a pure copy
  const int g = ls[0].lat_of_fine[4 * 16 + 4];
  CHECK(t.rowptr[g + 1] - t.rowptr[g] == 1);
  CHECK(std::abs(s0 + s1 + s2 + s3 - 1.0) < 1e-14);
}

TEST_CASE("red-black rows: copy at black, four-point average at red") {
  auto ls = levels(2, 8, Coarsening::RedBlack, 2);
  auto t = make_transfer(TransferKind::RedBlack2D, ls[0], ls[1]);
  for (int f = 0; f < ls[0].npts(); ++f) {
    const int cnt = t.rowptr[f + 1] - t.rowptr[f];
    if (ls[0].color[f] == 0) {
      CHECK(cnt == 1);
      CHECK(t.val[t.rowptr[f]] == 1.0);
    } else {
      CHECK(cnt == 4);
      for (int k = t.rowptr[f]; k < t.rowptr[f + 1]; ++k)
        CHECK(t.val[k] == 0.25);
    }
  }
}

TEST_CASE("piecewise-linear factor-r weights") {
  // eight fine points onto five coarse: j=3 lands at t = 7/8
  GridSpec spec{1, 8};
  CoarseningPlan plan;
  plan.transitions = {{Coarsening::FactorR, 8.0 / 5.0}};
  plan.n_min = 5;
  auto ls = build_hierarchy(spec, plan);
  REQUIRE(ls[1].ext[0] == 5);
  auto t = make_transfer(TransferKind::FactorRLinear, ls[0], ls[1]);
  CHECK(row_weight(t, 3, 1) == doctest::Approx(1.0 / 8).epsilon(1e-15));
  CHECK(row_weight(t, 3, 2) == doctest::Approx(7.0 / 8).epsilon(1e-15));
  CHECK(row_weight(t, 0, 0) == 1.0);
}

TEST_CASE("transfer kinds validate their level pair") {
  auto std2 = levels(2, 16, Coarsening::Standard, 2);
  auto rb = levels(2, 8, Coarsening::RedBlack, 2);
  auto fr = levels(2, 16, Coarsening::FactorR, 2, 2.0);
  CHECK_THROWS_AS(make_transfer(TransferKind::RedBlack2D, std2[0], std2[1]),
                  ValidationError);
  CHECK_THROWS_AS(make_transfer(TransferKind::FullWeighting2D, rb[0], rb[1]),
                  ValidationError);
  CHECK_THROWS_AS(make_transfer(TransferKind::FactorRLinear, rb[0], rb[1]),
                  ValidationError);
  CHECK_THROWS_AS(make_transfer(TransferKind::FullWeighting1D, std2[0],
                                std2[1]),
                  ValidationError);
  CHECK_NOTHROW(make_transfer(TransferKind::FactorRLinear, fr[0], fr[1]));
}

TEST_CASE("default transfer per coarsening") {
  CHECK(default_transfer(Coarsening::RedBlack, 2, 2) ==
        TransferKind::RedBlack2D);
  CHECK(default_transfer(Coarsening::FactorR, 2, 2) ==
        TransferKind::FactorRLinear);
  CHECK(default_transfer(Coarsening::Standard, 1, 2) ==
        TransferKind::FullWeighting1D);
  CHECK(default_transfer(Coarsening::Standard, 2, 2) ==
        TransferKind::FullWeighting2D);
  CHECK(default_transfer(Coarsening::Standard, 2, 4) == TransferKind::Cubic2D);
  CHECK(default_transfer(Coarsening::Standard, 2, 6) == TransferKind::Cubic2D);
}
