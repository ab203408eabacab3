#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "pmg/cli.hpp"
#include "pmg/cycle.hpp"
#include "pmg/lfa.hpp"
#include "pmg/reduction.hpp"
#include "pmg/rng.hpp"

using namespace pmg;

namespace {

// each criterion prints exactly one verdict line, even on early exits
struct Criterion {
  int id;
  bool ok = true;
  explicit Criterion(int i) : id(i) {}
  ~Criterion() {
    std::printf("criterion %d: %s\n", id, ok ? "pass" : "FAIL");
    std::fflush(stdout);
  }
};

#define EXPECT(crit, cond)     \
  do {                         \
    const bool c_ = (cond);    \
    CHECK(c_);                 \
    (crit).ok = (crit).ok && c_; \
  } while (0)

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
      .count();
}

double norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::vector<double> random_zero_mean(int n, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<double> v(n);
  double m = 0.0;
  for (double& x : v) {
    x = rng.uniform_pm1();
    m += x;
  }
  m /= n;
  for (double& x : v) x -= m;
  return v;
}

double one_cycle_rel_residual(const PlanConfig& pc) {
  CyclePlan plan = make_plan(pc);
  const int n = plan.ops[0].n();
  std::vector<double> f = random_zero_mean(n, 515);
  std::vector<double> u(n, 0.0);
  mg_cycle(plan, u, f);
  std::vector<double> r = plan.ops[0].apply(u);
  for (int i = 0; i < n; ++i) r[i] = f[i] - r[i];
  return norm(r) / norm(f);
}

bool stencil_close(const Stencil& got, const Stencil& want, double tol) {
  if (got.a.size() != want.a.size()) return false;
  if (got.scale_power != want.scale_power) return false;
  for (const auto& [off, coef] : want.a) {
    auto it = got.a.find(off);
    if (it == got.a.end() || std::abs(it->second - coef) > tol) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("one-dimensional two-level cycle solves in a single pass") {
  Criterion crit(1);
  const auto t0 = std::chrono::steady_clock::now();
  PlanConfig pc;
  pc.dim = 1;
  pc.n = 128;
  pc.coarsening = Coarsening::Standard;
  pc.levels = 2;
  pc.nu1 = 0;
  pc.nu2 = 1;
  pc.smoother = {SmootherKind::RedBlackGS, 1.0};
  pc.strategy = {CoarseOpKind::Galerkin, 2};
  pc.sigma_c = 1e-13;
  EXPECT(crit, one_cycle_rel_residual(pc) <= 1e-10);
  EXPECT(crit, seconds_since(t0) < 1.0);
}

TEST_CASE("rotated two-level cycle with the galerkin operator is direct") {
  Criterion crit(2);
  const auto t0 = std::chrono::steady_clock::now();
  PlanConfig pc;
  pc.dim = 2;
  pc.n = 64;
  pc.coarsening = Coarsening::RedBlack;
  pc.levels = 2;
  pc.nu1 = 0;
  pc.nu2 = 1;
  pc.smoother = {SmootherKind::RedBlackGS, 1.0};
  pc.strategy = {CoarseOpKind::Galerkin, 2};
  pc.sigma_c = 1e-13;
  EXPECT(crit, one_cycle_rel_residual(pc) <= 1e-10);
  EXPECT(crit, seconds_since(t0) < 5.0);
}

TEST_CASE("measured two-level rates track the fourier prediction") {
  Criterion crit(3);
  const auto t0 = std::chrono::steady_clock::now();
  const double omegas[3] = {0.8, 1.0, 1.2};
  const double rho_ref[3] = {0.226537140477, 0.0738937790021,
                             0.0556389921702};
  const double cr_ref[3] = {0.220791071333, 0.0671598802726,
                            0.0506660153609};
  for (int k = 0; k < 3; ++k) {
    PlanConfig pc;
    pc.n = 64;
    pc.coarsening = Coarsening::Standard;
    pc.levels = 2;
    pc.smoother = {SmootherKind::RedBlackGS, omegas[k]};
    pc.strategy = {CoarseOpKind::NonGalerkinSame, 2};
    const double cr = measure_cr(make_plan(pc)).cr;
    LfaConfig cfg;
    cfg.coarsening = Coarsening::Standard;
    cfg.transfer = TransferKind::FullWeighting2D;
    cfg.strategy = {CoarseOpKind::NonGalerkinSame, 2};
    cfg.smoother = {SmootherKind::RedBlackGS, omegas[k]};
    cfg.M = 128;
    const double rho = rho_two_level(cfg).value;
    EXPECT(crit, std::abs(cr - rho) <= 0.02);
    EXPECT(crit, std::abs(rho - rho_ref[k]) <= 1e-9);
    EXPECT(crit, std::abs(cr - cr_ref[k]) <= 1e-9);
  }
  EXPECT(crit, seconds_since(t0) < 30.0);
}

TEST_CASE("factor-two jacobi optimum in closed form and numerically") {
  Criterion crit(4);
  const FactorRAnalysis a = factor_r_closed_forms(2.0, 2);
  EXPECT(crit, std::abs(a.zeta - 0.25) <= 1e-12);
  EXPECT(crit, std::abs(a.omega_star - 0.8) <= 1e-12);
  EXPECT(crit, std::abs(a.mu_star - 0.6) <= 1e-12);
  const double numeric = factor_r_mu_numeric(2.0, 2, 0.8);
  EXPECT(crit, std::abs(numeric - a.mu_star) <= 1e-3);
  EXPECT(crit, std::abs(numeric - 0.6000000000000001) <= 1e-12);
  double prev = 0.0;
  for (double r : {1.5, 2.0, 3.0, 4.0, 6.0}) {
    const double m = factor_r_closed_forms(r, 2).mu_star;
    EXPECT(crit, m > prev);
    prev = m;
  }
}

TEST_CASE("extracted first-transition operators match the printed stencils") {
  Criterion crit(5);
  const Stencil nine = galerkin_ninepoint();
  EXPECT(crit,
         stencil_close(galerkin_stencil(TransferKind::FullWeighting2D,
                                        Coarsening::Standard, builtin(2, 2)),
                       nine, 1e-13));
  EXPECT(crit,
         stencil_close(galerkin_stencil(TransferKind::RedBlack2D,
                                        Coarsening::RedBlack, builtin(2, 2)),
                       nine, 1e-13));
  EXPECT(crit,
         stencil_close(galerkin_stencil(TransferKind::FullWeighting1D,
                                        Coarsening::Standard, builtin(1, 2)),
                       builtin(1, 2), 1e-13));
}

TEST_CASE("red elimination matches the rotated hierarchy") {
  Criterion crit(6);
  for (int dim : {1, 2}) {
    const EquivalenceReport rep = verify_direct_solver_equivalence(16, dim);
    EXPECT(crit, rep.discrepancy <= 1e-10);
    EXPECT(crit, rep.rel_residual_reduction <= 1e-10);
    EXPECT(crit, rep.rel_residual_mg <= 1e-10);
  }
  const int n = 8;
  const ReductionResult rr =
      schur_reduce(assemble_periodic(2, n), red_index_set(2, n));
  GridSpec spec{2, n};
  auto ls =
      build_hierarchy(spec, plan_uniform(Coarsening::RedBlack, spec, 2, 4));
  const DenseMatrix nine = stencil_matrix(ls[1], galerkin_ninepoint());
  double worst = 0.0;
  bool mapped = true;
  for (size_t bi = 0; bi < rr.black.size(); ++bi) {
    const int li = ls[1].lat_of_fine[rr.black[bi]];
    if (li < 0) {
      mapped = false;
      break;
    }
    for (size_t bj = 0; bj < rr.black.size(); ++bj) {
      const int lj = ls[1].lat_of_fine[rr.black[bj]];
      worst = std::max(worst, std::abs(rr.schur.at(bi, bj) - nine.at(li, lj)));
    }
  }
  EXPECT(crit, mapped);
  EXPECT(crit, worst <= 1e-12);
}

TEST_CASE("deep rotated W-cycle: rate, work, efficiency") {
  Criterion crit(7);
  PlanConfig pc;
  pc.n = 64;
  pc.coarsening = Coarsening::RedBlack;
  pc.cycle = CycleShape::W;
  pc.strategy = {CoarseOpKind::Galerkin, 2};
  CyclePlan plan = make_plan(pc);
  EXPECT(crit, plan.n_levels() == 7);
  const SolveReport rep = measure_cr(plan);
  EXPECT(crit, rep.cr <= 0.05);
  EXPECT(crit, rep.wu == 24.0);
  EXPECT(crit, rep.ecr == std::pow(rep.cr, 1.0 / 24.0));
  // efficiency sweep: best effective rate per shape near its target.
  // The fixed first-generation stencil on all coarse levels reproduces the
  // reference behaviour (V optimum at omega > 1); the exact recursion makes
  // the omega = 1 W point a near-direct solve and skews the W optimum.
  double best_v = 1.0, best_w = 1.0;
  for (double om = 0.80; om <= 1.2001; om += 0.05) {
    PlanConfig pv = pc;
    pv.cycle = CycleShape::V;
    pv.strategy = {CoarseOpKind::FirstGenFixed, 2};
    pv.smoother.omega = om;
    best_v = std::min(best_v, measure_cr(make_plan(pv)).ecr);
    PlanConfig pw = pv;
    pw.cycle = CycleShape::W;
    best_w = std::min(best_w, measure_cr(make_plan(pw)).ecr);
  }
  EXPECT(crit, std::abs(best_v - 0.6) <= 0.1);
  EXPECT(crit, std::abs(best_w - 0.75) <= 0.1);
}

TEST_CASE("factor-two jacobi W-cycle lands at the predicted rate") {
  Criterion crit(8);
  PlanConfig pc;
  pc.n = 64;
  pc.coarsening = Coarsening::FactorR;
  pc.r_target = 2.0;
  pc.cycle = CycleShape::W;
  pc.smoother = {SmootherKind::Jacobi, 0.8};
  pc.strategy = {CoarseOpKind::NonGalerkinSame, 2};
  const double cr = measure_cr(make_plan(pc)).cr;
  EXPECT(crit, std::abs(cr - 0.36) <= 0.05);
}

TEST_CASE("low-order coarse operators keep the high-order two-level rate") {
  Criterion crit(9);
  LfaConfig cfg;
  cfg.dim = 2;
  cfg.order = 4;
  cfg.coarsening = Coarsening::Standard;
  cfg.transfer = TransferKind::FullWeighting2D;
  cfg.smoother = {SmootherKind::RedBlackGS, 1.0};
  cfg.nu1 = 1;
  cfg.nu2 = 1;
  cfg.M = 64;
  auto best_rho = [&](CoarseOpKind kind) {
    double best = 1e9;
    for (int i = 0; i <= 40; ++i) {
      cfg.smoother.omega = 0.90 + 0.01 * i;
      cfg.strategy = {kind, 2};
      best = std::min(best, rho_two_level(cfg).value);
    }
    return best;
  };
  const double lo = best_rho(CoarseOpKind::GalerkinFromOrder);
  const double same = best_rho(CoarseOpKind::NonGalerkinSame);
  EXPECT(crit, lo <= same + 1e-3);
  EXPECT(crit, std::abs(lo - 0.045337795837) <= 1e-9);
  EXPECT(crit, std::abs(same - 0.079292177306) <= 1e-9);
}

TEST_CASE("structural invariants and reproducible reporting") {
  Criterion crit(10);
  {
    // restriction stays adjoint to interpolation in the level inner products
    struct Case {
      Coarsening kind;
      TransferKind tk;
      int dim, n;
      double r;
    };
    for (auto c : {Case{Coarsening::Standard, TransferKind::FullWeighting2D, 2,
                        16, 2.0},
                   Case{Coarsening::Standard, TransferKind::Cubic2D, 2, 16,
                        2.0},
                   Case{Coarsening::RedBlack, TransferKind::RedBlack2D, 2, 8,
                        2.0},
                   Case{Coarsening::FactorR, TransferKind::FactorRLinear, 2,
                        20, 1.6}}) {
      GridSpec spec{c.dim, c.n};
      auto ls =
          build_hierarchy(spec, plan_uniform(c.kind, spec, 2, 4, c.r));
      Transfer tr = make_transfer(c.tk, ls[0], ls[1]);
      EXPECT(crit, adjoint_check(tr, ls[0], ls[1], 6, 2024) < 1e-12);
    }
  }
  {
    // exact coarse symbols make the correction idempotent
    LfaConfig cfg;
    cfg.coarsening = Coarsening::RedBlack;
    cfg.transfer = TransferKind::RedBlack2D;
    cfg.strategy = {CoarseOpKind::Galerkin, 2};
    bool idem = true;
    for (double t1 : {0.3, -0.9}) {
      for (double t2 : {0.7, -0.2}) {
        auto k = k_pair_symbol(cfg, t1, t2);
        if (!k) {
          idem = false;
          continue;
        }
        const Mat2& m = *k;
        const Mat2 sq{m[0] * m[0] + m[1] * m[2], m[0] * m[1] + m[1] * m[3],
                      m[2] * m[0] + m[3] * m[2], m[2] * m[1] + m[3] * m[3]};
        for (int i = 0; i < 4; ++i)
          idem = idem && std::abs(sq[i] - m[i]) < 1e-12;
      }
    }
    EXPECT(crit, idem);
  }
  {
    // smoother symbol on standard coarsening splits into alias pairs
    LfaConfig cfg;
    cfg.smoother = {SmootherKind::RedBlackGS, 1.0};
    const Mat4 s = smoother_F_symbol(cfg, 0.5, -1.1);
    bool blockdiag = true;
    for (int idx : {2, 3, 6, 7, 8, 9, 12, 13})
      blockdiag = blockdiag && s[idx] == cd(0.0);
    EXPECT(crit, blockdiag);
  }
  {
    // every operator in a deep plan annihilates constants
    PlanConfig pc;
    pc.n = 16;
    pc.coarsening = Coarsening::RedBlack;
    pc.strategy = {CoarseOpKind::Galerkin, 2};
    pc.n_min = 4;
    CyclePlan plan = make_plan(pc);
    bool zerosum = true;
    for (const LevelOp& op : plan.ops) {
      const std::vector<double> ones(op.n(), 1.0);
      double maxdiag = 0.0;
      for (double d : op.diagv) maxdiag = std::max(maxdiag, std::abs(d));
      for (int i = 0; i < op.n(); ++i)
        zerosum =
            zerosum && std::abs(op.row_apply(i, ones)) < 1e-11 * maxdiag;
    }
    EXPECT(crit, zerosum);
  }
  {
    // identical invocations emit identical bytes
    const std::vector<std::string> args = {"lfa",     "--M",   "16",
                                           "--omega", "0.9:1.1:0.2"};
    EXPECT(crit, cli_run(args).out == cli_run(args).out);
  }
}
