#pragma once
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmg/grid.hpp"
#include "pmg/smoother.hpp"
#include "pmg/stencil.hpp"
#include "pmg/transfer.hpp"

namespace pmg {

struct SolveError : std::runtime_error {
  double achieved;  // relative residual reached when giving up
  SolveError(const std::string& msg, double res)
      : std::runtime_error(msg), achieved(res) {}
};

enum class CycleShape { V, W, Wn };

struct PlanConfig {
  int dim = 2;
  int n = 64;
  int order = 2;
  Coarsening coarsening = Coarsening::RedBlack;
  bool variable = false;  // red-black twice, then standard
  double r_target = 2.0;
  int levels = 0;  // 0 = as deep as n_min permits
  int n_min = 8;
  CycleShape cycle = CycleShape::V;
  int nu1 = 1, nu2 = 1;
  SmootherConfig smoother{};
  CoarseOpStrategy strategy{};
  bool transfer_auto = true;
  TransferKind transfer = TransferKind::FullWeighting2D;
  double sigma_c = 1e-12;
  int coarsest_max_iter = 0;  // 0 = 10 * coarsest size
};

// A fully materialized cycle: grids, transfers, per-level operators (CSR;
// factor-r Galerkin levels hold the composed R*L*P matrix), and the
// recursion counts gamma[l] = coarse solves level l requests from l+1.
// Operators point into `levels`; the plan is movable but not copyable.
struct CyclePlan {
  std::vector<LevelGrid> levels;
  std::vector<Transfer> transfers;
  std::vector<LevelOp> ops;
  std::vector<int> gamma;  // size levels-1
  std::vector<int> tcost;  // transfer bookkeeping per transition (1 or 2)
  int nu1 = 1, nu2 = 1;
  SmootherConfig smoother{};
  double sigma_c = 1e-12;
  int coarsest_max_iter = 0;
  int dim = 2, order = 2;

  CyclePlan() = default;
  CyclePlan(CyclePlan&&) = default;
  CyclePlan& operator=(CyclePlan&&) = default;
  CyclePlan(const CyclePlan&) = delete;
  CyclePlan& operator=(const CyclePlan&) = delete;

  int n_levels() const { return static_cast<int>(levels.size()); }
};

CyclePlan make_plan(const PlanConfig& pc);

// conjugate gradients with constant-mode deflation on the periodic
// (singular, PSD) system; throws SolveError on non-convergence
std::vector<double> coarsest_solve(const LevelOp& A,
                                   const std::vector<double>& b,
                                   double sigma_c, int max_iter);

// one multigrid cycle on `level`, updating u in place
void mg_cycle(const CyclePlan& plan, std::vector<double>& u,
              const std::vector<double>& f, int level = 0);

struct SolveReport {
  std::vector<double> res_norms;  // initial + one per cycle
  std::vector<double> ratios;
  double cr = 0.0;
  double wu = 0.0;
  double ecr = 0.0;
  int cycles = 0;
  std::uint64_t seed = 0;
  bool direct_regime = false;  // residual underflowed before the window
};

SolveReport measure_cr(const CyclePlan& plan, int n_warm = 15, int n_avg = 5,
                       std::uint64_t seed = 1234);

// infinite-hierarchy closed form of the per-cycle work in finest-grid
// sweeps: (nu+1+T) * B, B = rho/(rho-gamma) for gamma < rho, l_max for
// gamma == rho, (rho/(gamma-rho)) (gamma/rho)^l_max for gamma > rho
double work_units_formula(double rho, double gamma, int nu, int T, int l_max);

// uniform plans use the closed form; mixed gamma/ratio plans the finite sum
double work_units(const CyclePlan& plan);

}  // namespace pmg
