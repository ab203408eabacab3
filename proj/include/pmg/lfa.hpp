#pragma once
#include <array>
#include <complex>
#include <optional>

#include "pmg/grid.hpp"
#include "pmg/smoother.hpp"
#include "pmg/stencil.hpp"

namespace pmg {

using cd = std::complex<double>;
using Mat2 = std::array<cd, 4>;    // row-major 2x2 on the (theta, theta_bar)
using Mat4 = std::array<cd, 16>;   // row-major 4x4 on the 4-alias space

// conjugate frequency t - sgn(t) pi, with bar(0) = -pi
double theta_bar(double t);
// (1/d) sum_k sin^2(t_k / 2)
double xi_freq(int dim, double t1, double t2 = 0.0);

// closed-form Laplacian symbols
double sym_o2_1d(double t, double h = 1.0);
double sym_o2_2d(double t1, double t2, double h = 1.0);
double sym_o4_2d(double t1, double t2, double h = 1.0);
double sym_o6_2d(double t1, double t2, double h = 1.0);

// per-axis interpolation symbols (normalized per-alias convention)
double fw_axis_symbol(double a);
double cubic_axis_symbol(double a);

// sum_j a_j e^{i theta . j} / h^p for a level-local stencil
cd symbol(const Stencil& s, double t1, double t2, double h = 1.0);

double spectral_radius(const Mat2& m);
double spectral_radius(const Mat4& m);

struct LfaConfig {
  int dim = 2;
  int order = 2;
  SmootherConfig smoother{};
  Coarsening coarsening = Coarsening::Standard;
  TransferKind transfer = TransferKind::FullWeighting2D;
  CoarseOpStrategy strategy{};
  int nu1 = 1, nu2 = 1;
  int M = 128;  // sample points per direction, even
};

struct LfaReport {
  double value = 0.0;  // sup over the sampled set
  int sampled = 0;
  int excluded = 0;  // theta = 0 and symbol-singular points
};

// full-sweep smoother symbol on the (theta, theta_bar) pair (1D and
// red-black coarsening analyses); red half then black half
Mat2 smoother_pair_symbol(const LfaConfig& cfg, double t1, double t2 = 0.0);
// standard-2D 4x4 smoother symbol: block-diagonal pairs (t1,t2), (t1b,t2)
Mat4 smoother_F_symbol(const LfaConfig& cfg, double t1, double t2);

// coarse-grid correction symbols; nullopt when L_H is singular at theta
std::optional<Mat2> k_pair_symbol(const LfaConfig& cfg, double t1,
                                  double t2 = 0.0);
std::optional<Mat4> k_F_symbol(const LfaConfig& cfg, double t1, double t2);

// S^nu2 K S^nu1 at one theta; nullopt when excluded (theta = 0 or singular)
std::optional<double> rho_at_theta(const LfaConfig& cfg, double t1,
                                   double t2 = 0.0);

bool lfa_supports_rho(const LfaConfig& cfg);

// sup over the sampled low set of rho(M(theta))
LfaReport rho_two_level(const LfaConfig& cfg);

// mu = sup over sampled low set of rho(Q S^nu)^(1/nu), nu = nu1 + nu2
LfaReport smoothing_factor(const LfaConfig& cfg);

struct FactorRAnalysis {
  double r = 2.0;
  int d = 2;
  double zeta = 0.0;        // (1/d) sin^2(pi / 2r)
  double omega_star = 0.0;  // 1 / (1 + zeta)
  double mu_star = 0.0;     // (1 - zeta) / (1 + zeta)
  double mu(double omega) const;  // max(|1 - 2 w zeta|, |1 - 2 w|)
};

FactorRAnalysis factor_r_closed_forms(double r, int d);

// numeric sup of |1 - 2 omega xi| over sampled high set + boundary faces
double factor_r_mu_numeric(double r, int d, double omega, int M = 128);

// (mu*)^(nu / WU) with the generic (nu+3)-bookkeeping work units
double esr(double r, int d, double gamma, int nu, int l_max);

}  // namespace pmg
