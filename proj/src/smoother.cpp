#include "pmg/smoother.hpp"

#include <cmath>

namespace pmg {

double jacobi_diagonal(const Stencil& L, double h) {
  auto it = L.a.find({0, 0});
  if (it == L.a.end() || it->second == 0.0)
    throw ValidationError("stencil has no center coefficient");
  return it->second / std::pow(h, L.scale_power);
}

namespace {

void jacobi_sweep(const LevelOp& A, double omega, std::vector<double>& u,
                  const std::vector<double>& f) {
  const int n = A.n();
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = f[i] - A.row_apply(i, u);
  for (int i = 0; i < n; ++i) u[i] += omega * r[i] / A.diagv[i];
}

void half_sweep_jacobi(const LevelOp& A, double omega, int col,
                       std::vector<double>& u, const std::vector<double>& f) {
  const int n = A.n();
  std::vector<double> r(n, 0.0);
  const auto& color = A.lv->color;
  for (int i = 0; i < n; ++i)
    if (color[i] == col) r[i] = f[i] - A.row_apply(i, u);
  for (int i = 0; i < n; ++i)
    if (color[i] == col) u[i] += omega * r[i] / A.diagv[i];
}

void half_sweep_gs_lagged(const LevelOp& A, double omega, int col,
                          std::vector<double>& u,
                          const std::vector<double>& f) {
  // solve (D/omega) du + lag_coef * (du at lagged same-color nbrs) = res|col
  const int n = A.n();
  const auto& color = A.lv->color;
  std::vector<double> rhs(n, 0.0);
  for (int i = 0; i < n; ++i)
    if (color[i] == col) rhs[i] = f[i] - A.row_apply(i, u);
  std::vector<double> du(n, 0.0), du_new(n, 0.0);
  for (int it = 0; it < 60; ++it) {
    double diff = 0.0, amp = 1.0;
    for (int i = 0; i < n; ++i) {
      if (color[i] != col) continue;
      double lag = A.lag_coef * (du[A.lag_nbr[0][i]] + du[A.lag_nbr[1][i]]);
      du_new[i] = (rhs[i] - lag) * omega / A.diagv[i];
      diff = std::max(diff, std::abs(du_new[i] - du[i]));
      amp = std::max(amp, std::abs(du_new[i]));
    }
    std::swap(du, du_new);
    if (diff <= 1e-17 * amp) break;
  }
  for (int i = 0; i < n; ++i)
    if (color[i] == col) u[i] += du[i];
}

}  // namespace

void sweep(const SmootherConfig& cfg, const LevelOp& A, std::vector<double>& u,
           const std::vector<double>& f) {
  if (cfg.kind == SmootherKind::Jacobi) {
    jacobi_sweep(A, cfg.omega, u, f);
    return;
  }
  if (!A.lv->color_ok)
    throw ValidationError("red-black sweep needs a well-defined checkerboard");
  const bool lagged = cfg.kind == SmootherKind::RedBlackGS &&
                      A.order >= 4 && !A.lag_nbr[0].empty();
  for (int col : {1, 0}) {
    if (lagged)
      half_sweep_gs_lagged(A, cfg.omega, col, u, f);
    else
      half_sweep_jacobi(A, cfg.omega, col, u, f);
  }
}

}  // namespace pmg
