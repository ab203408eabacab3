#pragma once
#include <cstdint>
#include <vector>

#include "pmg/grid.hpp"

namespace pmg {

// Interpolation P stored CSR over fine rows; restriction is fixed to the
// adjoint R = (1/rho) P^T with rho = fine/coarse point-count ratio, which
// makes <R u, w>_H == <u, P w>_h exact for every kind.
struct Transfer {
  TransferKind kind = TransferKind::FullWeighting2D;
  int n_fine = 0, n_coarse = 0;
  double rho = 1.0;
  std::vector<int> rowptr, colidx;
  std::vector<double> val;
};

Transfer make_transfer(TransferKind kind, const LevelGrid& fine,
                       const LevelGrid& coarse);

std::vector<double> interpolate(const Transfer& t,
                                const std::vector<double>& u_coarse);
std::vector<double> restrict_to_coarse(const Transfer& t,
                                       const std::vector<double>& u_fine);

// max over trials of |<R u, w>_H - <u, P w>_h| on random u, w
double adjoint_check(const Transfer& t, const LevelGrid& fine,
                     const LevelGrid& coarse, int trials, std::uint64_t seed);

TransferKind default_transfer(Coarsening kind, int dim, int order);

}  // namespace pmg
