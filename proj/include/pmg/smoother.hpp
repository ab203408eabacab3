#pragma once
#include <vector>

#include "pmg/stencil.hpp"

namespace pmg {

enum class SmootherKind { Jacobi, RedBlackJacobi, RedBlackGS };

struct SmootherConfig {
  SmootherKind kind = SmootherKind::RedBlackGS;
  double omega = 1.0;
};

// center coefficient / h^scale_power (the D of the omega-Jacobi update)
double jacobi_diagonal(const Stencil& L, double h);

// One full sweep in place. Red-black kinds do the red (odd-parity) half
// first, then black; each half computes all its residuals before writing,
// so the result is independent of point order. RedBlackGS on an order-4/6
// operator solves its same-color implicit system (lagged couplings at local
// offsets (-2,0) and (0,-2)) by fixed-point iteration; on operators without
// that splitting it coincides with RedBlackJacobi.
void sweep(const SmootherConfig& cfg, const LevelOp& A, std::vector<double>& u,
           const std::vector<double>& f);

}  // namespace pmg
