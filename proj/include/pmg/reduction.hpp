#pragma once
#include <cstdint>
#include <vector>

#include "pmg/grid.hpp"
#include "pmg/stencil.hpp"

namespace pmg {

// Explicit periodic operator matrices at oracle scale. Entries are the raw
// (h-free) integer couplings as printed: 1D circulant tridiag(-1,2,-1),
// 2D block circulant with T = circ(4,-1,0,...,-1) diagonal blocks and -I
// off-diagonal blocks. Matrix index of fine point (j1,j2) is j1*n + j2.
struct SparseMatrix {
  int dim = 1;
  int n = 0;     // points per axis
  int size = 0;  // matrix order
  std::vector<int> row, col;
  std::vector<double> val;
  bool symmetric = true;
};

struct DenseMatrix {
  int rows = 0, cols = 0;
  std::vector<double> a;  // row-major
  double& at(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const {
    return a[static_cast<size_t>(i) * cols + j];
  }
};

SparseMatrix assemble_periodic(int dim, int n);

// Odd-parity (red) matrix indices; the even-parity complement is the
// coarse set eliminated against.
std::vector<int> red_index_set(int dim, int n);

// One elimination step of the red block. Requires the red diagonal block
// to be a positive multiple of the identity (alpha I). In (red, black)
// permuted order: Atilde = Lhat Ahat Lhat^T with unit lower Lhat and
// Ahat = diag(alpha I, Schur).
struct ReductionResult {
  std::vector<int> red, black;  // original indices, ascending
  double alpha = 0.0;
  DenseMatrix schur;  // black-block Schur complement
  DenseMatrix atilde, lhat, ahat;
  double reconstruction_error = 0.0;  // max |Atilde - Lhat Ahat Lhat^T|
};

ReductionResult schur_reduce(const SparseMatrix& m,
                             const std::vector<int>& red);

// Raw stencil couplings assembled on a lattice (no h scaling applied).
DenseMatrix stencil_matrix(const LevelGrid& lv, const Stencil& st);

// Solves a random zero-mean periodic system by red elimination plus an
// exact deflated black solve, and independently by one two-level cycle
// with nu1=0, nu2=1, omega=1 and the Galerkin coarse operator.
struct EquivalenceReport {
  double discrepancy = 0.0;  // max |x_reduction - x_mg|
  double rel_residual_reduction = 0.0;
  double rel_residual_mg = 0.0;
};

EquivalenceReport verify_direct_solver_equivalence(
    int n, int dim, std::uint64_t seed = 20240801ull);

}  // namespace pmg
