#pragma once
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmg/grid.hpp"

namespace pmg {

enum class Frame { Finest, LevelLocal };

// Sparse offset->coefficient map with an explicit 1/h^scale_power scaling.
// Coefficients are stored already divided by the printed denominator.
struct Stencil {
  std::map<std::array<int, 2>, double> a;
  int scale_power = 2;
  Frame frame = Frame::LevelLocal;

  double sum() const;
  bool symmetric(double tol = 0.0) const;  // invariant under offset negation
  int radius() const;                      // max |offset| component
};

// Discrete Laplacians as printed: (1,2), (2,2), (2,4), (2,6).
Stencil builtin(int dim, int order, Frame frame = Frame::LevelLocal);

// The 9-point coarse operator produced by the first Galerkin transition of
// the 5-point Laplacian, identical (in level-local offsets) for standard
// full-weighting and red-black coarsening: {3; -1/2 axes; -1/4 diagonals}/H^2.
Stencil galerkin_ninepoint();

std::string pretty(const Stencil& s);  // bracket layout for docs/tests

struct GridFunction {
  const LevelGrid* lv = nullptr;
  std::vector<double> v;
};

// Operator bound to a level: CSR matrix plus the generating stencil when the
// operator is translation invariant. Factor-r Galerkin operators are CSR
// only (built by sparse R*A*P; not translation invariant in general).
struct LevelOp {
  const LevelGrid* lv = nullptr;
  std::vector<int> rowptr, colidx;
  std::vector<double> val;
  std::vector<double> diagv;
  std::optional<Stencil> st;
  int order = 0;  // discretization-order tag (drives the GS splitting)
  // same-color lagged couplings of the order-4/6 GS splitting: local offsets
  // (-2,0) and (0,-2); empty when the splitting has none.
  std::array<std::vector<int>, 2> lag_nbr;
  double lag_coef = 0.0;

  int n() const { return static_cast<int>(diagv.size()); }
  void apply(const std::vector<double>& u, std::vector<double>& out) const;
  std::vector<double> apply(const std::vector<double>& u) const;
  double row_apply(int i, const std::vector<double>& u) const;
};

LevelOp bind_stencil(const Stencil& s, const LevelGrid& lv, int order_tag = 0);
GridFunction apply(const Stencil& s, const GridFunction& u);

enum class CoarseOpKind {
  NonGalerkinSame,    // rediscretize the fine stencil at each level's h
  NonGalerkinOrder,   // rediscretize at order q
  Galerkin,           // recursive R*L*P
  GalerkinFromOrder,  // recursive R*L*P seeded with the order-q fine stencil
  FirstGenFixed,      // first-transition Galerkin stencil reused on all levels
  GnHybrid,           // Galerkin on level 1, rediscretized below
  FixedG2,            // factor-r only: the r=2 Galerkin stencil on all levels
};

struct CoarseOpStrategy {
  CoarseOpKind kind = CoarseOpKind::Galerkin;
  int q = 2;  // NonGalerkinOrder / GalerkinFromOrder
};

// Galerkin coarse stencil for one embedded transition, extracted from delta
// responses on a canonical two-level torus of the same transition kind;
// translation invariance is verified at >= 3 probe positions.
Stencil galerkin_stencil(TransferKind tkind, Coarsening transition,
                         const Stencil& fine_local);

}  // namespace pmg
