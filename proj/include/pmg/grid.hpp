#pragma once
#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pmg {

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Periodic model domain [0,1]^d, n points per direction, h = 1/n.
struct GridSpec {
  int dim = 2;
  int n = 0;
  double h() const { return 1.0 / n; }
};

enum class Coarsening { Standard, RedBlack, FactorR };

enum class TransferKind {
  FullWeighting1D,
  FullWeighting2D,
  RedBlack2D,
  Cubic2D,
  FactorRLinear,
};

struct Transition {
  Coarsening kind = Coarsening::Standard;
  double r_target = 2.0;  // FactorR only
};

struct CoarseningPlan {
  std::vector<Transition> transitions;  // one per level transition
  int n_min = 8;
};

enum class LatticeKind { Embedded, Independent };

// One grid level.
//
// Embedded levels are integer sublattices of the finest grid: lattice index
// k = (k1,k2) sits at finest index (basis * k) mod n. The identification
// lattice {v : basis*v == 0 mod n} is NOT a coordinate box on rotated
// levels, so neighbor arithmetic must go through finest-grid indices
// (neighbor_local / neighbor_finest); box wrap of (k1,k2) is wrong there.
//
// Independent levels (factor-r) are plain periodic Cartesian grids with
// their own extent; box wrap is exact for them.
struct LevelGrid {
  int dim = 2;
  LatticeKind kind = LatticeKind::Embedded;
  double h = 0.0;
  int n_fine = 0;  // finest points per direction (Embedded only)
  // columns = finest-grid steps of the two lattice axes
  std::array<std::array<long, 2>, 2> basis{{{1, 0}, {0, 1}}};
  std::array<int, 2> ext{0, 1};  // points per lattice direction (1D: ext[1]=1)
  std::vector<std::int32_t> fine_of;      // lattice flat -> finest flat
  std::vector<std::int32_t> lat_of_fine;  // finest flat -> lattice flat or -1
  // checkerboard (k1+k2)&1 in lattice coordinates; consistent under wrap
  // only when color_ok (all identification generators have even sum).
  std::vector<std::uint8_t> color;
  bool color_ok = false;

  int npts() const { return ext[0] * ext[1]; }

  // Independent levels only: flat index with box wrap.
  int box_flat(int k1, int k2) const {
    k1 %= ext[0];
    if (k1 < 0) k1 += ext[0];
    k2 %= ext[1];
    if (k2 < 0) k2 += ext[1];
    return k1 * ext[1] + k2;
  }

  // Embedded levels: neighbor of lattice point i at a level-local offset,
  // resolved through finest indices. Returns -1 if off-lattice.
  int neighbor_local(int i, int o1, int o2) const;
  // Same for an offset already expressed in finest-grid steps.
  int neighbor_finest(int i, long f1, long f2) const;

  std::array<long, 2> fine_coords(int lat_flat) const;  // Embedded
};

// n_{l+1} = floor(n_l / r_target) until the next size would drop below
// n_min; returns (n_l, r_l) with r_l = n_l / n_{l+1} (last r_l = 0).
std::vector<std::pair<int, double>> factor_r_sizes(int n0, double r_target,
                                                   int n_min);

// Black parent point (j1+j2 even) -> rotated child index
// ((j1+j2)/2, (j2-j1)/2) wrapped into the child extent box.
std::array<int, 2> rbc_index_map(int j1, int j2,
                                 const std::array<int, 2>& child_ext);

std::vector<LevelGrid> build_hierarchy(const GridSpec& spec,
                                       const CoarseningPlan& plan);

// Plan builders used by the CLI and tests. levels = 0 means "as deep as
// n_min permits".
CoarseningPlan plan_uniform(Coarsening kind, const GridSpec& spec, int levels,
                            int n_min, double r_target = 2.0);
// RedBlack for the first two transitions, Standard below.
CoarseningPlan plan_variable(const GridSpec& spec, int levels, int n_min);

}  // namespace pmg
