#include "pmg/grid.hpp"

#include <algorithm>
#include <cmath>

namespace pmg {

namespace {

long wrap(long x, long n) {
  x %= n;
  return x < 0 ? x + n : x;
}

// 2x2 integer inverse scaled by n: returns n * B^{-1}, all entries exact.
std::array<std::array<long, 2>, 2> scaled_inverse(
    const std::array<std::array<long, 2>, 2>& b, long n) {
  long det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
  if (det == 0) throw ValidationError("singular lattice basis");
  std::array<std::array<long, 2>, 2> adj{
      {{b[1][1], -b[0][1]}, {-b[1][0], b[0][0]}}};
  std::array<std::array<long, 2>, 2> out{};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      long num = n * adj[i][j];
      if (num % det != 0)
        throw ValidationError("identification lattice is not integral");
      out[i][j] = num / det;
    }
  return out;
}

void finish_embedded(LevelGrid& lv) {
  const int n = lv.n_fine;
  const long nn = static_cast<long>(n) * (lv.dim == 2 ? n : 1);
  lv.fine_of.assign(lv.npts(), -1);
  lv.lat_of_fine.assign(nn, -1);
  lv.color.assign(lv.npts(), 0);
  for (int k1 = 0; k1 < lv.ext[0]; ++k1)
    for (int k2 = 0; k2 < lv.ext[1]; ++k2) {
      const int i = k1 * lv.ext[1] + k2;
      long f1 = wrap(lv.basis[0][0] * k1 + lv.basis[0][1] * k2, n);
      long f2 = lv.dim == 2 ? wrap(lv.basis[1][0] * k1 + lv.basis[1][1] * k2, n)
                            : 0;
      long f = lv.dim == 2 ? f1 * n + f2 : f1;
      if (lv.lat_of_fine[f] != -1)
        throw ValidationError("lattice enumeration is not injective");
      lv.fine_of[i] = static_cast<std::int32_t>(f);
      lv.lat_of_fine[f] = static_cast<std::int32_t>(i);
      lv.color[i] = static_cast<std::uint8_t>((k1 + k2) & 1);
    }
  // the checkerboard is well defined iff every identification generator
  // (columns of n * basis^{-1}) has even coordinate sum.
  if (lv.dim == 2) {
    auto gen = scaled_inverse(lv.basis, n);
    lv.color_ok = ((gen[0][0] + gen[1][0]) % 2 == 0) &&
                  ((gen[0][1] + gen[1][1]) % 2 == 0);
  } else {
    lv.color_ok = lv.ext[0] % 2 == 0;
  }
}

LevelGrid finest_level(const GridSpec& spec) {
  LevelGrid lv;
  lv.dim = spec.dim;
  lv.kind = LatticeKind::Embedded;
  lv.h = spec.h();
  lv.n_fine = spec.n;
  lv.basis = {{{1, 0}, {0, 1}}};
  lv.ext = {spec.n, spec.dim == 2 ? spec.n : 1};
  finish_embedded(lv);
  return lv;
}

}  // namespace

int LevelGrid::neighbor_local(int i, int o1, int o2) const {
  if (kind == LatticeKind::Independent) {
    int k1 = i / ext[1], k2 = i % ext[1];
    return box_flat(k1 + o1, k2 + o2);
  }
  return neighbor_finest(i, basis[0][0] * o1 + basis[0][1] * o2,
                         basis[1][0] * o1 + basis[1][1] * o2);
}

int LevelGrid::neighbor_finest(int i, long f1, long f2) const {
  const long n = n_fine;
  long b1, b2;
  if (dim == 2) {
    long f = fine_of[i];
    b1 = f / n;
    b2 = f % n;
    long t = wrap(b1 + f1, n) * n + wrap(b2 + f2, n);
    return lat_of_fine[t];
  }
  b1 = fine_of[i];
  return lat_of_fine[wrap(b1 + f1, n)];
}

std::array<long, 2> LevelGrid::fine_coords(int lat_flat) const {
  long f = fine_of[lat_flat];
  if (dim == 2) return {f / n_fine, f % n_fine};
  return {f, 0};
}

std::vector<std::pair<int, double>> factor_r_sizes(int n0, double r_target,
                                                   int n_min) {
  if (!(r_target > 1.0)) throw ValidationError("factor-r requires r > 1");
  if (!(n0 > n_min && n_min >= 2))
    throw ValidationError("factor-r requires n0 > n_min >= 2");
  std::vector<std::pair<int, double>> out;
  int n = n0;
  for (;;) {
    int m = static_cast<int>(std::floor(n / r_target));
    if (m < n_min) {
      out.emplace_back(n, 0.0);
      return out;
    }
    out.emplace_back(n, static_cast<double>(n) / m);
    n = m;
  }
}

std::array<int, 2> rbc_index_map(int j1, int j2,
                                 const std::array<int, 2>& child_ext) {
  if ((j1 + j2) % 2 != 0)
    throw ValidationError("rbc_index_map: point is not on the black lattice");
  long k1 = (static_cast<long>(j1) + j2) / 2;
  long k2 = (static_cast<long>(j2) - j1) / 2;
  return {static_cast<int>(wrap(k1, child_ext[0])),
          static_cast<int>(wrap(k2, child_ext[1]))};
}

std::vector<LevelGrid> build_hierarchy(const GridSpec& spec,
                                       const CoarseningPlan& plan) {
  if (spec.dim != 1 && spec.dim != 2)
    throw ValidationError("dim must be 1 or 2");
  if (spec.n < 4) throw ValidationError("n must be >= 4");

  std::vector<LevelGrid> levels;
  levels.push_back(finest_level(spec));

  for (const Transition& t : plan.transitions) {
    const LevelGrid& p = levels.back();
    LevelGrid c;
    c.dim = p.dim;
    switch (t.kind) {
      case Coarsening::Standard: {
        if (p.kind != LatticeKind::Embedded)
          throw ValidationError("standard coarsening needs an embedded level");
        if (p.ext[0] % 2 || (p.dim == 2 && p.ext[1] % 2))
          throw ValidationError("standard coarsening needs even extents");
        c.kind = LatticeKind::Embedded;
        c.h = 2.0 * p.h;
        c.n_fine = p.n_fine;
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) c.basis[i][j] = 2 * p.basis[i][j];
        c.ext = {p.ext[0] / 2, p.dim == 2 ? p.ext[1] / 2 : 1};
        finish_embedded(c);
        break;
      }
      case Coarsening::RedBlack: {
        if (p.dim != 2)
          throw ValidationError("red-black coarsening is 2D only");
        if (p.kind != LatticeKind::Embedded)
          throw ValidationError("red-black coarsening needs an embedded level");
        c.kind = LatticeKind::Embedded;
        c.h = std::sqrt(2.0) * p.h;
        c.n_fine = p.n_fine;
        // child basis = parent basis * [[1,-1],[1,1]] (columns (1,1),(-1,1))
        for (int i = 0; i < 2; ++i) {
          c.basis[i][0] = p.basis[i][0] + p.basis[i][1];
          c.basis[i][1] = -p.basis[i][0] + p.basis[i][1];
        }
        // halve the extent that keeps the enumeration injective: square
        // boxes lose the second direction, 2:1 boxes the first.
        if (p.ext[0] == p.ext[1]) {
          if (p.ext[1] % 2)
            throw ValidationError("red-black coarsening needs even extents");
          c.ext = {p.ext[0], p.ext[1] / 2};
        } else {
          if (p.ext[0] % 2)
            throw ValidationError("red-black coarsening needs even extents");
          c.ext = {p.ext[0] / 2, p.ext[1]};
        }
        finish_embedded(c);
        break;
      }
      case Coarsening::FactorR: {
        int np = p.kind == LatticeKind::Embedded ? p.n_fine : p.ext[0];
        if (p.kind == LatticeKind::Embedded &&
            (p.basis[0][0] != 1 || p.basis[1][1] != 1 || p.basis[0][1] != 0 ||
             p.basis[1][0] != 0))
          throw ValidationError(
              "factor-r coarsening needs a plain Cartesian level");
        int m = static_cast<int>(std::floor(np / t.r_target));
        if (m < 2) throw ValidationError("factor-r level would be degenerate");
        c.kind = LatticeKind::Independent;
        c.n_fine = 0;
        c.h = 1.0 / m;
        c.ext = {m, p.dim == 2 ? m : 1};
        c.color.assign(c.npts(), 0);
        for (int k1 = 0; k1 < c.ext[0]; ++k1)
          for (int k2 = 0; k2 < c.ext[1]; ++k2)
            c.color[k1 * c.ext[1] + k2] =
                static_cast<std::uint8_t>((k1 + k2) & 1);
        c.color_ok = c.ext[0] % 2 == 0 && c.ext[1] % 2 == 0;
        break;
      }
    }
    levels.push_back(std::move(c));
  }
  return levels;
}

namespace {

int auto_levels(Coarsening kind, const GridSpec& spec, int n_min,
                double r_target) {
  if (kind == Coarsening::FactorR)
    return static_cast<int>(factor_r_sizes(spec.n, r_target, n_min).size());
  long pts_min = 1;
  for (int d = 0; d < spec.dim; ++d) pts_min *= n_min;
  long pts = 1;
  for (int d = 0; d < spec.dim; ++d) pts *= spec.n;
  int levels = 1;
  const int drop = kind == Coarsening::Standard ? (1 << spec.dim) : 2;
  while (pts / drop >= pts_min && pts % drop == 0) {
    pts /= drop;
    ++levels;
  }
  return levels;
}

}  // namespace

CoarseningPlan plan_uniform(Coarsening kind, const GridSpec& spec, int levels,
                            int n_min, double r_target) {
  int max_levels = auto_levels(kind, spec, n_min, r_target);
  if (levels == 0) levels = max_levels;
  if (levels < 2) throw ValidationError("plan needs at least 2 levels");
  if (levels > max_levels)
    throw ValidationError("requested levels exceed what n_min permits");
  CoarseningPlan plan;
  plan.n_min = n_min;
  if (kind == Coarsening::FactorR) {
    auto sizes = factor_r_sizes(spec.n, r_target, n_min);
    for (int l = 0; l + 1 < levels; ++l)
      plan.transitions.push_back({Coarsening::FactorR, r_target});
    (void)sizes;
  } else {
    for (int l = 0; l + 1 < levels; ++l)
      plan.transitions.push_back({kind, 2.0});
  }
  return plan;
}

CoarseningPlan plan_variable(const GridSpec& spec, int levels, int n_min) {
  if (spec.dim != 2) throw ValidationError("variable coarsening is 2D only");
  const long pts_min = static_cast<long>(n_min) * n_min;
  if (levels == 0) {
    long pts = static_cast<long>(spec.n) * spec.n;
    levels = 1;
    for (int l = 0;; ++l) {
      const long drop = l < 2 ? 2 : 4;
      if (pts / drop < pts_min || pts % drop != 0) break;
      pts /= drop;
      ++levels;
    }
  }
  if (levels < 3)
    throw ValidationError("variable coarsening needs at least 3 levels");
  CoarseningPlan plan;
  plan.n_min = n_min;
  for (int l = 0; l + 1 < levels; ++l)
    plan.transitions.push_back(
        {l < 2 ? Coarsening::RedBlack : Coarsening::Standard, 2.0});
  // validate depth against n_min by building the extents chain
  long pts = static_cast<long>(spec.n) * spec.n;
  for (int l = 0; l + 1 < levels; ++l) {
    pts /= (l < 2 ? 2 : 4);
    if (pts < pts_min)
      throw ValidationError("requested levels exceed what n_min permits");
  }
  return plan;
}

}  // namespace pmg
