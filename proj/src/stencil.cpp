#include "pmg/stencil.hpp"

#include <cmath>
#include <cstdio>
#include <map>

#include "pmg/transfer.hpp"

namespace pmg {

double Stencil::sum() const {
  double s = 0.0;
  for (const auto& [o, c] : a) s += c;
  return s;
}

bool Stencil::symmetric(double tol) const {
  for (const auto& [o, c] : a) {
    auto it = a.find({-o[0], -o[1]});
    if (it == a.end() || std::abs(it->second - c) > tol) return false;
  }
  return true;
}

int Stencil::radius() const {
  int r = 0;
  for (const auto& [o, c] : a)
    r = std::max({r, std::abs(o[0]), std::abs(o[1])});
  return r;
}

Stencil builtin(int dim, int order, Frame frame) {
  Stencil s;
  s.frame = frame;
  if (dim == 1 && order == 2) {
    s.a[{0, 0}] = 2.0;
    s.a[{1, 0}] = -1.0;
    s.a[{-1, 0}] = -1.0;
    return s;
  }
  if (dim == 2 && order == 2) {
    s.a[{0, 0}] = 4.0;
    for (auto o : {std::array<int, 2>{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
      s.a[o] = -1.0;
    return s;
  }
  if (dim == 2 && order == 4) {
    s.a[{0, 0}] = 60.0 / 12.0;
    for (auto o : {std::array<int, 2>{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
      s.a[o] = -16.0 / 12.0;
    for (auto o : {std::array<int, 2>{2, 0}, {-2, 0}, {0, 2}, {0, -2}})
      s.a[o] = 1.0 / 12.0;
    return s;
  }
  if (dim == 2 && order == 6) {
    s.a[{0, 0}] = 980.0 / 180.0;
    for (int axis = 0; axis < 2; ++axis)
      for (int sgn : {1, -1}) {
        auto at = [&](int m) -> std::array<int, 2> {
          return axis == 0 ? std::array<int, 2>{sgn * m, 0}
                           : std::array<int, 2>{0, sgn * m};
        };
        s.a[at(1)] = -270.0 / 180.0;
        s.a[at(2)] = 27.0 / 180.0;
        s.a[at(3)] = -2.0 / 180.0;
      }
    return s;
  }
  throw ValidationError("unsupported (dim, order) stencil");
}

Stencil galerkin_ninepoint() {
  Stencil s;
  s.a[{0, 0}] = 3.0;
  for (auto o : {std::array<int, 2>{1, 0}, {-1, 0}, {0, 1}, {0, -1}})
    s.a[o] = -0.5;
  for (auto o : {std::array<int, 2>{1, 1}, {-1, -1}, {1, -1}, {-1, 1}})
    s.a[o] = -0.25;
  return s;
}

std::string pretty(const Stencil& s) {
  int lo1 = 0, hi1 = 0, lo2 = 0, hi2 = 0;
  for (const auto& [o, c] : s.a) {
    lo1 = std::min(lo1, o[0]);
    hi1 = std::max(hi1, o[0]);
    lo2 = std::min(lo2, o[1]);
    hi2 = std::max(hi2, o[1]);
  }
  std::string out = "1/h^" + std::to_string(s.scale_power) + " *\n";
  char buf[64];
  for (int o2 = hi2; o2 >= lo2; --o2) {
    out += "[";
    for (int o1 = lo1; o1 <= hi1; ++o1) {
      auto it = s.a.find({o1, o2});
      std::snprintf(buf, sizeof buf, "%10.6g", it == s.a.end() ? 0.0
                                                               : it->second);
      out += buf;
    }
    out += " ]\n";
  }
  return out;
}

void LevelOp::apply(const std::vector<double>& u,
                    std::vector<double>& out) const {
  const int m = n();
  out.assign(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    for (int k = rowptr[i]; k < rowptr[i + 1]; ++k)
      acc += val[k] * u[colidx[k]];
    out[i] = acc;
  }
}

std::vector<double> LevelOp::apply(const std::vector<double>& u) const {
  std::vector<double> out;
  apply(u, out);
  return out;
}

double LevelOp::row_apply(int i, const std::vector<double>& u) const {
  double acc = 0.0;
  for (int k = rowptr[i]; k < rowptr[i + 1]; ++k)
    acc += val[k] * u[colidx[k]];
  return acc;
}

LevelOp bind_stencil(const Stencil& s, const LevelGrid& lv, int order_tag) {
  if (s.frame == Frame::Finest && lv.kind != LatticeKind::Embedded)
    throw ValidationError("finest-frame stencil on an independent level");
  LevelOp op;
  op.lv = &lv;
  op.order = order_tag;
  const int m = lv.npts();
  const double scale = 1.0 / std::pow(lv.h, s.scale_power);
  op.rowptr.reserve(m + 1);
  op.rowptr.push_back(0);
  op.diagv.assign(m, 0.0);
  std::map<int, double> row;
  for (int i = 0; i < m; ++i) {
    row.clear();
    for (const auto& [o, c] : s.a) {
      int j = s.frame == Frame::LevelLocal
                  ? lv.neighbor_local(i, o[0], o[1])
                  : lv.neighbor_finest(i, o[0], o[1]);
      if (j < 0) throw ValidationError("stencil offset leaves the lattice");
      row[j] += c * scale;
    }
    for (const auto& [j, v] : row) {
      op.colidx.push_back(j);
      op.val.push_back(v);
      if (j == i) op.diagv[i] = v;
    }
    op.rowptr.push_back(static_cast<int>(op.colidx.size()));
  }
  if (order_tag >= 4 && lv.dim == 2) {
    const double num = order_tag == 4 ? 1.0 / 12.0 : 27.0 / 180.0;
    op.lag_coef = num / (lv.h * lv.h);
    for (int a = 0; a < 2; ++a) op.lag_nbr[a].resize(m);
    for (int i = 0; i < m; ++i) {
      op.lag_nbr[0][i] = lv.neighbor_local(i, -2, 0);
      op.lag_nbr[1][i] = lv.neighbor_local(i, 0, -2);
    }
  }
  return op;
}

GridFunction apply(const Stencil& s, const GridFunction& u) {
  LevelOp op = bind_stencil(s, *u.lv);
  GridFunction out;
  out.lv = u.lv;
  out.v = op.apply(u.v);
  return out;
}

namespace {

// minimal-image level-local offset of fine-coordinate difference d on an
// embedded level: smallest-norm integral solution of basis*o == d (mod n)
std::array<int, 2> local_offset_of(const LevelGrid& lv,
                                   const std::array<long, 2>& d) {
  const long n = lv.n_fine;
  const auto& b = lv.basis;
  if (lv.dim == 1) {
    long best = 0;
    bool found = false;
    for (int a = -1; a <= 1; ++a) {
      long lift = d[0] + n * a;
      if (lift % b[0][0]) continue;
      long o = lift / b[0][0];
      if (!found || std::abs(o) < std::abs(best)) best = o, found = true;
    }
    if (!found) throw std::runtime_error("offset not on lattice");
    return {static_cast<int>(best), 0};
  }
  const long det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
  std::array<long, 2> best{};
  long best_n2 = -1;
  for (int a = -1; a <= 1; ++a)
    for (int c = -1; c <= 1; ++c) {
      long l1 = d[0] + n * a, l2 = d[1] + n * c;
      long o1n = b[1][1] * l1 - b[0][1] * l2;
      long o2n = -b[1][0] * l1 + b[0][0] * l2;
      if (o1n % det || o2n % det) continue;
      long o1 = o1n / det, o2 = o2n / det;
      long n2 = o1 * o1 + o2 * o2;
      if (best_n2 < 0 || n2 < best_n2) {
        best = {o1, o2};
        best_n2 = n2;
      }
    }
  if (best_n2 < 0) throw std::runtime_error("offset not on lattice");
  return {static_cast<int>(best[0]), static_cast<int>(best[1])};
}

}  // namespace

Stencil galerkin_stencil(TransferKind tkind, Coarsening transition,
                         const Stencil& fine_local) {
  if (transition == Coarsening::FactorR)
    throw ValidationError("factor-r Galerkin operators have no stencil form");
  const int dim = tkind == TransferKind::FullWeighting1D ? 1 : 2;
  // torus large enough that the coarse stencil support cannot wrap: the
  // composed support is at most radius(L) + 2 * radius(P) fine steps
  const int tr = tkind == TransferKind::Cubic2D ? 3 : 1;
  int need = 4 * (fine_local.radius() + 2 * tr) + 4;
  int nn = 32;
  while (nn < need && nn < 512) nn *= 2;
  if (nn >= 512)
    throw ValidationError("stencil support too wide for extraction");
  GridSpec spec{dim, nn};
  CoarseningPlan plan;
  plan.transitions.push_back({transition, 2.0});
  auto levels = build_hierarchy(spec, plan);
  const LevelGrid& fine = levels[0];
  const LevelGrid& coarse = levels[1];
  Transfer t = make_transfer(tkind, fine, coarse);

  Stencil local = fine_local;
  local.frame = Frame::LevelLocal;
  LevelOp Lf = bind_stencil(local, fine);

  const double H2s = std::pow(coarse.h, fine_local.scale_power);
  const int probes[3] = {0, 1 * coarse.ext[1] + (dim == 2 ? 2 : 0),
                         coarse.npts() / 2 + 1};
  std::map<std::array<int, 2>, double> ref;
  for (int pi = 0; pi < 3; ++pi) {
    const int p = probes[pi];
    std::vector<double> delta(coarse.npts(), 0.0);
    delta[p] = 1.0;
    std::vector<double> g =
        restrict_to_coarse(t, Lf.apply(interpolate(t, delta)));
    double gmax = 0.0;
    for (double x : g) gmax = std::max(gmax, std::abs(x));
    std::map<std::array<int, 2>, double> st;
    auto base = coarse.fine_coords(p);
    for (int s = 0; s < coarse.npts(); ++s) {
      if (std::abs(g[s]) <= 1e-12 * gmax) continue;
      auto fc = coarse.fine_coords(s);
      // column s of R L P applied to delta at p, read at offset s - p
      auto o = local_offset_of(coarse, {fc[0] - base[0], fc[1] - base[1]});
      st[o] = g[s] * H2s;
    }
    if (pi == 0) {
      ref = std::move(st);
    } else {
      if (st.size() != ref.size())
        throw std::runtime_error("galerkin stencil is not translation "
                                 "invariant (support mismatch)");
      for (const auto& [o, c] : st) {
        auto it = ref.find(o);
        if (it == ref.end() || std::abs(it->second - c) > 1e-11)
          throw std::runtime_error(
              "galerkin stencil is not translation invariant");
      }
    }
  }
  Stencil out;
  out.a = std::move(ref);
  out.scale_power = fine_local.scale_power;
  out.frame = Frame::LevelLocal;
  return out;
}

}  // namespace pmg
