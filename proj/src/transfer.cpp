#include "pmg/transfer.hpp"

#include <cmath>
#include <map>

#include "pmg/rng.hpp"

namespace pmg {

namespace {

bool basis_is(const LevelGrid& c, const LevelGrid& f, long m00, long m01,
              long m10, long m11) {
  // coarse basis == fine basis * M, columns of M given
  return c.basis[0][0] == f.basis[0][0] * m00 + f.basis[0][1] * m10 &&
         c.basis[1][0] == f.basis[1][0] * m00 + f.basis[1][1] * m10 &&
         c.basis[0][1] == f.basis[0][0] * m01 + f.basis[0][1] * m11 &&
         c.basis[1][1] == f.basis[1][0] * m01 + f.basis[1][1] * m11;
}

struct Builder {
  int n_fine;
  std::vector<std::map<int, double>> rows;
  explicit Builder(int nf) : n_fine(nf), rows(nf) {}
  void add(int i, int c, double w) {
    if (i < 0 || c < 0) throw ValidationError("transfer point off lattice");
    rows[i][c] += w;
  }
  Transfer finish(TransferKind kind, int n_coarse) {
    Transfer t;
    t.kind = kind;
    t.n_fine = n_fine;
    t.n_coarse = n_coarse;
    t.rho = static_cast<double>(n_fine) / n_coarse;
    t.rowptr.push_back(0);
    for (auto& r : rows) {
      for (const auto& [c, w] : r) {
        t.colidx.push_back(c);
        t.val.push_back(w);
      }
      t.rowptr.push_back(static_cast<int>(t.colidx.size()));
    }
    return t;
  }
};

// per-fine-point 1D linear weights onto a coarse factor-r grid
inline void factor_weights(int j, int nf, int nc, int& k, double& t) {
  long num = static_cast<long>(j) * nc;
  k = static_cast<int>(num / nf);
  t = static_cast<double>(num % nf) / nf;
}

}  // namespace

Transfer make_transfer(TransferKind kind, const LevelGrid& fine,
                       const LevelGrid& coarse) {
  const bool emb = fine.kind == LatticeKind::Embedded &&
                   coarse.kind == LatticeKind::Embedded;
  Builder b(fine.npts());
  switch (kind) {
    case TransferKind::FullWeighting1D: {
      if (fine.dim != 1 || !emb || !basis_is(coarse, fine, 2, 0, 0, 2))
        throw ValidationError("transfer kind incompatible with level pair");
      for (int c = 0; c < coarse.npts(); ++c) {
        int s = fine.lat_of_fine[coarse.fine_of[c]];
        b.add(s, c, 1.0);
        b.add(fine.neighbor_local(s, 1, 0), c, 0.5);
        b.add(fine.neighbor_local(s, -1, 0), c, 0.5);
      }
      return b.finish(kind, coarse.npts());
    }
    case TransferKind::FullWeighting2D:
    case TransferKind::Cubic2D: {
      if (fine.dim != 2 || !emb || !basis_is(coarse, fine, 2, 0, 0, 2))
        throw ValidationError("transfer kind incompatible with level pair");
      // per-axis weights at fine local offsets around each coarse point
      std::map<int, double> w;
      if (kind == TransferKind::FullWeighting2D)
        w = {{-1, 0.5}, {0, 1.0}, {1, 0.5}};
      else
        w = {{-3, -1.0 / 16}, {-1, 9.0 / 16}, {0, 1.0},
             {1, 9.0 / 16},   {3, -1.0 / 16}};
      for (int c = 0; c < coarse.npts(); ++c) {
        int s = fine.lat_of_fine[coarse.fine_of[c]];
        for (const auto& [o1, w1] : w)
          for (const auto& [o2, w2] : w)
            b.add(fine.neighbor_local(s, o1, o2), c, w1 * w2);
      }
      return b.finish(kind, coarse.npts());
    }
    case TransferKind::RedBlack2D: {
      if (fine.dim != 2 || !emb || !basis_is(coarse, fine, 1, -1, 1, 1))
        throw ValidationError("transfer kind incompatible with level pair");
      for (int c = 0; c < coarse.npts(); ++c) {
        int s = fine.lat_of_fine[coarse.fine_of[c]];
        b.add(s, c, 1.0);
        for (auto [o1, o2] : {std::array<int, 2>{1, 0},
                              {-1, 0},
                              {0, 1},
                              {0, -1}})
          b.add(fine.neighbor_local(s, o1, o2), c, 0.25);
      }
      return b.finish(kind, coarse.npts());
    }
    case TransferKind::FactorRLinear: {
      const bool fine_cartesian =
          fine.kind == LatticeKind::Independent ||
          (fine.basis[0][0] == 1 && fine.basis[1][1] == 1 &&
           fine.basis[0][1] == 0 && fine.basis[1][0] == 0);
      if (coarse.kind != LatticeKind::Independent || !fine_cartesian)
        throw ValidationError("transfer kind incompatible with level pair");
      const int nf = fine.ext[0], nc = coarse.ext[0];
      if (fine.dim == 1) {
        for (int j = 0; j < nf; ++j) {
          int k;
          double t;
          factor_weights(j, nf, nc, k, t);
          b.add(j, k % nc, 1.0 - t);
          b.add(j, (k + 1) % nc, t);
        }
        return b.finish(kind, coarse.npts());
      }
      for (int j1 = 0; j1 < nf; ++j1) {
        int k1;
        double t1;
        factor_weights(j1, nf, nc, k1, t1);
        for (int j2 = 0; j2 < fine.ext[1]; ++j2) {
          int k2;
          double t2;
          factor_weights(j2, fine.ext[1], coarse.ext[1], k2, t2);
          const int i = j1 * fine.ext[1] + j2;
          for (int a = 0; a < 2; ++a)
            for (int c2 = 0; c2 < 2; ++c2) {
              double wgt = (a ? t1 : 1.0 - t1) * (c2 ? t2 : 1.0 - t2);
              if (wgt == 0.0) continue;
              b.add(i, coarse.box_flat(k1 + a, k2 + c2), wgt);
            }
        }
      }
      return b.finish(kind, coarse.npts());
    }
  }
  throw ValidationError("unknown transfer kind");
}

std::vector<double> interpolate(const Transfer& t,
                                const std::vector<double>& u_coarse) {
  std::vector<double> out(t.n_fine, 0.0);
  for (int i = 0; i < t.n_fine; ++i) {
    double acc = 0.0;
    for (int k = t.rowptr[i]; k < t.rowptr[i + 1]; ++k)
      acc += t.val[k] * u_coarse[t.colidx[k]];
    out[i] = acc;
  }
  return out;
}

std::vector<double> restrict_to_coarse(const Transfer& t,
                                       const std::vector<double>& u_fine) {
  std::vector<double> out(t.n_coarse, 0.0);
  for (int i = 0; i < t.n_fine; ++i)
    for (int k = t.rowptr[i]; k < t.rowptr[i + 1]; ++k)
      out[t.colidx[k]] += t.val[k] * u_fine[i];
  const double inv = 1.0 / t.rho;
  for (double& x : out) x *= inv;
  return out;
}

double adjoint_check(const Transfer& t, const LevelGrid& fine,
                     const LevelGrid& coarse, int trials, std::uint64_t seed) {
  SplitMix64 rng{seed};
  const double hf = std::pow(fine.h, fine.dim);
  const double hc = std::pow(coarse.h, coarse.dim);
  double worst = 0.0;
  for (int q = 0; q < trials; ++q) {
    std::vector<double> u(t.n_fine), w(t.n_coarse);
    for (double& x : u) x = rng.uniform_pm1();
    for (double& x : w) x = rng.uniform_pm1();
    auto ru = restrict_to_coarse(t, u);
    auto pw = interpolate(t, w);
    double a = 0.0, c = 0.0;
    for (int i = 0; i < t.n_coarse; ++i) a += ru[i] * w[i];
    for (int i = 0; i < t.n_fine; ++i) c += u[i] * pw[i];
    worst = std::max(worst, std::abs(hc * a - hf * c));
  }
  return worst;
}

TransferKind default_transfer(Coarsening kind, int dim, int order) {
  if (kind == Coarsening::RedBlack) return TransferKind::RedBlack2D;
  if (kind == Coarsening::FactorR) return TransferKind::FactorRLinear;
  if (dim == 1) return TransferKind::FullWeighting1D;
  return order >= 4 ? TransferKind::Cubic2D : TransferKind::FullWeighting2D;
}

}  // namespace pmg
