#include "pmg/reduction.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "pmg/cycle.hpp"
#include "pmg/rng.hpp"

namespace pmg {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void push(SparseMatrix& m, int r, int c, double v) {
  m.row.push_back(r);
  m.col.push_back(c);
  m.val.push_back(v);
}

MatrixXd dense(const SparseMatrix& m) {
  MatrixXd a = MatrixXd::Zero(m.size, m.size);
  for (size_t k = 0; k < m.val.size(); ++k) a(m.row[k], m.col[k]) += m.val[k];
  return a;
}

DenseMatrix to_dense_matrix(const MatrixXd& a) {
  DenseMatrix d;
  d.rows = static_cast<int>(a.rows());
  d.cols = static_cast<int>(a.cols());
  d.a.resize(static_cast<size_t>(d.rows) * d.cols);
  for (int i = 0; i < d.rows; ++i)
    for (int j = 0; j < d.cols; ++j) d.at(i, j) = a(i, j);
  return d;
}

}  // namespace

SparseMatrix assemble_periodic(int dim, int n) {
  if (dim != 1 && dim != 2)
    throw ValidationError("dimension must be 1 or 2");
  if (n < 4 || n % 2 != 0)
    throw ValidationError("matrix assembly needs even n >= 4");
  SparseMatrix m;
  m.dim = dim;
  m.n = n;
  if (dim == 1) {
    m.size = n;
    for (int j = 0; j < n; ++j) {
      push(m, j, j, 2.0);
      push(m, j, (j + 1) % n, -1.0);
      push(m, j, (j + n - 1) % n, -1.0);
    }
    return m;
  }
  m.size = n * n;
  auto at = [n](int j1, int j2) {
    return ((j1 % n + n) % n) * n + ((j2 % n + n) % n);
  };
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2) {
      const int i = at(j1, j2);
      push(m, i, i, 4.0);
      push(m, i, at(j1 + 1, j2), -1.0);
      push(m, i, at(j1 - 1, j2), -1.0);
      push(m, i, at(j1, j2 + 1), -1.0);
      push(m, i, at(j1, j2 - 1), -1.0);
    }
  return m;
}

std::vector<int> red_index_set(int dim, int n) {
  std::vector<int> red;
  if (dim == 1) {
    for (int j = 1; j < n; j += 2) red.push_back(j);
    return red;
  }
  for (int j1 = 0; j1 < n; ++j1)
    for (int j2 = 0; j2 < n; ++j2)
      if ((j1 + j2) % 2 == 1) red.push_back(j1 * n + j2);
  return red;
}

ReductionResult schur_reduce(const SparseMatrix& m,
                             const std::vector<int>& red) {
  const int N = m.size;
  ReductionResult res;
  res.red = red;
  std::sort(res.red.begin(), res.red.end());
  std::vector<char> isred(N, 0);
  for (int r : res.red) {
    if (r < 0 || r >= N) throw ValidationError("red index out of range");
    if (isred[r]) throw ValidationError("duplicate red index");
    isred[r] = 1;
  }
  for (int i = 0; i < N; ++i)
    if (!isred[i]) res.black.push_back(i);
  const int nr = static_cast<int>(res.red.size());
  const int nb = N - nr;

  std::vector<int> pos(N);
  for (int i = 0; i < nr; ++i) pos[res.red[i]] = i;
  for (int i = 0; i < nb; ++i) pos[res.black[i]] = nr + i;
  const MatrixXd a = dense(m);
  MatrixXd at(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) at(pos[i], pos[j]) = a(i, j);

  MatrixXd lhat = MatrixXd::Identity(N, N);
  MatrixXd ahat = MatrixXd::Zero(N, N);
  MatrixXd schur;
  if (nr == 0) {
    schur = at;
    ahat = at;
    res.alpha = 0.0;
  } else {
    res.alpha = at(0, 0);
    const double tol = 1e-12 * std::max(1.0, std::abs(res.alpha));
    if (!(res.alpha > 0.0))
      throw ValidationError("red diagonal block must be positive");
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nr; ++j) {
        const double want = i == j ? res.alpha : 0.0;
        if (std::abs(at(i, j) - want) > tol)
          throw ValidationError(
              "red diagonal block is not a scalar multiple of the identity");
      }
    const auto arb = at.topRightCorner(nr, nb);
    const auto abr = at.bottomLeftCorner(nb, nr);
    schur = at.bottomRightCorner(nb, nb) - abr * arb / res.alpha;
    lhat.bottomLeftCorner(nb, nr) = abr / res.alpha;
    ahat.topLeftCorner(nr, nr) = at.topLeftCorner(nr, nr);
    ahat.bottomRightCorner(nb, nb) = schur;
  }
  res.reconstruction_error =
      (at - lhat * ahat * lhat.transpose()).cwiseAbs().maxCoeff();
  res.schur = to_dense_matrix(schur);
  res.atilde = to_dense_matrix(at);
  res.lhat = to_dense_matrix(lhat);
  res.ahat = to_dense_matrix(ahat);
  return res;
}

DenseMatrix stencil_matrix(const LevelGrid& lv, const Stencil& st) {
  const int N = lv.npts();
  DenseMatrix d;
  d.rows = d.cols = N;
  d.a.assign(static_cast<size_t>(N) * N, 0.0);
  for (int i = 0; i < N; ++i)
    for (const auto& [o, c] : st.a) {
      const int j = lv.neighbor_local(i, o[0], o[1]);
      if (j < 0) throw ValidationError("stencil offset leaves the lattice");
      d.at(i, j) += c;
    }
  return d;
}

EquivalenceReport verify_direct_solver_equivalence(int n, int dim,
                                                   std::uint64_t seed) {
  const SparseMatrix m = assemble_periodic(dim, n);
  const MatrixXd a = dense(m);
  const int N = m.size;
  const double hs = 1.0 / (static_cast<double>(n) * n);

  SplitMix64 rng(seed);
  VectorXd b(N);
  for (int i = 0; i < N; ++i) b[i] = rng.uniform_pm1();
  b.array() -= b.mean();

  // reduction route on the unscaled matrix: A x = hs * b solves (A/hs) x = b
  const auto rr = schur_reduce(m, red_index_set(dim, n));
  const int nr = static_cast<int>(rr.red.size());
  const int nb = N - nr;
  VectorXd br(nr), bb(nb);
  for (int i = 0; i < nr; ++i) br[i] = hs * b[rr.red[i]];
  for (int i = 0; i < nb; ++i) bb[i] = hs * b[rr.black[i]];
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      schur(rr.schur.a.data(), nb, nb);
  MatrixXd abr(nb, nr), arb(nr, nb);
  for (int i = 0; i < nb; ++i)
    for (int j = 0; j < nr; ++j) {
      abr(i, j) = a(rr.black[i], rr.red[j]);
      arb(j, i) = a(rr.red[j], rr.black[i]);
    }
  const VectorXd rhs_b = bb - abr * br / rr.alpha;
  // singular consistent system; the min-norm solution is mean-free
  VectorXd xb =
      MatrixXd(schur).completeOrthogonalDecomposition().solve(rhs_b);
  const VectorXd xr = (br - arb * xb) / rr.alpha;
  VectorXd x_red(N);
  for (int i = 0; i < nr; ++i) x_red[rr.red[i]] = xr[i];
  for (int i = 0; i < nb; ++i) x_red[rr.black[i]] = xb[i];
  x_red.array() -= x_red.mean();

  // one two-level cycle in the direct-solver configuration
  PlanConfig pc;
  pc.dim = dim;
  pc.n = n;
  pc.order = 2;
  pc.coarsening = dim == 1 ? Coarsening::Standard : Coarsening::RedBlack;
  pc.levels = 2;
  pc.nu1 = 0;
  pc.nu2 = 1;
  pc.smoother = {SmootherKind::RedBlackGS, 1.0};
  pc.strategy = {CoarseOpKind::Galerkin, 2};
  pc.sigma_c = 1e-13;
  const CyclePlan plan = make_plan(pc);
  std::vector<double> u(N, 0.0), f(N);
  for (int i = 0; i < N; ++i) f[i] = b[i];
  mg_cycle(plan, u, f);
  VectorXd x_mg = Eigen::Map<const VectorXd>(u.data(), N);
  x_mg.array() -= x_mg.mean();

  EquivalenceReport rep;
  rep.discrepancy = (x_red - x_mg).cwiseAbs().maxCoeff();
  const double bn = b.norm();
  if (bn > 0.0) {
    rep.rel_residual_reduction = (b - a * x_red / hs).norm() / bn;
    rep.rel_residual_mg = (b - a * x_mg / hs).norm() / bn;
  }
  return rep;
}

}  // namespace pmg
