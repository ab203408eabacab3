#include "pmg/cycle.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "pmg/rng.hpp"

namespace pmg {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void project_mean(std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= v.size();
  for (double& x : v) x -= m;
}

LevelOp sparse_rap(const Transfer& t, const LevelOp& Af,
                   const LevelGrid& coarse) {
  std::vector<std::map<int, double>> rows(t.n_coarse);
  std::map<int, double> ap;  // row i of Af * P
  for (int i = 0; i < t.n_fine; ++i) {
    ap.clear();
    for (int k = Af.rowptr[i]; k < Af.rowptr[i + 1]; ++k) {
      const int j = Af.colidx[k];
      const double a = Af.val[k];
      for (int q = t.rowptr[j]; q < t.rowptr[j + 1]; ++q)
        ap[t.colidx[q]] += a * t.val[q];
    }
    for (int q = t.rowptr[i]; q < t.rowptr[i + 1]; ++q) {
      const double w = t.val[q] / t.rho;
      auto& row = rows[t.colidx[q]];
      for (const auto& [c, v] : ap) row[c] += w * v;
    }
  }
  LevelOp op;
  op.lv = &coarse;
  op.order = 0;
  op.diagv.assign(t.n_coarse, 0.0);
  op.rowptr.push_back(0);
  for (int i = 0; i < t.n_coarse; ++i) {
    for (const auto& [c, v] : rows[i]) {
      op.colidx.push_back(c);
      op.val.push_back(v);
      if (c == i) op.diagv[i] = v;
    }
    op.rowptr.push_back(static_cast<int>(op.colidx.size()));
  }
  return op;
}

std::vector<LevelOp> resolve_operators(const std::vector<LevelGrid>& levels,
                                       const std::vector<Transfer>& transfers,
                                       const std::vector<Transition>& trans,
                                       const CoarseOpStrategy& strat, int dim,
                                       int order) {
  const int L = static_cast<int>(levels.size());
  bool has_factor = false;
  for (const auto& t : trans) has_factor |= t.kind == Coarsening::FactorR;

  std::vector<LevelOp> ops;
  ops.reserve(L);
  ops.push_back(bind_stencil(builtin(dim, order), levels[0], order));

  auto check_q = [&](int q) {
    if (dim == 1 ? q != 2 : (q != 2 && q != 4 && q != 6))
      throw ValidationError("unsupported coarse-operator order");
  };

  switch (strat.kind) {
    case CoarseOpKind::NonGalerkinSame:
      for (int l = 1; l < L; ++l)
        ops.push_back(bind_stencil(builtin(dim, order), levels[l], order));
      break;
    case CoarseOpKind::NonGalerkinOrder:
      check_q(strat.q);
      for (int l = 1; l < L; ++l)
        ops.push_back(bind_stencil(builtin(dim, strat.q), levels[l], strat.q));
      break;
    case CoarseOpKind::Galerkin:
    case CoarseOpKind::GalerkinFromOrder: {
      Stencil cur = builtin(dim, order);
      if (strat.kind == CoarseOpKind::GalerkinFromOrder) {
        check_q(strat.q);
        cur = builtin(dim, strat.q);
      }
      bool stencil_form = true;
      for (int l = 0; l + 1 < L; ++l) {
        if (trans[l].kind == Coarsening::FactorR) {
          LevelOp seed_op;
          const LevelOp* fop = &ops[l];
          if (l == 0 && strat.kind == CoarseOpKind::GalerkinFromOrder) {
            seed_op = bind_stencil(cur, levels[0]);
            fop = &seed_op;
          }
          ops.push_back(sparse_rap(transfers[l], *fop, levels[l + 1]));
          stencil_form = false;
        } else {
          if (!stencil_form)
            throw ValidationError(
                "embedded transition below a factor-r level");
          cur = galerkin_stencil(transfers[l].kind, trans[l].kind, cur);
          LevelOp op = bind_stencil(cur, levels[l + 1], 0);
          op.st = cur;
          ops.push_back(std::move(op));
        }
      }
      break;
    }
    case CoarseOpKind::FirstGenFixed: {
      if (has_factor)
        throw ValidationError(
            "first-generation fixed operator is undefined for factor-r");
      Stencil st1 =
          galerkin_stencil(transfers[0].kind, trans[0].kind, builtin(dim, order));
      for (int l = 1; l < L; ++l) {
        LevelOp op = bind_stencil(st1, levels[l], 0);
        op.st = st1;
        ops.push_back(std::move(op));
      }
      break;
    }
    case CoarseOpKind::GnHybrid: {
      if (trans[0].kind == Coarsening::FactorR) {
        ops.push_back(sparse_rap(transfers[0], ops[0], levels[1]));
      } else {
        Stencil st1 = galerkin_stencil(transfers[0].kind, trans[0].kind,
                                       builtin(dim, order));
        LevelOp op = bind_stencil(st1, levels[1], 0);
        op.st = st1;
        ops.push_back(std::move(op));
      }
      for (int l = 2; l < L; ++l)
        ops.push_back(bind_stencil(builtin(dim, order), levels[l], order));
      break;
    }
    case CoarseOpKind::FixedG2: {
      if (!has_factor)
        throw ValidationError(
            "fixed r=2 Galerkin operator is defined for factor-r only");
      for (int l = 1; l < L; ++l) {
        LevelOp op = bind_stencil(galerkin_ninepoint(), levels[l], 0);
        op.st = galerkin_ninepoint();
        ops.push_back(std::move(op));
      }
      break;
    }
  }
  return ops;
}

}  // namespace

CyclePlan make_plan(const PlanConfig& pc) {
  if (pc.dim != 1 && pc.dim != 2)
    throw ValidationError("dim must be 1 or 2");
  if (pc.dim == 1 ? pc.order != 2
                  : (pc.order != 2 && pc.order != 4 && pc.order != 6))
    throw ValidationError("unsupported discretization order");
  if (pc.nu1 < 0 || pc.nu2 < 0)
    throw ValidationError("smoothing counts must be nonnegative");
  if (pc.nu1 + pc.nu2 > 0 &&
      !(pc.smoother.omega > 0.0 && pc.smoother.omega < 2.0))
    throw ValidationError("omega must lie in (0, 2)");
  if (!(pc.sigma_c > 0.0))
    throw ValidationError("coarsest tolerance must be positive");

  GridSpec spec{pc.dim, pc.n};
  CoarseningPlan cp =
      pc.variable
          ? plan_variable(spec, pc.levels, pc.n_min)
          : plan_uniform(pc.coarsening, spec, pc.levels, pc.n_min, pc.r_target);

  CyclePlan plan;
  plan.dim = pc.dim;
  plan.order = pc.order;
  plan.nu1 = pc.nu1;
  plan.nu2 = pc.nu2;
  plan.smoother = pc.smoother;
  plan.sigma_c = pc.sigma_c;
  plan.coarsest_max_iter = pc.coarsest_max_iter;
  plan.levels = build_hierarchy(spec, cp);

  const int L = plan.n_levels();
  for (int l = 0; l + 1 < L; ++l) {
    TransferKind tk = pc.transfer_auto
                          ? default_transfer(cp.transitions[l].kind, pc.dim,
                                             pc.order)
                          : pc.transfer;
    plan.transfers.push_back(
        make_transfer(tk, plan.levels[l], plan.levels[l + 1]));
  }
  plan.ops = resolve_operators(plan.levels, plan.transfers, cp.transitions,
                               pc.strategy, pc.dim, pc.order);

  for (int l = 0; l + 1 < L; ++l) {
    switch (pc.cycle) {
      case CycleShape::V: plan.gamma.push_back(1); break;
      case CycleShape::W: plan.gamma.push_back(2); break;
      case CycleShape::Wn: plan.gamma.push_back(l < 2 ? 2 : 1); break;
    }
    const Transition& t = cp.transitions[l];
    if (t.kind != Coarsening::FactorR) {
      plan.tcost.push_back(1);
    } else {
      const LevelGrid& f = plan.levels[l];
      const LevelGrid& c = plan.levels[l + 1];
      int nf = f.kind == LatticeKind::Embedded ? f.n_fine : f.ext[0];
      plan.tcost.push_back(nf % c.ext[0] == 0 ? 1 : 2);
    }
  }

  if (plan.smoother.kind != SmootherKind::Jacobi && pc.nu1 + pc.nu2 > 0)
    for (int l = 0; l + 1 < L; ++l)
      if (!plan.levels[l].color_ok)
        throw ValidationError(
            "red-black smoothing needs a well-defined checkerboard on all "
            "smoothed levels");
  return plan;
}

std::vector<double> coarsest_solve(const LevelOp& A,
                                   const std::vector<double>& b0,
                                   double sigma_c, int max_iter) {
  const int n = A.n();
  std::vector<double> b = b0;
  project_mean(b);
  std::vector<double> x(n, 0.0);
  const double bn = std::sqrt(dot(b, b));
  if (bn == 0.0) return x;
  if (max_iter <= 0) max_iter = 10 * n;
  std::vector<double> r = b, p = b, Ap(n);
  double rs = dot(r, r);
  const double tol = sigma_c * bn;
  for (int it = 0; it < max_iter && std::sqrt(rs) > tol; ++it) {
    A.apply(p, Ap);
    const double pAp = dot(p, Ap);
    if (pAp <= 0.0) break;  // deflated system is SPD; guard fp breakdown
    const double alpha = rs / pAp;
    for (int i = 0; i < n; ++i) x[i] += alpha * p[i];
    for (int i = 0; i < n; ++i) r[i] -= alpha * Ap[i];
    project_mean(r);
    const double rs2 = dot(r, r);
    for (int i = 0; i < n; ++i) p[i] = r[i] + (rs2 / rs) * p[i];
    rs = rs2;
  }
  if (std::sqrt(rs) > tol)
    throw SolveError("coarsest-level solve did not reach tolerance",
                     std::sqrt(rs) / bn);
  project_mean(x);
  return x;
}

void mg_cycle(const CyclePlan& plan, std::vector<double>& u,
              const std::vector<double>& f, int level) {
  const LevelOp& A = plan.ops[level];
  if (level == plan.n_levels() - 1) {
    u = coarsest_solve(A, f, plan.sigma_c, plan.coarsest_max_iter);
    return;
  }
  for (int s = 0; s < plan.nu1; ++s) sweep(plan.smoother, A, u, f);
  const int n = A.n();
  std::vector<double> d(n);
  A.apply(u, d);
  for (int i = 0; i < n; ++i) d[i] = f[i] - d[i];
  std::vector<double> fc = restrict_to_coarse(plan.transfers[level], d);
  project_mean(fc);
  std::vector<double> vc(plan.ops[level + 1].n(), 0.0);
  for (int g = 0; g < plan.gamma[level]; ++g) mg_cycle(plan, vc, fc, level + 1);
  std::vector<double> corr = interpolate(plan.transfers[level], vc);
  for (int i = 0; i < n; ++i) u[i] += corr[i];
  for (int s = 0; s < plan.nu2; ++s) sweep(plan.smoother, A, u, f);
}

SolveReport measure_cr(const CyclePlan& plan, int n_warm, int n_avg,
                       std::uint64_t seed) {
  if (n_warm < 5 || n_avg < 3)
    throw ValidationError("measurement needs n_warm >= 5 and n_avg >= 3");
  const LevelOp& A = plan.ops[0];
  const int N = A.n();
  SplitMix64 rng{seed};
  std::vector<double> u(N);
  for (double& x : u) x = rng.uniform_pm1();
  project_mean(u);
  const std::vector<double> f(N, 0.0);
  std::vector<double> r(N);
  const double wnorm = std::pow(plan.levels[0].h, 0.5 * plan.dim);
  auto resnorm = [&]() {
    A.apply(u, r);
    for (int i = 0; i < N; ++i) r[i] = f[i] - r[i];
    project_mean(r);
    return wnorm * std::sqrt(dot(r, r));
  };
  SolveReport rep;
  rep.seed = seed;
  const double d0 = resnorm();
  rep.res_norms.push_back(d0);
  double prev = d0;
  bool flag = false;
  for (int k = 0; k < n_warm + n_avg; ++k) {
    mg_cycle(plan, u, f);
    const double d = resnorm();
    rep.res_norms.push_back(d);
    ++rep.cycles;
    if (d < 1e-14 * d0) {
      flag = true;
      break;
    }
    rep.ratios.push_back(d / prev);
    prev = d;
  }
  if (flag || static_cast<int>(rep.ratios.size()) < n_warm + n_avg) {
    rep.direct_regime = true;
    rep.cr = rep.ratios.empty() ? 0.0 : rep.ratios.back();
  } else {
    double s = 0.0;
    for (int k = 0; k < n_avg; ++k)
      s += std::log(rep.ratios[rep.ratios.size() - n_avg + k]);
    rep.cr = std::exp(s / n_avg);
  }
  rep.wu = work_units(plan);
  rep.ecr = rep.cr > 0.0 ? std::pow(rep.cr, 1.0 / rep.wu) : 0.0;
  return rep;
}

double work_units_formula(double rho, double gamma, int nu, int T,
                          int l_max) {
  const double c = nu + 1 + T;
  if (gamma < rho) return c * rho / (rho - gamma);
  if (gamma == rho) return c * l_max;
  return c * (rho / (gamma - rho)) * std::pow(gamma / rho, l_max);
}

double work_units(const CyclePlan& plan) {
  const int lt = plan.n_levels() - 1;
  const int nu = plan.nu1 + plan.nu2;
  std::vector<double> rho(lt);
  for (int l = 0; l < lt; ++l)
    rho[l] = static_cast<double>(plan.levels[l].npts()) /
             plan.levels[l + 1].npts();
  bool uniform = true;
  for (int l = 1; l < lt; ++l)
    uniform = uniform && plan.gamma[l] == plan.gamma[0] &&
              plan.tcost[l] == plan.tcost[0] && rho[l] == rho[0];
  if (uniform)
    return work_units_formula(rho[0], plan.gamma[0], nu, plan.tcost[0], lt);
  double wu = 0.0, fac = 1.0;
  for (int l = 0; l < lt; ++l) {
    wu += (nu + 1 + plan.tcost[l]) * fac;
    fac *= plan.gamma[l] / rho[l];
  }
  return wu;
}

}  // namespace pmg
