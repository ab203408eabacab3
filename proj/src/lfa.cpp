#include "pmg/lfa.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numbers>

namespace pmg {

namespace {

constexpr double pi = std::numbers::pi;

double sq(double x) { return x * x; }

Mat2 mul2(const Mat2& a, const Mat2& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
          a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat4 mul4(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      const cd aik = a[4 * i + k];
      if (aik == cd(0.0)) continue;
      for (int j = 0; j < 4; ++j) c[4 * i + j] += aik * b[4 * k + j];
    }
  return c;
}

template <typename M>
M mat_power(const M& a, int n, const M& eye, M (*mul)(const M&, const M&)) {
  M out = eye;
  for (int i = 0; i < n; ++i) out = mul(out, a);
  return out;
}

constexpr Mat2 EYE2{1.0, 0.0, 0.0, 1.0};
constexpr Mat4 EYE4{1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0,
                    0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0};

// color-update symbol g: Jacobi g = omega L / D; order-4/6 GS g = L / L+
cd g_update(const LfaConfig& cfg, double t1, double t2) {
  const double w = cfg.smoother.omega;
  if (cfg.dim == 1) return w * sym_o2_1d(t1) / 2.0;
  const bool gs = cfg.smoother.kind == SmootherKind::RedBlackGS;
  switch (cfg.order) {
    case 2:
      return w * sym_o2_2d(t1, t2) / 4.0;
    case 4:
      if (gs) {
        const cd lp = (60.0 / w + std::exp(cd(0, -2.0 * t1)) +
                       std::exp(cd(0, -2.0 * t2))) /
                      12.0;
        return sym_o4_2d(t1, t2) / lp;
      }
      return w * sym_o4_2d(t1, t2) / 5.0;
    case 6:
      if (gs) {
        const cd lp = (980.0 / w + 27.0 * (std::exp(cd(0, -2.0 * t1)) +
                                           std::exp(cd(0, -2.0 * t2)))) /
                      180.0;
        return sym_o6_2d(t1, t2) / lp;
      }
      return w * sym_o6_2d(t1, t2) / (980.0 / 180.0);
  }
  throw ValidationError("unsupported order in smoother symbol");
}

Mat2 pair_from_updates(cd ga, cd gb, SmootherKind kind) {
  if (kind == SmootherKind::Jacobi)
    return {1.0 - ga, 0.0, 0.0, 1.0 - gb};
  // S^R = I - P_red diag(ga, gb), S^B = I - P_black diag(ga, gb)
  const Mat2 sr{1.0 - 0.5 * ga, 0.5 * gb, 0.5 * ga, 1.0 - 0.5 * gb};
  const Mat2 sb{1.0 - 0.5 * ga, -0.5 * gb, -0.5 * ga, 1.0 - 0.5 * gb};
  return mul2(sb, sr);
}

double fine_sym(const LfaConfig& cfg, double a, double b, int order) {
  if (cfg.dim == 1) return sym_o2_1d(a);
  switch (order) {
    case 2: return sym_o2_2d(a, b);
    case 4: return sym_o4_2d(a, b);
    case 6: return sym_o6_2d(a, b);
  }
  throw ValidationError("unsupported order in operator symbol");
}

double ng_sym(const LfaConfig& cfg, double t1, double t2, int order) {
  // rediscretized coarse symbol at the coarse frequency and spacing
  if (cfg.dim == 1) return sym_o2_1d(2.0 * t1, 2.0);
  if (cfg.coarsening == Coarsening::RedBlack) {
    const double H = std::sqrt(2.0);
    switch (order) {
      case 2: return sym_o2_2d(t1 + t2, t2 - t1, H);
      case 4: return sym_o4_2d(t1 + t2, t2 - t1, H);
      case 6: return sym_o6_2d(t1 + t2, t2 - t1, H);
    }
  }
  switch (order) {
    case 2: return sym_o2_2d(2.0 * t1, 2.0 * t2, 2.0);
    case 4: return sym_o4_2d(2.0 * t1, 2.0 * t2, 2.0);
    case 6: return sym_o6_2d(2.0 * t1, 2.0 * t2, 2.0);
  }
  throw ValidationError("unsupported order in operator symbol");
}

// coarse-operator order used by the Galerkin / non-Galerkin L_H branches;
// FirstGenFixed and GnHybrid coincide with Galerkin at two levels
enum class LhMode { Galerkin, NonGalerkin };

struct LhChoice {
  LhMode mode;
  int order;  // symbol order entering the coarse operator
};

LhChoice lh_choice(const LfaConfig& cfg) {
  switch (cfg.strategy.kind) {
    case CoarseOpKind::NonGalerkinSame:
      return {LhMode::NonGalerkin, cfg.order};
    case CoarseOpKind::NonGalerkinOrder:
      return {LhMode::NonGalerkin, cfg.strategy.q};
    case CoarseOpKind::Galerkin:
    case CoarseOpKind::FirstGenFixed:
    case CoarseOpKind::GnHybrid:
      return {LhMode::Galerkin, cfg.order};
    case CoarseOpKind::GalerkinFromOrder:
      return {LhMode::Galerkin, cfg.strategy.q};
    case CoarseOpKind::FixedG2:
      throw ValidationError("fixed r=2 operator has no two-level analysis");
  }
  throw ValidationError("unknown coarse-operator strategy");
}

double axis_symbol(const LfaConfig& cfg, double a) {
  if (cfg.transfer == TransferKind::Cubic2D) return cubic_axis_symbol(a);
  return fw_axis_symbol(a);
}

void check_transfer(const LfaConfig& cfg) {
  switch (cfg.coarsening) {
    case Coarsening::Standard:
      if (cfg.dim == 1 ? cfg.transfer != TransferKind::FullWeighting1D
                       : (cfg.transfer != TransferKind::FullWeighting2D &&
                          cfg.transfer != TransferKind::Cubic2D))
        throw ValidationError("transfer kind incompatible with analysis");
      return;
    case Coarsening::RedBlack:
      if (cfg.transfer != TransferKind::RedBlack2D)
        throw ValidationError("transfer kind incompatible with analysis");
      return;
    case Coarsening::FactorR:
      throw ValidationError("factor-r has closed-form analysis only");
  }
}

}  // namespace

double theta_bar(double t) { return t - (t >= 0.0 ? pi : -pi); }

double xi_freq(int dim, double t1, double t2) {
  double s = sq(std::sin(0.5 * t1));
  if (dim == 2) s = 0.5 * (s + sq(std::sin(0.5 * t2)));
  return s;
}

double sym_o2_1d(double t, double h) {
  return 4.0 / (h * h) * sq(std::sin(0.5 * t));
}

double sym_o2_2d(double t1, double t2, double h) {
  return 8.0 / (h * h) * xi_freq(2, t1, t2);
}

double sym_o4_2d(double t1, double t2, double h) {
  return (60.0 - 32.0 * (std::cos(t1) + std::cos(t2)) +
          2.0 * std::cos(2.0 * t1) + 2.0 * std::cos(2.0 * t2)) /
         (12.0 * h * h);
}

double sym_o6_2d(double t1, double t2, double h) {
  return (980.0 - 540.0 * (std::cos(t1) + std::cos(t2)) +
          54.0 * (std::cos(2.0 * t1) + std::cos(2.0 * t2)) -
          4.0 * (std::cos(3.0 * t1) + std::cos(3.0 * t2))) /
         (180.0 * h * h);
}

double fw_axis_symbol(double a) { return 0.5 * (1.0 + std::cos(a)); }

double cubic_axis_symbol(double a) {
  const double s2 = sq(std::sin(0.5 * a));
  return 1.0 - s2 * s2 * (3.0 - 2.0 * s2);
}

cd symbol(const Stencil& s, double t1, double t2, double h) {
  cd acc = 0.0;
  for (const auto& [o, c] : s.a)
    acc += c * std::exp(cd(0.0, t1 * o[0] + t2 * o[1]));
  return acc / std::pow(h, s.scale_power);
}

double spectral_radius(const Mat2& m) {
  Eigen::Matrix2cd a;
  a << m[0], m[1], m[2], m[3];
  Eigen::ComplexEigenSolver<Eigen::Matrix2cd> es(a, false);
  return std::max(std::abs(es.eigenvalues()[0]), std::abs(es.eigenvalues()[1]));
}

double spectral_radius(const Mat4& m) {
  Eigen::Matrix4cd a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = m[4 * i + j];
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(a, false);
  double r = 0.0;
  for (int i = 0; i < 4; ++i) r = std::max(r, std::abs(es.eigenvalues()[i]));
  return r;
}

Mat2 smoother_pair_symbol(const LfaConfig& cfg, double t1, double t2) {
  const cd ga = g_update(cfg, t1, t2);
  const cd gb = cfg.dim == 1 ? g_update(cfg, theta_bar(t1), 0.0)
                             : g_update(cfg, theta_bar(t1), theta_bar(t2));
  return pair_from_updates(ga, gb, cfg.smoother.kind);
}

Mat4 smoother_F_symbol(const LfaConfig& cfg, double t1, double t2) {
  const Mat2 a = smoother_pair_symbol(cfg, t1, t2);
  const Mat2 b = smoother_pair_symbol(cfg, theta_bar(t1), t2);
  Mat4 s{};
  s[0] = a[0];
  s[1] = a[1];
  s[4] = a[2];
  s[5] = a[3];
  s[10] = b[0];
  s[11] = b[1];
  s[14] = b[2];
  s[15] = b[3];
  return s;
}

std::optional<Mat2> k_pair_symbol(const LfaConfig& cfg, double t1, double t2) {
  check_transfer(cfg);
  const LhChoice lh = lh_choice(cfg);
  double r[2], L[2];
  double LH, thresh;
  if (cfg.dim == 1) {
    const double tb = theta_bar(t1);
    r[0] = fw_axis_symbol(t1);
    r[1] = fw_axis_symbol(tb);
    L[0] = sym_o2_1d(t1);
    L[1] = sym_o2_1d(tb);
    LH = lh.mode == LhMode::Galerkin
             ? r[0] * r[0] * L[0] + r[1] * r[1] * L[1]
             : ng_sym(cfg, t1, 0.0, lh.order);
    thresh = 1e-12 / 4.0;
  } else {
    if (cfg.coarsening != Coarsening::RedBlack)
      throw ValidationError("pair analysis needs 1D or red-black coarsening");
    const double tb1 = theta_bar(t1), tb2 = theta_bar(t2);
    r[0] = 1.0 - xi_freq(2, t1, t2);
    r[1] = 1.0 - xi_freq(2, tb1, tb2);
    L[0] = fine_sym(cfg, t1, t2, cfg.order);
    L[1] = fine_sym(cfg, tb1, tb2, cfg.order);
    if (lh.mode == LhMode::Galerkin) {
      const double Lg0 = fine_sym(cfg, t1, t2, lh.order);
      const double Lg1 = fine_sym(cfg, tb1, tb2, lh.order);
      LH = r[0] * r[0] * Lg0 + r[1] * r[1] * Lg1;
    } else {
      LH = ng_sym(cfg, t1, t2, lh.order);
    }
    thresh = 1e-12 / 2.0;
  }
  if (std::abs(LH) < thresh) return std::nullopt;
  Mat2 k = EYE2;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) k[2 * i + j] -= r[i] * (r[j] * L[j]) / LH;
  return k;
}

std::optional<Mat4> k_F_symbol(const LfaConfig& cfg, double t1, double t2) {
  check_transfer(cfg);
  if (cfg.dim != 2 || cfg.coarsening != Coarsening::Standard)
    throw ValidationError("4x4 analysis is for standard 2D coarsening");
  const LhChoice lh = lh_choice(cfg);
  const double tb1 = theta_bar(t1), tb2 = theta_bar(t2);
  const double als[4][2] = {{t1, t2}, {tb1, tb2}, {tb1, t2}, {t1, tb2}};
  double r[4], L[4];
  for (int i = 0; i < 4; ++i) {
    r[i] = axis_symbol(cfg, als[i][0]) * axis_symbol(cfg, als[i][1]);
    L[i] = fine_sym(cfg, als[i][0], als[i][1], cfg.order);
  }
  double LH;
  if (lh.mode == LhMode::Galerkin) {
    LH = 0.0;
    for (int i = 0; i < 4; ++i)
      LH += r[i] * r[i] * fine_sym(cfg, als[i][0], als[i][1], lh.order);
  } else {
    LH = ng_sym(cfg, t1, t2, lh.order);
  }
  if (std::abs(LH) < 1e-12 / 4.0) return std::nullopt;
  Mat4 k = EYE4;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) k[4 * i + j] -= r[i] * (r[j] * L[j]) / LH;
  return k;
}

bool lfa_supports_rho(const LfaConfig& cfg) {
  if (cfg.strategy.kind == CoarseOpKind::FixedG2) return false;
  if (cfg.coarsening == Coarsening::FactorR) return false;
  if (cfg.dim == 1)
    return cfg.coarsening == Coarsening::Standard && cfg.order == 2;
  return cfg.coarsening == Coarsening::Standard ||
         cfg.coarsening == Coarsening::RedBlack;
}

std::optional<double> rho_at_theta(const LfaConfig& cfg, double t1,
                                   double t2) {
  if (t1 == 0.0 && (cfg.dim == 1 || t2 == 0.0)) return std::nullopt;
  if (cfg.dim == 2 && cfg.coarsening == Coarsening::Standard) {
    auto k = k_F_symbol(cfg, t1, t2);
    if (!k) return std::nullopt;
    const Mat4 s = smoother_F_symbol(cfg, t1, t2);
    Mat4 m = mul4(mat_power(s, cfg.nu2, EYE4, mul4),
                  mul4(*k, mat_power(s, cfg.nu1, EYE4, mul4)));
    return spectral_radius(m);
  }
  auto k = k_pair_symbol(cfg, t1, t2);
  if (!k) return std::nullopt;
  const Mat2 s = smoother_pair_symbol(cfg, t1, t2);
  Mat2 m = mul2(mat_power(s, cfg.nu2, EYE2, mul2),
                mul2(*k, mat_power(s, cfg.nu1, EYE2, mul2)));
  return spectral_radius(m);
}

namespace {

bool in_low_set(const LfaConfig& cfg, double t1, double t2) {
  if (cfg.dim == 1) return -pi / 2 <= t1 && t1 < pi / 2;
  if (cfg.coarsening == Coarsening::RedBlack)
    return -pi <= t1 + t2 && t1 + t2 < pi && -pi <= t2 - t1 && t2 - t1 < pi;
  return -pi / 2 <= t1 && t1 < pi / 2 && -pi / 2 <= t2 && t2 < pi / 2;
}

}  // namespace

LfaReport rho_two_level(const LfaConfig& cfg) {
  if (!lfa_supports_rho(cfg))
    throw ValidationError("two-level analysis unsupported for this config");
  if (cfg.M < 2 || cfg.M % 2 != 0)
    throw ValidationError("sampling M must be even and >= 2");
  LfaReport rep;
  const int M = cfg.M;
  auto node = [&](int j) { return (2.0 * pi * j) / M - pi; };
  if (cfg.dim == 1) {
    for (int j = 0; j < M; ++j) {
      const double t = node(j);
      if (!in_low_set(cfg, t, 0.0)) continue;
      auto v = rho_at_theta(cfg, t);
      if (!v) {
        ++rep.excluded;
        continue;
      }
      ++rep.sampled;
      rep.value = std::max(rep.value, *v);
    }
    return rep;
  }
  for (int j1 = 0; j1 < M; ++j1)
    for (int j2 = 0; j2 < M; ++j2) {
      const double t1 = node(j1), t2 = node(j2);
      if (!in_low_set(cfg, t1, t2)) continue;
      auto v = rho_at_theta(cfg, t1, t2);
      if (!v) {
        ++rep.excluded;
        continue;
      }
      ++rep.sampled;
      rep.value = std::max(rep.value, *v);
    }
  return rep;
}

LfaReport smoothing_factor(const LfaConfig& cfg) {
  if (cfg.coarsening == Coarsening::FactorR)
    throw ValidationError("factor-r smoothing uses the closed forms");
  if (cfg.M < 2 || cfg.M % 2 != 0)
    throw ValidationError("sampling M must be even and >= 2");
  const int nu = cfg.nu1 + cfg.nu2;
  if (nu < 1) throw ValidationError("smoothing factor needs nu >= 1");
  LfaReport rep;
  const int M = cfg.M;
  auto node = [&](int j) { return (2.0 * pi * j) / M - pi; };
  const double inv_nu = 1.0 / nu;
  if (cfg.dim == 1) {
    for (int j = 0; j < M; ++j) {
      const double t = node(j);
      if (!in_low_set(cfg, t, 0.0) || t == 0.0) {
        rep.excluded += t == 0.0 ? 1 : 0;
        continue;
      }
      Mat2 s = mat_power(smoother_pair_symbol(cfg, t), nu, EYE2, mul2);
      s[0] = 0.0;
      s[1] = 0.0;  // Q = diag(0, 1)
      ++rep.sampled;
      rep.value = std::max(rep.value, std::pow(spectral_radius(s), inv_nu));
    }
    return rep;
  }
  const bool std2d = cfg.coarsening == Coarsening::Standard;
  for (int j1 = 0; j1 < M; ++j1)
    for (int j2 = 0; j2 < M; ++j2) {
      const double t1 = node(j1), t2 = node(j2);
      if (!in_low_set(cfg, t1, t2)) continue;
      if (t1 == 0.0 && t2 == 0.0) {
        ++rep.excluded;
        continue;
      }
      double r;
      if (std2d) {
        Mat4 s =
            mat_power(smoother_F_symbol(cfg, t1, t2), nu, EYE4, mul4);
        for (int j = 0; j < 4; ++j) s[j] = 0.0;  // Q = diag(0, 1, 1, 1)
        r = spectral_radius(s);
      } else {
        Mat2 s =
            mat_power(smoother_pair_symbol(cfg, t1, t2), nu, EYE2, mul2);
        s[0] = 0.0;
        s[1] = 0.0;
        r = spectral_radius(s);
      }
      ++rep.sampled;
      rep.value = std::max(rep.value, std::pow(r, inv_nu));
    }
  return rep;
}

double FactorRAnalysis::mu(double omega) const {
  return std::max(std::abs(1.0 - 2.0 * omega * zeta),
                  std::abs(1.0 - 2.0 * omega));
}

FactorRAnalysis factor_r_closed_forms(double r, int d) {
  if (!(r >= 1.0)) throw ValidationError("factor-r analysis needs r >= 1");
  if (d < 1 || d > 3) throw ValidationError("dimension must be 1, 2, or 3");
  FactorRAnalysis a;
  a.r = r;
  a.d = d;
  a.zeta = sq(std::sin(pi / (2.0 * r))) / d;
  a.omega_star = 1.0 / (1.0 + a.zeta);
  a.mu_star = (1.0 - a.zeta) / (1.0 + a.zeta);
  return a;
}

double factor_r_mu_numeric(double r, int d, double omega, int M) {
  if (d != 1 && d != 2)
    throw ValidationError("numeric check supports d = 1 or 2");
  auto node = [&](int j) { return (2.0 * pi * j) / M - pi; };
  const double lo = -pi / r, hi = pi / r;
  double best = 0.0;
  auto val1 = [&](double t) {
    return std::abs(1.0 - 2.0 * omega * sq(std::sin(0.5 * t)));
  };
  auto val2 = [&](double t1, double t2) {
    return std::abs(1.0 - 2.0 * omega * xi_freq(2, t1, t2));
  };
  if (d == 2) {
    for (int j1 = 0; j1 < M; ++j1)
      for (int j2 = 0; j2 < M; ++j2) {
        const double t1 = node(j1), t2 = node(j2);
        if (lo <= t1 && t1 < hi && lo <= t2 && t2 < hi) continue;
        best = std::max(best, val2(t1, t2));
      }
    for (int i = 0; i < 257; ++i) {
      const double t2 = lo + (hi - lo) * i / 256.0;
      best = std::max(best, val2(hi, t2));
    }
    best = std::max(best, val2(pi, pi));
    best = std::max(best, val2(hi, hi));
    return best;
  }
  for (int j = 0; j < M; ++j) {
    const double t = node(j);
    if (lo <= t && t < hi) continue;
    best = std::max(best, val1(t));
  }
  best = std::max(best, std::abs(1.0 - 2.0 * omega * sq(std::sin(pi / (2.0 * r)))));
  best = std::max(best, std::abs(1.0 - 2.0 * omega));
  return best;
}

double esr(double r, int d, double gamma, int nu, int l_max) {
  const double rd = std::pow(r, d);
  const double c = nu + 3.0;
  double wu;
  if (gamma < rd)
    wu = c * rd / (rd - gamma);
  else if (gamma == rd)
    wu = c * l_max;
  else
    wu = c * (rd / (gamma - rd)) * std::pow(gamma / rd, l_max);
  const double mu_star = factor_r_closed_forms(r, d).mu_star;
  return std::pow(mu_star, nu / wu);
}

}  // namespace pmg
