#include "pmg/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "pmg/cycle.hpp"
#include "pmg/lfa.hpp"

namespace pmg {

namespace {

struct Options {
  int dim = 2;
  int order = 2;
  int n = 64;
  std::string coarsening = "rb";  // std | rb | r:<value> | vc
  std::string cycle = "v";        // v | w | wn
  int nu1 = 1, nu2 = 1;
  std::string omega = "1.0";  // value | lo:hi:step | star (sweep-r)
  std::string smoother = "rbgs";
  std::string coarse_op = "g";
  std::string levels = "auto";
  int n_min = 8;
  std::uint64_t seed = 1234;
  int m_samples = 128;
  std::string output;
  std::string rspec;  // sweep-r range
  bool theta_dump = false;
};

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

double parse_num(const std::string& s) {
  size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw ValidationError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw ValidationError("not a number: '" + s + "'");
  return v;
}

std::vector<double> parse_sweep(const std::string& s) {
  const auto c1 = s.find(':');
  if (c1 == std::string::npos) return {parse_num(s)};
  const auto c2 = s.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw ValidationError("sweep must be lo:hi:step");
  const double lo = parse_num(s.substr(0, c1));
  const double hi = parse_num(s.substr(c1 + 1, c2 - c1 - 1));
  const double step = parse_num(s.substr(c2 + 1));
  if (!(step > 0.0)) throw ValidationError("sweep step must be positive");
  std::vector<double> vals;
  for (int i = 0;; ++i) {
    const double v = lo + i * step;
    if (v > hi + 1e-9 * step) break;
    vals.push_back(v);
  }
  return vals;
}

struct CoarseningSpec {
  Coarsening kind = Coarsening::RedBlack;
  bool variable = false;
  double r = 2.0;
};

CoarseningSpec parse_coarsening(const std::string& s) {
  if (s == "std") return {Coarsening::Standard, false, 2.0};
  if (s == "rb") return {Coarsening::RedBlack, false, 2.0};
  if (s == "vc") return {Coarsening::RedBlack, true, 2.0};
  if (s.rfind("r:", 0) == 0)
    return {Coarsening::FactorR, false, parse_num(s.substr(2))};
  throw ValidationError("coarsening must be std, rb, r:<value>, or vc");
}

CycleShape parse_cycle(const std::string& s) {
  if (s == "v") return CycleShape::V;
  if (s == "w") return CycleShape::W;
  if (s == "wn") return CycleShape::Wn;
  throw ValidationError("cycle must be v, w, or wn");
}

SmootherKind parse_smoother(const std::string& s) {
  if (s == "jacobi") return SmootherKind::Jacobi;
  if (s == "rbj") return SmootherKind::RedBlackJacobi;
  if (s == "rbgs") return SmootherKind::RedBlackGS;
  throw ValidationError("smoother must be jacobi, rbj, or rbgs");
}

CoarseOpStrategy parse_coarse_op(const std::string& s) {
  if (s == "ng") return {CoarseOpKind::NonGalerkinSame, 2};
  if (s == "ng2") return {CoarseOpKind::NonGalerkinOrder, 2};
  if (s == "g") return {CoarseOpKind::Galerkin, 2};
  if (s == "g2q") return {CoarseOpKind::GalerkinFromOrder, 2};
  if (s == "g1") return {CoarseOpKind::FirstGenFixed, 2};
  if (s == "gn") return {CoarseOpKind::GnHybrid, 2};
  if (s == "g2fixed") return {CoarseOpKind::FixedG2, 2};
  throw ValidationError(
      "coarse-op must be ng, ng2, g, g2q, g1, gn, or g2fixed");
}

int parse_levels(const std::string& s) {
  if (s == "auto") return 0;
  int v = 0;
  size_t pos = 0;
  try {
    v = std::stoi(s, &pos);
  } catch (const std::exception&) {
    pos = std::string::npos;
  }
  if (pos != s.size())
    throw ValidationError("levels must be auto or an integer >= 2");
  if (v < 2) throw ValidationError("levels must be auto or an integer >= 2");
  return v;
}

PlanConfig base_plan(const Options& o) {
  const CoarseningSpec cs = parse_coarsening(o.coarsening);
  PlanConfig pc;
  pc.dim = o.dim;
  pc.n = o.n;
  pc.order = o.order;
  pc.coarsening = cs.kind;
  pc.variable = cs.variable;
  pc.r_target = cs.r;
  pc.levels = parse_levels(o.levels);
  pc.n_min = o.n_min;
  pc.cycle = parse_cycle(o.cycle);
  pc.nu1 = o.nu1;
  pc.nu2 = o.nu2;
  pc.smoother = {parse_smoother(o.smoother), 1.0};
  pc.strategy = parse_coarse_op(o.coarse_op);
  return pc;
}

LfaConfig lfa_config(const Options& o, double omega) {
  const CoarseningSpec cs = parse_coarsening(o.coarsening);
  LfaConfig cfg;
  cfg.dim = o.dim;
  cfg.order = o.order;
  cfg.smoother = {parse_smoother(o.smoother), omega};
  cfg.coarsening = cs.kind;
  cfg.transfer = default_transfer(cs.kind, o.dim, o.order);
  cfg.strategy = parse_coarse_op(o.coarse_op);
  cfg.nu1 = o.nu1;
  cfg.nu2 = o.nu2;
  cfg.M = o.m_samples;
  return cfg;
}

std::string header_line(const std::string& cmd, const Options& o) {
  std::ostringstream h;
  h << "# cmd=" << cmd << " dim=" << o.dim << " order=" << o.order
    << " n=" << o.n << " coarsening=" << o.coarsening << " cycle=" << o.cycle
    << " nu1=" << o.nu1 << " nu2=" << o.nu2 << " omega=" << o.omega
    << " smoother=" << o.smoother << " coarse-op=" << o.coarse_op
    << " levels=" << o.levels << " n-min=" << o.n_min << " seed=" << o.seed
    << " M=" << o.m_samples;
  if (cmd == "sweep-r") h << " r=" << o.rspec;
  if (cmd == "lfa") h << " theta-dump=" << (o.theta_dump ? 1 : 0);
  h << " output=" << (o.output.empty() ? "-" : o.output) << "\n";
  return h.str();
}

// theory columns for one solve row; empty strings when the analysis does
// not cover the configuration
void theory_columns(const Options& o, double omega, int nu, std::string& rho,
                    std::string& mu_nu) {
  const CoarseningSpec cs = parse_coarsening(o.coarsening);
  if (cs.variable) return;
  if (cs.kind == Coarsening::FactorR) {
    if (parse_smoother(o.smoother) == SmootherKind::Jacobi) {
      const auto fa = factor_r_closed_forms(cs.r, o.dim);
      mu_nu = fmt(std::pow(fa.mu(omega), nu));
    }
    return;
  }
  const LfaConfig cfg = lfa_config(o, omega);
  if (lfa_supports_rho(cfg)) rho = fmt(rho_two_level(cfg).value);
  try {
    if (nu >= 1) mu_nu = fmt(std::pow(smoothing_factor(cfg).value, nu));
  } catch (const ValidationError&) {
  }
}

std::string run_solve(const Options& o) {
  const std::vector<double> omegas = parse_sweep(o.omega);
  std::string csv = header_line("solve", o);
  csv += "omega,r,levels,cr,wu,ecr,rho_lfa,mu_nu,flags\n";
  const PlanConfig base = base_plan(o);
  const CoarseningSpec cs = parse_coarsening(o.coarsening);
  auto point = [&](double om) {
    PlanConfig pc = base;
    pc.smoother.omega = om;
    const CyclePlan plan = make_plan(pc);
    const SolveReport rep = measure_cr(plan, 15, 5, o.seed);
    std::string rho, mu_nu;
    theory_columns(o, om, pc.nu1 + pc.nu2, rho, mu_nu);
    std::ostringstream row;
    row << fmt(om) << ',' << fmt(cs.kind == Coarsening::FactorR ? cs.r : 2.0)
        << ',' << plan.n_levels() << ',' << fmt(rep.cr) << ',' << fmt(rep.wu)
        << ',' << fmt(rep.ecr) << ',' << rho << ',' << mu_nu << ','
        << (rep.direct_regime ? "direct-solver regime" : "") << "\n";
    return row.str();
  };
  std::vector<std::future<std::string>> futs;
  futs.reserve(omegas.size());
  for (double om : omegas)
    futs.push_back(std::async(std::launch::async, point, om));
  for (auto& f : futs) csv += f.get();
  return csv;
}

std::string run_lfa(const Options& o, std::string& err) {
  if (o.m_samples < 8) err += "warning: sampling grid M < 8 is very coarse\n";
  const std::vector<double> omegas = parse_sweep(o.omega);
  std::string csv = header_line("lfa", o);
  const CoarseningSpec cs = parse_coarsening(o.coarsening);
  if (cs.variable || cs.kind == Coarsening::FactorR)
    throw ValidationError(
        "lfa covers std and rb coarsening; use sweep-r for factor-r");
  if (o.theta_dump) {
    if (omegas.size() != 1)
      throw ValidationError("theta dump needs a single omega");
    const LfaConfig cfg = lfa_config(o, omegas[0]);
    if (!lfa_supports_rho(cfg))
      throw ValidationError("two-level analysis unsupported for this config");
    csv += "theta1,theta2,rho\n";
    const int M = o.m_samples;
    const double pi = 3.14159265358979323846;
    auto node = [&](int j) { return (2.0 * pi * j) / M - pi; };
    for (int j1 = 0; j1 < M; ++j1) {
      if (o.dim == 1) {
        const double t1 = node(j1);
        const auto v = rho_at_theta(cfg, t1);
        csv += fmt(t1) + ",0," + (v ? fmt(*v) : "") + "\n";
        continue;
      }
      for (int j2 = 0; j2 < M; ++j2) {
        const double t1 = node(j1), t2 = node(j2);
        const auto v = rho_at_theta(cfg, t1, t2);
        csv += fmt(t1) + "," + fmt(t2) + "," + (v ? fmt(*v) : "") + "\n";
      }
    }
    return csv;
  }
  csv += "omega,rho_lfa,mu,mu_nu,sampled,excluded\n";
  auto point = [&](double om) {
    const LfaConfig cfg = lfa_config(o, om);
    std::string rho, mu, mu_nu;
    long sampled = 0, excluded = 0;
    if (lfa_supports_rho(cfg)) {
      const LfaReport rep = rho_two_level(cfg);
      rho = fmt(rep.value);
      sampled = rep.sampled;
      excluded = rep.excluded;
    }
    const int nu = cfg.nu1 + cfg.nu2;
    if (nu >= 1) {
      const LfaReport srep = smoothing_factor(cfg);
      mu = fmt(srep.value);
      mu_nu = fmt(std::pow(srep.value, nu));
      if (rho.empty()) {
        sampled = srep.sampled;
        excluded = srep.excluded;
      }
    }
    std::ostringstream row;
    row << fmt(om) << ',' << rho << ',' << mu << ',' << mu_nu << ','
        << sampled << ',' << excluded << "\n";
    return row.str();
  };
  std::vector<std::future<std::string>> futs;
  futs.reserve(omegas.size());
  for (double om : omegas)
    futs.push_back(std::async(std::launch::async, point, om));
  for (auto& f : futs) csv += f.get();
  return csv;
}

std::string run_sweep_r(const Options& o) {
  if (o.rspec.empty()) throw ValidationError("sweep-r needs --r");
  const std::vector<double> rs = parse_sweep(o.rspec);
  std::string csv = header_line("sweep-r", o);
  csv +=
      "omega,r,levels,cr,wu,ecr,rho_lfa,mu_nu,flags,"
      "zeta,omega_star,mu_star,esr\n";
  const bool omega_star = o.omega == "star";
  double omega_fixed = 0.0;
  if (!omega_star) {
    const auto oms = parse_sweep(o.omega);
    if (oms.size() != 1)
      throw ValidationError("sweep-r takes a single omega or star");
    omega_fixed = oms[0];
  }
  const CycleShape shape = parse_cycle(o.cycle);
  const PlanConfig base = base_plan(o);
  auto point = [&](double r) {
    const FactorRAnalysis fa = factor_r_closed_forms(r, o.dim);
    const double om = omega_star ? fa.omega_star : omega_fixed;
    PlanConfig pc = base;
    pc.coarsening = Coarsening::FactorR;
    pc.variable = false;
    pc.r_target = r;
    pc.smoother.omega = om;
    const CyclePlan plan = make_plan(pc);
    const SolveReport rep = measure_cr(plan, 15, 5, o.seed);
    const int nu = pc.nu1 + pc.nu2;
    std::string mu_nu;
    if (pc.smoother.kind == SmootherKind::Jacobi)
      mu_nu = fmt(std::pow(fa.mu(om), nu));
    std::string esr_col;
    if (shape != CycleShape::Wn)
      esr_col = fmt(esr(r, o.dim, shape == CycleShape::W ? 2.0 : 1.0, nu,
                        plan.n_levels() - 1));
    std::ostringstream row;
    row << fmt(om) << ',' << fmt(r) << ',' << plan.n_levels() << ','
        << fmt(rep.cr) << ',' << fmt(rep.wu) << ',' << fmt(rep.ecr) << ",,"
        << mu_nu << ',' << (rep.direct_regime ? "direct-solver regime" : "")
        << ',' << fmt(fa.zeta) << ',' << fmt(fa.omega_star) << ','
        << fmt(fa.mu_star) << ',' << esr_col << "\n";
    return row.str();
  };
  std::vector<std::future<std::string>> futs;
  futs.reserve(rs.size());
  for (double r : rs)
    futs.push_back(std::async(std::launch::async, point, r));
  for (auto& f : futs) csv += f.get();
  return csv;
}

// plain key=value lines injected as flags ahead of the explicit ones, so
// the command line wins under the take-last policy
std::vector<std::string> merge_config_file(std::vector<std::string> args) {
  std::string path;
  std::vector<std::string> rest;
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file " + path);
  std::vector<std::string> injected;
  std::string line;
  while (std::getline(in, line)) {
    const auto h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t\r");
      const auto b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    if (val == "true") {
      injected.push_back("--" + key);
    } else {
      injected.push_back("--" + key);
      injected.push_back(val);
    }
  }
  // keep the subcommand token first
  std::vector<std::string> merged;
  size_t at = 0;
  if (!rest.empty() && !rest[0].empty() && rest[0][0] != '-') {
    merged.push_back(rest[0]);
    at = 1;
  }
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), rest.begin() + at, rest.end());
  return merged;
}

}  // namespace

CliResult cli_run(const std::vector<std::string>& args) {
  CliResult res;
  Options o;
  CLI::App app{"periodic Poisson multigrid and two-level analysis runner",
               "mgtool"};
  app.require_subcommand(1);
  auto add_common = [&](CLI::App* s) {
    s->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    s->add_option("--dim", o.dim)->check(CLI::IsMember({1, 2}));
    s->add_option("--order", o.order)->check(CLI::IsMember({2, 4, 6}));
    s->add_option("--n", o.n);
    s->add_option("--coarsening", o.coarsening);
    s->add_option("--cycle", o.cycle);
    s->add_option("--nu1", o.nu1);
    s->add_option("--nu2", o.nu2);
    s->add_option("--omega", o.omega);
    s->add_option("--smoother", o.smoother);
    s->add_option("--coarse-op", o.coarse_op);
    s->add_option("--levels", o.levels);
    s->add_option("--n-min", o.n_min);
    s->add_option("--seed", o.seed)->envname("PMG_SEED");
    s->add_option("--M", o.m_samples);
    s->add_option("--output", o.output);
  };
  CLI::App* solve = app.add_subcommand("solve", "measured convergence sweep");
  CLI::App* lfa = app.add_subcommand("lfa", "two-level Fourier analysis");
  CLI::App* sweepr =
      app.add_subcommand("sweep-r", "factor-r coarsening study");
  add_common(solve);
  add_common(lfa);
  add_common(sweepr);
  lfa->add_flag("--theta-dump", o.theta_dump,
                "per-theta spectral radii on the sampling grid");
  sweepr->add_option("--r", o.rspec, "coarsening ratio value or lo:hi:step");

  try {
    // CLI11's vector overload consumes the arguments back to front
    std::vector<std::string> merged = merge_config_file(args);
    std::reverse(merged.begin(), merged.end());
    app.parse(merged);
  } catch (const CLI::CallForHelp&) {
    res.out = app.help();
    return res;
  } catch (const CLI::ParseError& e) {
    res.err = std::string("error: ") + e.what() + "\n";
    res.exit_code = 2;
    return res;
  } catch (const ValidationError& e) {
    res.err = std::string("error: ") + e.what() + "\n";
    res.exit_code = 2;
    return res;
  }

  try {
    std::string csv;
    if (app.got_subcommand(solve)) csv = run_solve(o);
    if (app.got_subcommand(lfa)) csv = run_lfa(o, res.err);
    if (app.got_subcommand(sweepr)) csv = run_sweep_r(o);
    if (!o.output.empty()) {
      std::ofstream out(o.output);
      if (!out) throw ValidationError("cannot write " + o.output);
      out << csv;
    } else {
      res.out = csv;
    }
  } catch (const SolveError& e) {
    res.err = std::string("error: solver did not converge: ") + e.what() +
              "\n";
    res.exit_code = 3;
  } catch (const ValidationError& e) {
    res.err = std::string("error: ") + e.what() + "\n";
    res.exit_code = 2;
  } catch (const std::exception& e) {
    res.err = std::string("error: ") + e.what() + "\n";
    res.exit_code = 2;
  }
  return res;
}

int cli_main(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  const CliResult res = cli_run(args);
  if (!res.out.empty()) std::fputs(res.out.c_str(), stdout);
  if (!res.err.empty()) std::fputs(res.err.c_str(), stderr);
  return res.exit_code;
}

}  // namespace pmg
