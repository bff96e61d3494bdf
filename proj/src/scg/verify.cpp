#include "scg/verify.hpp"

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "scg/consolidate.hpp"
#include "scg/experiments.hpp"
#include "scg/parser.hpp"
#include "scg/simulate.hpp"
#include "scg/stats.hpp"
#include "scg/weakmap.hpp"

namespace scg {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof(buf), f, ap);
  va_end(ap);
  return buf;
}

struct Ctx {
  AcceptanceOptions opt;
  TermTable eq03, eq04, eq06, eq19, eq21, eq23;
  TermTable weak21;  // rewrite of eq21, shared by A1/A2/A5
};

// coefficient of one exact noise structure in the table, if present
std::optional<double> find_noise_coeff(const TermTable& t, int ps, int pg, int pa,
                                       int ph, int upow, const NoiseRef& ref) {
  for (const auto& term : t.terms)
    if (term.p_sig == ps && term.p_gam == pg && term.p_alp == pa && term.p_h == ph &&
        term.u_pow == upow && !term.u_stencil && term.noise && *term.noise == ref)
      return term.coeff.value();
  return std::nullopt;
}

std::optional<double> find_drift_coeff(const TermTable& t, int ps, int pg, int pa,
                                       int ph, int upow) {
  for (const auto& term : t.terms)
    if (term.p_sig == ps && term.p_gam == pg && term.p_alp == pa && term.p_h == ph &&
        term.u_pow == upow && !term.u_stencil && term.deterministic())
      return term.coeff.value();
  return std::nullopt;
}

CriterionResult a1(Ctx& c) {
  CriterionResult r{"A1", true, ""};
  struct Probe {
    std::vector<int> modes;
    double printed;
  };
  const Probe probes[] = {{{0, 1, 1}, -.04561}, {{1, 2, 2}, .004561}, {{2, 1, 1}, .009122}};
  for (const auto& p : probes) {
    NoiseRef ref{NoiseFamily::Psi, p.modes, {}, {}};
    auto mapped = find_noise_coeff(c.weak21, 2, 0, 1, 2, 0, ref);
    auto filed = find_noise_coeff(c.eq23, 2, 0, 1, 2, 0, ref);
    std::string name = ref.str();
    if (!mapped || !filed) {
      r.pass = false;
      r.detail += name + " missing; ";
      continue;
    }
    const double em = std::abs(*mapped - p.printed);
    const double ef = std::abs(*filed - p.printed);
    if (em > 5e-6) {
      r.pass = false;
      r.detail += fmt("%s mapped %.7f vs printed %.7g (err %.2g > 5e-6); ",
                      name.c_str(), *mapped, p.printed, em);
    } else if (ef > 1e-12) {
      r.pass = false;
      r.detail += fmt("eq23.model %s carries %.7g, printed value is %.7g; ",
                      name.c_str(), *filed, p.printed);
    } else {
      r.detail += fmt("%s=%.7f (err %.1e); ", name.c_str(), *mapped, em);
    }
  }
  return r;
}

CriterionResult a2(Ctx& c) {
  CriterionResult r{"A2", false, ""};
  auto drift = find_drift_coeff(c.weak21, 2, 0, 2, 2, 1);
  if (!drift) {
    r.detail = "no sigma^2 alpha^2 h^2 U drift term in the mapped table";
    return r;
  }
  const double exact = (24.0 / 15.0) / std::pow(kPi, 4);
  const double e_exact = std::abs(*drift - exact);
  const double e_printed = std::abs(*drift - .01643);
  r.pass = e_exact <= 1e-12 && e_printed <= 5e-6;
  r.detail = fmt("drift %.8f, (24/15)/pi^4 = %.8f (err %.2g), printed .01643 (err %.2g)",
                 *drift, exact, e_exact, e_printed);
  return r;
}

CriterionResult a3(Ctx& c) {
  const int paths = c.opt.quick ? 400 : 2000;
  McMapEstimate mc = mc_verify_map({1}, true, kPi / 2, 50.0, paths, 1e-3,
                                   c.opt.seed, c.opt.threads);
  CriterionResult r{"A3", std::abs(mc.drift - 0.5) <= 0.02, ""};
  r.detail = fmt("drift %.4f +- %.4f (target 0.500 +- 0.02, %d paths)", mc.drift,
                 mc.drift_se, paths);
  return r;
}

CriterionResult a4(Ctx& c) {
  const int paths = c.opt.quick ? 400 : 2000;
  const double tol1 = c.opt.quick ? 0.15 : 0.05;
  const double tol2 = c.opt.quick ? 0.20 : 0.10;
  McMapEstimate m1 = mc_verify_map({1}, false, kPi / 2, 50.0, paths, 1e-3,
                                   c.opt.seed + 1, c.opt.threads);
  const double t1 = 1.0 / 8.0;
  McMapEstimate m2 = mc_verify_map({1, 2}, false, kPi / 2, 50.0, paths, 1e-3,
                                   c.opt.seed + 2, c.opt.threads);
  const double t2 = (1.0 / 400.0) * (1.0 / 8.0 + 1.0 / 32.0);
  const bool p1 = std::abs(m1.diffusion - t1) <= tol1 * t1;
  const bool p2 = std::abs(m2.diffusion - t2) <= tol2 * t2;
  CriterionResult r{"A4", p1 && p2, ""};
  r.detail = fmt("single k=1: slope %.5f (target %.5f, tol %.0f%%); chain (1,2): "
                 "slope %.6f (target %.6f, tol %.0f%%)",
                 m1.diffusion, t1, tol1 * 100, m2.diffusion, t2, tol2 * 100);
  return r;
}

CriterionResult a5(Ctx& c) {
  ConsolidationResult cons = consolidate_noise_columns(c.weak21);
  const double dev = covariance_check(cons);
  const int cols = static_cast<int>(cons.columns.size());
  CriterionResult r{"A5", cols == 16 && dev <= 1e-10, ""};
  r.detail = fmt("%d psi columns -> rank %d, covariance deviation %.2e", cols,
                 cons.rank, dev);
  if (cons.rank == 7)
    r.detail += " (rank 7 confirms the seven-noise consolidation)";
  else
    r.detail += fmt(" (DISCREPANCY: rank %d, text asserts 7)", cons.rank);
  if (!c.opt.out_dir.empty()) {
    save_model(cons.chi_table, c.opt.out_dir + "/eq21-weak-chi.model");
    write_r_matrix_csv(cons, c.opt.out_dir + "/eq21-weak-rmatrix.csv");
  }
  return r;
}

CriterionResult a6(Ctx& c) {
  StrongTrackingSetup s;
  s.seed = c.opt.seed + 3;
  StrongTrackingResult res = run_strong_tracking(c.eq19, s);
  const bool p1 = res.corr_fluct > 0.5;
  const bool p2 = res.rms_u_w < res.rms_u_U;
  CriterionResult r{"A6", p1 && p2, ""};
  r.detail = fmt("corr(u-U, w-U) = %.3f (> 0.5); rms(u-w) = %.4f %s rms(u-U) = %.4f",
                 res.corr_fluct, res.rms_u_w, p2 ? "<" : ">=", res.rms_u_U);
  return r;
}

CriterionResult a7(Ctx& c) {
  LatticeCompareSetup s;
  s.n_paths = c.opt.quick ? 60 : 200;
  s.seed = c.opt.seed + 4;
  s.threads = c.opt.threads;
  LatticeCompareResult res = run_lattice_compare(c.eq06, s);
  CriterionResult r{"A7", res.rms_full < res.rms_ablated, ""};
  r.detail = fmt("tracking rms %.5f with the multiplicative term, %.5f ablated "
                 "(%d paths)",
                 res.rms_full, res.rms_ablated, res.n_paths);
  return r;
}

CriterionResult a8(Ctx& c) {
  const double L = 6.4;
  const std::vector<double> hs = {0.4, 0.2, 0.1, 0.05};
  std::vector<double> log_h, log_e2, log_e4;
  for (double h : hs) {
    const int m = static_cast<int>(std::lround(L / h));
    Grid g{m, h, 0.0, 2};
    std::vector<double> U(m);
    const double kx = 2 * kPi / L;
    for (int j = 0; j < m; ++j) U[j] = std::sin(kx * g.grid_point(j));
    double e2 = 0.0, e4 = 0.0;
    const Pars p2{0.0, 0.0, 0.0};
    const Pars p4{0.0, 1.0, 0.0};
    for (int j = 0; j < m; ++j) {
      const double exact = -kx * kx * U[j];
      e2 = std::max(e2, std::abs(eval_term_table(c.eq03, U, nullptr, nullptr, 0, p2, g, j) - exact));
      e4 = std::max(e4, std::abs(eval_term_table(c.eq21, U, nullptr, nullptr, 0, p4, g, j) - exact));
    }
    log_h.push_back(std::log(h));
    log_e2.push_back(std::log(e2));
    log_e4.push_back(std::log(e4));
  }
  const double s2 = least_squares(log_h, log_e2).value;
  const double s4 = least_squares(log_h, log_e4).value;
  CriterionResult r{"A8", s2 >= 1.9 && s4 >= 3.9, ""};
  r.detail = fmt("second-difference order %.2f (>= 2); gamma-expanded Laplacian "
                 "order %.2f (>= 4)",
                 s2, s4);
  return r;
}

CriterionResult a9(Ctx& c) {
  (void)c;
  CriterionResult r{"A9", true, ""};
  // fine lattice transient rates
  {
    const int m = 8;
    const double h = 0.5;
    const double L = m * h;
    NoiseBank bank(1, 1e-3);
    for (int q = 1; q <= 2; ++q) {
      const double kappa = 2 * kPi * q / L;
      const double expect = 8.0 / (h * h) * (1.0 - std::cos(kappa * h / 2));
      std::vector<double> u0(2 * m);
      for (int i = 0; i < 2 * m; ++i) u0[i] = std::cos(kappa * (i * h / 2));
      const double T = 0.8 / expect;
      Trajectory tr = simulate_fine_lattice(m, h, Pars{0, 0, 0}, bank, u0, T, 1e-3, 10);
      std::vector<double> amp;
      for (const auto& state : tr.states) {
        double a = 0.0;
        for (int i = 0; i < 2 * m; ++i) a += state[i] * std::cos(kappa * (i * h / 2));
        amp.push_back(a * 2.0 / (2 * m));
      }
      const double rate = -fit_decay_rate(tr.times, amp).value;
      if (std::abs(rate - expect) > 0.05 * expect) r.pass = false;
      r.detail += fmt("lattice q=%d: rate %.3f vs %.3f; ", q, rate, expect);
    }
  }
  // fine Burgers heat modes
  {
    const int N = 32;
    const double L = 2 * kPi;
    const double dx = L / N;
    NoiseBank bank(1, 1e-3);
    FineNoiseSpec spec;
    spec.kind = FineNoiseSpec::Kind::None;
    for (int k = 1; k <= 2; ++k) {
      std::vector<double> u0(N);
      for (int i = 0; i < N; ++i) u0[i] = std::sin(k * (i * dx));
      const double T = 0.6 / (k * k);
      Trajectory tr = simulate_fine_burgers(L, N, Pars{0, 0, 0}, spec, bank, u0, T,
                                            1e-3, 10);
      std::vector<double> amp;
      for (const auto& state : tr.states) {
        double a = 0.0;
        for (int i = 0; i < N; ++i) a += state[i] * std::sin(k * (i * dx));
        amp.push_back(a * 2.0 / N);
      }
      const double rate = -fit_decay_rate(tr.times, amp).value;
      const double bound = std::pow(k, 4) * dx * dx / 4.0;
      if (std::abs(rate - k * k) > bound) r.pass = false;
      r.detail += fmt("burgers k=%d: rate %.4f vs %d (tol %.3f); ", k, rate, k * k, bound);
    }
  }
  return r;
}

CriterionResult a10(Ctx& c) {
  CriterionResult r{"A10", true, ""};
  // eq04 coefficients, exact
  {
    const Coeff c_centre = Coeff::sqrt_of(Rational(5, 7)) +
                           Coeff::sqrt_of(Rational(7, 5)).times_rational(Rational(1, 12));
    const Coeff c_nbr = Coeff::sqrt_of(Rational(7, 5)).times_rational(Rational(-1, 24));
    const Coeff c_hat = Coeff::sqrt_of(Rational(2, 7));
    const Coeff g_centre =
        expanded_noise_coefficient(c.eq04, NoiseFamily::Psi, {0}, 0, std::nullopt);
    const Coeff g_plus =
        expanded_noise_coefficient(c.eq04, NoiseFamily::Psi, {0}, 1, std::nullopt);
    const Coeff g_minus =
        expanded_noise_coefficient(c.eq04, NoiseFamily::Psi, {0}, -1, std::nullopt);
    const Coeff g_hat =
        expanded_noise_coefficient(c.eq04, NoiseFamily::PsiHat, {0}, 0, std::nullopt);
    if (!g_centre.same_value(c_centre) || !g_plus.same_value(c_nbr) ||
        !g_minus.same_value(c_nbr) || !g_hat.same_value(c_hat)) {
      r.pass = false;
      r.detail += "eq04 noise coefficients differ from sqrt(5/7)+(1/12)sqrt(7/5), "
                  "-(1/24)sqrt(7/5), sqrt(2/7); ";
    } else {
      r.detail += fmt("eq04 coefficients exact (%.6f, %.6f, %.6f); ", g_centre.value(),
                      g_plus.value(), g_hat.value());
    }
  }
  // restriction weights
  {
    std::vector<double> fine(8, 0.0);
    fine[4] = 1.0;  // fine point 2j for j=2
    const double w_centre = restrict_fine_noise(fine, 2);
    fine[4] = 0.0;
    fine[5] = 1.0;  // fine point 2j+1: shared by j=2 and j=3
    const double w_right_j2 = restrict_fine_noise(fine, 2);
    const double w_right_j3 = restrict_fine_noise(fine, 3);
    if (w_centre != 0.5 || w_right_j2 != 0.25 || w_right_j3 != 0.25) {
      r.pass = false;
      r.detail += "restriction weights differ from (1/4, 1/2, 1/4); ";
    } else {
      r.detail += "restriction weights (1/4, 1/2, 1/4); ";
    }
  }
  // eq21 at alpha=0 path-matches its linear reduction
  {
    const Grid g{8, 0.5, 0.0, 2};
    const Pars pars{1.0, 1.0, 0.0};
    NoiseBank bank(c.opt.seed + 5, 1e-3);
    std::vector<double> u0(g.m);
    for (int j = 0; j < g.m; ++j) u0[j] = std::sin(2 * kPi * j / g.m) + 0.3;
    Trajectory full = simulate_coarse(c.eq21, g, pars, bank, u0, 0.2, 1e-3, 10);
    Trajectory lin = simulate_coarse(c.eq21.filter_alpha_zero(), g, pars, bank, u0,
                                     0.2, 1e-3, 10);
    double dmax = 0.0;
    for (size_t s = 0; s < full.states.size(); ++s)
      for (int j = 0; j < g.m; ++j)
        dmax = std::max(dmax, std::abs(full.states[s][j] - lin.states[s][j]));
    if (dmax > 1e-15) {
      r.pass = false;
      r.detail += fmt("alpha=0 path mismatch %.2e; ", dmax);
    } else {
      r.detail += "alpha=0 path-identical to the linear model";
    }
  }
  return r;
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt) {
  Ctx c;
  c.opt = opt;
  const std::string d = opt.models_dir + "/";
  c.eq03 = load_model(d + "eq03.model");
  c.eq04 = load_model(d + "eq04.model");
  c.eq06 = load_model(d + "eq06.model");
  c.eq19 = load_model(d + "eq19.model");
  c.eq21 = load_model(d + "eq21.model");
  c.eq23 = load_model(d + "eq23.model");
  c.weak21 = rewrite_strong_to_weak(c.eq21).table;
  if (!opt.out_dir.empty()) std::filesystem::create_directories(opt.out_dir);

  std::vector<CriterionResult> results;
  struct Entry {
    const char* id;
    CriterionResult (*fn)(Ctx&);
  };
  const Entry criteria[] = {{"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4},
                            {"A5", a5}, {"A6", a6}, {"A7", a7}, {"A8", a8},
                            {"A9", a9}, {"A10", a10}};
  for (const auto& entry : criteria) {
    CriterionResult r;
    try {
      r = entry.fn(c);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail = std::string("exception: ") + e.what();
    }
    r.id = entry.id;
    std::printf("%-4s %s  %s\n", r.id.c_str(), r.pass ? "PASS" : "FAIL",
                r.detail.c_str());
    std::fflush(stdout);
    results.push_back(r);
  }
  if (!opt.out_dir.empty()) {
    std::ofstream f(opt.out_dir + "/acceptance.csv");
    f << "criterion,pass,detail\n";
    for (const auto& r : results)
      f << r.id << "," << (r.pass ? 1 : 0) << ",\"" << r.detail << "\"\n";
  }
  return results;
}

bool all_passed(const std::vector<CriterionResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

}  // namespace scg
