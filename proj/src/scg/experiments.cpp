#include "scg/experiments.hpp"

#include <cmath>
#include <numbers>

#include "scg/stats.hpp"

namespace scg {

std::uint64_t path_seed(std::uint64_t master, int path) {
  return master + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(path) + 1);
}

StrongTrackingResult run_strong_tracking(const TermTable& eq19,
                                         const StrongTrackingSetup& s) {
  const double pi = std::numbers::pi;
  Grid grid{4, pi / 2, pi / 4, 2};
  Pars pars{s.sigma, s.gamma, s.alpha};
  const int monitored = 2;
  const double x2 = grid.grid_point(monitored);  // 5 pi / 4
  const double L = 2 * pi;
  const int i2 = static_cast<int>(std::lround(x2 / (L / s.fine_n)));

  NoiseBank bank(s.seed, s.dt);
  const double t_total = s.burn + s.T;

  // fine microscale field on the shared odd channel
  FineNoiseSpec spec;
  spec.kind = FineNoiseSpec::Kind::OddShared;
  spec.grid = grid;
  Trajectory fine = simulate_fine_burgers(L, s.fine_n, pars, spec, bank,
                                          std::vector<double>(s.fine_n, 1.0),
                                          t_total, s.dt, s.sample_every);

  // coarse odd-noise model plus the reconstruction chains on the raw channel
  OddNoiseView odd(bank);
  CoarseSimulator coarse(eq19, grid, pars, odd);
  coarse.set_state(std::vector<double>(grid.m, 1.0));
  OddChains chains(grid.h);
  StrongTrackingResult out;
  const auto n_steps = static_cast<std::int64_t>(std::llround(t_total / s.dt));
  size_t fine_row = 1;  // fine.states[0] is t=0
  for (std::int64_t step = 0; step < n_steps; ++step) {
    const double phi1 = bank.value(OddNoiseView::shared_key(), step);
    coarse.advance(step);
    chains.advance(phi1, s.dt);
    if ((step + 1) % s.sample_every == 0 || step + 1 == n_steps) {
      const double t = (step + 1) * s.dt;
      if (t >= s.burn) {
        out.times.push_back(t);
        out.u_fine.push_back(fine.states[fine_row][i2]);
        out.U2.push_back(coarse.state()[monitored]);
        out.w2.push_back(reconstruct_ssm_field(coarse.state(), chains, grid, pars,
                                               monitored, x2));
      }
      ++fine_row;
    }
  }

  std::vector<double> du, dw, uw;
  for (size_t i = 0; i < out.times.size(); ++i) {
    du.push_back(out.u_fine[i] - out.U2[i]);
    dw.push_back(out.w2[i] - out.U2[i]);
    uw.push_back(out.u_fine[i] - out.w2[i]);
  }
  out.corr_fluct = pearson(du, dw);
  out.rms_u_w = rms(uw);
  out.rms_u_U = rms(du);
  return out;
}

LatticeCompareResult run_lattice_compare(const TermTable& eq06,
                                         const LatticeCompareSetup& s) {
  const Grid grid{s.m, s.h, 0.0, 2};
  const Pars pars{s.sigma, 0.0, s.alpha};  // eq06 carries no gamma factors
  const double L = grid.length();
  const int fine_n = 2 * s.m;
  const NoiseRef mode1{NoiseFamily::Psi, {1}, {}, {}};
  const TermTable ablated = eq06.without_noise(mode1);

  std::vector<double> err_full(s.n_paths, 0.0), err_abl(s.n_paths, 0.0);
  std::vector<long long> count(s.n_paths, 0);
  parallel_for(s.n_paths, s.threads, [&](int p) {
    NoiseBank bank(path_seed(s.seed, p), s.dt);
    std::vector<double> u0(fine_n);
    for (int i = 0; i < fine_n; ++i)
      u0[i] = std::sin(2 * std::numbers::pi * (i * s.h / 2) / L);
    Trajectory fine = simulate_fine_lattice(s.m, s.h, pars, bank, u0, s.T, s.dt,
                                            s.sample_every);
    std::vector<double> U0(s.m);
    for (int j = 0; j < s.m; ++j) U0[j] = u0[2 * j];
    RestrictedLatticeView restricted(bank, fine_n);
    Trajectory full = simulate_coarse(eq06, grid, pars, restricted, U0, s.T, s.dt,
                                      s.sample_every);
    Trajectory abl = simulate_coarse(ablated, grid, pars, restricted, U0, s.T, s.dt,
                                     s.sample_every);
    for (size_t row = 1; row < fine.times.size(); ++row) {
      for (int j = 0; j < s.m; ++j) {
        const double uf = fine.states[row][2 * j];
        const double ef = full.states[row][j] - uf;
        const double ea = abl.states[row][j] - uf;
        err_full[p] += ef * ef;
        err_abl[p] += ea * ea;
        ++count[p];
      }
    }
  });
  double sum_full = 0.0, sum_abl = 0.0;
  long long n = 0;
  for (int p = 0; p < s.n_paths; ++p) {
    sum_full += err_full[p];
    sum_abl += err_abl[p];
    n += count[p];
  }
  LatticeCompareResult out;
  out.rms_full = std::sqrt(sum_full / n);
  out.rms_ablated = std::sqrt(sum_abl / n);
  out.n_paths = s.n_paths;
  return out;
}

}  // namespace scg
