#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "scg/parser.hpp"
#include "scg/simulate.hpp"
#include "scg/stats.hpp"

using namespace scg;

namespace {
const double kPi = std::numbers::pi;
std::string model_path(const char* name) {
  return std::string(SCG_MODELS_DIR) + "/" + name;
}
}  // namespace

TEST_CASE("pure additive noise integrates to sigma W(T) pathwise") {
  const double dt = 1e-3, sigma = 0.7;
  NoiseBank bank(3, dt);
  const NoiseKey key{NoiseFamily::Phi, 0, {}, {0}};
  std::vector<double> y = {0.0};
  double w = 0.0;
  for (int s = 0; s < 2000; ++s) {
    auto rhs = [&](const std::vector<double>&, std::vector<double>& out) {
      out[0] = sigma * bank.value(key, s);
    };
    step_heun_stratonovich(rhs, rhs, y, dt);
    w += bank.increment(key, s);
  }
  CHECK(y[0] == doctest::Approx(sigma * w).epsilon(1e-12));
}

TEST_CASE("linear multiplicative Stratonovich SDE has strong order about one") {
  const double a = 0.8, T = 1.0;
  const NoiseKey key{NoiseFamily::Phi, 0, {}, {0}};
  std::vector<double> log_dt, log_err;
  for (double dt : {8e-4, 4e-4, 2e-4, 1e-4}) {
    double mean_err = 0.0;
    const int n_paths = 160;
    for (int p = 0; p < n_paths; ++p) {
      NoiseBank bank(100 + p, dt);
      std::vector<double> y = {1.0};
      double w = 0.0;
      const auto steps = (long long)std::llround(T / dt);
      for (long long s = 0; s < steps; ++s) {
        auto rhs = [&](const std::vector<double>& v, std::vector<double>& out) {
          out[0] = a * v[0] * bank.value(key, s);
        };
        step_heun_stratonovich(rhs, rhs, y, dt);
        w += bank.increment(key, s);
      }
      mean_err += std::abs(y[0] - std::exp(a * w));
    }
    log_dt.push_back(std::log(dt));
    log_err.push_back(std::log(mean_err / n_paths));
  }
  const double slope = least_squares(log_dt, log_err).value;
  CHECK(slope > 0.75);
  CHECK(slope < 1.35);
}

TEST_CASE("deterministic decay converges at second order") {
  const double beta = 2.0, T = 1.0;
  auto run = [&](double dt) {
    std::vector<double> y = {1.0};
    const auto steps = (long long)std::llround(T / dt);
    auto rhs = [&](const std::vector<double>& v, std::vector<double>& out) {
      out[0] = -beta * v[0];
    };
    for (long long s = 0; s < steps; ++s) step_heun_stratonovich(rhs, rhs, y, dt);
    return std::abs(y[0] - std::exp(-beta * T));
  };
  const double ratio = run(2e-3) / run(1e-3);
  CHECK(ratio == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("fine Burgers relaxes like the heat equation without forcing") {
  const int N = 32;
  const double L = 2 * kPi, dx = L / N;
  NoiseBank bank(1, 1e-3);
  FineNoiseSpec spec;
  spec.kind = FineNoiseSpec::Kind::None;
  std::vector<double> u0(N);
  for (int i = 0; i < N; ++i) u0[i] = std::sin(i * dx);
  Trajectory tr = simulate_fine_burgers(L, N, Pars{0, 0, 0}, spec, bank, u0, 1.0,
                                        1e-3, 100);
  double err = 0.0;
  for (int i = 0; i < N; ++i)
    err = std::max(err, std::abs(tr.back()[i] - std::exp(-1.0) * std::sin(i * dx)));
  CHECK(err < dx * dx);  // O(dx^2) spatial accuracy
}

TEST_CASE("periodic advection conserves the spatial mean") {
  const int N = 32;
  const double L = 2 * kPi, dx = L / N;
  NoiseBank bank(1, 1e-3);
  FineNoiseSpec spec;
  spec.kind = FineNoiseSpec::Kind::None;
  std::vector<double> u0(N);
  for (int i = 0; i < N; ++i) u0[i] = std::sin(i * dx) + 0.4;
  Trajectory tr = simulate_fine_burgers(L, N, Pars{0, 0, 2.0}, spec, bank, u0, 1.0,
                                        1e-3, 100);
  double m0 = 0.0, mT = 0.0;
  for (int i = 0; i < N; ++i) {
    m0 += u0[i];
    mT += tr.back()[i];
  }
  CHECK(mT == doctest::Approx(m0).epsilon(1e-10));
}

TEST_CASE("the microscale reference configuration stays bounded") {
  // alpha=3, sigma=1 on the dx=pi/16, dt=0.01 mesh over t in [0,6]
  const int N = 32;
  const double L = 2 * kPi;
  NoiseBank bank(11, 0.01);
  FineNoiseSpec spec;
  spec.kind = FineNoiseSpec::Kind::PointWhite;
  std::vector<double> u0(N, 0.0);
  Trajectory tr = simulate_fine_burgers(L, N, Pars{1.0, 0.0, 3.0}, spec, bank, u0,
                                        6.0, 0.01, 19);
  for (const auto& state : tr.states)
    for (double v : state) CHECK(std::abs(v) < 50.0);
}

TEST_CASE("stability bounds are enforced") {
  NoiseBank bank(1, 0.02);
  FineNoiseSpec spec;
  spec.kind = FineNoiseSpec::Kind::None;
  CHECK_THROWS_AS(simulate_fine_burgers(2 * kPi, 32, Pars{0, 0, 0}, spec, bank,
                                        std::vector<double>(32, 0.0), 1.0, 0.02, 10),
                  std::invalid_argument);
  CHECK_THROWS_AS(simulate_fine_lattice(8, 0.5, Pars{0, 0, 0}, bank,
                                        std::vector<double>(16, 0.0), 1.0, 0.02, 10),
                  std::invalid_argument);
}

TEST_CASE("lattice advection conserves the site sum and seeds reproduce") {
  const int m = 8;
  const double h = 0.5, dt = 1e-3;
  std::vector<double> u0(2 * m);
  for (int i = 0; i < 2 * m; ++i) u0[i] = std::sin(2 * kPi * i / (2.0 * m)) + 0.1;
  NoiseBank bank(9, dt);
  Trajectory a = simulate_fine_lattice(m, h, Pars{0.3, 0, 1.5}, bank, u0, 0.5, dt, 50);
  NoiseBank bank2(9, dt);
  Trajectory b = simulate_fine_lattice(m, h, Pars{0.3, 0, 1.5}, bank2, u0, 0.5, dt, 50);
  for (size_t s = 0; s < a.states.size(); ++s)
    for (int i = 0; i < 2 * m; ++i) CHECK(a.states[s][i] == b.states[s][i]);
  // deterministic run conserves the sum exactly up to roundoff
  NoiseBank bank3(9, dt);
  Trajectory det = simulate_fine_lattice(m, h, Pars{0, 0, 1.5}, bank3, u0, 0.5, dt, 50);
  double s0 = 0.0, sT = 0.0;
  for (int i = 0; i < 2 * m; ++i) {
    s0 += u0[i];
    sT += det.back()[i];
  }
  CHECK(sT == doctest::Approx(s0).epsilon(1e-10));
}

TEST_CASE("coarse heat flow relaxes to the mean") {
  TermTable eq03 = load_model(model_path("eq03.model"));
  Grid g{8, 0.4, 0.0, 2};
  NoiseBank bank(5, 2e-3);
  std::vector<double> u0(8);
  double mean = 0.0;
  for (int j = 0; j < 8; ++j) {
    u0[j] = std::sin(2 * kPi * j / 8.0) + 0.25;
    mean += u0[j] / 8.0;
  }
  Trajectory tr = simulate_coarse(eq03, g, Pars{0.0, 0.0, 0.0}, bank, u0, 5.0, 2e-3, 100);
  for (double v : tr.back()) CHECK(std::abs(v - mean) < 1e-3);
}

TEST_CASE("strong model decouples elements at gamma=0") {
  TermTable eq21 = load_model(model_path("eq21.model"));
  Grid g{8, 0.5, 0.0, 2};
  const Pars pars{1.0, 0.0, 0.9};
  NoiseBank bank(31, 1e-3);
  CoarseSimulator sim(eq21, g, pars, bank);
  sim.set_state(std::vector<double>(8, 0.5));
  CoarseSimulator sim2(eq21, g, pars, bank);
  std::vector<double> other(8, 0.5);
  other[1] += 0.7;
  other[6] -= 0.4;
  sim2.set_state(other);
  for (int s = 0; s < 50; ++s) {
    sim.advance(s);
    sim2.advance(s);
    // every element evolves from its own value and channels alone
    CHECK(sim.state()[3] == doctest::Approx(sim2.state()[3]).epsilon(1e-13));
    CHECK(sim.state()[0] == doctest::Approx(sim2.state()[0]).epsilon(1e-13));
    CHECK(sim.state()[1] != sim2.state()[1]);  // the perturbed elements differ
  }
}

TEST_CASE("fine and coarse runs consume identical channel increments") {
  const double dt = 1e-3;
  Grid g{4, kPi / 2, kPi / 4, 8};
  NoiseBank bank(77, dt);
  // fine field with three element modes
  {
    RecordingView rec(bank);
    FineNoiseSpec spec;
    spec.kind = FineNoiseSpec::Kind::ElementModes;
    spec.grid = g;
    spec.n_modes = 3;
    simulate_fine_burgers(2 * kPi, 64, Pars{1.0, 1.0, 0.5}, spec, rec,
                          std::vector<double>(64, 1.0), 0.05, dt, 10);
    auto keys = rec.keys();
    std::sort(keys.begin(), keys.end(),
              [](const NoiseKey& a, const NoiseKey& b) { return a.str() < b.str(); });
    export_noise_csv(bank, keys, 50, "fine_noise.csv");
  }
  // coarse three-mode model on the same grid
  {
    TermTable eq07 = load_model(model_path("eq07.model"));
    RecordingView rec(bank);
    simulate_coarse(eq07, g, Pars{1.0, 1.0, 0.5}, rec, std::vector<double>(4, 1.0),
                    0.05, dt, 10);
    auto keys = rec.keys();
    std::sort(keys.begin(), keys.end(),
              [](const NoiseKey& a, const NoiseKey& b) { return a.str() < b.str(); });
    export_noise_csv(bank, keys, 50, "coarse_noise.csv");
  }
  std::ifstream fa("fine_noise.csv"), fb("coarse_noise.csv");
  std::stringstream sa, sb;
  sa << fa.rdbuf();
  sb << fb.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().size() > 100);
}

TEST_CASE("the compiled simulator agrees with the reference evaluator") {
  TermTable eq06 = load_model(model_path("eq06.model"));
  Grid g{8, 0.5, 0.0, 2};
  const Pars pars{0.5, 0.0, 1.0};
  const double dt = 1e-3;
  std::vector<double> u0(8);
  for (int j = 0; j < 8; ++j) u0[j] = std::sin(2 * kPi * j / 8.0) + 0.2;
  // one step by the simulator
  NoiseBank bank(23, dt);
  CoarseSimulator sim(eq06, g, pars, bank);
  sim.set_state(u0);
  sim.advance(0);
  // the same Heun step by hand through eval_term_table
  std::vector<double> k1(8), k2(8), pred(8), manual = u0;
  for (int j = 0; j < 8; ++j)
    k1[j] = eval_term_table(eq06, u0, &bank, nullptr, 0, pars, g, j);
  for (int j = 0; j < 8; ++j) pred[j] = u0[j] + dt * k1[j];
  for (int j = 0; j < 8; ++j)
    k2[j] = eval_term_table(eq06, pred, &bank, nullptr, 0, pars, g, j);
  for (int j = 0; j < 8; ++j) manual[j] += 0.5 * dt * (k1[j] + k2[j]);
  for (int j = 0; j < 8; ++j)
    CHECK(sim.state()[j] == doctest::Approx(manual[j]).epsilon(1e-15));
}

TEST_CASE("the consolidated four-mode weak model simulates reproducibly") {
  TermTable eq24 = load_model(model_path("eq24.model"));
  Grid g{8, kPi / 2, 0.0, 2};
  const Pars pars{1.0, 1.0, 0.5};
  std::vector<double> u0(8, 1.0);
  NoiseBank bank(13, 1e-3);
  Trajectory a = simulate_coarse(eq24, g, pars, bank, u0, 0.5, 1e-3, 50);
  NoiseBank bank2(13, 1e-3);
  Trajectory b = simulate_coarse(eq24, g, pars, bank2, u0, 0.5, 1e-3, 50);
  for (size_t s = 0; s < a.states.size(); ++s)
    for (int j = 0; j < 8; ++j) {
      CHECK(std::isfinite(a.states[s][j]));
      CHECK(a.states[s][j] == b.states[s][j]);
    }
  // the chi channels actually matter: a sigma=0 run differs
  NoiseBank bank3(13, 1e-3);
  Trajectory c = simulate_coarse(eq24, g, Pars{0.0, 1.0, 0.5}, bank3, u0, 0.5, 1e-3, 50);
  CHECK(std::abs(c.back()[0] - a.back()[0]) > 1e-6);
}

TEST_CASE("blow-up raises a named error with time and component") {
  TermTable eq06 = load_model(model_path("eq06.model"));
  Grid g{8, 0.5, 0.0, 2};
  NoiseBank bank(1, 1e-3);
  std::vector<double> u0(8);
  for (int j = 0; j < 8; ++j) u0[j] = 400.0 * std::sin(2 * kPi * j / 8.0);
  try {
    simulate_coarse(eq06, g, Pars{0.0, 0.0, 60.0}, bank, u0, 2.0, 1e-3, 10);
    FAIL("expected blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.time > 0.0);
    CHECK(e.index >= 0);
  }
}

TEST_CASE("subgrid field reconstruction") {
  Grid g{4, kPi / 2, kPi / 4, 2};
  std::vector<double> U = {1.0, 1.2, 0.8, 1.1};
  OddChains chains(g.h);
  SUBCASE("no noise, no coupling gives the amplitude") {
    const Pars pars{0.0, 0.0, 0.5};
    CHECK(reconstruct_ssm_field(U, chains, g, pars, 2, g.grid_point(2)) ==
          doctest::Approx(U[2]));
  }
  // charge the chains
  for (int s = 0; s < 200; ++s) chains.advance(0.8, 1e-2);
  SUBCASE("at the grid point only the convolution terms contribute") {
    const Pars pars{1.0, 1.0, 0.5};
    const double expect =
        U[2] + pars.sigma * pars.alpha * U[2] *
                   (2 * g.h / (kPi * kPi) * chains.z1.value() -
                    4.0 / g.h *
                        (chains.z21.value() / 3.0 - chains.z41.value() / 15.0 +
                         chains.z61.value() / 35.0));
    CHECK(reconstruct_ssm_field(U, chains, g, pars, 2, g.grid_point(2)) ==
          doctest::Approx(expect).epsilon(1e-13));
  }
  SUBCASE("parity flips the noise terms") {
    const Pars pars{1.0, 0.0, 0.5};
    std::vector<double> same(4, 1.0);
    const double even = reconstruct_ssm_field(same, chains, g, pars, 2, g.grid_point(2));
    const double odd = reconstruct_ssm_field(same, chains, g, pars, 3, g.grid_point(3));
    CHECK(even - same[2] == doctest::Approx(-(odd - same[3])).epsilon(1e-12));
  }
  SUBCASE("coupling term uses the centred differences of the amplitudes") {
    const Pars pars{0.0, 1.0, 0.0};
    const double theta = kPi / 3;
    const double x = g.grid_point(1) + theta / kPi * g.h;
    const double expect = U[1] + theta / kPi * (U[2] - U[0]) / 2.0 +
                          theta * theta / (2 * kPi * kPi) * (U[2] - 2 * U[1] + U[0]);
    CHECK(reconstruct_ssm_field(U, chains, g, pars, 1, x) ==
          doctest::Approx(expect).epsilon(1e-13));
  }
}
