#include "scg/simulate.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

namespace scg {

void write_trajectory_csv(const Trajectory& tr, const std::string& path,
                          const std::string& value_prefix) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "time";
  if (!tr.states.empty())
    for (size_t i = 0; i < tr.states.front().size(); ++i)
      f << "," << value_prefix << "_" << i;
  f << "\n";
  f.precision(12);
  for (size_t s = 0; s < tr.times.size(); ++s) {
    f << tr.times[s];
    for (double v : tr.states[s]) f << "," << v;
    f << "\n";
  }
}

void check_finite(const std::vector<double>& state, double t) {
  for (size_t i = 0; i < state.size(); ++i)
    if (!std::isfinite(state[i]) || std::abs(state[i]) > kBlowUpThreshold)
      throw BlowUpError(t, static_cast<int>(i));
}

void step_heun_stratonovich(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& rhs_pre,
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& rhs_post,
    std::vector<double>& state, double dt) {
  const size_t n = state.size();
  std::vector<double> k1(n), k2(n), pred(n);
  rhs_pre(state, k1);
  for (size_t i = 0; i < n; ++i) pred[i] = state[i] + dt * k1[i];
  rhs_post(pred, k2);
  for (size_t i = 0; i < n; ++i) state[i] += 0.5 * dt * (k1[i] + k2[i]);
}

namespace {

// forcing field for the fine Burgers mesh at one step, one value per point
std::vector<double> fine_forcing(const FineNoiseSpec& spec, const NoiseView& noise,
                                 double L, int N, std::int64_t step) {
  std::vector<double> f(N, 0.0);
  const double dx = L / N;
  switch (spec.kind) {
    case FineNoiseSpec::Kind::None:
      break;
    case FineNoiseSpec::Kind::PointWhite:
      for (int i = 0; i < N; ++i)
        f[i] = noise.value(NoiseKey{NoiseFamily::Phi, i, {}, {0}}, step);
      break;
    case FineNoiseSpec::Kind::OddShared: {
      const double p1 = noise.value(OddNoiseView::shared_key(), step);
      const Grid& g = spec.grid;
      for (int i = 0; i < N; ++i) {
        const double x = i * dx;
        // element whose non-overlapping half-width h/2 contains x
        int j = g.wrap(static_cast<int>(std::lround((x - g.x0) / g.h)));
        f[i] = p1 * odd_noise_pattern(j, subgrid_coord(x, j, g));
      }
      break;
    }
    case FineNoiseSpec::Kind::ElementModes: {
      const Grid& g = spec.grid;
      for (int i = 0; i < N; ++i) {
        const double x = i * dx;
        int j = g.wrap(static_cast<int>(std::lround((x - g.x0) / g.h)));
        const double theta = subgrid_coord(x, j, g);
        double v = 0.0;
        for (int k = 0; k < spec.n_modes; ++k)
          v += noise.value(NoiseKey{NoiseFamily::Phi, j, {}, {k}}, step) * csn(k, theta);
        f[i] = v;
      }
      break;
    }
  }
  return f;
}

}  // namespace

Trajectory simulate_fine_burgers(double L, int N, const Pars& pars,
                                 const FineNoiseSpec& spec, const NoiseView& noise,
                                 std::vector<double> u0, double T, double dt,
                                 int sample_every) {
  const double dx = L / N;
  // dx^2/4 with 5% slack: the reference mesh dx = pi/16, dt = 0.01 sits 3.7%
  // over the quarter bound yet well below the Heun limit dx^2/2
  if (dt > dx * dx / 4.0 * 1.05)
    throw std::invalid_argument("simulate_fine_burgers: dt exceeds dx^2/4 stability bound");
  Trajectory tr;
  tr.model_id = "burgers";
  tr.pars = pars;
  std::vector<double> u = std::move(u0);
  const auto n_steps = static_cast<std::int64_t>(std::llround(T / dt));
  auto rhs = [&](const std::vector<double>& v, const std::vector<double>& force,
                 std::vector<double>& out) {
    for (int i = 0; i < N; ++i) {
      const double up = v[(i + 1) % N];
      const double um = v[(i + N - 1) % N];
      out[i] = (up - 2.0 * v[i] + um) / (dx * dx) -
               pars.alpha * v[i] * (up - um) / (2.0 * dx) + pars.sigma * force[i];
    }
  };
  tr.times.push_back(0.0);
  tr.states.push_back(u);
  std::vector<double> k1(N), k2(N), pred(N), force;
  for (std::int64_t s = 0; s < n_steps; ++s) {
    force = fine_forcing(spec, noise, L, N, s);
    rhs(u, force, k1);
    for (int i = 0; i < N; ++i) pred[i] = u[i] + dt * k1[i];
    rhs(pred, force, k2);
    for (int i = 0; i < N; ++i) u[i] += 0.5 * dt * (k1[i] + k2[i]);
    check_finite(u, (s + 1) * dt);
    if ((s + 1) % sample_every == 0 || s + 1 == n_steps) {
      tr.times.push_back((s + 1) * dt);
      tr.states.push_back(u);
    }
  }
  return tr;
}

Trajectory simulate_fine_lattice(int m, double h, const Pars& pars,
                                 const NoiseView& noise, std::vector<double> u0,
                                 double T, double dt, int sample_every) {
  const int N = 2 * m;
  if (dt > h * h / 32.0 + 1e-15)
    throw std::invalid_argument("simulate_fine_lattice: dt exceeds h^2/32 stability bound");
  Trajectory tr;
  tr.model_id = "lattice";
  tr.pars = pars;
  std::vector<double> u = std::move(u0);
  const auto n_steps = static_cast<std::int64_t>(std::llround(T / dt));
  std::vector<double> force(N), k1(N), k2(N), pred(N);
  auto rhs = [&](const std::vector<double>& v, std::vector<double>& out) {
    for (int i = 0; i < N; ++i) {
      const double up = v[(i + 1) % N];
      const double um = v[(i + N - 1) % N];
      out[i] = 4.0 / (h * h) * (up - 2.0 * v[i] + um) -
               pars.alpha / h * v[i] * (up - um) + pars.sigma * force[i];
    }
  };
  tr.times.push_back(0.0);
  tr.states.push_back(u);
  for (std::int64_t s = 0; s < n_steps; ++s) {
    for (int i = 0; i < N; ++i)
      force[i] = noise.value(NoiseKey{NoiseFamily::Phi, i, {}, {0}}, s);
    rhs(u, k1);
    for (int i = 0; i < N; ++i) pred[i] = u[i] + dt * k1[i];
    rhs(pred, k2);
    for (int i = 0; i < N; ++i) u[i] += 0.5 * dt * (k1[i] + k2[i]);
    check_finite(u, (s + 1) * dt);
    if ((s + 1) % sample_every == 0 || s + 1 == n_steps) {
      tr.times.push_back((s + 1) * dt);
      tr.states.push_back(u);
    }
  }
  return tr;
}

CoarseSimulator::CoarseSimulator(const TermTable& table, const Grid& grid,
                                 const Pars& pars, const NoiseView& noise)
    : table_(table), grid_(grid), pars_(pars), noise_(noise) {
  // periodic wrap must not fold a stencil onto itself
  int radius = 0;
  auto widen = [&](const std::vector<std::pair<int, Rational>>& taps) {
    for (const auto& [o, w] : taps) radius = std::max(radius, std::abs(o));
  };
  for (const auto& term : table.terms) {
    if (term.u_stencil) widen(stencil_taps(*term.u_stencil));
    if (term.noise) {
      widen(term.noise->sub1.taps());
      widen(term.noise->sub2.taps());
    }
    if (term.quad) {
      widen(term.quad->left_sub.taps());
      widen(term.quad->right_sub.taps());
    }
  }
  if (grid.m < 2 * radius)
    throw std::invalid_argument("grid of " + std::to_string(grid.m) +
                                " elements is too small for stencils of radius " +
                                std::to_string(radius));
  // one chain per element per distinct (right mode, chain indices)
  for (const auto& term : table.terms) {
    if (!term.quad) continue;
    for (int j = 0; j < grid.m; ++j) {
      NoiseKey src{NoiseFamily::Phi, j, {}, {term.quad->right_mode}};
      if (convs_.find(src, term.quad->chain) < 0)
        convs_.add(ConvChain(src, term.quad->chain, grid.h));
    }
  }
  for (const auto& term : table.terms) {
    CTerm ct;
    ct.scalar = term.coeff.value() * std::pow(pars.sigma, term.p_sig) *
                std::pow(pars.gamma, term.p_gam) * std::pow(pars.alpha, term.p_alp) *
                std::pow(grid.h, term.p_h);
    ct.u_st = term.u_stencil;
    ct.u_pow = term.u_pow;
    if (term.noise) {
      const NoiseRef& nr = *term.noise;
      const bool paired = nr.family == NoiseFamily::Chi ||
                          (nr.family == NoiseFamily::Psi && nr.modes.size() >= 2);
      ct.taps.resize(grid.m);
      for (int j = 0; j < grid.m; ++j) {
        for (const auto& [o1, w1] : nr.sub1.taps()) {
          if (paired) {
            for (const auto& [o2, w2] : nr.sub2.taps())
              ct.taps[j].push_back({w1.value() * w2.value(),
                                    NoiseKey{nr.family, grid.wrap(j + o1),
                                             grid.wrap(j + o2), nr.modes},
                                    -1});
          } else {
            ct.taps[j].push_back(
                {w1.value(), NoiseKey{nr.family, grid.wrap(j + o1), {}, nr.modes}, -1});
          }
        }
      }
    } else if (term.quad) {
      const QuadNoiseRef& q = *term.quad;
      ct.is_quad = true;
      ct.taps.resize(grid.m);
      for (int j = 0; j < grid.m; ++j) {
        for (const auto& [o1, w1] : q.left_sub.taps()) {
          for (const auto& [o2, w2] : q.right_sub.taps()) {
            NoiseKey left{NoiseFamily::Phi, grid.wrap(j + o1), {}, {q.left_mode}};
            NoiseKey right{NoiseFamily::Phi, grid.wrap(j + o2), {}, {q.right_mode}};
            ct.taps[j].push_back(
                {w1.value() * w2.value(), left, convs_.require(right, q.chain)});
          }
        }
      }
    }
    cterms_.push_back(std::move(ct));
  }
  conv_pre_.assign(convs_.size(), 0.0);
}

double CoarseSimulator::rhs(const std::vector<double>& U, int j, bool post) const {
  double total = 0.0;
  for (const auto& ct : cterms_) {
    if (ct.scalar == 0.0) continue;
    double u = 1.0;
    if (ct.u_st) u *= apply_stencil(*ct.u_st, U, j);
    for (int p = 0; p < ct.u_pow; ++p) u *= U[j];
    double nf = 1.0;
    if (!ct.taps.empty()) {
      nf = 0.0;
      for (const auto& tap : ct.taps[j]) {
        if (tap.chain >= 0) {
          const double z = post ? convs_.value(tap.chain) : conv_pre_[tap.chain];
          nf += tap.w * noise_.value(tap.key, cur_step_) * z;
        } else {
          nf += tap.w * noise_.value(tap.key, cur_step_);
        }
      }
    }
    total += ct.scalar * u * nf;
  }
  return total;
}

void CoarseSimulator::advance(std::int64_t step) {
  cur_step_ = step;
  const double dt = noise_.dt();
  const int m = grid_.m;
  for (int i = 0; i < convs_.size(); ++i) conv_pre_[i] = convs_.value(i);
  convs_.advance_all(noise_, step, dt);
  std::vector<double> k1(m), k2(m), pred(m);
  for (int j = 0; j < m; ++j) k1[j] = rhs(U_, j, false);
  for (int j = 0; j < m; ++j) pred[j] = U_[j] + dt * k1[j];
  for (int j = 0; j < m; ++j) k2[j] = rhs(pred, j, true);
  for (int j = 0; j < m; ++j) U_[j] += 0.5 * dt * (k1[j] + k2[j]);
  t_ += dt;
  check_finite(U_, t_);
}

Trajectory CoarseSimulator::run(std::vector<double> u0, double T, int sample_every) {
  Trajectory tr;
  tr.model_id = table_.meta.name;
  tr.pars = pars_;
  U_ = std::move(u0);
  const double dt = noise_.dt();
  const auto n_steps = static_cast<std::int64_t>(std::llround(T / dt));
  tr.times.push_back(0.0);
  tr.states.push_back(U_);
  for (std::int64_t s = 0; s < n_steps; ++s) {
    advance(s);
    if ((s + 1) % sample_every == 0 || s + 1 == n_steps) {
      tr.times.push_back(t_);
      tr.states.push_back(U_);
    }
  }
  return tr;
}

Trajectory simulate_coarse(const TermTable& table, const Grid& grid,
                           const Pars& pars, const NoiseView& noise,
                           std::vector<double> u0, double T, double dt,
                           int sample_every) {
  if (std::abs(noise.dt() - dt) > 1e-15)
    throw std::invalid_argument("noise view dt must match integrator dt");
  CoarseSimulator sim(table, grid, pars, noise);
  return sim.run(std::move(u0), T, sample_every);
}

double reconstruct_ssm_field(std::span<const double> U, const OddChains& chains,
                             const Grid& grid, const Pars& pars, int j, double x) {
  const double theta = subgrid_coord(x, j, grid);
  const double pi = std::numbers::pi;
  const double sign = (j % 2 == 0) ? 1.0 : -1.0;
  const double h = grid.h;
  double w = U[j];
  w += pars.gamma * (theta / pi * apply_stencil(StencilKind::MuDelta, U, j) +
                     theta * theta / (2.0 * pi * pi) *
                         apply_stencil(StencilKind::Delta2, U, j));
  w += sign * pars.sigma * std::sin(theta) * chains.z1.value();
  w += sign * pars.sigma * pars.alpha * U[j] *
       (2.0 * h / (pi * pi) * chains.z1.value() -
        4.0 / h *
            (std::cos(2.0 * theta) / 3.0 * chains.z21.value() -
             std::cos(4.0 * theta) / 15.0 * chains.z41.value() +
             std::cos(6.0 * theta) / 35.0 * chains.z61.value()));
  return w;
}

}  // namespace scg
