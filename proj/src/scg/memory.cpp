#include "scg/memory.hpp"

#include <cmath>
#include <stdexcept>

namespace scg {

namespace {

// int_0^t exp(-b(t-s)) exp(-a s) ds, with the confluent a==b form.
double cross_term(double a, double b, double t) {
  if (std::abs(a - b) <= 1e-12 * std::max(a, b)) return t * std::exp(-a * t);
  return (std::exp(-a * t) - std::exp(-b * t)) / (b - a);
}

}  // namespace

ConvChain::ConvChain(NoiseKey source, std::vector<int> indices, double h)
    : source_(std::move(source)), indices_(std::move(indices)) {
  if (indices_.empty() || indices_.size() > 2)
    throw std::invalid_argument("convolution chains support 1 or 2 stages");
  for (auto it = indices_.rbegin(); it != indices_.rend(); ++it)
    rates_.push_back(mode_rate(*it, h));
  for (double r : rates_)
    if (!(r > 0)) throw std::invalid_argument("convolution rate must be positive");
  state_.assign(rates_.size(), 0.0);
}

ConvChain::ConvChain(NoiseKey source, std::vector<double> rates_outer_first)
    : source_(std::move(source)) {
  if (rates_outer_first.empty() || rates_outer_first.size() > 2)
    throw std::invalid_argument("convolution chains support 1 or 2 stages");
  for (auto it = rates_outer_first.rbegin(); it != rates_outer_first.rend(); ++it) {
    if (!(*it > 0)) throw std::invalid_argument("convolution rate must be positive");
    rates_.push_back(*it);
  }
  state_.assign(rates_.size(), 0.0);
}

void ConvChain::refresh(double dt) {
  if (dt == cached_dt_) return;
  cached_dt_ = dt;
  e0_ = std::exp(-rates_[0] * dt);
  if (rates_.size() == 2) {
    e1_ = std::exp(-rates_[1] * dt);
    cross_ = cross_term(rates_[0], rates_[1], dt);
  }
}

void ConvChain::update(double input, double dt) {
  refresh(dt);
  const double r0 = rates_[0];
  const double s0_old = state_[0];
  if (rates_.size() == 2) {
    const double r1 = rates_[1];
    // stage 1 sees the exact exponential trajectory of stage 0
    state_[1] = state_[1] * e1_ + s0_old * cross_ +
                (input / r0) * ((1.0 - e1_) / r1 - cross_);
  }
  state_[0] = s0_old * e0_ + input * (1.0 - e0_) / r0;
}

int ConvBank::add(ConvChain chain) {
  chains_.push_back(std::move(chain));
  return static_cast<int>(chains_.size()) - 1;
}

int ConvBank::find(const NoiseKey& source, const std::vector<int>& indices) const {
  for (int i = 0; i < static_cast<int>(chains_.size()); ++i)
    if (chains_[i].source() == source && chains_[i].indices() == indices) return i;
  return -1;
}

int ConvBank::require(const NoiseKey& source, const std::vector<int>& indices) const {
  int i = find(source, indices);
  if (i < 0) {
    std::string idx;
    for (int k : indices) idx += (idx.empty() ? "" : ",") + std::to_string(k);
    throw std::runtime_error("no convolution chain Z" + idx + " on " + source.str());
  }
  return i;
}

void ConvBank::advance_all(const NoiseView& view, std::int64_t step, double dt) {
  for (auto& c : chains_) c.update(view.value(c.source(), step), dt);
}

double verify_ibp_identity(const std::function<double(double)>& phi,
                           const std::function<double(double)>& psi,
                           const std::vector<int>& kvec,
                           const std::vector<int>& lvec, double T, double dt,
                           double h) {
  if (kvec.empty() || lvec.empty())
    throw std::invalid_argument("ibp identity needs nonempty chains");
  const NoiseKey dummy{NoiseFamily::Phi, 0, {}, {0}};
  auto tail = [](const std::vector<int>& v) {
    return std::vector<int>(v.begin() + 1, v.end());
  };
  ConvChain zphi(dummy, kvec, h);
  ConvChain zpsi(dummy, lvec, h);
  std::optional<ConvChain> zphi_red, zpsi_red;
  if (kvec.size() > 1) zphi_red.emplace(dummy, tail(kvec), h);
  if (lvec.size() > 1) zpsi_red.emplace(dummy, tail(lvec), h);

  const double bk = mode_rate(kvec.front(), h);
  const double bl = mode_rate(lvec.front(), h);
  const double inv = 1.0 / (bk + bl);

  const auto n = static_cast<std::int64_t>(std::llround(T / dt));
  double I_lhs = 0.0, I_r1 = 0.0, I_r2 = 0.0;
  double max_resid = 0.0;
  // trapezoid accumulators need values at step boundaries
  double f_lhs = 0.0, f_r1 = 0.0, f_r2 = 0.0;
  auto red_phi = [&](double t) { return zphi_red ? zphi_red->value() : phi(t); };
  auto red_psi = [&](double t) { return zpsi_red ? zpsi_red->value() : psi(t); };
  f_r1 = red_phi(0.0) * zpsi.value();
  f_r2 = zphi.value() * red_psi(0.0);
  for (std::int64_t i = 0; i < n; ++i) {
    const double t = i * dt;
    const double cphi = phi(t);
    const double cpsi = psi(t);
    zphi.update(cphi, dt);
    zpsi.update(cpsi, dt);
    if (zphi_red) zphi_red->update(cphi, dt);
    if (zpsi_red) zpsi_red->update(cpsi, dt);
    const double t1 = t + dt;
    const double g_lhs = zphi.value() * zpsi.value();
    const double g_r1 = red_phi(t1) * zpsi.value();
    const double g_r2 = zphi.value() * red_psi(t1);
    I_lhs += 0.5 * (f_lhs + g_lhs) * dt;
    I_r1 += 0.5 * (f_r1 + g_r1) * dt;
    I_r2 += 0.5 * (f_r2 + g_r2) * dt;
    f_lhs = g_lhs;
    f_r1 = g_r1;
    f_r2 = g_r2;
    const double rhs = -inv * zphi.value() * zpsi.value() + inv * (I_r1 + I_r2);
    max_resid = std::max(max_resid, std::abs(I_lhs - rhs));
  }
  return max_resid;
}

}  // namespace scg
