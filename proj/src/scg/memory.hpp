#pragma once

#include <functional>
#include <map>
#include <vector>

#include "scg/noise.hpp"

namespace scg {

// Decay rate of subgrid mode k at element width h.
inline double mode_rate(int k, double h) {
  const double pi = 3.14159265358979323846;
  return k * k * pi * pi / (h * h);
}

// Exponential memory convolution Z_{(k1,k2,...)} driven by one channel,
// stepped by the exact solution of the linear cascade under piecewise
// constant input.  Chain indices are stored as written in the models
// (outermost rate first); at most a double convolution is supported.
class ConvChain {
 public:
  ConvChain(NoiseKey source, std::vector<int> indices, double h);
  // rates given directly (for tests that pin beta rather than h)
  ConvChain(NoiseKey source, std::vector<double> rates_outer_first);

  void update(double input, double dt);
  double value() const { return state_.back(); }
  double stage(int i) const { return state_[i]; }  // innermost first
  const NoiseKey& source() const { return source_; }
  const std::vector<int>& indices() const { return indices_; }
  void reset() { for (auto& s : state_) s = 0.0; }

 private:
  NoiseKey source_;
  std::vector<int> indices_;
  std::vector<double> rates_;  // innermost stage first
  std::vector<double> state_;
  // cached step factors
  double cached_dt_ = -1.0;
  double e0_ = 0.0, e1_ = 0.0, cross_ = 0.0;
  void refresh(double dt);
};

// Chains of one simulation path, advanced in lockstep with the integrator.
class ConvBank {
 public:
  int add(ConvChain chain);
  int find(const NoiseKey& source, const std::vector<int>& indices) const;  // -1 if absent
  int require(const NoiseKey& source, const std::vector<int>& indices) const;
  ConvChain& chain(int i) { return chains_[i]; }
  const ConvChain& chain(int i) const { return chains_[i]; }
  double value(int i) const { return chains_[i].value(); }
  int size() const { return static_cast<int>(chains_.size()); }
  void advance_all(const NoiseView& view, std::int64_t step, double dt);

 private:
  std::vector<ConvChain> chains_;
};

// Pathwise residual of the integration-by-parts reduction identity
//   int Z_{k.k'}phi Z_{l.l'}psi dt
//     = -1/(b_k+b_l) Z_{k.k'}phi Z_{l.l'}psi
//       + 1/(b_k+b_l) int [ Z_{k'}phi Z_{l.l'}psi + Z_{k.k'}phi Z_{l'}psi ] dt
// for prescribed deterministic signals, cold-started chains, quadrature over
// [0, T].  Returns the max residual over the interval.
double verify_ibp_identity(const std::function<double(double)>& phi,
                           const std::function<double(double)>& psi,
                           const std::vector<int>& kvec,
                           const std::vector<int>& lvec, double T, double dt,
                           double h);

}  // namespace scg
