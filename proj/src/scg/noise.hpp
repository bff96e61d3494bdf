#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scg/grid.hpp"

namespace scg {

enum class NoiseFamily { Phi, Psi, PsiHat, Chi };

const char* family_token(NoiseFamily f);

// Identifies one white-noise channel for the whole run: family, element
// index (pair of indices for psi/chi), and 1-4 small mode integers.
struct NoiseKey {
  NoiseFamily family = NoiseFamily::Phi;
  int elem_a = 0;
  std::optional<int> elem_b;
  std::vector<int> modes;

  bool operator==(const NoiseKey&) const = default;
  std::uint64_t hash() const;
  std::string str() const;  // e.g. "phi[3](1)", "psi[2,3](0,1,1)"
};

struct MissingChannel : std::runtime_error {
  explicit MissingChannel(const NoiseKey& k)
      : std::runtime_error("no noise channel for " + k.str()) {}
};

// Per-step channel values.  value() is the piecewise-constant white-noise
// realisation dW/dt on [t, t+dt); increment() is dW ~ N(0, dt).  Pure
// functions of (key, step): safe to query from any thread, in any order.
class NoiseView {
 public:
  explicit NoiseView(double dt) : dt_(dt) {}
  virtual ~NoiseView() = default;
  virtual double increment(const NoiseKey& k, std::int64_t step) const = 0;
  double value(const NoiseKey& k, std::int64_t step) const {
    return increment(k, step) / dt_;
  }
  double dt() const { return dt_; }

 private:
  double dt_ = 0.0;
};

// Counter-based keyed generation: the increment is a pure function of
// (master_seed, key, step), so ensembles parallelise without coordination
// and replay is exact.
class NoiseBank : public NoiseView {
 public:
  NoiseBank(std::uint64_t master_seed, double dt)
      : NoiseView(dt), seed_(master_seed) {}
  double increment(const NoiseKey& k, std::int64_t step) const override;
  std::uint64_t master_seed() const { return seed_; }

 private:
  std::uint64_t seed_;
};

// Coarse-grid channels derived from a fine-lattice bank: psi modes 0/1 of
// element j are the multigrid restriction of the fine phi channels
//   psi_{j0} = 1/4 phi_{2j-1} + 1/2 phi_{2j} + 1/4 phi_{2j+1}
//   psi_{j1} = 1/2 (phi_{2j+1} - phi_{2j-1})
// Both fall out of the exact decomposition of the element noise over the
// lattice eigenmodes (1,1,1), (-1,0,1), (-1,1,-1) on the non-overlapping
// points.  phi keys pass through; anything else is a missing channel.
class RestrictedLatticeView : public NoiseView {
 public:
  RestrictedLatticeView(const NoiseView& fine, int fine_points)
      : NoiseView(fine.dt()), fine_(fine), n_(fine_points) {}
  double increment(const NoiseKey& k, std::int64_t step) const override;

 private:
  const NoiseView& fine_;
  int n_;
};

// The odd-noise configuration: one shared channel phi_1; element j's
// phi-mode-1 channel is (-1)^j phi_1(t).
class OddNoiseView : public NoiseView {
 public:
  explicit OddNoiseView(const NoiseView& base) : NoiseView(base.dt()), base_(base) {}
  double increment(const NoiseKey& k, std::int64_t step) const override;
  static NoiseKey shared_key() { return NoiseKey{NoiseFamily::Phi, 0, {}, {1}}; }

 private:
  const NoiseView& base_;
};

// Records which keys a run touched, for CSV export / replay checks.
class RecordingView : public NoiseView {
 public:
  explicit RecordingView(const NoiseView& base) : NoiseView(base.dt()), base_(base) {}
  double increment(const NoiseKey& k, std::int64_t step) const override;
  std::vector<NoiseKey> keys() const;

 private:
  const NoiseView& base_;
  mutable std::vector<NoiseKey> seen_;
};

// Multigrid restriction of fine-lattice increments onto coarse element j,
// weights (1/4, 1/2, 1/4); `fine` holds one value per fine lattice point.
double restrict_fine_noise(std::span<const double> fine, int j);

// csn basis on the non-overlapping sub-element: cos(k theta) for even k,
// sin(k theta) for odd k.
double csn(int k, double theta);

// Projection of samples on a uniform midpoint theta-grid over (-pi/2, pi/2)
// onto csn modes 0..K-1; divides by the basis norm^2 (pi for k=0, pi/2 else).
std::vector<double> project_noise_to_modes(std::span<const double> samples, int K);

// Spatial factor of the odd-noise forcing in element j at subgrid angle
// theta: (-1)^j sin(theta).
double odd_noise_pattern(int j, double theta);

// step,key,increment rows for the given keys and step range.
void export_noise_csv(const NoiseView& view, std::span<const NoiseKey> keys,
                      std::int64_t n_steps, const std::string& path);

}  // namespace scg
