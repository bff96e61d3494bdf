#pragma once

#include <functional>
#include <string>
#include <vector>

#include "scg/model.hpp"

namespace scg {

struct BlowUpError : std::runtime_error {
  BlowUpError(double t, int index)
      : std::runtime_error("solution blew up at t=" + std::to_string(t) +
                           ", component " + std::to_string(index)),
        time(t),
        index(index) {}
  double time;
  int index;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::string model_id;
  Pars pars;
  std::uint64_t seed = 0;

  const std::vector<double>& back() const { return states.back(); }
};

void write_trajectory_csv(const Trajectory& tr, const std::string& path,
                          const std::string& value_prefix = "U");

// One Heun (trapezoidal predictor-corrector) step; `rhs(state, out)` must be
// evaluated with the same per-step noise increments in both calls, which the
// counter-based banks give for free.  Converges to the Stratonovich solution.
void step_heun_stratonovich(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& rhs_pre,
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& rhs_post,
    std::vector<double>& state, double dt);

constexpr double kBlowUpThreshold = 1e6;
void check_finite(const std::vector<double>& state, double t);

// Spatial shape of the additive forcing for the fine Burgers field.
struct FineNoiseSpec {
  enum class Kind { None, PointWhite, OddShared, ElementModes } kind = Kind::PointWhite;
  // OddShared / ElementModes resolve element geometry through this grid.
  Grid grid;
  int n_modes = 3;  // ElementModes truncation
};

// du/dt = u_xx - alpha u u_x + sigma phi(x,t), centred second-order
// differences on N periodic points over [0, L); dt must respect the
// diffusive bound dt <= dx^2/4.
Trajectory simulate_fine_burgers(double L, int N, const Pars& pars,
                                 const FineNoiseSpec& spec, const NoiseView& noise,
                                 std::vector<double> u0, double T, double dt,
                                 int sample_every);

// du_i/dt = (4/h^2) delta^2 u_i - (alpha/h) u_i (u_{i+1}-u_{i-1}) + sigma phi_i,
// 2m points at spacing h/2; dt <= h^2/32.
Trajectory simulate_fine_lattice(int m, double h, const Pars& pars,
                                 const NoiseView& noise, std::vector<double> u0,
                                 double T, double dt, int sample_every);

// Table-driven coarse simulation.  Builds one convolution chain per element
// and per distinct (right mode, chain) of the table's quadratic terms; the
// chains advance in lockstep with the integrator on the same channel values.
class CoarseSimulator {
 public:
  CoarseSimulator(const TermTable& table, const Grid& grid, const Pars& pars,
                  const NoiseView& noise);

  // advance one step; `step` indexes the noise draw
  void advance(std::int64_t step);
  const std::vector<double>& state() const { return U_; }
  void set_state(std::vector<double> u) { U_ = std::move(u); }
  double time() const { return t_; }
  const ConvBank& conv_bank() const { return convs_; }
  double dt() const { return noise_.dt(); }
  const Grid& grid() const { return grid_; }

  Trajectory run(std::vector<double> u0, double T, int sample_every);

 private:
  double rhs(const std::vector<double>& U, int j, bool post) const;

  const TermTable& table_;
  Grid grid_;
  Pars pars_;
  const NoiseView& noise_;
  ConvBank convs_;
  std::vector<double> U_;
  std::vector<double> conv_pre_;  // chain values at step start
  double t_ = 0.0;
  std::int64_t cur_step_ = -1;
  // compiled terms
  struct CTerm {
    double scalar;
    std::optional<StencilKind> u_st;
    int u_pow;
    bool is_quad = false;
    // noise taps resolved per element: flat [element][tap]
    struct Tap {
      double w;
      NoiseKey key;   // direct noise
      int chain = -1; // quad: chain index in convs_
    };
    std::vector<std::vector<Tap>> taps;  // empty for drift terms
  };
  std::vector<CTerm> cterms_;
};

Trajectory simulate_coarse(const TermTable& table, const Grid& grid,
                           const Pars& pars, const NoiseView& noise,
                           std::vector<double> u0, double T, double dt,
                           int sample_every);

// Chain values of the odd-noise configuration, drivers for the subgrid field
// reconstruction: Z1, Z{2,1}, Z{4,1}, Z{6,1} on the shared channel phi_1.
struct OddChains {
  ConvChain z1, z21, z41, z61;
  explicit OddChains(double h)
      : z1(OddNoiseView::shared_key(), std::vector<int>{1}, h),
        z21(OddNoiseView::shared_key(), std::vector<int>{2, 1}, h),
        z41(OddNoiseView::shared_key(), std::vector<int>{4, 1}, h),
        z61(OddNoiseView::shared_key(), std::vector<int>{6, 1}, h) {}
  void advance(double phi1_value, double dt) {
    z1.update(phi1_value, dt);
    z21.update(phi1_value, dt);
    z41.update(phi1_value, dt);
    z61.update(phi1_value, dt);
  }
};

// Subgrid field of the stochastic slow manifold under odd noise, evaluated
// at position x in element j; parity sign is + for even j.
double reconstruct_ssm_field(std::span<const double> U, const OddChains& chains,
                             const Grid& grid, const Pars& pars, int j, double x);

}  // namespace scg
