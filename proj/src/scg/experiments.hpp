#pragma once

#include <cstdint>
#include <string>

#include "scg/simulate.hpp"

namespace scg {

// Strong-tracking experiment: four elements of width pi/2 with grid points
// at (j+1/2)h, the fine Burgers field forced on the shared odd-noise channel,
// the coarse odd-noise model on the same channel, and the subgrid field
// reconstruction at the monitored grid point X_2 = 5 pi/4.
struct StrongTrackingResult {
  std::vector<double> times;
  std::vector<double> u_fine;  // fine field at X_2
  std::vector<double> U2;      // coarse amplitude of element 2
  std::vector<double> w2;      // reconstructed subgrid field at X_2
  double corr_fluct = 0.0;     // corr(u - U, w - U)
  double rms_u_w = 0.0;
  double rms_u_U = 0.0;
};

struct StrongTrackingSetup {
  double alpha = 0.5;
  double sigma = 1.0;
  double gamma = 1.0;
  double T = 10.0;     // after burn-in
  double burn = 1.0;
  double dt = 1e-3;
  int fine_n = 64;
  int sample_every = 10;
  std::uint64_t seed = 1;
};

StrongTrackingResult run_strong_tracking(const TermTable& eq19,
                                         const StrongTrackingSetup& s);

// Lattice coarse-graining: the fine stochastic lattice against the coarse
// model driven by the restricted shared noise, with and without the
// multiplicative mode-1 noise term; per-path tracking error pooled over
// elements and sample times.
struct LatticeCompareResult {
  double rms_full = 0.0;
  double rms_ablated = 0.0;
  int n_paths = 0;
};

struct LatticeCompareSetup {
  int m = 16;
  double h = 0.5;
  double alpha = 1.0;
  double sigma = 0.5;
  double T = 1.0;
  double dt = 2e-3;
  int n_paths = 200;
  int sample_every = 25;
  std::uint64_t seed = 7;
  int threads = 1;
};

LatticeCompareResult run_lattice_compare(const TermTable& eq06,
                                         const LatticeCompareSetup& s);

std::uint64_t path_seed(std::uint64_t master, int path);

}  // namespace scg
