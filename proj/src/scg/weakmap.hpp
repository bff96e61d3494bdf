#pragma once

#include <string>
#include <vector>

#include "scg/model.hpp"

namespace scg {

// Long-time replacement of one quadratic noise phi_n Z_chain phi_m for
// coincident channels (`same`): drift 1/2 for a same-noise single
// convolution, plus the new-noise magnitudes.  Double convolutions are
// commuted to ascending rates (lo, hi) and emit psi_{nm hi} and
// psi_{nm lo hi}.
struct QuadMapped {
  double drift = 0.0;
  std::vector<std::pair<std::string, double>> noises;  // (psi name, coefficient)
};
QuadMapped map_quadratic_term(int n, int m, const std::vector<int>& chain,
                              bool same, double h);

struct WeakMapResult {
  TermTable table;
  struct Entry {
    std::string source;
    std::string output;
    double coefficient;
  };
  std::vector<Entry> provenance;
};

// Transform a strong table (with memory convolutions) into the weak table:
// deterministic and single-noise terms pass through; each quadratic term
// expands its subscript stencils over element offsets for the coincidence
// drift and emits psi terms with the stencils re-attached.  Contributions
// with identical structure merge.
WeakMapResult rewrite_strong_to_weak(const TermTable& strong);

// Monte Carlo check of the mapping: simulates dy/dt = phi Z_chain phi'
// (same or independent channels) and estimates the drift E[y(T)]/T and the
// diffusion Var[y(T)]/T across paths.
struct McMapEstimate {
  double drift, drift_se;
  double diffusion, diffusion_se;
};
McMapEstimate mc_verify_map(const std::vector<int>& chain, bool same, double h,
                            double T, int n_paths, double dt,
                            std::uint64_t master_seed, int threads = 1);

}  // namespace scg
