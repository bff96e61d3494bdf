#pragma once

#include <string>
#include <vector>

#include "scg/model.hpp"

namespace scg {

// One structurally distinct term slot of the weak table: everything of the
// noise contribution except which psi it multiplies.
struct NoiseSlot {
  int p_sig, p_gam, p_alp, p_h;
  std::optional<StencilKind> u_stencil;
  int u_pow;
  SubStencil sub1, sub2;
  bool operator==(const NoiseSlot&) const = default;
  std::string str() const;
};

struct ConsolidationResult {
  TermTable chi_table;
  std::vector<NoiseSlot> slots;                 // rows, first-appearance order
  std::vector<std::vector<int>> columns;        // psi mode lists, first appearance
  std::vector<std::vector<double>> coeff_matrix;  // slots x columns (the input)
  std::vector<std::vector<double>> r_transpose;   // slots x rank, lower-profile
  std::vector<std::vector<double>> q_transpose;   // rank x columns, orthonormal rows
  int rank = 0;
  double tol = 0.0;
};

// Gram-Schmidt / QR replacement of the psi noises by rank-many equivalent
// chi noises.  A slot's residual is dropped when its norm falls below
// tol_rel times the largest slot norm.
ConsolidationResult consolidate_noise_columns(const TermTable& weak,
                                              double tol_rel = 1e-9);

// Max deviation between the slot Gram matrix of the original psi
// contributions and Rt*R of the consolidated table; the two agree up to
// roundoff when consolidation preserved the noise covariance.
double covariance_check(const ConsolidationResult& result);

void write_r_matrix_csv(const ConsolidationResult& result, const std::string& path);

}  // namespace scg
