#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scg/coeff.hpp"
#include "scg/grid.hpp"
#include "scg/memory.hpp"
#include "scg/noise.hpp"

namespace scg {

// Composite stencil acting on an implicit element subscript of a noise:
// (mu delta)^mud (delta^2)^d2.  Order-insensitive by construction.
struct SubStencil {
  int mud = 0;
  int d2 = 0;
  bool trivial() const { return mud == 0 && d2 == 0; }
  bool operator==(const SubStencil&) const = default;
  std::vector<std::pair<int, Rational>> taps() const;
};

// Reference to a noise channel of element j (and j's pair partner for
// psi/chi), with optional subscript stencils.
struct NoiseRef {
  NoiseFamily family = NoiseFamily::Phi;
  std::vector<int> modes;
  SubStencil sub1, sub2;
  bool operator==(const NoiseRef&) const = default;
  std::string str() const;
};

// Quadratic noise phi_{j,n} Z_{chain} phi_{i,m} in canonical irreducible
// form; the chain (outermost rate first) convolves the right-hand noise.
struct QuadNoiseRef {
  int left_mode = 0;
  SubStencil left_sub;
  std::vector<int> chain;  // 1 or 2 rate indices
  int right_mode = 0;
  SubStencil right_sub;
  bool operator==(const QuadNoiseRef&) const = default;
  std::string str() const;
};

struct ModelTerm {
  Coeff coeff;
  int p_sig = 0, p_gam = 0, p_alp = 0, p_h = 0;
  std::optional<StencilKind> u_stencil;
  int u_pow = 0;
  std::optional<NoiseRef> noise;
  std::optional<QuadNoiseRef> quad;

  bool deterministic() const { return !noise && !quad; }
  // everything but the coefficient
  bool same_structure(const ModelTerm& o) const;
  bool same_term(const ModelTerm& o) const {
    return same_structure(o) && coeff.same_value(o.coeff);
  }
};

struct ModelMeta {
  std::string name;
  std::map<std::string, std::string> extra;
  bool operator==(const ModelMeta&) const = default;
};

struct TermTable {
  ModelMeta meta;
  std::vector<ModelTerm> terms;

  bool same_table(const TermTable& o) const;
  // terms with alpha power 0 (the linear-diffusion reduction)
  TermTable filter_alpha_zero() const;
  // drop terms whose noise reference matches pred (ablation experiments)
  TermTable without_noise(const NoiseRef& ref) const;
};

// Instantaneous dU_j/dt contribution of the whole table.  Noise values come
// from the view at `step`; convolution values from the bank, which must hold
// a chain for every quadratic reference (else MissingChannel-style error).
double eval_term_table(const TermTable& table, std::span<const double> U,
                       const NoiseView* noise, const ConvBank* convs,
                       std::int64_t step, const Pars& pars, const Grid& grid,
                       int j);

// Expanded coefficient of one concrete channel offset in dU_j/dt: sums
// coeff * weight over all terms whose (family, modes) match and whose
// subscript stencils reach the offsets.  Exact; used for the structural
// coefficient checks.
Coeff expanded_noise_coefficient(const TermTable& table, NoiseFamily family,
                                 const std::vector<int>& modes, int offset_a,
                                 std::optional<int> offset_b);

}  // namespace scg
