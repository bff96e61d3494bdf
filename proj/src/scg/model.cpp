#include "scg/model.hpp"

#include <cmath>

namespace scg {

std::vector<std::pair<int, Rational>> SubStencil::taps() const {
  std::vector<std::pair<int, Rational>> t = {{0, Rational(1)}};
  for (int i = 0; i < mud; ++i) t = compose_taps(t, stencil_taps(StencilKind::MuDelta));
  for (int i = 0; i < d2; ++i) t = compose_taps(t, stencil_taps(StencilKind::Delta2));
  return t;
}

namespace {

std::string sub_str(const SubStencil& s, int which) {
  std::string out;
  const char* mud = which == 1 ? " mud1" : " mud2";
  const char* d2 = which == 1 ? " d1sq" : " d2sq";
  for (int i = 0; i < s.mud; ++i) out += mud;
  for (int i = 0; i < s.d2; ++i) out += d2;
  return out;
}

std::string modes_str(const std::vector<int>& modes) {
  std::string s;
  for (size_t i = 0; i < modes.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(modes[i]);
  }
  return s;
}

}  // namespace

std::string NoiseRef::str() const {
  std::string s = family_token(family);
  s += "(" + modes_str(modes) + ")";
  s += sub_str(sub1, 1);
  s += sub_str(sub2, 2);
  return s;
}

std::string QuadNoiseRef::str() const {
  std::string s = "quad(" + std::to_string(left_mode) + sub_str(left_sub, 1) + "; Z";
  for (size_t i = 0; i < chain.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(chain[i]);
  }
  s += "; " + std::to_string(right_mode) + sub_str(right_sub, 2) + ")";
  return s;
}

bool ModelTerm::same_structure(const ModelTerm& o) const {
  return p_sig == o.p_sig && p_gam == o.p_gam && p_alp == o.p_alp &&
         p_h == o.p_h && u_stencil == o.u_stencil && u_pow == o.u_pow &&
         noise == o.noise && quad == o.quad;
}

bool TermTable::same_table(const TermTable& o) const {
  if (!(meta == o.meta) || terms.size() != o.terms.size()) return false;
  for (size_t i = 0; i < terms.size(); ++i)
    if (!terms[i].same_term(o.terms[i])) return false;
  return true;
}

TermTable TermTable::filter_alpha_zero() const {
  TermTable t;
  t.meta = meta;
  for (const auto& term : terms)
    if (term.p_alp == 0) t.terms.push_back(term);
  return t;
}

TermTable TermTable::without_noise(const NoiseRef& ref) const {
  TermTable t;
  t.meta = meta;
  for (const auto& term : terms)
    if (!(term.noise && *term.noise == ref)) t.terms.push_back(term);
  return t;
}

namespace {

// psi with one mode index is a single-subscript channel (the restricted
// noises of the lattice models); psi with the (n,m,...) mode list and chi
// carry the implicit element pair.
bool paired_ref(const NoiseRef& nr) {
  return nr.family == NoiseFamily::Chi ||
         (nr.family == NoiseFamily::Psi && nr.modes.size() >= 2);
}

double noise_factor(const NoiseRef& nr, const NoiseView& view, std::int64_t step,
                    const Grid& grid, int j) {
  const bool paired = paired_ref(nr);
  if (!paired && !nr.sub2.trivial())
    throw std::invalid_argument("second subscript stencil on single-subscript noise " +
                                nr.str());
  double total = 0.0;
  for (const auto& [o1, w1] : nr.sub1.taps()) {
    if (paired) {
      for (const auto& [o2, w2] : nr.sub2.taps()) {
        NoiseKey key{nr.family, grid.wrap(j + o1), grid.wrap(j + o2), nr.modes};
        total += w1.value() * w2.value() * view.value(key, step);
      }
    } else {
      NoiseKey key{nr.family, grid.wrap(j + o1), {}, nr.modes};
      total += w1.value() * view.value(key, step);
    }
  }
  return total;
}

double quad_factor(const QuadNoiseRef& q, const NoiseView& view, const ConvBank& convs,
                   std::int64_t step, const Grid& grid, int j) {
  double total = 0.0;
  for (const auto& [o1, w1] : q.left_sub.taps()) {
    const NoiseKey left{NoiseFamily::Phi, grid.wrap(j + o1), {}, {q.left_mode}};
    const double lv = view.value(left, step);
    for (const auto& [o2, w2] : q.right_sub.taps()) {
      const NoiseKey right{NoiseFamily::Phi, grid.wrap(j + o2), {}, {q.right_mode}};
      total += w1.value() * w2.value() * lv * convs.value(convs.require(right, q.chain));
    }
  }
  return total;
}

}  // namespace

double eval_term_table(const TermTable& table, std::span<const double> U,
                       const NoiseView* noise, const ConvBank* convs,
                       std::int64_t step, const Pars& pars, const Grid& grid,
                       int j) {
  double rhs = 0.0;
  for (const auto& term : table.terms) {
    double scalar = term.coeff.value();
    if (term.p_sig) scalar *= std::pow(pars.sigma, term.p_sig);
    if (term.p_gam) scalar *= std::pow(pars.gamma, term.p_gam);
    if (term.p_alp) scalar *= std::pow(pars.alpha, term.p_alp);
    if (term.p_h) scalar *= std::pow(grid.h, term.p_h);
    if (scalar == 0.0) continue;
    double u = 1.0;
    if (term.u_stencil) u *= apply_stencil(*term.u_stencil, U, j);
    for (int p = 0; p < term.u_pow; ++p) u *= U[j];
    double nf = 1.0;
    if (term.noise) {
      if (!noise) throw MissingChannel(NoiseKey{term.noise->family, j, {}, term.noise->modes});
      nf = noise_factor(*term.noise, *noise, step, grid, j);
    } else if (term.quad) {
      if (!noise || !convs)
        throw std::runtime_error("quadratic term needs noise and convolution banks: " +
                                 term.quad->str());
      nf = quad_factor(*term.quad, *noise, *convs, step, grid, j);
    }
    rhs += scalar * u * nf;
  }
  return rhs;
}

Coeff expanded_noise_coefficient(const TermTable& table, NoiseFamily family,
                                 const std::vector<int>& modes, int offset_a,
                                 std::optional<int> offset_b) {
  Coeff total(0);
  for (const auto& term : table.terms) {
    if (!term.noise) continue;
    const NoiseRef& nr = *term.noise;
    if (nr.family != family || nr.modes != modes) continue;
    const bool paired = paired_ref(nr);
    for (const auto& [o1, w1] : nr.sub1.taps()) {
      if (o1 != offset_a) continue;
      if (!paired) {
        if (offset_b) continue;
        total = total + term.coeff.times_rational(w1);
      } else {
        for (const auto& [o2, w2] : nr.sub2.taps()) {
          if (offset_b && o2 == *offset_b)
            total = total + term.coeff.times_rational(w1 * w2);
        }
      }
    }
  }
  return total;
}

}  // namespace scg
