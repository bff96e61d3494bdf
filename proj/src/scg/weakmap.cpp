#include "scg/weakmap.hpp"

#include <algorithm>
#include <cmath>

#include "scg/parser.hpp"
#include "scg/stats.hpp"

namespace scg {

namespace {

// 1/(k sqrt 2) = sqrt(2)/(2k)
Coeff inv_k_sqrt2(int k) { return Coeff::exact(Rational(1, 2 * k), Rational(2), 0); }

struct MappedPieces {
  Coeff drift;                                  // before the 1/2 factor inclusion
  std::vector<std::pair<std::vector<int>, Coeff>> noises;  // (psi modes, coeff), h/pi absorbed
  int extra_h = 0;
};

// Eq-level mapping with exact coefficients; drift handled by the caller
// (needs the stencil coincidence weight).
MappedPieces map_chain(int n, int m, const std::vector<int>& chain) {
  MappedPieces out;
  if (chain.size() == 1) {
    const int k = chain[0];
    out.noises.push_back({{n, m, k}, inv_k_sqrt2(k) * Coeff::pi_pow(-1)});
    out.extra_h = 1;
  } else if (chain.size() == 2) {
    const int lo = std::min(chain[0], chain[1]);
    const int hi = std::max(chain[0], chain[1]);
    const Coeff shared =
        Coeff::rational(Rational(1, lo * lo + hi * hi)) * Coeff::pi_pow(-3);
    out.noises.push_back({{n, m, hi}, shared * inv_k_sqrt2(hi)});
    out.noises.push_back({{n, m, lo, hi}, shared * inv_k_sqrt2(lo)});
    out.extra_h = 3;
  } else {
    throw std::invalid_argument("quadratic noises support chains of length 1 or 2");
  }
  return out;
}

Rational coincidence_weight(const SubStencil& a, const SubStencil& b) {
  Rational w(0);
  for (const auto& [oa, wa] : a.taps())
    for (const auto& [ob, wb] : b.taps())
      if (oa == ob) w = w + wa * wb;
  return w;
}

}  // namespace

QuadMapped map_quadratic_term(int n, int m, const std::vector<int>& chain,
                              bool same, double h) {
  QuadMapped out;
  if (same && chain.size() == 1 && n == m) out.drift = 0.5;
  MappedPieces pieces = map_chain(n, m, chain);
  for (const auto& [modes, coeff] : pieces.noises) {
    std::string name = "psi(";
    for (size_t i = 0; i < modes.size(); ++i)
      name += (i ? "," : "") + std::to_string(modes[i]);
    name += ")";
    out.noises.push_back({name, coeff.value() * std::pow(h, pieces.extra_h)});
  }
  return out;
}

WeakMapResult rewrite_strong_to_weak(const TermTable& strong) {
  WeakMapResult res;
  res.table.meta = strong.meta;
  bool any_quad = false;
  for (const auto& t : strong.terms) any_quad |= t.quad.has_value();
  if (any_quad && !res.table.meta.name.empty()) res.table.meta.name += "-weak";
  std::vector<ModelTerm> out;

  auto merge_in = [&](const ModelTerm& t, const std::string& source) {
    for (auto& existing : out) {
      if (existing.same_structure(t)) {
        existing.coeff = existing.coeff + t.coeff;
        res.provenance.push_back({source, print_term(t), t.coeff.value()});
        return;
      }
    }
    out.push_back(t);
    res.provenance.push_back({source, print_term(t), t.coeff.value()});
  };

  for (const auto& term : strong.terms) {
    if (!term.quad) {
      merge_in(term, print_term(term));
      continue;
    }
    const QuadNoiseRef& q = *term.quad;
    const std::string source = print_term(term);
    // mean drift: same-noise single convolutions on coincident expanded
    // element offsets and equal modes
    if (q.chain.size() == 1 && q.left_mode == q.right_mode) {
      Rational w = coincidence_weight(q.left_sub, q.right_sub);
      if (!w.is_zero()) {
        ModelTerm drift;
        drift.coeff = term.coeff.times_rational(w * Rational(1, 2));
        drift.p_sig = term.p_sig;
        drift.p_gam = term.p_gam;
        drift.p_alp = term.p_alp;
        drift.p_h = term.p_h;
        drift.u_stencil = term.u_stencil;
        drift.u_pow = term.u_pow;
        merge_in(drift, source);
      }
    }
    MappedPieces pieces = map_chain(q.left_mode, q.right_mode, q.chain);
    for (const auto& [modes, factor] : pieces.noises) {
      ModelTerm nt;
      nt.coeff = term.coeff * factor;
      nt.p_sig = term.p_sig;
      nt.p_gam = term.p_gam;
      nt.p_alp = term.p_alp;
      nt.p_h = term.p_h + pieces.extra_h;
      nt.u_stencil = term.u_stencil;
      nt.u_pow = term.u_pow;
      NoiseRef nr;
      nr.family = NoiseFamily::Psi;
      nr.modes = modes;
      nr.sub1 = q.left_sub;
      nr.sub2 = q.right_sub;
      nt.noise = nr;
      merge_in(nt, source);
    }
  }
  // drop exactly cancelled contributions
  for (const auto& t : out)
    if (!t.coeff.is_zero()) res.table.terms.push_back(t);
  return res;
}

McMapEstimate mc_verify_map(const std::vector<int>& chain, bool same, double h,
                            double T, int n_paths, double dt,
                            std::uint64_t master_seed, int threads) {
  double beta_min = mode_rate(chain[0], h);
  for (int k : chain) beta_min = std::min(beta_min, mode_rate(k, h));
  const double burn = 10.0 / beta_min;
  const auto burn_steps = static_cast<std::int64_t>(std::llround(burn / dt));
  const auto n_steps = burn_steps + static_cast<std::int64_t>(std::llround(T / dt));
  const auto sample_every = std::max<std::int64_t>(1, (n_steps - burn_steps) / 200);

  const NoiseKey left{NoiseFamily::Phi, 0, {}, {0}};
  const NoiseKey right = same ? left : NoiseKey{NoiseFamily::Phi, 1, {}, {0}};

  std::vector<std::vector<double>> paths(n_paths);
  std::vector<double> times;
  for (std::int64_t s = burn_steps; s < n_steps; ++s)
    if ((s - burn_steps) % sample_every == 0 || s + 1 == n_steps)
      times.push_back((s - burn_steps + 1) * dt);

  parallel_for(n_paths, threads, [&](int p) {
    NoiseBank bank(master_seed + 0x9e3779b97f4a7c15ULL * (p + 1), dt);
    ConvChain z(right, chain, h);
    double y = 0.0;
    std::vector<double>& samples = paths[p];
    samples.reserve(times.size());
    for (std::int64_t s = 0; s < n_steps; ++s) {
      const double phi_l = bank.value(left, s);
      const double phi_r = bank.value(right, s);
      const double z_pre = z.value();
      z.update(phi_r, dt);
      if (s >= burn_steps) {
        y += 0.5 * dt * phi_l * (z_pre + z.value());
        if ((s - burn_steps) % sample_every == 0 || s + 1 == n_steps)
          samples.push_back(y);
      }
    }
  });

  FitResult drift = estimate_drift_rate(times, paths);
  FitResult diff = estimate_variance_growth(times, paths);
  return {drift.value, drift.stderr_, diff.value, diff.stderr_};
}

}  // namespace scg
