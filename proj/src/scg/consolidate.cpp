#include "scg/consolidate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "scg/parser.hpp"

namespace scg {

std::string NoiseSlot::str() const {
  ModelTerm t;
  t.coeff = Coeff(1);
  t.p_sig = p_sig;
  t.p_gam = p_gam;
  t.p_alp = p_alp;
  t.p_h = p_h;
  t.u_stencil = u_stencil;
  t.u_pow = u_pow;
  NoiseRef nr;
  nr.family = NoiseFamily::Psi;
  nr.modes = {0};
  nr.sub1 = sub1;
  nr.sub2 = sub2;
  t.noise = nr;
  std::string s = print_term(t);
  // the slot stands for a whole psi block, not one mode
  const auto at = s.find("psi(0)");
  if (at != std::string::npos) s.replace(at, 6, "psi(*)");
  return s;
}

ConsolidationResult consolidate_noise_columns(const TermTable& weak, double tol_rel) {
  ConsolidationResult res;
  res.tol = tol_rel;
  res.chi_table.meta = weak.meta;
  if (!res.chi_table.meta.name.empty()) res.chi_table.meta.name += "-chi";

  // collect slots and columns in first-appearance order
  auto is_psi_pair = [](const ModelTerm& t) {
    return t.noise && t.noise->family == NoiseFamily::Psi && t.noise->modes.size() >= 2;
  };
  for (const auto& term : weak.terms) {
    if (!is_psi_pair(term)) continue;
    NoiseSlot slot{term.p_sig, term.p_gam, term.p_alp, term.p_h,
                   term.u_stencil, term.u_pow, term.noise->sub1, term.noise->sub2};
    if (std::find(res.slots.begin(), res.slots.end(), slot) == res.slots.end())
      res.slots.push_back(slot);
    if (std::find(res.columns.begin(), res.columns.end(), term.noise->modes) ==
        res.columns.end())
      res.columns.push_back(term.noise->modes);
  }
  const int S = static_cast<int>(res.slots.size());
  const int C = static_cast<int>(res.columns.size());
  res.coeff_matrix.assign(S, std::vector<double>(C, 0.0));
  for (const auto& term : weak.terms) {
    if (!is_psi_pair(term)) continue;
    NoiseSlot slot{term.p_sig, term.p_gam, term.p_alp, term.p_h,
                   term.u_stencil, term.u_pow, term.noise->sub1, term.noise->sub2};
    const auto s = std::find(res.slots.begin(), res.slots.end(), slot) - res.slots.begin();
    const auto c = std::find(res.columns.begin(), res.columns.end(), term.noise->modes) -
                   res.columns.begin();
    res.coeff_matrix[s][c] += term.coeff.value();
  }

  // modified Gram-Schmidt over slot rows, with one re-orthogonalisation pass
  double max_norm = 0.0;
  for (const auto& row : res.coeff_matrix) {
    double n2 = 0.0;
    for (double v : row) n2 += v * v;
    max_norm = std::max(max_norm, std::sqrt(n2));
  }
  const double tol_abs = tol_rel * max_norm;
  res.r_transpose.assign(S, {});
  for (int s = 0; s < S; ++s) {
    std::vector<double> v = res.coeff_matrix[s];
    std::vector<double> rrow(res.rank + 1, 0.0);
    for (int pass = 0; pass < 2; ++pass) {
      for (int c = 0; c < res.rank; ++c) {
        double proj = 0.0;
        for (int k = 0; k < C; ++k) proj += v[k] * res.q_transpose[c][k];
        rrow[c] += proj;
        for (int k = 0; k < C; ++k) v[k] -= proj * res.q_transpose[c][k];
      }
    }
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    const double norm = std::sqrt(n2);
    if (norm > tol_abs && norm > 0.0) {
      for (double& x : v) x /= norm;
      res.q_transpose.push_back(v);
      rrow[res.rank] = norm;
      ++res.rank;
    } else {
      rrow.pop_back();
    }
    res.r_transpose[s] = std::move(rrow);
  }
  for (auto& row : res.r_transpose) row.resize(res.rank, 0.0);

  // rebuild the table: non-psi terms pass through, psi blocks become chi
  for (const auto& term : weak.terms)
    if (!is_psi_pair(term)) res.chi_table.terms.push_back(term);
  for (int s = 0; s < S; ++s) {
    for (int c = 0; c < res.rank; ++c) {
      if (res.r_transpose[s][c] == 0.0) continue;
      ModelTerm t;
      t.coeff = Coeff::numeric(res.r_transpose[s][c]);
      t.p_sig = res.slots[s].p_sig;
      t.p_gam = res.slots[s].p_gam;
      t.p_alp = res.slots[s].p_alp;
      t.p_h = res.slots[s].p_h;
      t.u_stencil = res.slots[s].u_stencil;
      t.u_pow = res.slots[s].u_pow;
      NoiseRef nr;
      nr.family = NoiseFamily::Chi;
      nr.modes = {c + 1};
      nr.sub1 = res.slots[s].sub1;
      nr.sub2 = res.slots[s].sub2;
      t.noise = nr;
      res.chi_table.terms.push_back(t);
    }
  }
  return res;
}

double covariance_check(const ConsolidationResult& result) {
  const int S = static_cast<int>(result.slots.size());
  const int C = static_cast<int>(result.columns.size());
  double dev = 0.0;
  for (int a = 0; a < S; ++a) {
    for (int b = 0; b < S; ++b) {
      double gram = 0.0;
      for (int k = 0; k < C; ++k)
        gram += result.coeff_matrix[a][k] * result.coeff_matrix[b][k];
      double rr = 0.0;
      for (int c = 0; c < result.rank; ++c)
        rr += result.r_transpose[a][c] * result.r_transpose[b][c];
      dev = std::max(dev, std::abs(gram - rr));
    }
  }
  return dev;
}

void write_r_matrix_csv(const ConsolidationResult& result, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << "slot";
  for (int c = 0; c < result.rank; ++c) f << ",chi_" << c + 1;
  f << "\n";
  f.precision(12);
  for (size_t s = 0; s < result.slots.size(); ++s) {
    f << "\"" << result.slots[s].str() << "\"";
    for (int c = 0; c < result.rank; ++c) f << "," << result.r_transpose[s][c];
    f << "\n";
  }
}

}  // namespace scg
