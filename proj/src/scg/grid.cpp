#include "scg/grid.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <string>

namespace scg {

namespace {

using Taps = std::vector<std::pair<int, Rational>>;

Taps base_taps(StencilKind k) {
  switch (k) {
    case StencilKind::Identity: return {{0, Rational(1)}};
    case StencilKind::MuDelta: return {{1, Rational(1, 2)}, {-1, Rational(-1, 2)}};
    case StencilKind::Delta2: return {{1, Rational(1)}, {0, Rational(-2)}, {-1, Rational(1)}};
    case StencilKind::Delta4:
      return compose_taps(base_taps(StencilKind::Delta2), base_taps(StencilKind::Delta2));
    case StencilKind::MuDelta3:
      return compose_taps(base_taps(StencilKind::MuDelta), base_taps(StencilKind::Delta2));
  }
  throw std::logic_error("unknown stencil kind");
}

}  // namespace

Taps compose_taps(const Taps& a, const Taps& b) {
  std::map<int, Rational> acc;
  for (const auto& [oa, wa] : a)
    for (const auto& [ob, wb] : b) {
      auto [it, fresh] = acc.emplace(oa + ob, wa * wb);
      if (!fresh) it->second = it->second + wa * wb;
    }
  Taps out;
  for (const auto& [o, w] : acc)
    if (!w.is_zero()) out.emplace_back(o, w);
  return out;
}

const Taps& stencil_taps(StencilKind k) {
  static const std::map<StencilKind, Taps> cache = {
      {StencilKind::Identity, base_taps(StencilKind::Identity)},
      {StencilKind::MuDelta, base_taps(StencilKind::MuDelta)},
      {StencilKind::Delta2, base_taps(StencilKind::Delta2)},
      {StencilKind::MuDelta3, base_taps(StencilKind::MuDelta3)},
      {StencilKind::Delta4, base_taps(StencilKind::Delta4)},
  };
  return cache.at(k);
}

double apply_stencil(StencilKind k, std::span<const double> field, int j) {
  const int m = static_cast<int>(field.size());
  double s = 0.0;
  for (const auto& [o, w] : stencil_taps(k)) {
    int i = (j + o) % m;
    if (i < 0) i += m;
    s += w.value() * field[i];
  }
  return s;
}

const char* stencil_token(StencilKind k) {
  switch (k) {
    case StencilKind::Identity: return "id";
    case StencilKind::MuDelta: return "mud";
    case StencilKind::Delta2: return "d2";
    case StencilKind::MuDelta3: return "mudd2";
    case StencilKind::Delta4: return "d4";
  }
  return "?";
}

double subgrid_coord(double x, int j, const Grid& g) {
  const double L = g.length();
  double dx = x - g.grid_point(j);
  // wrap to [-L/2, L/2)
  dx -= L * std::floor(dx / L + 0.5);
  const double tol = 1e-9 * g.h;
  if (std::abs(dx) > g.h + tol)
    throw std::logic_error("subgrid_coord: x=" + std::to_string(x) +
                           " not in overlapped element j=" + std::to_string(j));
  return std::numbers::pi * dx / g.h;
}

}  // namespace scg
