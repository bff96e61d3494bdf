#pragma once

#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "scg/rational.hpp"

namespace scg {

// Periodic coarse grid of m elements of width h; grid points X_j = x0 + j*h.
// All index arithmetic wraps modulo m.
struct Grid {
  int m = 0;
  double h = 0.0;
  double x0 = 0.0;
  int fine_per_element = 2;

  double length() const { return m * h; }
  double grid_point(int j) const { return x0 + j * h; }
  int wrap(int j) const {
    int r = j % m;
    return r < 0 ? r + m : r;
  }
};

// Small parameters of the model family: noise magnitude, coupling,
// nonlinearity.  gamma=0 decouples elements; gamma=1 is the evaluated model.
struct Pars {
  double sigma = 0.0;
  double gamma = 0.0;
  double alpha = 0.0;
};

// Centred mean/difference composites with integer offsets only.
enum class StencilKind { Identity, MuDelta, Delta2, MuDelta3, Delta4 };

// Offset/weight taps of a stencil, exact.
const std::vector<std::pair<int, Rational>>& stencil_taps(StencilKind k);

// Convolution of two tap lists (stencil composition / products).
std::vector<std::pair<int, Rational>> compose_taps(
    const std::vector<std::pair<int, Rational>>& a,
    const std::vector<std::pair<int, Rational>>& b);

double apply_stencil(StencilKind k, std::span<const double> field, int j);

const char* stencil_token(StencilKind k);

// theta = pi*(x - X_j)/h in [-pi, pi]; x must lie within the overlapped
// element (|x - X_j| <= h up to roundoff), else the caller indexed the wrong
// element and we throw.
double subgrid_coord(double x, int j, const Grid& g);

}  // namespace scg
