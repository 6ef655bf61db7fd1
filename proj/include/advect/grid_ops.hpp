#pragma once

/// @file grid_ops.hpp
/// @brief Discrete differential operators on grid fields.
///
/// All first derivatives are central differences with 1-pixel spacing,
/// second-order accurate; the Laplacian is the standard 5-point stencil.
/// Boundary handling follows the field's BoundaryMode. On periodic grids
/// the operators annihilate constants exactly and grad/divergence form a
/// skew-adjoint pair: <grad f, w> == -<f, divergence w>.

#include "advect/grid.hpp"

namespace advect {

/// Central-difference gradient. u = df/dx, v = df/dy.
template <typename T>
VectorFieldT<T> grad(const ScalarFieldT<T>& f) {
  require_operator_grid(f);
  VectorFieldT<T> g(f.height, f.width, f.boundary);
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      g.u_at(y, x) = (f.sample(y, x + 1) - f.sample(y, x - 1)) / T(2);
      g.v_at(y, x) = (f.sample(y + 1, x) - f.sample(y - 1, x)) / T(2);
    }
  }
  return g;
}

/// du/dx + dv/dy via central differences.
template <typename T>
ScalarFieldT<T> divergence(const VectorFieldT<T>& w) {
  require_operator_grid(w);
  ScalarFieldT<T> d(w.height, w.width, w.boundary);
  const int h = w.height, wd = w.width;
  auto idx = [wd](int y, int x) { return static_cast<size_t>(y) * wd + x; };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < wd; ++x) {
      const T dudx = (w.u[idx(y, resolve_index(x + 1, wd, w.boundary))] -
                      w.u[idx(y, resolve_index(x - 1, wd, w.boundary))]) /
                     T(2);
      const T dvdy = (w.v[idx(resolve_index(y + 1, h, w.boundary), x)] -
                      w.v[idx(resolve_index(y - 1, h, w.boundary), x)]) /
                     T(2);
      d.at(y, x) = dudx + dvdy;
    }
  }
  return d;
}

/// 5-point Laplacian: -4 center, +1 at each 4-neighbor, spacing 1.
template <typename T>
ScalarFieldT<T> laplacian(const ScalarFieldT<T>& f) {
  require_operator_grid(f);
  ScalarFieldT<T> l(f.height, f.width, f.boundary);
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      l.at(y, x) = f.sample(y, x + 1) + f.sample(y, x - 1) + f.sample(y + 1, x) +
                   f.sample(y - 1, x) - T(4) * f.at(y, x);
    }
  }
  return l;
}

}  // namespace advect
