#pragma once

/// @file grid.hpp
/// @brief Scalar and vector fields on a regular 2-D pixel grid.
///
/// Fields are stored row-major: element (x, y) lives at index y*width + x,
/// with x the column (fast axis) and y the row. Displacements are measured
/// in pixels per time step; the u component displaces along x, v along y.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "advect/errors.hpp"

namespace advect {

enum class BoundaryMode : std::uint8_t { Periodic, Replicate };

/// Resolves an out-of-range index against the boundary rule.
inline int resolve_index(int i, int n, BoundaryMode mode) {
  if (mode == BoundaryMode::Periodic) {
    i %= n;
    return i < 0 ? i + n : i;
  }
  return std::clamp(i, 0, n - 1);
}

template <typename T>
struct ScalarFieldT {
  int height = 0;
  int width = 0;
  BoundaryMode boundary = BoundaryMode::Replicate;
  std::vector<T> values;

  ScalarFieldT() = default;
  ScalarFieldT(int h, int w, BoundaryMode b = BoundaryMode::Replicate, T fill = T(0))
      : height(h), width(w), boundary(b), values(static_cast<size_t>(h) * w, fill) {
    if (h <= 0 || w <= 0) throw InvalidParams("ScalarField: non-positive extent");
  }

  T& at(int y, int x) { return values[static_cast<size_t>(y) * width + x]; }
  const T& at(int y, int x) const { return values[static_cast<size_t>(y) * width + x]; }

  /// Boundary-resolved lookup at arbitrary integer coordinates.
  T sample(int y, int x) const {
    return at(resolve_index(y, height, boundary), resolve_index(x, width, boundary));
  }

  std::size_t size() const { return values.size(); }

  bool same_shape(const ScalarFieldT& o) const { return height == o.height && width == o.width; }

  bool all_finite() const {
    for (T v : values)
      if (!std::isfinite(static_cast<double>(v))) return false;
    return true;
  }
};

template <typename T>
struct VectorFieldT {
  int height = 0;
  int width = 0;
  BoundaryMode boundary = BoundaryMode::Replicate;
  std::vector<T> u;  ///< x-displacement, pixels
  std::vector<T> v;  ///< y-displacement, pixels

  VectorFieldT() = default;
  VectorFieldT(int h, int w, BoundaryMode b = BoundaryMode::Replicate)
      : height(h),
        width(w),
        boundary(b),
        u(static_cast<size_t>(h) * w, T(0)),
        v(static_cast<size_t>(h) * w, T(0)) {
    if (h <= 0 || w <= 0) throw InvalidParams("VectorField: non-positive extent");
  }

  T& u_at(int y, int x) { return u[static_cast<size_t>(y) * width + x]; }
  const T& u_at(int y, int x) const { return u[static_cast<size_t>(y) * width + x]; }
  T& v_at(int y, int x) { return v[static_cast<size_t>(y) * width + x]; }
  const T& v_at(int y, int x) const { return v[static_cast<size_t>(y) * width + x]; }

  std::size_t size() const { return u.size(); }

  bool same_shape(const ScalarFieldT<T>& f) const { return height == f.height && width == f.width; }

  T max_magnitude() const {
    T m = T(0);
    for (std::size_t i = 0; i < u.size(); ++i)
      m = std::max(m, static_cast<T>(std::hypot(static_cast<double>(u[i]), static_cast<double>(v[i]))));
    return m;
  }
};

using ScalarField = ScalarFieldT<double>;
using VectorField = VectorFieldT<double>;

/// Checks the grid-extent invariant required by the stencil operators.
template <typename T>
inline void require_operator_grid(const ScalarFieldT<T>& f) {
  if (f.height < 4 || f.width < 4) throw InvalidParams("stencil operators require H,W >= 4");
  if (f.values.size() != static_cast<size_t>(f.height) * f.width)
    throw ShapeMismatch("ScalarField: buffer length != H*W");
}

template <typename T>
inline void require_operator_grid(const VectorFieldT<T>& w) {
  if (w.height < 4 || w.width < 4) throw InvalidParams("stencil operators require H,W >= 4");
  if (w.u.size() != static_cast<size_t>(w.height) * w.width || w.v.size() != w.u.size())
    throw ShapeMismatch("VectorField: buffer length != H*W");
}

/// Bilinear sample of a field at continuous coordinates (boundary-resolved).
template <typename T>
inline T bilinear_sample(const ScalarFieldT<T>& f, double y, double x) {
  const int x0 = static_cast<int>(std::floor(x));
  const int y0 = static_cast<int>(std::floor(y));
  const double fx = x - x0;
  const double fy = y - y0;
  const double v00 = f.sample(y0, x0);
  const double v01 = f.sample(y0, x0 + 1);
  const double v10 = f.sample(y0 + 1, x0);
  const double v11 = f.sample(y0 + 1, x0 + 1);
  const double top = v00 + fx * (v01 - v00);
  const double bot = v10 + fx * (v11 - v10);
  return static_cast<T>(top + fy * (bot - top));
}

}  // namespace advect
