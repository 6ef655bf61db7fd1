#pragma once

/// @file warp.hpp
/// @brief Gaussian-kernel warping: forward evaluation and analytic gradients.
///
/// Each output pixel is a Gaussian-weighted average of input pixels, the
/// kernel centered at the backtraced position x - w(x). Kernel variance is
/// 2*D*dt, truncated to a square window of radius ceil(3*sigma) around the
/// center (radius measured from the backtraced point, so the cut tails stay
/// symmetric). With renormalize=true the weights sum to 1 per output pixel,
/// which makes the scheme a convex combination: constants are preserved
/// exactly and min(I) <= out(x) <= max(I). The raw kernel (renormalize=false)
/// keeps the continuum normalization 1/(4*pi*D*dt).
///
/// The backward pass differentiates the forward map exactly, treating the
/// discrete window set as fixed: the weights depend on w only through the
/// kernel center, so d/dw picks up the Gaussian derivative, with the
/// quotient rule applied when weights are renormalized.

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "advect/grid.hpp"

namespace advect::warp {

struct Params {
  double diffusion = 0.45;   ///< D, pixels^2 per step
  double dt = 1.0;           ///< step length
  int truncation_radius = 0; ///< pixels; 0 means ceil(3*sigma)
  bool renormalize = true;
  BoundaryMode boundary = BoundaryMode::Replicate;

  double variance() const { return 2.0 * diffusion * dt; }
  double sigma() const { return std::sqrt(variance()); }
  int radius() const {
    return truncation_radius > 0 ? truncation_radius
                                 : static_cast<int>(std::ceil(3.0 * sigma()));
  }

  void validate() const {
    if (diffusion * dt < 0.05)
      throw InvalidParams("warp: D*dt below 0.05 px^2 floor (kernel narrower than grid)");
    if (radius() < 1) throw InvalidParams("warp: truncation radius must be >= 1");
  }
};

/// Per-pixel kernel data retained by the forward pass for backward.
template <typename T>
struct CacheT {
  int height = 0, width = 0;
  Params params;
  std::vector<T> input;          ///< copy of I
  std::vector<T> wu, wv;         ///< copy of the motion field
  std::vector<int> win_x0, win_y0, win_nx, win_ny;  ///< per-pixel window
  std::vector<float> weights;    ///< normalized weights, window-major
  std::vector<std::uint64_t> weight_offset;         ///< start into `weights`
  bool valid = false;

  void invalidate() { valid = false; }
};

using Cache = CacheT<double>;

namespace detail {

/// Shared kernel-window pass. Computes the weighted average for one output
/// pixel and optionally records the window and weights. Value lookups and
/// weight positions both resolve against `bnd`.
template <typename T, typename EmitWeight>
inline double window_average(const ScalarFieldT<T>& img, BoundaryMode bnd, double cx, double cy,
                             int radius, double inv_two_var, double raw_scale, bool renormalize,
                             EmitWeight&& emit, int& x0, int& y0, int& nx, int& ny) {
  // Window: the truncation cut must never land inside the stated radius, so
  // the boundary ring is included (outermost pixels sit within one pixel
  // beyond `radius` from the center on each axis).
  x0 = static_cast<int>(std::floor(cx - radius));
  y0 = static_cast<int>(std::floor(cy - radius));
  const int x1 = static_cast<int>(std::ceil(cx + radius));
  const int y1 = static_cast<int>(std::ceil(cy + radius));
  nx = x1 - x0 + 1;
  ny = y1 - y0 + 1;

  double wsum = 0.0;
  double acc = 0.0;
  for (int yy = y0; yy <= y1; ++yy) {
    const double dy = yy - cy;
    const int ry = resolve_index(yy, img.height, bnd);
    for (int xx = x0; xx <= x1; ++xx) {
      const double dx = xx - cx;
      const double w = std::exp(-(dx * dx + dy * dy) * inv_two_var);
      wsum += w;
      acc += w * static_cast<double>(img.at(ry, resolve_index(xx, img.width, bnd)));
    }
  }
  const double scale = renormalize ? (wsum > 0.0 ? 1.0 / wsum : 0.0) : raw_scale;
  // Second pass to emit normalized weights (only when a cache is recording).
  emit(x0, y0, nx, ny, scale);
  return acc * scale;
}

struct NoEmit {
  void operator()(int, int, int, int, double) const {}
};

}  // namespace detail

/// Forward warp. Returns the warped image and a cache for the backward pass.
template <typename T>
std::pair<ScalarFieldT<T>, CacheT<T>> forward(const ScalarFieldT<T>& img,
                                              const VectorFieldT<T>& motion, const Params& p) {
  p.validate();
  if (!motion.same_shape(img))
    throw ShapeMismatch("warp: image and motion field shapes differ");

  const int h = img.height, w = img.width;
  const int radius = p.radius();
  const double inv_two_var = 1.0 / (2.0 * p.variance());
  const double raw_scale = 1.0 / (4.0 * 3.14159265358979323846 * p.diffusion * p.dt);

  ScalarFieldT<T> out(h, w, img.boundary);
  CacheT<T> cache;
  cache.height = h;
  cache.width = w;
  cache.params = p;
  cache.input = img.values;
  cache.wu = motion.u;
  cache.wv = motion.v;
  const std::size_t n = static_cast<std::size_t>(h) * w;
  cache.win_x0.resize(n);
  cache.win_y0.resize(n);
  cache.win_nx.resize(n);
  cache.win_ny.resize(n);
  cache.weight_offset.resize(n);
  cache.weights.reserve(n * (2 * radius + 1) * (2 * radius + 1));

  // Weights are recomputed against img.boundary-resolved indices; the stored
  // weight list is window-major (rows of the window in order).
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double cx = x - static_cast<double>(motion.u[i]);
      const double cy = y - static_cast<double>(motion.v[i]);
      cache.weight_offset[i] = cache.weights.size();
      int x0, y0, nx, ny;
      auto emit = [&](int ex0, int ey0, int enx, int eny, double scale) {
        for (int yy = ey0; yy < ey0 + eny; ++yy) {
          const double dy = yy - cy;
          for (int xx = ex0; xx < ex0 + enx; ++xx) {
            const double dx = xx - cx;
            cache.weights.push_back(
                static_cast<float>(std::exp(-(dx * dx + dy * dy) * inv_two_var) * scale));
          }
        }
      };
      const double val = detail::window_average(img, p.boundary, cx, cy, radius, inv_two_var,
                                                raw_scale, p.renormalize, emit, x0, y0, nx, ny);
      cache.win_x0[i] = x0;
      cache.win_y0[i] = y0;
      cache.win_nx[i] = nx;
      cache.win_ny[i] = ny;
      out.values[i] = static_cast<T>(val);
    }
  }
  cache.valid = true;
  return {std::move(out), std::move(cache)};
}

/// Backward warp: exact gradients of the forward map wrt the input image and
/// the motion field, chained against grad_out. Consumes the cache.
template <typename T>
std::pair<ScalarFieldT<T>, VectorFieldT<T>> backward(CacheT<T>& cache,
                                                     const ScalarFieldT<T>& grad_out) {
  if (!cache.valid) throw StaleCache("warp: backward without a matching forward");
  if (grad_out.height != cache.height || grad_out.width != cache.width)
    throw ShapeMismatch("warp: grad_out shape differs from forward output");

  const int h = cache.height, w = cache.width;
  const Params& p = cache.params;
  const double var = p.variance();
  const BoundaryMode bnd = p.boundary;

  ScalarFieldT<T> grad_img(h, w, bnd, T(0));
  VectorFieldT<T> grad_w(h, w, bnd);

  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double go = static_cast<double>(grad_out.values[i]);
      const double cx = x - static_cast<double>(cache.wu[i]);
      const double cy = y - static_cast<double>(cache.wv[i]);
      const int x0 = cache.win_x0[i], y0 = cache.win_y0[i];
      const int nx = cache.win_nx[i], ny = cache.win_ny[i];
      const float* kw = cache.weights.data() + cache.weight_offset[i];

      // out(x) = sum_y k(y) I(y). For renormalized weights
      //   d out / d c = [ sum_y k(y) I(y) (y - c) - out * sum_y k(y)(y - c) ] / var
      // and for the raw kernel the second (mean) term is absent.
      double val = 0.0;
      double mx = 0.0, my = 0.0;      // weight-weighted first moment
      double sx = 0.0, sy = 0.0;      // I-weighted first moment
      int k = 0;
      for (int yy = y0; yy < y0 + ny; ++yy) {
        const int ry = resolve_index(yy, h, bnd);
        const double dy = yy - cy;
        for (int xx = x0; xx < x0 + nx; ++xx, ++k) {
          const int rx = resolve_index(xx, w, bnd);
          const double kv = static_cast<double>(kw[k]);
          const double iv = static_cast<double>(cache.input[static_cast<std::size_t>(ry) * w + rx]);
          if (go != 0.0)
            grad_img.values[static_cast<std::size_t>(ry) * w + rx] += static_cast<T>(go * kv);
          const double dx = xx - cx;
          val += kv * iv;
          sx += kv * iv * dx;
          sy += kv * iv * dy;
          mx += kv * dx;
          my += kv * dy;
        }
      }
      double dout_dcx, dout_dcy;
      if (p.renormalize) {
        dout_dcx = (sx - val * mx) / var;
        dout_dcy = (sy - val * my) / var;
      } else {
        dout_dcx = sx / var;
        dout_dcy = sy / var;
      }
      // c = x - w(x), so d out / d w = -d out / d c.
      grad_w.u[i] = static_cast<T>(-go * dout_dcx);
      grad_w.v[i] = static_cast<T>(-go * dout_dcy);
    }
  }
  cache.invalidate();
  return {std::move(grad_img), std::move(grad_w)};
}

/// Forward-only evaluation (no cache).
template <typename T>
ScalarFieldT<T> forward_only(const ScalarFieldT<T>& img, const VectorFieldT<T>& motion,
                             const Params& p) {
  p.validate();
  if (!motion.same_shape(img))
    throw ShapeMismatch("warp: image and motion field shapes differ");
  const int h = img.height, w = img.width;
  const int radius = p.radius();
  const double inv_two_var = 1.0 / (2.0 * p.variance());
  const double raw_scale = 1.0 / (4.0 * 3.14159265358979323846 * p.diffusion * p.dt);
  ScalarFieldT<T> out(h, w, img.boundary);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double cx = x - static_cast<double>(motion.u[i]);
      const double cy = y - static_cast<double>(motion.v[i]);
      int x0, y0, nx, ny;
      out.values[i] = static_cast<T>(
          detail::window_average(img, p.boundary, cx, cy, radius, inv_two_var, raw_scale,
                                 p.renormalize, detail::NoEmit{}, x0, y0, nx, ny));
    }
  }
  return out;
}

/// Repeated warp with a frozen motion field, each step feeding the previous
/// output (the motion-oracle rollout).
template <typename T>
std::vector<ScalarFieldT<T>> rollout(const ScalarFieldT<T>& img, const VectorFieldT<T>& motion,
                                     const Params& p, int steps) {
  if (steps < 1) throw InvalidParams("warp rollout: steps must be >= 1");
  std::vector<ScalarFieldT<T>> out;
  out.reserve(steps);
  const ScalarFieldT<T>* cur = &img;
  for (int s = 0; s < steps; ++s) {
    out.push_back(forward_only(*cur, motion, p));
    cur = &out.back();
  }
  return out;
}

}  // namespace advect::warp
