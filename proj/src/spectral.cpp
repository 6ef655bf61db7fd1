#include "advect/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>

#include "advect/rng.hpp"

namespace advect {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

/// RAII c2c plan pair for one grid size.
class Fft2d {
 public:
  Fft2d(int h, int w) : h_(h), w_(w), n_(static_cast<std::size_t>(h) * w) {
    buf_in_ = fftw_alloc_complex(n_);
    buf_out_ = fftw_alloc_complex(n_);
    fwd_ = fftw_plan_dft_2d(h, w, buf_in_, buf_out_, FFTW_FORWARD, FFTW_ESTIMATE);
    inv_ = fftw_plan_dft_2d(h, w, buf_in_, buf_out_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2d() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
    fftw_free(buf_in_);
    fftw_free(buf_out_);
  }
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  std::size_t size() const { return n_; }
  fftw_complex* in() { return buf_in_; }
  fftw_complex* out() { return buf_out_; }
  void forward() { fftw_execute(fwd_); }
  void inverse() { fftw_execute(inv_); }

  /// Signed angular frequency of bin k on an n-point axis.
  static double freq(int k, int n) {
    const int s = (k > n / 2) ? k - n : k;
    return kTwoPi * s / n;
  }

  int h_, w_;

 private:
  std::size_t n_;
  fftw_complex* buf_in_;
  fftw_complex* buf_out_;
  fftw_plan fwd_, inv_;
};

}  // namespace

ScalarField spectral_step(const ScalarField& initial, std::array<double, 2> velocity,
                          double diffusion, double t) {
  if (initial.boundary != BoundaryMode::Periodic)
    throw NonPeriodicInput("spectral_step: input field must be periodic");
  require_operator_grid(initial);
  if (diffusion < 0.0 || t < 0.0)
    throw InvalidParams("spectral_step: D and t must be non-negative");

  const int h = initial.height, w = initial.width;
  Fft2d fft(h, w);
  for (std::size_t i = 0; i < fft.size(); ++i) {
    fft.in()[i][0] = initial.values[i];
    fft.in()[i][1] = 0.0;
  }
  fft.forward();

  const double ux = velocity[0], vy = velocity[1];
  for (int ky = 0; ky < h; ++ky) {
    const double xi_y = Fft2d::freq(ky, h);
    const bool nyq_y = (h % 2 == 0) && (ky == h / 2);
    for (int kx = 0; kx < w; ++kx) {
      const double xi_x = Fft2d::freq(kx, w);
      const bool nyq_x = (w % 2 == 0) && (kx == w / 2);
      const double decay = std::exp(-diffusion * t * (xi_x * xi_x + xi_y * xi_y));
      const double phase = (xi_x * ux + xi_y * vy) * t;
      std::complex<double> m;
      if (nyq_x || nyq_y) {
        // Nyquist bins have no conjugate partner; a complex phase would break
        // the real-output symmetry, so keep only its real part.
        m = {decay * std::cos(phase), 0.0};
      } else {
        m = std::polar(decay, -phase);
      }
      fftw_complex& c = fft.out()[static_cast<std::size_t>(ky) * w + kx];
      const std::complex<double> v(c[0], c[1]);
      const std::complex<double> r = v * m;
      c[0] = r.real();
      c[1] = r.imag();
    }
  }

  // Inverse transform back to the spatial domain (in <- out).
  for (std::size_t i = 0; i < fft.size(); ++i) {
    fft.in()[i][0] = fft.out()[i][0];
    fft.in()[i][1] = fft.out()[i][1];
  }
  fft.inverse();

  ScalarField result(h, w, BoundaryMode::Periodic);
  const double scale = 1.0 / static_cast<double>(fft.size());
  double max_abs = 0.0, max_imag = 0.0;
  for (std::size_t i = 0; i < fft.size(); ++i) {
    result.values[i] = fft.out()[i][0] * scale;
    max_abs = std::max(max_abs, std::abs(result.values[i]));
    max_imag = std::max(max_imag, std::abs(fft.out()[i][1] * scale));
  }
  if (max_imag > 1e-10 * std::max(1.0, max_abs))
    throw Error("spectral_step: non-real output (symmetry violated)");
  return result;
}

ScalarField make_initial_field(std::uint64_t seed, int height, int width,
                               double correlation_length) {
  if (height < 4 || width < 4) throw InvalidParams("make_initial_field: H,W >= 4 required");
  if (correlation_length <= 0.0)
    throw InvalidParams("make_initial_field: correlation length must be positive");

  Rng rng(derive_seed(seed, 0x6669656c64ULL));
  Fft2d fft(height, width);
  for (std::size_t i = 0; i < fft.size(); ++i) {
    fft.in()[i][0] = rng.gaussian();
    fft.in()[i][1] = 0.0;
  }
  fft.forward();

  // Shape the white spectrum by a Gaussian low-pass with the requested
  // correlation length, then transform back.
  for (int ky = 0; ky < height; ++ky) {
    const double xi_y = Fft2d::freq(ky, height);
    for (int kx = 0; kx < width; ++kx) {
      const double xi_x = Fft2d::freq(kx, width);
      const double k2 = xi_x * xi_x + xi_y * xi_y;
      const double g = std::exp(-0.5 * k2 * correlation_length * correlation_length);
      fftw_complex& c = fft.out()[static_cast<std::size_t>(ky) * width + kx];
      c[0] *= g;
      c[1] *= g;
    }
  }
  for (std::size_t i = 0; i < fft.size(); ++i) {
    fft.in()[i][0] = fft.out()[i][0];
    fft.in()[i][1] = fft.out()[i][1];
  }
  fft.inverse();

  ScalarField f(height, width, BoundaryMode::Periodic);
  const std::size_t n = fft.size();
  for (std::size_t i = 0; i < n; ++i) f.values[i] = fft.out()[i][0] / static_cast<double>(n);

  // Standardize exactly.
  double mean = 0.0;
  for (double v : f.values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : f.values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(n);
  const double inv_std = var > 0.0 ? 1.0 / std::sqrt(var) : 1.0;
  for (double& v : f.values) v = (v - mean) * inv_std;
  return f;
}

}  // namespace advect
