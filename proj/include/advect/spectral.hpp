#pragma once

/// @file spectral.hpp
/// @brief Exact Fourier-domain propagator for constant-velocity
/// advection-diffusion on periodic grids, plus band-limited field synthesis.
///
/// The propagator multiplies each Fourier mode by
///   exp(-i <xi, w> t) * exp(-D t |xi|^2),
/// the closed-form solution of dI/dt + (w . grad) I = D lap I for spatially
/// constant w. At the Nyquist frequency of even-sized grids the complex
/// phase is replaced by its cosine so the output stays exactly
/// conjugate-symmetric.

#include <array>
#include <cstdint>

#include "advect/grid.hpp"

namespace advect {

/// Propagates I0 by time t under constant velocity w = (u, v) and diffusion D.
/// Exact to FFT round-off. Throws NonPeriodicInput unless I0 is periodic.
ScalarField spectral_step(const ScalarField& initial, std::array<double, 2> velocity,
                          double diffusion, double t);

/// Band-limited Gaussian random field, standardized to mean 0 / variance 1.
/// Deterministic in the seed; periodic boundary.
ScalarField make_initial_field(std::uint64_t seed, int height, int width,
                               double correlation_length = 8.0);

}  // namespace advect
