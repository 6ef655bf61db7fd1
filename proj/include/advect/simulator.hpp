#pragma once

/// @file simulator.hpp
/// @brief Ground-truth advection-diffusion sequence generation.
///
/// Two solution routes are provided for cross-checking: the exact spectral
/// propagator (constant velocity, see spectral.hpp) discretized here as a
/// truncated Gaussian kernel sum, and a semi-Lagrangian integrator for
/// arbitrary velocity fields. Generated datasets store the sampled flow
/// field next to each sequence so the motion estimator can be scored
/// against ground truth.

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include "advect/datapipe.hpp"
#include "advect/grid.hpp"
#include "advect/spectral.hpp"
#include "advect/warp.hpp"

namespace advect {

struct SimConfig {
  int height = 64;
  int width = 64;
  double dt = 1.0;
  double diffusion = 0.45;  ///< D, pixels^2 per step
  int steps = 10;           ///< frames per sequence
  BoundaryMode boundary = BoundaryMode::Periodic;
  int substeps = 2;         ///< minimum substep count for the general solver
  std::uint64_t seed = 0;
  double correlation_length = 8.0;  ///< of the initial fields, pixels

  void validate() const {
    if (diffusion < 0.0) throw InvalidParams("sim: D must be >= 0");
    if (dt <= 0.0) throw InvalidParams("sim: dt must be > 0");
    if (steps < 2) throw InvalidParams("sim: steps must be >= 2");
    if (substeps < 1) throw InvalidParams("sim: substeps must be >= 1");
    if (height < 4 || width < 4) throw InvalidParams("sim: H,W >= 4 required");
  }
};

/// Flow families for synthetic sequences. All variants are divergence-free
/// under the discrete central-difference divergence: non-uniform flows are
/// built as the discrete curl of a scalar stream function on the periodic
/// grid, and the two central differences commute there.
struct UniformFlow {
  double u = 0.0, v = 0.0;
};
struct VortexFlow {
  double center_x = 0.0, center_y = 0.0;
  double strength = 1.0;  ///< peak tangential speed, pixels/step
  double radius = 8.0;    ///< pixels
};
struct StreamFunctionNoise {
  double correlation_length = 16.0;
  double amplitude = 1.0;  ///< max |w| after scaling, pixels/step
  std::uint64_t seed = 0;
};
using BasicFlow = std::variant<UniformFlow, VortexFlow, StreamFunctionNoise>;
struct CompositeFlow {
  std::vector<BasicFlow> parts;
};
using FlowSpec = std::variant<UniformFlow, VortexFlow, StreamFunctionNoise, CompositeFlow>;

/// Realizes a flow spec as a displacement field on an HxW periodic grid.
VectorField make_flow(const FlowSpec& spec, int height, int width);

/// Discretized closed-form solution for constant velocity: a truncated,
/// per-pixel renormalized Gaussian kernel of variance 2*D*t, with periodic
/// wrap. Throws DegenerateKernel when 2*D*t < 0.05 px^2.
ScalarField kernel_solution(const ScalarField& initial, std::array<double, 2> velocity,
                            double diffusion, double t);

/// One dt step of semi-Lagrangian advection plus explicit diffusion.
/// Substeps are raised until max|w|*dt/substeps <= 1 px; throws
/// UnstableDiffusion if D*dt/substeps > 0.25 even then.
ScalarField semi_lagrangian_step(const ScalarField& field, const VectorField& velocity,
                                 const SimConfig& cfg);

/// Parameter ranges for sampling per-sequence flows.
struct FlowSampler {
  enum class Kind { Uniform, StreamNoise, Vortex, Mixed };
  Kind kind = Kind::Mixed;
  double min_speed = 0.5;
  double max_speed = 2.5;
  double correlation_length = 16.0;

  FlowSpec sample(std::uint64_t seed, int height, int width) const;
};

/// Evolves n sequences under per-sequence sampled flows and writes the
/// dataset container. Frames are rounded to float32 after every step and
/// evolution continues from the rounded state, so a stored sequence replays
/// bit-exactly from its own frames.
Dataset generate_dataset(int n_sequences, const SimConfig& cfg, const FlowSampler& flows,
                         const std::string& out_path);

}  // namespace advect
