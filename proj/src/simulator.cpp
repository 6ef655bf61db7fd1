#include "advect/simulator.hpp"

#include <cmath>

#include "advect/grid_ops.hpp"
#include "advect/rng.hpp"

namespace advect {

namespace {

/// u = dpsi/dy, v = -dpsi/dx via central differences on the periodic grid.
VectorField discrete_curl(const ScalarField& psi) {
  VectorField w(psi.height, psi.width, BoundaryMode::Periodic);
  for (int y = 0; y < psi.height; ++y) {
    for (int x = 0; x < psi.width; ++x) {
      w.u_at(y, x) = (psi.sample(y + 1, x) - psi.sample(y - 1, x)) / 2.0;
      w.v_at(y, x) = -(psi.sample(y, x + 1) - psi.sample(y, x - 1)) / 2.0;
    }
  }
  return w;
}

/// Minimal-image displacement on a periodic axis.
double wrap_delta(double d, int n) {
  const double half = n / 2.0;
  while (d > half) d -= n;
  while (d < -half) d += n;
  return d;
}

}  // namespace

VectorField make_flow(const FlowSpec& spec, int height, int width) {
  if (height < 4 || width < 4) throw InvalidParams("make_flow: H,W >= 4 required");
  return std::visit(
      [&](const auto& s) -> VectorField {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UniformFlow>) {
          VectorField w(height, width, BoundaryMode::Periodic);
          std::fill(w.u.begin(), w.u.end(), s.u);
          std::fill(w.v.begin(), w.v.end(), s.v);
          return w;
        } else if constexpr (std::is_same_v<S, VortexFlow>) {
          if (s.radius <= 0.0) throw InvalidParams("vortex: radius must be positive");
          // Gaussian stream function; peak tangential speed ~ strength at r = radius.
          ScalarField psi(height, width, BoundaryMode::Periodic);
          const double scale = s.strength * s.radius * std::exp(0.5);
          for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
              const double dx = wrap_delta(x - s.center_x, width);
              const double dy = wrap_delta(y - s.center_y, height);
              const double r2 = dx * dx + dy * dy;
              psi.at(y, x) = scale * std::exp(-0.5 * r2 / (s.radius * s.radius));
            }
          }
          return discrete_curl(psi);
        } else if constexpr (std::is_same_v<S, StreamFunctionNoise>) {
          ScalarField psi = make_initial_field(s.seed, height, width, s.correlation_length);
          VectorField w = discrete_curl(psi);
          const double m = w.max_magnitude();
          if (m > 0.0) {
            const double g = s.amplitude / m;
            for (auto& c : w.u) c *= g;
            for (auto& c : w.v) c *= g;
          }
          return w;
        } else {
          static_assert(std::is_same_v<S, CompositeFlow>);
          VectorField w(height, width, BoundaryMode::Periodic);
          for (const BasicFlow& part : s.parts) {
            VectorField p = std::visit(
                [&](const auto& b) { return make_flow(FlowSpec{b}, height, width); }, part);
            for (std::size_t i = 0; i < w.u.size(); ++i) {
              w.u[i] += p.u[i];
              w.v[i] += p.v[i];
            }
          }
          return w;
        }
      },
      spec);
}

ScalarField kernel_solution(const ScalarField& initial, std::array<double, 2> velocity,
                            double diffusion, double t) {
  if (initial.boundary != BoundaryMode::Periodic)
    throw NonPeriodicInput("kernel_solution: input field must be periodic");
  require_operator_grid(initial);
  const double variance = 2.0 * diffusion * t;
  if (variance < 0.05)
    throw DegenerateKernel("kernel_solution: 2*D*t < 0.05 px^2, use spectral_step");

  warp::Params p;
  p.diffusion = diffusion;
  p.dt = t;
  p.renormalize = true;
  p.boundary = BoundaryMode::Periodic;

  // Characteristics travel w*t over time t (the kernel center is x - w*t);
  // the kernel variance 2*D*t grows with the same t.
  VectorField w(initial.height, initial.width, BoundaryMode::Periodic);
  std::fill(w.u.begin(), w.u.end(), velocity[0] * t);
  std::fill(w.v.begin(), w.v.end(), velocity[1] * t);
  return warp::forward_only(initial, w, p);
}

ScalarField semi_lagrangian_step(const ScalarField& field, const VectorField& velocity,
                                 const SimConfig& cfg) {
  cfg.validate();
  if (!velocity.same_shape(field))
    throw ShapeMismatch("semi_lagrangian_step: field/velocity shapes differ");
  require_operator_grid(field);

  // Raise the substep count until each substep displaces at most one pixel.
  const double max_disp = velocity.max_magnitude() * cfg.dt;
  int substeps = cfg.substeps;
  if (max_disp > substeps) substeps = static_cast<int>(std::ceil(max_disp));
  const double dts = cfg.dt / substeps;
  if (cfg.diffusion * dts > 0.25)
    throw UnstableDiffusion("semi_lagrangian_step: D*dt/substeps > 0.25");

  ScalarField cur = field;
  cur.boundary = cfg.boundary;
  const int h = field.height, w = field.width;
  ScalarField next(h, w, cfg.boundary);
  for (int s = 0; s < substeps; ++s) {
    // Backtrace and sample.
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const std::size_t i = static_cast<std::size_t>(y) * w + x;
        next.values[i] = bilinear_sample(cur, y - velocity.v[i] * dts, x - velocity.u[i] * dts);
      }
    }
    // Explicit diffusion.
    if (cfg.diffusion > 0.0) {
      ScalarField lap = laplacian(next);
      for (std::size_t i = 0; i < next.values.size(); ++i)
        next.values[i] += cfg.diffusion * dts * lap.values[i];
    }
    std::swap(cur, next);
  }
  cur.boundary = field.boundary;
  return cur;
}

FlowSpec FlowSampler::sample(std::uint64_t seed, int height, int width) const {
  Rng rng(seed);
  const double speed = rng.uniform(min_speed, max_speed);
  const double angle = rng.uniform(0.0, 2.0 * 3.14159265358979323846);

  auto uniform = [&]() -> FlowSpec {
    return UniformFlow{speed * std::cos(angle), speed * std::sin(angle)};
  };
  auto noise = [&]() -> FlowSpec {
    return StreamFunctionNoise{correlation_length, speed, rng.next_u64()};
  };
  auto vortex = [&]() -> FlowSpec {
    return VortexFlow{rng.uniform(0.0, width), rng.uniform(0.0, height), speed,
                      rng.uniform(0.25, 0.5) * std::min(height, width)};
  };

  switch (kind) {
    case Kind::Uniform:
      return uniform();
    case Kind::StreamNoise:
      return noise();
    case Kind::Vortex:
      return vortex();
    case Kind::Mixed: {
      const double p = rng.uniform();
      if (p < 0.35) return uniform();
      if (p < 0.70) return noise();
      if (p < 0.85) return vortex();
      // Drifting large-scale structure: uniform translation plus weaker noise.
      CompositeFlow c;
      c.parts.push_back(UniformFlow{0.7 * speed * std::cos(angle), 0.7 * speed * std::sin(angle)});
      c.parts.push_back(StreamFunctionNoise{correlation_length, 0.3 * speed, rng.next_u64()});
      return c;
    }
  }
  throw InvalidParams("flow sampler: unknown kind");
}

Dataset generate_dataset(int n_sequences, const SimConfig& cfg, const FlowSampler& flows,
                         const std::string& out_path) {
  cfg.validate();
  if (n_sequences < 1) throw InvalidParams("generate_dataset: need at least one sequence");

  Dataset ds;
  ds.height = cfg.height;
  ds.width = cfg.width;
  ds.sequences.reserve(n_sequences);

  for (int s = 0; s < n_sequences; ++s) {
    const std::uint64_t flow_seed = derive_seed(cfg.seed, 2 * static_cast<std::uint64_t>(s));
    const std::uint64_t field_seed = derive_seed(cfg.seed, 2 * static_cast<std::uint64_t>(s) + 1);

    Sequence seq;
    seq.region_id = s % 4;
    // Stratified start days so every day of year is covered once the
    // dataset has a few dozen sequences.
    seq.start_day = static_cast<int>((static_cast<std::int64_t>(s) * kDaysPerYear) /
                                     std::max(1, n_sequences)) %
                    kDaysPerYear;

    const VectorField motion = make_flow(flows.sample(flow_seed, cfg.height, cfg.width),
                                         cfg.height, cfg.width);

    ScalarField state = make_initial_field(field_seed, cfg.height, cfg.width,
                                           cfg.correlation_length);

    auto to_f32 = [&](const ScalarField& f) {
      ScalarFieldT<float> out(f.height, f.width, BoundaryMode::Replicate);
      for (std::size_t i = 0; i < f.values.size(); ++i)
        out.values[i] = static_cast<float>(f.values[i]);
      return out;
    };
    auto from_f32 = [&](const ScalarFieldT<float>& f) {
      ScalarField out(f.height, f.width, cfg.boundary);
      for (std::size_t i = 0; i < f.values.size(); ++i)
        out.values[i] = static_cast<double>(f.values[i]);
      return out;
    };

    // Round every stored frame to float32 and evolve from the rounded state:
    // a stored sequence then replays bit-exactly from its own frames.
    seq.frames.push_back(to_f32(state));
    for (int t = 1; t < cfg.steps; ++t) {
      state = semi_lagrangian_step(from_f32(seq.frames.back()), motion, cfg);
      seq.frames.push_back(to_f32(state));
    }

    VectorFieldT<float> motion32(cfg.height, cfg.width, BoundaryMode::Periodic);
    for (std::size_t i = 0; i < motion.u.size(); ++i) {
      motion32.u[i] = static_cast<float>(motion.u[i]);
      motion32.v[i] = static_cast<float>(motion.v[i]);
    }
    seq.motion = std::move(motion32);
    ds.sequences.push_back(std::move(seq));
  }

  if (!out_path.empty()) save_dataset(ds, out_path);
  return ds;
}

}  // namespace advect
