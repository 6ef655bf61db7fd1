#pragma once

#include <stdexcept>
#include <string>

namespace advect {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeMismatch : Error {
  using Error::Error;
};
struct InvalidParams : Error {
  using Error::Error;
};
struct NonPeriodicInput : Error {
  using Error::Error;
};
struct DegenerateKernel : Error {
  using Error::Error;
};
struct UnstableDiffusion : Error {
  using Error::Error;
};
struct StaleCache : Error {
  using Error::Error;
};
struct InsufficientBatch : Error {
  using Error::Error;
};
struct NonScalarLoss : Error {
  using Error::Error;
};
struct DoubleBackward : Error {
  using Error::Error;
};
struct EmptyDay : Error {
  using Error::Error;
};
struct MissingClimatology : Error {
  using Error::Error;
};
struct MissingMotion : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};
struct InvalidConfig : Error {
  using Error::Error;
};
struct TrainingDiverged : Error {
  using Error::Error;
};

}  // namespace advect
