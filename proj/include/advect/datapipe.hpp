#pragma once

/// @file datapipe.hpp
/// @brief Dataset container, day-of-year climatology standardization,
/// sequence windowing and deterministic splitting.
///
/// File format (all integers little-endian):
///   magic "ADVD" | u16 version | u32 header length | UTF-8 JSON header
///   | raw float32 frame buffers in sequence order
///   | raw float32 motion buffers (u plane then v plane) for each sequence
///     that carries ground-truth motion, in sequence order.
/// The JSON header records H, W, endianness, and per-sequence metadata
/// (frame count, region id, start day-of-year, motion flag).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "advect/grid.hpp"

namespace advect {

constexpr int kDaysPerYear = 365;

struct Sequence {
  int region_id = 0;
  int start_day = 0;  ///< day-of-year of frame 0, in [0, 365)
  std::vector<ScalarFieldT<float>> frames;
  std::optional<VectorFieldT<float>> motion;  ///< per-step displacement, constant over the sequence

  int day_of(int t) const { return (start_day + t) % kDaysPerYear; }
};

struct Dataset {
  int height = 0;
  int width = 0;
  std::vector<Sequence> sequences;
};

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

/// Per-(region, day-of-year) scalar mean/std statistics with a circular
/// smoothing window. std is floored at 1e-6.
class Climatology {
 public:
  struct DayStats {
    double mean = 0.0;
    double stddev = 1.0;
  };

  /// Computed from training data only. Throws EmptyDay when a (region, day)
  /// bucket stays empty even after windowing.
  static Climatology compute(const Dataset& train, int window_days = 3);

  const DayStats& stats(int region_id, int day) const;
  bool covers(int region_id) const;

  int window_days() const { return window_; }
  static constexpr double kStdFloor = 1e-6;

  std::vector<int> regions() const;

 private:
  int window_ = 3;
  // region -> 365 day stats
  std::vector<std::pair<int, std::vector<DayStats>>> per_region_;
  friend Climatology climatology_from_stats(int, std::vector<std::pair<int, std::vector<DayStats>>>);
};

ScalarFieldT<float> standardize(const ScalarFieldT<float>& frame, const Climatology& clim,
                                int region_id, int day);
ScalarFieldT<float> destandardize(const ScalarFieldT<float>& frame, const Climatology& clim,
                                  int region_id, int day);

/// Standardizes every frame of every sequence by its own (region, day) stats.
Dataset standardize_dataset(const Dataset& ds, const Climatology& clim);

/// A contiguous window into a dataset sequence: k input frames followed by
/// h target frames. Holds a reference, not a copy.
struct SequenceSample {
  const Dataset* dataset = nullptr;
  int sequence = 0;
  int start = 0;
  int k = 0;
  int horizon = 0;

  const Sequence& seq() const { return dataset->sequences[sequence]; }
  const ScalarFieldT<float>& input(int i) const { return seq().frames[start + i]; }
  const ScalarFieldT<float>& target(int i) const { return seq().frames[start + k + i]; }
  const std::optional<VectorFieldT<float>>& true_motion() const { return seq().motion; }
};

/// All maximal sliding windows; count per sequence is max(0, T - k - h + 1)
/// at stride 1.
std::vector<SequenceSample> window_sequences(const Dataset& ds, int k, int horizon,
                                             int stride = 1);

/// Deterministic sequence-level split; no window created across the split.
std::pair<Dataset, Dataset> split(const Dataset& ds, double val_fraction, std::uint64_t seed);

}  // namespace advect
