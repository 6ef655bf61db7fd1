#include "advect/datapipe.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "advect/rng.hpp"

namespace advect {

static_assert(std::endian::native == std::endian::little,
              "dataset container assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'A', 'D', 'V', 'D'};
constexpr std::uint16_t kVersion = 1;

void write_raw(std::ofstream& out, const void* data, std::size_t bytes) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(bytes));
  if (!out) throw IoError("dataset: write failed");
}

void read_raw(std::ifstream& in, void* data, std::size_t bytes) {
  in.read(static_cast<char*>(data), static_cast<std::streamsize>(bytes));
  if (in.gcount() != static_cast<std::streamsize>(bytes))
    throw IoError("dataset: truncated file");
}

}  // namespace

void save_dataset(const Dataset& ds, const std::string& path) {
  nlohmann::json header;
  header["height"] = ds.height;
  header["width"] = ds.width;
  header["endianness"] = "little";
  header["sequence_count"] = ds.sequences.size();
  nlohmann::json seqs = nlohmann::json::array();
  for (const Sequence& s : ds.sequences) {
    seqs.push_back({{"frames", s.frames.size()},
                    {"region_id", s.region_id},
                    {"start_day", s.start_day},
                    {"has_motion", s.motion.has_value()}});
  }
  header["sequences"] = seqs;
  const std::string hs = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("dataset: cannot open for writing: " + path);
  write_raw(out, kMagic, 4);
  write_raw(out, &kVersion, 2);
  const std::uint32_t hlen = static_cast<std::uint32_t>(hs.size());
  write_raw(out, &hlen, 4);
  write_raw(out, hs.data(), hs.size());

  for (const Sequence& s : ds.sequences)
    for (const auto& f : s.frames)
      write_raw(out, f.values.data(), f.values.size() * sizeof(float));
  for (const Sequence& s : ds.sequences) {
    if (!s.motion) continue;
    write_raw(out, s.motion->u.data(), s.motion->u.size() * sizeof(float));
    write_raw(out, s.motion->v.data(), s.motion->v.size() * sizeof(float));
  }
  out.flush();
  if (!out) throw IoError("dataset: flush failed");
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("dataset: cannot open: " + path);

  char magic[4];
  read_raw(in, magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw IoError("dataset: bad magic");
  std::uint16_t version = 0;
  read_raw(in, &version, 2);
  if (version != kVersion) throw IoError("dataset: unsupported version");
  std::uint32_t hlen = 0;
  read_raw(in, &hlen, 4);
  std::string hs(hlen, '\0');
  read_raw(in, hs.data(), hlen);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception&) {
    throw IoError("dataset: corrupt header");
  }
  if (header.value("endianness", "") != "little") throw IoError("dataset: unsupported endianness");

  Dataset ds;
  ds.height = header.at("height").get<int>();
  ds.width = header.at("width").get<int>();
  const std::size_t npix = static_cast<std::size_t>(ds.height) * ds.width;

  for (const auto& sj : header.at("sequences")) {
    Sequence s;
    s.region_id = sj.at("region_id").get<int>();
    s.start_day = sj.at("start_day").get<int>();
    const std::size_t t = sj.at("frames").get<std::size_t>();
    s.frames.resize(t);
    for (auto& f : s.frames) {
      f = ScalarFieldT<float>(ds.height, ds.width, BoundaryMode::Replicate);
    }
    if (sj.at("has_motion").get<bool>())
      s.motion.emplace(ds.height, ds.width, BoundaryMode::Periodic);
    ds.sequences.push_back(std::move(s));
  }
  for (Sequence& s : ds.sequences)
    for (auto& f : s.frames) read_raw(in, f.values.data(), npix * sizeof(float));
  for (Sequence& s : ds.sequences) {
    if (!s.motion) continue;
    read_raw(in, s.motion->u.data(), npix * sizeof(float));
    read_raw(in, s.motion->v.data(), npix * sizeof(float));
  }
  return ds;
}

Climatology Climatology::compute(const Dataset& train, int window_days) {
  if (window_days < 0) throw InvalidParams("climatology: window must be >= 0");

  struct DayAgg {
    double sum = 0.0, sumsq = 0.0;
    std::int64_t count = 0;
  };
  // region -> per-day aggregates over every pixel of every frame on that day.
  std::vector<std::pair<int, std::vector<DayAgg>>> agg;
  auto region_agg = [&](int region) -> std::vector<DayAgg>& {
    for (auto& [r, v] : agg)
      if (r == region) return v;
    agg.emplace_back(region, std::vector<DayAgg>(kDaysPerYear));
    return agg.back().second;
  };

  for (const Sequence& s : train.sequences) {
    auto& days = region_agg(s.region_id);
    for (std::size_t t = 0; t < s.frames.size(); ++t) {
      DayAgg& d = days[s.day_of(static_cast<int>(t))];
      for (float v : s.frames[t].values) {
        d.sum += v;
        d.sumsq += static_cast<double>(v) * v;
        ++d.count;
      }
    }
  }

  Climatology clim;
  clim.window_ = window_days;
  for (auto& [region, days] : agg) {
    std::vector<DayStats> stats(kDaysPerYear);
    for (int d = 0; d < kDaysPerYear; ++d) {
      double sum = 0.0, sumsq = 0.0;
      std::int64_t count = 0;
      for (int o = -window_days; o <= window_days; ++o) {
        const DayAgg& a = days[((d + o) % kDaysPerYear + kDaysPerYear) % kDaysPerYear];
        sum += a.sum;
        sumsq += a.sumsq;
        count += a.count;
      }
      if (count == 0)
        throw EmptyDay("climatology: no samples for region " + std::to_string(region) +
                       " day " + std::to_string(d) + " within window");
      const double mean = sum / static_cast<double>(count);
      double var = sumsq / static_cast<double>(count) - mean * mean;
      if (var < 0.0) var = 0.0;
      stats[d].mean = mean;
      stats[d].stddev = std::max(std::sqrt(var), kStdFloor);
    }
    clim.per_region_.emplace_back(region, std::move(stats));
  }
  return clim;
}

const Climatology::DayStats& Climatology::stats(int region_id, int day) const {
  for (const auto& [r, days] : per_region_) {
    if (r == region_id) {
      if (day < 0 || day >= kDaysPerYear)
        throw MissingClimatology("climatology: day out of range");
      return days[day];
    }
  }
  throw MissingClimatology("climatology: unknown region " + std::to_string(region_id));
}

bool Climatology::covers(int region_id) const {
  for (const auto& [r, days] : per_region_)
    if (r == region_id) return true;
  return false;
}

std::vector<int> Climatology::regions() const {
  std::vector<int> out;
  for (const auto& [r, days] : per_region_) out.push_back(r);
  return out;
}

ScalarFieldT<float> standardize(const ScalarFieldT<float>& frame, const Climatology& clim,
                                int region_id, int day) {
  const auto& st = clim.stats(region_id, day);
  ScalarFieldT<float> out = frame;
  const float m = static_cast<float>(st.mean);
  const float inv = static_cast<float>(1.0 / st.stddev);
  for (float& v : out.values) v = (v - m) * inv;
  return out;
}

ScalarFieldT<float> destandardize(const ScalarFieldT<float>& frame, const Climatology& clim,
                                  int region_id, int day) {
  const auto& st = clim.stats(region_id, day);
  ScalarFieldT<float> out = frame;
  const float m = static_cast<float>(st.mean);
  const float sd = static_cast<float>(st.stddev);
  for (float& v : out.values) v = v * sd + m;
  return out;
}

Dataset standardize_dataset(const Dataset& ds, const Climatology& clim) {
  Dataset out;
  out.height = ds.height;
  out.width = ds.width;
  out.sequences.reserve(ds.sequences.size());
  for (const Sequence& s : ds.sequences) {
    Sequence t = s;
    for (std::size_t i = 0; i < t.frames.size(); ++i)
      t.frames[i] = standardize(s.frames[i], clim, s.region_id, s.day_of(static_cast<int>(i)));
    out.sequences.push_back(std::move(t));
  }
  return out;
}

std::vector<SequenceSample> window_sequences(const Dataset& ds, int k, int horizon, int stride) {
  if (k < 1 || horizon < 1 || stride < 1)
    throw InvalidParams("window_sequences: k, horizon, stride must be >= 1");
  std::vector<SequenceSample> out;
  for (std::size_t s = 0; s < ds.sequences.size(); ++s) {
    const int t = static_cast<int>(ds.sequences[s].frames.size());
    for (int start = 0; start + k + horizon <= t; start += stride)
      out.push_back(SequenceSample{&ds, static_cast<int>(s), start, k, horizon});
  }
  return out;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double val_fraction, std::uint64_t seed) {
  if (val_fraction < 0.0 || val_fraction > 1.0)
    throw InvalidParams("split: val_fraction must be in [0, 1]");
  const std::size_t n = ds.sequences.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(derive_seed(seed, 0x73706c6974ULL));
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(order[i - 1], order[j]);
  }
  const std::size_t n_val = static_cast<std::size_t>(std::llround(val_fraction * n));

  Dataset train, val;
  train.height = val.height = ds.height;
  train.width = val.width = ds.width;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_val ? val : train).sequences.push_back(ds.sequences[order[i]]);
  }
  return {std::move(train), std::move(val)};
}

}  // namespace advect
