#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include <json.hpp>

#include "dpd/aph.hpp"

namespace dpd {

struct BenchResult {
  std::size_t n_samples = 0;
  unsigned workers = 1;
  std::size_t chunk_len = 0;
  int repeats = 0;
  double latency_s_median = 0.0;
  double latency_s_min = 0.0;
  double latency_s_max = 0.0;
  double throughput_sps_median = 0.0;  // n_samples / latency_s_median
  double throughput_sps_min = 0.0;     // n_samples / latency_s_max
  KernelIsa kernel = KernelIsa::scalar;
};

/// The engine under test; defaults to predistort_parallel.
using PredistortFn = std::function<IqBuffer(const IqBuffer&, const CoefficientVector&,
                                            const AphConfig&, const ChunkPlan&)>;

struct BenchOptions {
  std::size_t n_samples = 1'000'000;
  std::vector<unsigned> workers{1, 2, 4};
  /// 0 = one chunk per worker.
  std::size_t chunk_len = 0;
  int repeats = 5;
  std::uint64_t seed = 1;
  KernelIsa kernel = KernelIsa::automatic;
  PredistortFn engine;
};

/// For each worker count: checks the engine against predistort_serial once
/// (CorrectnessError on any mismatch), discards one warm-up run, then times
/// `repeats` runs. Only the predistortion call is inside the timed region.
std::vector<BenchResult> run_bench(const AphConfig& cfg, const CoefficientVector& h,
                                   const BenchOptions& opts);

/// Wall time of one predistort_serial call on the bench buffer; used to
/// sanity-check the single-worker rows.
double time_serial(const AphConfig& cfg, const CoefficientVector& h, std::size_t n_samples,
                   std::uint64_t seed, int repeats);

inline constexpr const char* kBenchCsvHeader =
    "workers,chunk_len,n_samples,latency_s_median,throughput_sps_median,throughput_sps_min";

void write_bench_csv(std::ostream& out, const std::vector<BenchResult>& rows);

/// Host facts recorded next to the CSV.
nlohmann::json host_metadata(const std::vector<BenchResult>& rows);

/// Complex Gaussian test buffer with the given RMS.
IqBuffer random_buffer(std::size_t n, std::uint64_t seed, double rms = 0.18,
                       double sample_rate_hz = 61.44e6);

}  // namespace dpd
