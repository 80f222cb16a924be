#include "dpd/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <ostream>
#include <random>
#include <thread>

#include "dpd/error.hpp"

namespace dpd {

IqBuffer random_buffer(std::size_t n, std::uint64_t seed, double rms, double sample_rate_hz) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g(0.0f, static_cast<float>(rms / std::sqrt(2.0)));
  std::vector<cf32> xs(n);
  for (cf32& x : xs) x = {g(rng), g(rng)};
  return IqBuffer(std::move(xs), sample_rate_hz);
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool bit_identical(const IqBuffer& a, const IqBuffer& b) {
  return a.size() == b.size() &&
         std::memcmp(a.samples().data(), b.samples().data(), a.size() * sizeof(cf32)) == 0;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

std::vector<BenchResult> run_bench(const AphConfig& cfg, const CoefficientVector& h,
                                   const BenchOptions& opts) {
  if (opts.repeats < 1) throw ConfigError("bench repeats must be >= 1");
  if (opts.workers.empty()) throw ConfigError("bench needs at least one worker count");
  if (opts.n_samples == 0) throw ConfigError("bench needs n_samples > 0");
  if (opts.chunk_len > opts.n_samples) throw ConfigError("bench needs n_samples >= chunk_len");

  const PredistortFn engine = opts.engine ? opts.engine : PredistortFn(predistort_parallel);
  const IqBuffer x = random_buffer(opts.n_samples, opts.seed);
  const IqBuffer reference = predistort_serial(x, h, cfg);
  const KernelIsa isa = resolve_kernel(opts.kernel);

  std::vector<BenchResult> rows;
  for (unsigned workers : opts.workers) {
    if (workers < 1) throw ConfigError("worker counts must be >= 1");
    const std::size_t chunk =
        opts.chunk_len > 0 ? opts.chunk_len : (opts.n_samples + workers - 1) / workers;
    const ChunkPlan plan = make_chunk_plan(cfg, chunk, workers, isa);

    if (!bit_identical(engine(x, h, cfg, plan), reference))
      throw CorrectnessError("parallel output differs from the serial reference (workers=" +
                             std::to_string(workers) + ", chunk_len=" + std::to_string(chunk) + ")");
    (void)engine(x, h, cfg, plan);  // warm-up

    std::vector<double> lat;
    for (int r = 0; r < opts.repeats; ++r) {
      const auto t0 = Clock::now();
      const IqBuffer out = engine(x, h, cfg, plan);
      lat.push_back(seconds_since(t0));
    }

    BenchResult row;
    row.n_samples = opts.n_samples;
    row.workers = workers;
    row.chunk_len = chunk;
    row.repeats = opts.repeats;
    row.kernel = isa;
    row.latency_s_median = median(lat);
    row.latency_s_min = *std::min_element(lat.begin(), lat.end());
    row.latency_s_max = *std::max_element(lat.begin(), lat.end());
    row.throughput_sps_median = static_cast<double>(opts.n_samples) / row.latency_s_median;
    row.throughput_sps_min = static_cast<double>(opts.n_samples) / row.latency_s_max;
    rows.push_back(row);
  }
  return rows;
}

double time_serial(const AphConfig& cfg, const CoefficientVector& h, std::size_t n_samples,
                   std::uint64_t seed, int repeats) {
  const IqBuffer x = random_buffer(n_samples, seed);
  (void)predistort_serial(x, h, cfg);
  std::vector<double> lat;
  for (int r = 0; r < std::max(1, repeats); ++r) {
    const auto t0 = Clock::now();
    const IqBuffer out = predistort_serial(x, h, cfg);
    lat.push_back(seconds_since(t0));
  }
  return median(lat);
}

void write_bench_csv(std::ostream& out, const std::vector<BenchResult>& rows) {
  out << kBenchCsvHeader << '\n';
  out.precision(9);
  for (const BenchResult& r : rows) {
    out << r.workers << ',' << r.chunk_len << ',' << r.n_samples << ',' << r.latency_s_median
        << ',' << r.throughput_sps_median << ',' << r.throughput_sps_min << '\n';
  }
}

nlohmann::json host_metadata(const std::vector<BenchResult>& rows) {
  nlohmann::json j{{"hardware_concurrency", std::thread::hardware_concurrency()},
                   {"kernel", rows.empty() ? "n/a" : to_string(rows.front().kernel)},
                   {"avx2_available", kernel_available(KernelIsa::avx2)},
#if defined(__clang__)
                   {"compiler", "clang " __clang_version__},
#elif defined(__GNUC__)
                   {"compiler", "gcc " __VERSION__},
#endif
  };
  nlohmann::json repeats = nlohmann::json::array();
  for (const BenchResult& r : rows)
    repeats.push_back({{"workers", r.workers},
                       {"repeats", r.repeats},
                       {"latency_s_min", r.latency_s_min},
                       {"latency_s_max", r.latency_s_max}});
  j["rows"] = repeats;
  return j;
}

}  // namespace dpd
