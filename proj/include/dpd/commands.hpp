#pragma once

// Batch commands behind the `dpd` executable. Each throws dpd::Error on
// failure; the executable maps that to "error: ..." and a nonzero exit.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dpd/bench.hpp"
#include "dpd/experiment.hpp"

namespace dpd::cmd {

namespace fs = std::filesystem;

void generate(const ExperimentConfig& cfg, const fs::path& out_iq);

/// Returns the training result so callers can inspect it.
TrainingResult train(const ExperimentConfig& cfg, const fs::path& out_coeffs,
                     const fs::path& out_report);

/// Block size used when streaming through predistort_parallel.
inline constexpr std::size_t kStreamBlock = std::size_t{1} << 20;

void predistort(const ExperimentConfig& cfg, const fs::path& coeffs, const fs::path& in_iq,
                const fs::path& out_iq, unsigned workers);

void simulate(const ExperimentConfig& cfg, const fs::path& in_iq, const fs::path& out_iq,
              const std::optional<fs::path>& with_dpd, unsigned workers);

/// One input: PSD CSV. Two inputs: per-band suppression JSON (a = before,
/// b = after). Written to `out`, or to `stream` when `out` is empty.
void evaluate(const ExperimentConfig& cfg, const fs::path& in_a,
              const std::optional<fs::path>& in_b, const std::optional<fs::path>& out,
              std::ostream& stream);

struct BenchArgs {
  std::size_t n_samples = 1'000'000;
  std::vector<unsigned> workers{1, 2, 4};
  std::size_t chunk_len = 0;
  int repeats = 5;
  std::optional<fs::path> coeffs;
  KernelIsa kernel = KernelIsa::automatic;
};

std::vector<BenchResult> bench(const ExperimentConfig& cfg, const BenchArgs& args,
                               const fs::path& out_csv);

/// Loads a coefficient document and checks its layout against the
/// experiment's dpd section.
std::pair<AphConfig, CoefficientVector> load_coefficients(const ExperimentConfig& cfg,
                                                          const fs::path& path);

/// Streams `x` through the parallel engine in blocks, carrying the halo.
IqBuffer predistort_streaming(const IqBuffer& x, const CoefficientVector& h, const AphConfig& cfg,
                              unsigned workers, std::size_t block = kStreamBlock);

}  // namespace dpd::cmd
