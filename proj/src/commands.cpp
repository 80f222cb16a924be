#include "dpd/commands.hpp"

#include <fstream>
#include <iostream>
#include <random>

#include "dpd/bench.hpp"
#include "dpd/error.hpp"

namespace dpd::cmd {

void generate(const ExperimentConfig& cfg, const fs::path& out_iq) {
  write_iq(out_iq, cfg.payload());
}

TrainingResult train(const ExperimentConfig& cfg, const fs::path& out_coeffs,
                     const fs::path& out_report) {
  TrainingResult r = ila_train(cfg.chain(), cfg.dpd, cfg.training, cfg.waveform());
  write_json_file(out_coeffs, to_json(r.coefficients, r.config));
  write_json_file(out_report, to_json(r.report, r.config));
  return r;
}

std::pair<AphConfig, CoefficientVector> load_coefficients(const ExperimentConfig& cfg,
                                                          const fs::path& path) {
  auto [aph, h] = coefficients_from_json(read_json_file(path));
  if (!(aph.sets() == cfg.dpd.sets()) || !(aph.taps == cfg.dpd.taps))
    throw ConfigError("coefficient file '" + path.string() +
                      "' layout does not match the experiment's dpd section");
  return {aph, h};
}

IqBuffer predistort_streaming(const IqBuffer& x, const CoefficientVector& h, const AphConfig& cfg,
                              unsigned workers, std::size_t block) {
  const std::size_t halo = static_cast<std::size_t>(cfg.halo());
  std::vector<cf32> out;
  out.reserve(x.size());
  for (std::size_t start = 0; start < x.size(); start += block) {
    const std::size_t end = std::min(x.size(), start + block);
    // Real history ahead of each block; zero history only at the stream start.
    const std::size_t from = start >= halo ? start - halo : 0;
    IqBuffer piece(std::vector<cf32>(x.samples().begin() + static_cast<std::ptrdiff_t>(from),
                                     x.samples().begin() + static_cast<std::ptrdiff_t>(end)),
                   x.sample_rate_hz());
    const std::size_t chunk =
        std::max(halo + 1, (piece.size() + workers - 1) / std::max(1u, workers));
    const IqBuffer z = predistort_parallel(piece, h, cfg, make_chunk_plan(cfg, chunk, workers));
    out.insert(out.end(), z.samples().begin() + static_cast<std::ptrdiff_t>(start - from),
               z.samples().end());
  }
  return IqBuffer(std::move(out), x.sample_rate_hz());
}

void predistort(const ExperimentConfig& cfg, const fs::path& coeffs, const fs::path& in_iq,
                const fs::path& out_iq, unsigned workers) {
  if (workers < 1) throw ConfigError("--workers must be >= 1");
  const auto [aph, h] = load_coefficients(cfg, coeffs);
  const IqBuffer x = read_iq(in_iq, cfg.sample_rate_hz);
  write_iq(out_iq, predistort_streaming(x, h, aph, workers));
}

void simulate(const ExperimentConfig& cfg, const fs::path& in_iq, const fs::path& out_iq,
              const std::optional<fs::path>& with_dpd, unsigned workers) {
  if (workers < 1) throw ConfigError("--workers must be >= 1");
  IqBuffer x = read_iq(in_iq, cfg.sample_rate_hz);
  if (with_dpd) {
    const auto [aph, h] = load_coefficients(cfg, *with_dpd);
    x = predistort_streaming(x, h, aph, workers);
  }
  write_iq(out_iq, run_tx_chain(x, cfg.chain()));
}

void evaluate(const ExperimentConfig& cfg, const fs::path& in_a,
              const std::optional<fs::path>& in_b, const std::optional<fs::path>& out,
              std::ostream& stream) {
  const Spectrum a = welch_psd(read_iq(in_a, cfg.sample_rate_hz), cfg.nfft, cfg.overlap);
  std::ofstream file;
  if (out) {
    file.open(*out, std::ios::trunc);
    if (!file) throw IoError("cannot open '" + out->string() + "' for writing");
  }
  std::ostream& sink = out ? static_cast<std::ostream&>(file) : stream;
  if (!in_b) {
    write_spectrum_csv(sink, a);
    return;
  }
  if (cfg.bands.empty()) throw ConfigError("config: 'analysis.bands' is required for suppression");
  const Spectrum b = welch_psd(read_iq(*in_b, cfg.sample_rate_hz), cfg.nfft, cfg.overlap);
  sink << suppression_report(a, b, cfg.bands).dump(2) << '\n';
}

std::vector<BenchResult> bench(const ExperimentConfig& cfg, const BenchArgs& args,
                               const fs::path& out_csv) {
  AphConfig aph = cfg.dpd;
  CoefficientVector h;
  if (args.coeffs) {
    std::tie(aph, h) = load_coefficients(cfg, *args.coeffs);
  } else {
    // Throughput does not depend on coefficient values.
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> g(0.0, 0.1);
    h = CoefficientVector::zeros(aph);
    for (cf64& v : h.values) v = {g(rng), g(rng)};
    h.values[0] += 1.0;
  }

  BenchOptions opts;
  opts.n_samples = args.n_samples;
  opts.workers = args.workers;
  opts.chunk_len = args.chunk_len;
  opts.repeats = args.repeats;
  opts.seed = cfg.seed;
  opts.kernel = args.kernel;
  const std::vector<BenchResult> rows = run_bench(aph, h, opts);

  std::ofstream out(out_csv, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + out_csv.string() + "' for writing");
  write_bench_csv(out, rows);
  write_json_file(fs::path(out_csv.string() + ".host.json"), host_metadata(rows));
  return rows;
}

}  // namespace dpd::cmd
