#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "dpd/analysis.hpp"
#include "dpd/aph.hpp"
#include "dpd/ila.hpp"
#include "dpd/impairments.hpp"
#include "dpd/signal.hpp"

namespace dpd {

/// Everything an experiment needs, loaded from one JSON document.
/// See docs/formats.md for the schema.
struct ExperimentConfig {
  double sample_rate_hz = 61.44e6;
  std::size_t n_samples = 200000;
  std::uint64_t seed = 1;
  double drive_rms = 0.18;
  std::vector<CarrierSpec> carriers;
  AphConfig dpd = AphConfig::standard();
  TrainingConfig training;
  PaModel pa = PaModel::reference();
  IqModulatorModel iq_modulator;
  std::size_t nfft = 4096;
  double overlap = 0.5;
  std::vector<Band> bands;

  TxChain chain() const { return {iq_modulator, pa}; }
  WaveformSource waveform() const { return {carriers, sample_rate_hz, drive_rms}; }
  /// Payload waveform: composed carriers at drive_rms, n_samples long.
  IqBuffer payload() const;
};

/// Parses and validates. Unknown keys anywhere are rejected; every error
/// names the offending key path. If DPD_SEED is set it overrides "seed".
ExperimentConfig parse_experiment(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace dpd
