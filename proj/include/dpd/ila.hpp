#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "dpd/aph.hpp"
#include "dpd/impairments.hpp"
#include "dpd/signal.hpp"

namespace dpd {

/// Least-squares complex gain from PA input to PA output:
/// <in, out> / <in, in>.
cf64 estimate_gain(std::span<const cf32> pa_in, std::span<const cf32> pa_out);
cf64 estimate_gain(const IqBuffer& pa_in, const IqBuffer& pa_out);

struct LsSolution {
  Eigen::VectorXcd h;
  double residual_norm = 0.0;     // ||Psi h - z||
  double condition = 0.0;         // condition number of Psi^H Psi (+ lambda I)
  double lambda = 0.0;
};

/// Minimizes ||Psi h - z||^2 + lambda ||h||^2 by Householder QR of the
/// augmented system [Psi; sqrt(lambda) I]. `target` shorter than the matrix
/// is zero-padded. With lambda == 0 a numerically singular Psi raises
/// ConditioningError.
LsSolution ls_solve(const Eigen::MatrixXcd& psi, const Eigen::VectorXcd& target,
                    double ridge_lambda);
LsSolution ls_solve(const BasisMatrix& psi, std::span<const cf32> target, double ridge_lambda);

/// Upper bound on cond(Psi) accepted without regularization.
inline constexpr double kMaxUnregularizedCondition = 1e12;

enum class BasisSource { feedback, input };

struct TrainingConfig {
  std::size_t n_training_samples = 20000;
  int iterations = 3;
  /// Relative ridge: lambda = ridge_lambda * trace(Psi^H Psi) / cols.
  double ridge_lambda = 1e-12;
  std::uint64_t seed = 1;
  BasisSource basis_source = BasisSource::feedback;
  /// RMS of white complex noise added to the feedback samples (0 = off).
  double feedback_noise_rms = 0.0;
  /// Samples in the validation waveform used for the per-iteration NMSE;
  /// 0 means n_training_samples.
  std::size_t validation_samples = 0;
  /// Draw a new training waveform every iteration instead of reusing the
  /// iteration-1 realization.
  bool fresh_waveform = false;

  void validate(const AphConfig& cfg) const;
};

/// Produces training and validation waveforms at the configured drive level.
struct WaveformSource {
  std::vector<CarrierSpec> carriers;
  double sample_rate_hz = 61.44e6;
  double drive_rms = 0.18;

  IqBuffer make(std::size_t n, std::uint64_t seed) const;
};

struct IterationRecord {
  int iteration = 0;
  CoefficientVector coefficients;
  double nmse_db = 0.0;        // PA output vs G * x on the validation waveform
  double residual_norm = 0.0;
  double condition = 0.0;
  double lambda = 0.0;
};

struct TrainingReport {
  cf64 gain{};
  double baseline_nmse_db = 0.0;  // same validation waveform, no predistortion
  std::vector<IterationRecord> iterations;
};

struct TrainingResult {
  AphConfig config;  // orthogonal bases come back fitted
  CoefficientVector coefficients;
  TrainingReport report;
};

/// Indirect learning: iteration i predistorts a fresh waveform with the
/// previous estimate, runs the transmitter, and fits a postdistorter from the
/// gain-normalized feedback back to the predistorter output. An orthogonal
/// basis in `cfg` is refitted on the first training waveform.
TrainingResult ila_train(const TxChain& chain, const AphConfig& cfg, const TrainingConfig& tcfg,
                         const WaveformSource& waveform);

/// NMSE of chain(predistort(x)) against G * x.
double linearization_nmse_db(const TxChain& chain, const AphConfig& cfg,
                             const CoefficientVector* h, const IqBuffer& x, cf64 gain);

nlohmann::json to_json(const TrainingReport& report, const AphConfig& cfg);

}  // namespace dpd
