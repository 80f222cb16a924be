#include "dpd/ila.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "dpd/analysis.hpp"
#include "dpd/error.hpp"

namespace dpd {

cf64 estimate_gain(std::span<const cf32> pa_in, std::span<const cf32> pa_out) {
  if (pa_in.size() != pa_out.size() || pa_in.empty())
    throw ConfigError("gain estimation needs equal, nonzero lengths");
  cf64 cross{};
  double energy = 0.0;
  for (std::size_t i = 0; i < pa_in.size(); ++i) {
    cross += std::conj(cf64(pa_in[i])) * cf64(pa_out[i]);
    energy += std::norm(cf64(pa_in[i]));
  }
  if (!(energy > 0.0)) throw DegenerateInputError("gain estimation input is all zero");
  return cross / energy;
}

cf64 estimate_gain(const IqBuffer& pa_in, const IqBuffer& pa_out) {
  return estimate_gain(pa_in.samples(), pa_out.samples());
}

LsSolution ls_solve(const Eigen::MatrixXcd& psi, const Eigen::VectorXcd& target,
                    double ridge_lambda) {
  const Eigen::Index rows = psi.rows();
  const Eigen::Index cols = psi.cols();
  if (cols == 0 || rows < cols)
    throw InsufficientDataError("least squares needs rows >= cols (" + std::to_string(rows) +
                                " x " + std::to_string(cols) + ")");
  if (target.size() > rows) throw ConfigError("target is longer than the basis matrix");
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda))
    throw ConfigError("ridge lambda must be finite and non-negative");

  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(rows);
  z.head(target.size()) = target;

  const Eigen::Index aug = ridge_lambda > 0.0 ? cols : 0;
  Eigen::MatrixXcd a(rows + aug, cols);
  Eigen::VectorXcd b = Eigen::VectorXcd::Zero(rows + aug);
  a.topRows(rows) = psi;
  b.head(rows) = z;
  if (aug > 0)
    a.bottomRows(aug) = std::sqrt(ridge_lambda) * Eigen::MatrixXcd::Identity(cols, cols);

  const Eigen::HouseholderQR<Eigen::MatrixXcd> qr(a);
  const Eigen::MatrixXcd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(r).singularValues();
  const double cond_a = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                 : std::numeric_limits<double>::infinity();
  if (ridge_lambda == 0.0 && !(cond_a <= kMaxUnregularizedCondition))
    throw ConditioningError("basis matrix is numerically singular (cond(Psi^H Psi) ~ " +
                                std::to_string(cond_a * cond_a) + "); use a ridge lambda",
                            cond_a * cond_a);

  LsSolution out;
  out.h = qr.solve(b);
  out.residual_norm = (psi * out.h - z).norm();
  out.condition = cond_a * cond_a;
  out.lambda = ridge_lambda;
  return out;
}

LsSolution ls_solve(const BasisMatrix& psi, std::span<const cf32> target, double ridge_lambda) {
  Eigen::VectorXcd z(static_cast<Eigen::Index>(target.size()));
  for (std::size_t i = 0; i < target.size(); ++i) z(static_cast<Eigen::Index>(i)) = cf64(target[i]);
  return ls_solve(psi.values, z, ridge_lambda);
}

void TrainingConfig::validate(const AphConfig& cfg) const {
  if (iterations < 1) throw ConfigError("training.iterations must be >= 1");
  const std::size_t needed = 10 * cfg.coefficient_count();
  if (n_training_samples < needed)
    throw ConfigError("training.n_training_samples must be >= 10x the coefficient count (" +
                      std::to_string(needed) + ")");
  if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda))
    throw ConfigError("training.ridge_lambda must be finite and non-negative");
  if (!(feedback_noise_rms >= 0.0)) throw ConfigError("feedback_noise_rms must be >= 0");
}

IqBuffer WaveformSource::make(std::size_t n, std::uint64_t seed) const {
  return normalize_power(compose_multicarrier(carriers, n, sample_rate_hz, seed), drive_rms);
}

double linearization_nmse_db(const TxChain& chain, const AphConfig& cfg,
                             const CoefficientVector* h, const IqBuffer& x, cf64 gain) {
  const IqBuffer pa_in = h != nullptr ? predistort_serial(x, *h, cfg) : x;
  const IqBuffer pa_out = run_tx_chain(pa_in, chain);
  std::vector<cf32> ref(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) ref[i] = cf32(gain * cf64(x[i]));
  return nmse_db(ref, pa_out.samples());
}

namespace {

constexpr std::uint64_t kValidationStream = 0x7a11da7e;
constexpr std::uint64_t kNoiseStream = 0x0015e;

}  // namespace

TrainingResult ila_train(const TxChain& chain, const AphConfig& cfg_in, const TrainingConfig& tcfg,
                         const WaveformSource& waveform) {
  cfg_in.validate();
  tcfg.validate(cfg_in);
  AphConfig cfg = cfg_in;

  const std::size_t n_val =
      tcfg.validation_samples > 0 ? tcfg.validation_samples : tcfg.n_training_samples;
  const IqBuffer validation = waveform.make(n_val, derive_seed(tcfg.seed, kValidationStream));
  std::mt19937_64 noise_rng(derive_seed(tcfg.seed, kNoiseStream));
  std::normal_distribution<double> noise(0.0, tcfg.feedback_noise_rms / std::sqrt(2.0));

  TrainingResult result;
  std::optional<CoefficientVector> current;
  for (int it = 1; it <= tcfg.iterations; ++it) {
    const IqBuffer y =
        waveform.make(tcfg.n_training_samples, derive_seed(tcfg.seed, tcfg.fresh_waveform ? static_cast<std::uint64_t>(it) : 1u));
    if (it == 1 && cfg.basis.mode == BasisMode::orthogonal)
      cfg.basis = fit_orthogonal_basis(y, cfg.sets());

    const IqBuffer z = current ? predistort_serial(y, *current, cfg) : y;
    const IqBuffer s = run_tx_chain(z, chain);
    if (it == 1) {
      result.report.gain = estimate_gain(z, s);
      result.report.baseline_nmse_db =
          linearization_nmse_db(chain, cfg, nullptr, validation, result.report.gain);
    }
    const cf64 gain = result.report.gain;

    std::vector<cf64> regressor(s.size());
    if (tcfg.basis_source == BasisSource::feedback) {
      for (std::size_t i = 0; i < s.size(); ++i) {
        cf64 v = cf64(s[i]);
        if (tcfg.feedback_noise_rms > 0.0) v += cf64(noise(noise_rng), noise(noise_rng));
        regressor[i] = v / gain;
      }
    } else {
      for (std::size_t i = 0; i < y.size(); ++i) regressor[i] = cf64(y[i]);
    }
    for (const cf64& v : regressor)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw DivergenceError("feedback samples are not finite; drive level too high");

    const BasisMatrix psi = build_basis_matrix(std::span<const cf64>(regressor), cfg.taps, cfg.basis);
    const double lambda =
        tcfg.ridge_lambda * psi.values.squaredNorm() / static_cast<double>(psi.cols());
    const LsSolution sol = ls_solve(psi, z.samples(), lambda);

    CoefficientVector h;
    h.values.assign(sol.h.data(), sol.h.data() + sol.h.size());
    validate_coefficients(h, cfg);

    IterationRecord rec;
    rec.iteration = it;
    rec.coefficients = h;
    rec.residual_norm = sol.residual_norm;
    rec.condition = sol.condition;
    rec.lambda = sol.lambda;
    rec.nmse_db = linearization_nmse_db(chain, cfg, &h, validation, gain);
    result.report.iterations.push_back(std::move(rec));
    current = std::move(h);
  }
  result.config = cfg;
  result.coefficients = *current;
  return result;
}

nlohmann::json to_json(const TrainingReport& report, const AphConfig& cfg) {
  nlohmann::json out = nlohmann::json::array();
  for (const IterationRecord& r : report.iterations) {
    out.push_back({{"iteration", r.iteration},
                   {"nmse_db", r.nmse_db},
                   {"baseline_nmse_db", report.baseline_nmse_db},
                   {"residual_norm", r.residual_norm},
                   {"condition", r.condition},
                   {"lambda", r.lambda},
                   {"gain", {report.gain.real(), report.gain.imag()}},
                   {"coefficients", to_json(r.coefficients, cfg)}});
  }
  return out;
}

}  // namespace dpd
