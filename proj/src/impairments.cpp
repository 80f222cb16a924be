#include "dpd/impairments.hpp"

#include <cmath>
#include <numbers>

#include "dpd/error.hpp"

namespace dpd {

namespace {
bool finite(cf64 v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }
}  // namespace

void PaModel::validate() const {
  if (!finite(alpha1) || !finite(alpha3) || !finite(alpha5))
    throw ConfigError("pa coefficients must be finite");
  if (alpha1 == cf64{}) throw ConfigError("pa.alpha1 must be nonzero");
}

cf64 pa_evaluate(cf64 x, const PaModel& pa) {
  const double r2 = std::norm(x);
  return pa.alpha1 * x + pa.alpha3 * r2 * x + pa.alpha5 * (r2 * r2) * x;
}

cf64 IqModulatorModel::k1() const {
  const double g = std::pow(10.0, gain_imbalance_db / 20.0);
  const double phi = phase_imbalance_deg * std::numbers::pi / 180.0;
  return (1.0 + g * std::polar(1.0, phi)) / 2.0;
}

cf64 IqModulatorModel::k2() const {
  const double g = std::pow(10.0, gain_imbalance_db / 20.0);
  const double phi = phase_imbalance_deg * std::numbers::pi / 180.0;
  return (1.0 - g * std::polar(1.0, phi)) / 2.0;
}

void IqModulatorModel::validate() const {
  if (!std::isfinite(gain_imbalance_db) || !std::isfinite(phase_imbalance_deg) ||
      !finite(lo_leakage))
    throw ConfigError("iq_modulator parameters must be finite");
}

cf64 iq_modulate(cf64 x, const IqModulatorModel& m) {
  return m.k1() * x + m.k2() * std::conj(x) + m.lo_leakage;
}

IqBuffer run_tx_chain(const IqBuffer& x, const TxChain& chain) {
  chain.modulator.validate();
  chain.pa.validate();
  const cf64 k1 = chain.modulator.k1();
  const cf64 k2 = chain.modulator.k2();
  std::vector<cf32> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const cf64 v = cf64(x[i]);
    const cf64 modulated = k1 * v + k2 * std::conj(v) + chain.modulator.lo_leakage;
    out[i] = cf32(pa_evaluate(modulated, chain.pa));
  }
  if (!all_finite(out)) throw DivergenceError("PA output is not finite; drive level too high");
  return IqBuffer(std::move(out), x.sample_rate_hz());
}

nlohmann::json to_json(const PaModel& pa) {
  auto c = [](cf64 v) { return nlohmann::json::array({v.real(), v.imag()}); };
  return {{"alpha1", c(pa.alpha1)}, {"alpha3", c(pa.alpha3)}, {"alpha5", c(pa.alpha5)}};
}

nlohmann::json to_json(const IqModulatorModel& m) {
  return {{"gain_imbalance_db", m.gain_imbalance_db},
          {"phase_imbalance_deg", m.phase_imbalance_deg},
          {"lo_leakage", {m.lo_leakage.real(), m.lo_leakage.imag()}}};
}

}  // namespace dpd
