#pragma once

#include <json.hpp>

#include "dpd/iq_buffer.hpp"

namespace dpd {

/// Memoryless odd-order polynomial PA:
/// out = a1 x + a3 |x|^2 x + a5 |x|^4 x.
struct PaModel {
  cf64 alpha1{1.0, 0.0};
  cf64 alpha3{};
  cf64 alpha5{};

  /// Default fifth-order model of a compressing PA.
  static PaModel reference() {
    return {{0.9490, -0.0197}, {0.4885, 0.1071}, {-1.0156, -0.0474}};
  }
  static PaModel linear(cf64 gain = 1.0) { return {gain, {}, {}}; }

  void validate() const;
};

cf64 pa_evaluate(cf64 x, const PaModel& pa);

/// I/Q modulator with gain/phase imbalance and LO leakage:
/// out = K1 x + K2 conj(x) + lo_leakage,
/// K1 = (1 + g e^{j phi}) / 2, K2 = (1 - g e^{j phi}) / 2, g = 10^(dB/20).
struct IqModulatorModel {
  double gain_imbalance_db = 0.0;
  double phase_imbalance_deg = 0.0;
  cf64 lo_leakage{};

  static IqModulatorModel ideal() { return {}; }

  cf64 k1() const;
  cf64 k2() const;
  void validate() const;
};

cf64 iq_modulate(cf64 x, const IqModulatorModel& m);

/// Modulator followed by the PA.
struct TxChain {
  IqModulatorModel modulator;
  PaModel pa;
};

/// Per-sample pa_evaluate(iq_modulate(x)), computed in double.
IqBuffer run_tx_chain(const IqBuffer& x, const TxChain& chain);

nlohmann::json to_json(const PaModel& pa);
nlohmann::json to_json(const IqModulatorModel& m);

}  // namespace dpd
