#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dpd/analysis.hpp"
#include "dpd/error.hpp"
#include "dpd/impairments.hpp"
#include "oracles.hpp"

using namespace dpd;

namespace {

const PaModel kPa = PaModel::reference();

bool close(cf64 a, cf64 b, double tol) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("pa_evaluate spot values") {
  CHECK(pa_evaluate(0.0, kPa) == cf64(0.0));
  CHECK(close(pa_evaluate(1.0, kPa), cf64(0.4219, 0.0400), 1e-12));
  CHECK(close(pa_evaluate(0.1, kPa), cf64(0.0953783, -0.0018634), 1e-7));
}

TEST_CASE("pa_evaluate matches the expanded polynomial") {
  for (const cf64 x : oracle::random_cf64(200, 1, 0.6))
    CHECK(close(pa_evaluate(x, kPa), oracle::pa(x, kPa.alpha1, kPa.alpha3, kPa.alpha5),
                1e-14 * (1.0 + std::abs(x))));
}

TEST_CASE("pa_evaluate is odd and memoryless") {
  for (const cf64 x : oracle::random_cf64(100, 2, 0.7)) CHECK(pa_evaluate(-x, kPa) == -pa_evaluate(x, kPa));

  const IqBuffer x = oracle::random_buffer(64, 3);
  std::vector<std::size_t> perm(x.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = (i * 37 + 11) % perm.size();
  std::vector<cf32> shuffled(x.size());
  for (std::size_t i = 0; i < perm.size(); ++i) shuffled[i] = x[perm[i]];
  const TxChain chain{IqModulatorModel{1.0, 5.0, {0.01, 0.0}}, kPa};
  const IqBuffer y = run_tx_chain(x, chain);
  const IqBuffer ys = run_tx_chain(IqBuffer(shuffled, x.sample_rate_hz()), chain);
  for (std::size_t i = 0; i < perm.size(); ++i) CHECK(ys[i] == y[perm[i]]);
}

TEST_CASE("small-signal gain approaches |alpha1|") {
  for (double ph : {0.0, 1.0, 2.5}) {
    const cf64 x = std::polar(1e-3, ph);
    CHECK(std::abs(pa_evaluate(x, kPa)) / std::abs(x) ==
          doctest::Approx(std::abs(kPa.alpha1)).epsilon(1e-3));
  }
}

TEST_CASE("PaModel validation") {
  CHECK_THROWS_AS(PaModel::linear(0.0).validate(), ConfigError);
  CHECK_THROWS_AS((PaModel{{1.0, 0.0}, {std::nan(""), 0.0}, {}}).validate(), ConfigError);
  CHECK_NOTHROW(kPa.validate());
}

TEST_CASE("iq_modulate") {
  SUBCASE("ideal is identity") {
    for (const cf64 x : oracle::random_cf64(50, 4)) CHECK(iq_modulate(x, IqModulatorModel::ideal()) == x);
    CHECK(IqModulatorModel::ideal().k1() == cf64(1.0));
    CHECK(IqModulatorModel::ideal().k2() == cf64(0.0));
  }
  SUBCASE("leakage only") {
    CHECK(iq_modulate(0.0, IqModulatorModel{0.0, 0.0, {0.05, 0.0}}) == cf64(0.05, 0.0));
  }
  SUBCASE("imbalance equals the I/Q branch form") {
    // K1 x + K2 x* == I + g e^{j phi} (j Q): the quadrature path carries the error.
    const IqModulatorModel m{1.0, 5.0, {0.003, -0.002}};
    const double g = std::pow(10.0, 1.0 / 20.0);
    const double phi = 5.0 * std::numbers::pi / 180.0;
    auto branch = [&](cf64 x) {
      return x.real() + g * std::polar(1.0, phi) * cf64(0.0, x.imag()) + cf64(0.003, -0.002);
    };
    CHECK(close(iq_modulate(cf64(1.0, 1.0), m), branch(cf64(1.0, 1.0)), 1e-14));
    for (const cf64 x : oracle::random_cf64(50, 5)) CHECK(close(iq_modulate(x, m), branch(x), 1e-14));
  }
  SUBCASE("K1 + K2 = 1 without phase error") {
    const IqModulatorModel m{2.0, 0.0, {}};
    CHECK(close(m.k1() + m.k2(), 1.0, 1e-15));
  }
}

TEST_CASE("run_tx_chain") {
  SUBCASE("identity chain") {
    const IqBuffer x = oracle::random_buffer(500, 6);
    CHECK(run_tx_chain(x, TxChain{IqModulatorModel::ideal(), PaModel::linear()}) == x);
  }
  SUBCASE("leakage-only chain on zero input is a constant") {
    const cf64 lo(0.02, -0.01);
    const IqBuffer zero(std::vector<cf32>(64), 1.0);
    const IqBuffer y = run_tx_chain(zero, TxChain{IqModulatorModel{0.0, 0.0, lo}, kPa});
    const cf32 want(oracle::pa(lo, kPa.alpha1, kPa.alpha3, kPa.alpha5));
    for (const cf32 v : y.samples()) CHECK(v == want);
  }
  SUBCASE("two tones at +-f produce IMD3 at +-3f") {
    const std::size_t n = 8192;
    const double fs = 61.44e6;
    const double bin = fs / static_cast<double>(n);
    const double f = 64 * bin;
    std::vector<cf32> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = static_cast<double>(i) / fs;
      v[i] = cf32(static_cast<float>(0.2 * 2.0 * std::cos(2.0 * std::numbers::pi * f * t)), 0.0f);
    }
    const IqBuffer y = run_tx_chain(IqBuffer(v, fs), TxChain{IqModulatorModel::ideal(), kPa});
    const Spectrum s = welch_psd(y, 1024);
    auto at = [&](double freq) { return band_power(s, freq - 2 * s.bin_width_hz(), freq + 2 * s.bin_width_hz()); };
    const double floor = at(4 * f);  // no odd-order product lands on an even multiple
    CHECK(at(f) - at(3 * f) > 0.0);
    CHECK(at(3 * f) - floor > 40.0);
    CHECK(at(-3 * f) - floor > 40.0);
    CHECK(at(5 * f) - floor > 40.0);
  }
  SUBCASE("non-finite output is a divergence error") {
    std::vector<cf32> v{{1e8f, 0.0f}};
    CHECK_THROWS_AS(run_tx_chain(IqBuffer(v, 1.0), TxChain{{}, kPa}), DivergenceError);
  }
}

TEST_CASE("model JSON") {
  const auto j = to_json(kPa);
  CHECK(j.at("alpha1")[0].get<double>() == 0.9490);
  CHECK(j.at("alpha5")[1].get<double>() == -0.0474);
  const auto m = to_json(IqModulatorModel{1.0, 5.0, {0.005, 0.0}});
  CHECK(m.at("gain_imbalance_db").get<double>() == 1.0);
}
