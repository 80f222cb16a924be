#include "dpd/signal.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "dpd/error.hpp"
#include "fft.hpp"

namespace dpd {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  // splitmix64 finalizer over the combined value.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void validate_carrier(const CarrierSpec& spec, double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz))
    throw ConfigError("sample_rate_hz must be positive");
  if (!(spec.bandwidth_hz > 0.0) || !std::isfinite(spec.bandwidth_hz))
    throw ConfigError("carrier bandwidth_hz must be positive");
  if (!std::isfinite(spec.center_offset_hz) || !std::isfinite(spec.power_db))
    throw ConfigError("carrier center_offset_hz and power_db must be finite");
  if (std::abs(spec.center_offset_hz) + spec.bandwidth_hz / 2.0 > sample_rate_hz / 2.0)
    throw ConfigError("carrier at " + std::to_string(spec.center_offset_hz) + " Hz with bandwidth " +
                      std::to_string(spec.bandwidth_hz) + " Hz exceeds Nyquist (fs/2 = " +
                      std::to_string(sample_rate_hz / 2.0) + " Hz)");
}

namespace {

void shift_in_place(std::span<cf64> xs, double shift_hz, double fs) {
  if (shift_hz == 0.0) return;
  const double step = 2.0 * std::numbers::pi * shift_hz / fs;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const double phase = std::fmod(step * static_cast<double>(n), 2.0 * std::numbers::pi);
    xs[n] *= cf64(std::cos(phase), std::sin(phase));
  }
}

void scale_to_unit_power(std::span<cf64> xs) {
  double p = 0.0;
  for (const cf64& x : xs) p += std::norm(x);
  p /= static_cast<double>(xs.size());
  if (!(p > 0.0)) throw DegenerateInputError("synthesized waveform has zero power");
  const double g = 1.0 / std::sqrt(p);
  for (cf64& x : xs) x *= g;
}

std::vector<cf64> synthesize(const CarrierSpec& spec, std::size_t n, double fs,
                             std::uint64_t seed) {
  if (n == 0) throw ConfigError("n_samples must be positive");
  validate_carrier(spec, fs);

  detail::Dft idft(n, detail::Dft::Direction::inverse);
  cf64* bins = idft.data();
  std::fill(bins, bins + n, cf64{});

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(0, 3);
  const auto signed_n = static_cast<std::int64_t>(n);
  const double half_bw = spec.bandwidth_hz / 2.0;
  // Visit bins from the most negative frequency upward so the symbol
  // sequence does not depend on FFT bin ordering.
  for (std::int64_t k = -(signed_n - 1) / 2; k <= signed_n / 2; ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (std::abs(f) > half_bw) continue;
    const double re = 2.0 * level(rng) - 3.0;
    const double im = 2.0 * level(rng) - 3.0;
    bins[(k + signed_n) % signed_n] = cf64(re, im);
  }
  idft.execute();

  std::vector<cf64> x(bins, bins + n);
  scale_to_unit_power(x);
  shift_in_place(x, spec.center_offset_hz, fs);
  const double amp = std::pow(10.0, spec.power_db / 20.0);
  for (cf64& v : x) v *= amp;
  return x;
}

std::vector<cf32> to_float(std::span<const cf64> xs) {
  std::vector<cf32> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = cf32(xs[i]);
  return out;
}

}  // namespace

IqBuffer generate_carrier(const CarrierSpec& spec, std::size_t n_samples, double sample_rate_hz,
                          std::uint64_t seed) {
  return IqBuffer(to_float(synthesize(spec, n_samples, sample_rate_hz, seed)), sample_rate_hz);
}

IqBuffer compose_multicarrier(std::span<const CarrierSpec> specs, std::size_t n_samples,
                              double sample_rate_hz, std::uint64_t seed) {
  if (specs.empty()) throw ConfigError("carrier list must not be empty");
  for (const CarrierSpec& s : specs) validate_carrier(s, sample_rate_hz);

  std::vector<cf64> sum(n_samples);
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const std::uint64_t carrier_seed = k == 0 ? seed : derive_seed(seed, k);
    const std::vector<cf64> c = synthesize(specs[k], n_samples, sample_rate_hz, carrier_seed);
    for (std::size_t i = 0; i < n_samples; ++i) sum[i] += c[i];
  }
  scale_to_unit_power(sum);
  return IqBuffer(to_float(sum), sample_rate_hz);
}

IqBuffer normalize_power(const IqBuffer& buf, double target_rms) {
  if (buf.empty()) throw DegenerateInputError("cannot normalize an empty buffer");
  if (!(target_rms > 0.0) || !std::isfinite(target_rms))
    throw ConfigError("target_rms must be positive");
  const double rms = buf.rms();
  if (!(rms > 0.0)) throw DegenerateInputError("cannot normalize an all-zero buffer");
  const double g = target_rms / rms;
  std::vector<cf32> out(buf.size());
  for (std::size_t i = 0; i < buf.size(); ++i) out[i] = cf32(cf64(buf[i]) * g);
  return IqBuffer(std::move(out), buf.sample_rate_hz());
}

void frequency_shift(std::span<cf32> xs, double shift_hz, double sample_rate_hz) {
  const double step = 2.0 * std::numbers::pi * shift_hz / sample_rate_hz;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    const double phase = std::fmod(step * static_cast<double>(n), 2.0 * std::numbers::pi);
    xs[n] = cf32(cf64(xs[n]) * cf64(std::cos(phase), std::sin(phase)));
  }
}

}  // namespace dpd
