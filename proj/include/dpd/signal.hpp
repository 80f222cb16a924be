#pragma once

#include <cstdint>
#include <span>

#include "dpd/iq_buffer.hpp"

namespace dpd {

/// One component carrier, relative to complex baseband.
struct CarrierSpec {
  double center_offset_hz = 0.0;
  double bandwidth_hz = 0.0;
  double power_db = 0.0;
};

/// Throws ConfigError if the carrier does not fit inside (-fs/2, fs/2).
void validate_carrier(const CarrierSpec& spec, double sample_rate_hz);

/// Random 16-QAM multitone occupying [center - bw/2, center + bw/2].
///
/// The buffer is one periodic multitone: every DFT bin of the n-point grid
/// whose frequency lies within the band carries an independent 16-QAM
/// symbol. This keeps the spectrum strictly band-limited (no symbol-edge
/// sidelobes), with Gaussian-like amplitude statistics (PAPR ~ 10-11 dB).
/// The baseband multitone is normalized to unit mean power, frequency
/// shifted to the carrier offset and then scaled by power_db.
IqBuffer generate_carrier(const CarrierSpec& spec, std::size_t n_samples,
                          double sample_rate_hz, std::uint64_t seed);

/// Sum of frequency-shifted carriers, renormalized to unit mean power.
/// Carrier k uses a seed derived from (seed, k).
IqBuffer compose_multicarrier(std::span<const CarrierSpec> specs,
                              std::size_t n_samples, double sample_rate_hz,
                              std::uint64_t seed);

/// Scales `buf` so its RMS equals `target_rms`.
IqBuffer normalize_power(const IqBuffer& buf, double target_rms);

/// Multiplies by exp(j 2 pi f n / fs); phase accumulated in double.
void frequency_shift(std::span<cf32> xs, double shift_hz, double sample_rate_hz);

/// Derives an independent stream seed; used wherever one seed fans out.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace dpd
