#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

namespace dpd {

using cf32 = std::complex<float>;
using cf64 = std::complex<double>;

/// Complex baseband samples at a fixed sample rate. Construction validates
/// that the rate is positive and every component is finite.
class IqBuffer {
 public:
  IqBuffer() = default;
  IqBuffer(std::vector<cf32> samples, double sample_rate_hz);

  std::span<const cf32> samples() const noexcept { return samples_; }
  std::span<cf32> mutable_samples() noexcept { return samples_; }
  const std::vector<cf32>& vector() const noexcept { return samples_; }
  std::vector<cf32> release() && { return std::move(samples_); }

  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const cf32& operator[](std::size_t i) const { return samples_[i]; }

  /// Mean of |x|^2, accumulated in double.
  double mean_power() const noexcept;
  double rms() const noexcept;

  friend bool operator==(const IqBuffer&, const IqBuffer&) = default;

 private:
  std::vector<cf32> samples_;
  double sample_rate_hz_ = 1.0;
};

bool all_finite(std::span<const cf32> xs) noexcept;

// Binary I/Q file: little-endian float32, interleaved I,Q,I,Q,...
// Sidecar: "<path>.json" with {"sample_rate_hz", "n_samples"}.

std::filesystem::path sidecar_path(const std::filesystem::path& iq_path);

void write_iq(const std::filesystem::path& path, const IqBuffer& buf,
              bool with_sidecar = true);

/// Reads a binary I/Q file. The sample rate comes from the sidecar when one
/// exists, otherwise from `fallback_rate_hz`; if neither is available an
/// IoError is raised.
IqBuffer read_iq(const std::filesystem::path& path,
                 std::optional<double> fallback_rate_hz = std::nullopt);

}  // namespace dpd
