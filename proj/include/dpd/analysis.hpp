#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "dpd/iq_buffer.hpp"

namespace dpd {

enum class Window { hann };

/// Two-sided PSD, DC in the middle, frequencies spanning (-fs/2, fs/2].
struct Spectrum {
  std::vector<double> freqs_hz;
  std::vector<double> psd_db;  // dB full scale per Hz
  std::size_t nfft = 0;
  Window window = Window::hann;
  double overlap_fraction = 0.0;
  std::size_t segments = 0;
  double sample_rate_hz = 0.0;

  double bin_width_hz() const { return sample_rate_hz / static_cast<double>(nfft); }
};

inline constexpr double kDbFloor = -300.0;

/// Averaged Hann-windowed periodograms, normalized so that
/// sum(psd * bin_width) equals the mean power of x.
Spectrum welch_psd(const IqBuffer& x, std::size_t nfft = 4096, double overlap_fraction = 0.5,
                   Window window = Window::hann);

/// 10 log10 of the power in bins with f_lo <= f < f_hi (f <= f_hi when
/// f_hi is +Nyquist).
double band_power(const Spectrum& s, double f_lo, double f_hi);

using Band = std::array<double, 2>;  // [f_lo, f_hi); closed at +Nyquist

/// band_power(before) - band_power(after), per band.
std::vector<double> suppression(const Spectrum& before, const Spectrum& after,
                                std::span<const Band> bands);

/// 10 log10(sum |test - ref|^2 / sum |ref|^2), floored at kDbFloor.
double nmse_db(std::span<const cf32> reference, std::span<const cf32> test);
double nmse_db(const IqBuffer& reference, const IqBuffer& test);

/// CSV with header `freq_hz,psd_db`.
void write_spectrum_csv(std::ostream& out, const Spectrum& s);

nlohmann::json suppression_report(const Spectrum& before, const Spectrum& after,
                                  std::span<const Band> bands);

}  // namespace dpd
