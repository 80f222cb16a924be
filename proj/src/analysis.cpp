#include "dpd/analysis.hpp"

#include <cmath>
#include <numbers>
#include <ostream>

#include "dpd/error.hpp"
#include "fft.hpp"

namespace dpd {

namespace {

std::vector<double> hann(std::size_t n) {
  // Periodic form: exact for spectral averaging.
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                static_cast<double>(n));
  return w;
}

double to_db(double linear) {
  if (!(linear > 0.0)) return kDbFloor;
  return std::max(kDbFloor, 10.0 * std::log10(linear));
}

}  // namespace

Spectrum welch_psd(const IqBuffer& x, std::size_t nfft, double overlap_fraction, Window window) {
  if (nfft < 2) throw ConfigError("nfft must be at least 2");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0))
    throw ConfigError("overlap fraction must be in [0, 1)");
  if (x.size() < nfft)
    throw InsufficientDataError("PSD needs at least nfft=" + std::to_string(nfft) +
                                " samples, got " + std::to_string(x.size()));

  const std::vector<double> w = hann(nfft);
  double w_energy = 0.0;
  for (double v : w) w_energy += v * v;

  const auto step = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::lround(static_cast<double>(nfft) * (1.0 - overlap_fraction))));
  const std::size_t segments = 1 + (x.size() - nfft) / step;

  detail::Dft dft(nfft, detail::Dft::Direction::forward);
  std::vector<double> acc(nfft, 0.0);
  for (std::size_t s = 0; s < segments; ++s) {
    const std::size_t start = s * step;
    for (std::size_t i = 0; i < nfft; ++i) dft.data()[i] = cf64(x[start + i]) * w[i];
    dft.execute();
    for (std::size_t k = 0; k < nfft; ++k) acc[k] += std::norm(dft.data()[k]);
  }

  Spectrum out;
  out.nfft = nfft;
  out.window = window;
  out.overlap_fraction = overlap_fraction;
  out.segments = segments;
  out.sample_rate_hz = x.sample_rate_hz();
  const double fs = x.sample_rate_hz();
  const double scale = 1.0 / (static_cast<double>(segments) * fs * w_energy);
  const auto n = static_cast<std::int64_t>(nfft);
  for (std::int64_t k = -(n - 1) / 2; k <= n / 2; ++k) {
    out.freqs_hz.push_back(static_cast<double>(k) * fs / static_cast<double>(nfft));
    out.psd_db.push_back(to_db(acc[static_cast<std::size_t>((k + n) % n)] * scale));
  }
  return out;
}

double band_power(const Spectrum& s, double f_lo, double f_hi) {
  if (!(f_lo < f_hi)) throw ConfigError("band must satisfy f_lo < f_hi");
  const double nyquist = s.sample_rate_hz / 2.0;
  if (f_lo < -nyquist || f_hi > nyquist)
    throw ConfigError("band [" + std::to_string(f_lo) + ", " + std::to_string(f_hi) +
                      ") Hz is outside the spectrum span");
  double sum = 0.0;
  std::size_t bins = 0;
  // The top edge is closed at Nyquist so the full span covers every bin.
  const bool closed_top = f_hi == nyquist;
  for (std::size_t i = 0; i < s.freqs_hz.size(); ++i) {
    const double f = s.freqs_hz[i];
    if (f >= f_lo && (f < f_hi || (closed_top && f == f_hi))) {
      sum += std::pow(10.0, s.psd_db[i] / 10.0);
      ++bins;
    }
  }
  if (bins == 0) throw ConfigError("band contains no frequency bins");
  return to_db(sum * s.bin_width_hz());
}

std::vector<double> suppression(const Spectrum& before, const Spectrum& after,
                                std::span<const Band> bands) {
  if (before.freqs_hz != after.freqs_hz)
    throw ConfigError("spectra have different frequency grids");
  std::vector<double> out;
  for (const Band& b : bands) out.push_back(band_power(before, b[0], b[1]) - band_power(after, b[0], b[1]));
  return out;
}

double nmse_db(std::span<const cf32> reference, std::span<const cf32> test) {
  if (reference.size() != test.size())
    throw ConfigError("NMSE inputs differ in length (" + std::to_string(reference.size()) +
                      " vs " + std::to_string(test.size()) + ")");
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    err += std::norm(cf64(test[i]) - cf64(reference[i]));
    ref += std::norm(cf64(reference[i]));
  }
  if (!(ref > 0.0)) throw DegenerateInputError("NMSE reference is all zero");
  return to_db(err / ref);
}

double nmse_db(const IqBuffer& reference, const IqBuffer& test) {
  return nmse_db(reference.samples(), test.samples());
}

void write_spectrum_csv(std::ostream& out, const Spectrum& s) {
  out << "freq_hz,psd_db\n";
  out.precision(10);
  for (std::size_t i = 0; i < s.freqs_hz.size(); ++i)
    out << s.freqs_hz[i] << ',' << s.psd_db[i] << '\n';
}

nlohmann::json suppression_report(const Spectrum& before, const Spectrum& after,
                                  std::span<const Band> bands) {
  const std::vector<double> sup = suppression(before, after, bands);
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < bands.size(); ++i) {
    rows.push_back({{"f_lo_hz", bands[i][0]},
                    {"f_hi_hz", bands[i][1]},
                    {"before_db", band_power(before, bands[i][0], bands[i][1])},
                    {"after_db", band_power(after, bands[i][0], bands[i][1])},
                    {"suppression_db", sup[i]}});
  }
  return {{"nfft", before.nfft},
          {"overlap", before.overlap_fraction},
          {"window", "hann"},
          {"bands", rows}};
}

}  // namespace dpd
