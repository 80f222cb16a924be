#include "dpd/iq_buffer.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "dpd/error.hpp"

namespace dpd {

static_assert(std::endian::native == std::endian::little,
              "binary I/Q I/O assumes a little-endian host");
static_assert(sizeof(cf32) == 2 * sizeof(float));

IqBuffer::IqBuffer(std::vector<cf32> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
    throw ConfigError("sample_rate_hz must be positive and finite");
  if (!all_finite(samples_)) throw DivergenceError("buffer contains non-finite samples");
}

double IqBuffer::mean_power() const noexcept {
  if (samples_.empty()) return 0.0;
  double acc = 0.0;
  for (const cf32& x : samples_) acc += std::norm(cf64(x));
  return acc / static_cast<double>(samples_.size());
}

double IqBuffer::rms() const noexcept { return std::sqrt(mean_power()); }

bool all_finite(std::span<const cf32> xs) noexcept {
  for (const cf32& x : xs)
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) return false;
  return true;
}

std::filesystem::path sidecar_path(const std::filesystem::path& iq_path) {
  return std::filesystem::path(iq_path.string() + ".json");
}

void write_iq(const std::filesystem::path& path, const IqBuffer& buf, bool with_sidecar) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(buf.samples().data()),
            static_cast<std::streamsize>(buf.size() * sizeof(cf32)));
  if (!out) throw IoError("short write to '" + path.string() + "'");

  if (with_sidecar) {
    std::ofstream meta(sidecar_path(path), std::ios::trunc);
    if (!meta) throw IoError("cannot write sidecar for '" + path.string() + "'");
    meta << nlohmann::json{{"sample_rate_hz", buf.sample_rate_hz()}, {"n_samples", buf.size()}}
                .dump(2)
         << '\n';
  }
}

IqBuffer read_iq(const std::filesystem::path& path, std::optional<double> fallback_rate_hz) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::size_t>(in.tellg());
  in.seekg(0, std::ios::beg);
  if (bytes % sizeof(cf32) != 0)
    throw IoError("'" + path.string() + "' size is not a multiple of 8 bytes");

  std::vector<cf32> samples(bytes / sizeof(cf32));
  in.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(bytes));
  if (!in) throw IoError("short read from '" + path.string() + "'");

  std::optional<double> rate = fallback_rate_hz;
  const auto meta_path = sidecar_path(path);
  if (std::filesystem::exists(meta_path)) {
    std::ifstream meta(meta_path);
    try {
      const auto j = nlohmann::json::parse(meta);
      rate = j.at("sample_rate_hz").get<double>();
      if (j.contains("n_samples") && j.at("n_samples").get<std::size_t>() != samples.size())
        throw IoError("sidecar n_samples disagrees with '" + path.string() + "'");
    } catch (const nlohmann::json::exception& e) {
      throw IoError("malformed sidecar '" + meta_path.string() + "': " + e.what());
    }
  }
  if (!rate) throw IoError("no sample rate for '" + path.string() + "' (missing sidecar)");
  return IqBuffer(std::move(samples), *rate);
}

}  // namespace dpd
