#include <doctest.h>

#include <algorithm>
#include <random>

#include "dpd/aph.hpp"
#include "dpd/error.hpp"
#include "oracles.hpp"

using namespace dpd;

namespace {

std::vector<KernelIsa> vector_kernels() {
  std::vector<KernelIsa> out;
  for (KernelIsa isa : {KernelIsa::avx2, KernelIsa::neon})
    if (kernel_available(isa)) out.push_back(isa);
  return out;
}

AphConfig random_config(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> half(0, 4);
  std::uniform_int_distribution<int> tap(1, 9);
  const int p = 2 * half(rng) + 1;
  const int q = 2 * std::uniform_int_distribution<int>(0, (p - 1) / 2)(rng) + 1;
  const BranchSets sets = BranchSets::odd(p, q);
  TapLayout taps;
  for (std::size_t i = 0; i < sets.main.size(); ++i) taps.main.push_back(tap(rng));
  for (std::size_t i = 0; i < sets.conj.size(); ++i) taps.conj.push_back(tap(rng));
  PolyBasis basis = PolyBasis::plain(sets);
  if (rng() % 2) {
    basis = fit_orthogonal_basis(oracle::random_buffer(2000, rng(), 0.3), sets);
  }
  return AphConfig::make(sets, taps, basis);
}

}  // namespace

TEST_CASE("vector kernels are bit-identical to the scalar kernel") {
  const auto isas = vector_kernels();
  if (isas.empty()) MESSAGE("no vector kernel available on this host; scalar only");
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 40; ++trial) {
    const AphConfig cfg = random_config(rng);
    const CoefficientVector h = oracle::random_coefficients(cfg, rng(), 0.5);
    const std::size_t n = std::vector<std::size_t>{0, 1, 7, 8, 9, 15, 16, 17, 2047, 2048, 2049,
                                                   4103, 6000}[static_cast<std::size_t>(trial) % 13];
    const IqBuffer x = oracle::random_buffer(n, rng(), 0.4);
    const IqBuffer ref = predistort_serial(x, h, cfg);
    const std::size_t halo = static_cast<std::size_t>(cfg.halo());
    for (KernelIsa isa : isas) {
      for (std::size_t chunk : {halo + 1, halo + 9, std::size_t{1000}, std::max(n, halo) + 1}) {
        CAPTURE(trial);
        CAPTURE(to_string(isa));
        CAPTURE(chunk);
        CHECK(predistort_parallel(x, h, cfg, make_chunk_plan(cfg, chunk, 2, isa)) == ref);
      }
    }
    CHECK(predistort_parallel(x, h, cfg, make_chunk_plan(cfg, halo + 3, 3, KernelIsa::scalar)) ==
          ref);
  }
}

TEST_CASE("vector kernels agree on extreme amplitudes") {
  const AphConfig cfg = AphConfig::standard();
  const CoefficientVector h = oracle::random_coefficients(cfg, 3);
  std::vector<cf32> v;
  for (float a : {0.0f, -0.0f, 1e-20f, 1e-3f, 0.5f, 1.0f, 3.0f, 20.0f})
    for (int k = 0; k < 7; ++k) v.emplace_back(a * (k % 2 ? 1.0f : -1.0f), a * 0.25f * k);
  const IqBuffer x(v, 1.0);
  const IqBuffer ref = predistort_serial(x, h, cfg);
  for (KernelIsa isa : vector_kernels())
    CHECK(predistort_parallel(x, h, cfg, make_chunk_plan(cfg, 100, 1, isa)) == ref);
}

TEST_CASE("requesting an unavailable kernel is a configuration error") {
  const AphConfig cfg = AphConfig::standard();
  for (KernelIsa isa : {KernelIsa::avx2, KernelIsa::neon}) {
    if (kernel_available(isa)) continue;
    const IqBuffer x = oracle::random_buffer(10, 1);
    CHECK_THROWS_AS(predistort_parallel(x, CoefficientVector::identity(cfg), cfg,
                                        make_chunk_plan(cfg, 8, 1, isa)),
                    ConfigError);
  }
}
