#include <doctest.h>

#include <cstdlib>

#include "dpd/aph.hpp"
#include "dpd/error.hpp"
#include "dpd/ila.hpp"
#include "oracles.hpp"

using namespace dpd;

namespace {

AphConfig orthogonal_standard(std::uint64_t seed = 1) {
  AphConfig cfg = AphConfig::standard();
  WaveformSource w;
  w.carriers = {{0.0, 10e6, 0.0}};
  cfg.basis = fit_orthogonal_basis(w.make(5000, seed), cfg.sets());
  return cfg;
}

IqBuffer zero_prefixed(const IqBuffer& x, std::size_t pad) {
  std::vector<cf32> v(pad, cf32{});
  v.insert(v.end(), x.samples().begin(), x.samples().end());
  return IqBuffer(std::move(v), x.sample_rate_hz());
}

}  // namespace

TEST_CASE("standard layout has 26 coefficients") {
  const AphConfig cfg = AphConfig::standard();
  CHECK(cfg.sets().main == std::vector<int>{1, 3, 5});
  CHECK(cfg.sets().conj == std::vector<int>{1, 3});
  CHECK(cfg.coefficient_count() == 26);
  CHECK(cfg.max_taps() == 5);
  CHECK(cfg.halo() == 4);
}

TEST_CASE("predistort_sample: identity and constant-only coefficients") {
  const AphConfig cfg = AphConfig::standard();
  const std::vector<cf32> window{{0.1f, 0.2f}, {0.3f, -0.1f}, {-0.2f, 0.05f}, {0.0f, 0.4f},
                                 {0.25f, -0.35f}};
  CHECK(predistort_sample(window, CoefficientVector::identity(cfg), cfg) == window.back());

  CoefficientVector c_only = CoefficientVector::zeros(cfg);
  c_only.values.back() = cf64(0.01, -0.02);
  CHECK(predistort_sample(window, c_only, cfg) == cf32(0.01f, -0.02f));
}

TEST_CASE("predistort_sample matches the double-precision model") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const AphConfig cfg = seed % 2 ? AphConfig::standard() : orthogonal_standard(seed);
    const CoefficientVector h = oracle::random_coefficients(cfg, seed + 10);
    const IqBuffer x = oracle::random_buffer(64, seed + 20);
    const auto want = oracle::aph(oracle::widen(x.samples()), h, cfg);
    std::vector<cf64> got;
    for (std::size_t n = 4; n < x.size(); ++n)
      got.push_back(cf64(predistort_sample(x.samples().subspan(n - 4, 5), h, cfg)));
    CHECK(oracle::rel_err(got, {want.begin() + 4, want.end()}) < 1e-5);
  }
}

TEST_CASE("predistort_sample rejects bad inputs") {
  const AphConfig cfg = AphConfig::standard();
  const std::vector<cf32> short_window(4);
  CHECK_THROWS_AS(predistort_sample(short_window, CoefficientVector::identity(cfg), cfg),
                  ConfigError);
  const std::vector<cf32> window(5);
  CoefficientVector h = CoefficientVector::identity(cfg);
  h.values.pop_back();
  CHECK_THROWS_AS(predistort_sample(window, h, cfg), ConfigError);
  h = CoefficientVector::identity(cfg);
  h.values[3] = cf64(std::nan(""), 0.0);
  CHECK_THROWS_AS(predistort_sample(window, h, cfg), ConfigError);
}

TEST_CASE("predistort_serial: empty, identity and impulse response") {
  const AphConfig cfg = AphConfig::standard();
  CHECK(predistort_serial(IqBuffer({}, 1.0), CoefficientVector::identity(cfg), cfg).empty());

  const IqBuffer x = oracle::random_buffer(1000, 3);
  CHECK(predistort_serial(x, CoefficientVector::identity(cfg), cfg) == x);

  // Plain basis: every branch maps 1 to 1, so the impulse response at lag k is
  // the sum of the k-th taps of all branches, plus c everywhere.
  const CoefficientVector h = oracle::random_coefficients(cfg, 5);
  std::vector<cf32> imp(12, cf32{});
  imp[0] = cf32(1.0f, 0.0f);
  const IqBuffer y = predistort_serial(IqBuffer(imp, 1.0), h, cfg);
  for (std::size_t k = 0; k < 12; ++k) {
    cf64 want = h.constant();
    if (k < 5)
      for (std::size_t b = 0; b < 5; ++b) want += h.values[b * 5 + k];
    CHECK(std::abs(cf64(y[k]) - want) < 1e-5 * (1.0 + std::abs(want)));
  }
}

TEST_CASE("predistort_serial matches the double-precision model") {
  const AphConfig cfg = orthogonal_standard(7);
  const CoefficientVector h = oracle::random_coefficients(cfg, 8);
  const IqBuffer x = oracle::random_buffer(3000, 9);
  const IqBuffer y = predistort_serial(x, h, cfg);
  CHECK(oracle::rel_err(oracle::widen(y.samples()), oracle::aph(oracle::widen(x.samples()), h, cfg)) <
        1e-5);
}

TEST_CASE("predistort_serial equals a per-sample loop over zero-prefixed windows") {
  const AphConfig cfg = orthogonal_standard(2);
  const CoefficientVector h = oracle::random_coefficients(cfg, 3);
  const IqBuffer x = oracle::random_buffer(500, 4);
  const IqBuffer padded = zero_prefixed(x, 4);
  const IqBuffer y = predistort_serial(x, h, cfg);
  for (std::size_t n = 0; n < x.size(); ++n)
    CHECK(y[n] == predistort_sample(padded.samples().subspan(n, 5), h, cfg));
}

TEST_CASE("zero history before the stream start") {
  const AphConfig cfg = orthogonal_standard(5);
  const CoefficientVector h = oracle::random_coefficients(cfg, 6);
  const IqBuffer x = oracle::random_buffer(100, 7);
  const IqBuffer y = predistort_serial(x, h, cfg);
  const IqBuffer yp = predistort_serial(zero_prefixed(x, 4), h, cfg);
  for (std::size_t n = 0; n < x.size(); ++n) CHECK(y[n] == yp[n + 4]);
}

TEST_CASE("causality: changing x_m leaves earlier outputs untouched") {
  const AphConfig cfg = orthogonal_standard(3);
  const CoefficientVector h = oracle::random_coefficients(cfg, 4);
  const IqBuffer x = oracle::random_buffer(200, 5);
  const IqBuffer y = predistort_serial(x, h, cfg);
  for (std::size_t m : {0u, 1u, 57u, 199u}) {
    std::vector<cf32> v = x.vector();
    v[m] += cf32(0.1f, -0.05f);
    const IqBuffer y2 = predistort_serial(IqBuffer(v, x.sample_rate_hz()), h, cfg);
    for (std::size_t n = 0; n < m; ++n) CHECK(y2[n] == y[n]);
    CHECK_FALSE(y2[m] == y[m]);
    for (std::size_t n = m + 5; n < x.size(); ++n) CHECK(y2[n] == y[n]);
  }
}

TEST_CASE("output is linear in the coefficients") {
  const AphConfig cfg = orthogonal_standard(9);
  const CoefficientVector h1 = oracle::random_coefficients(cfg, 1);
  const CoefficientVector h2 = oracle::random_coefficients(cfg, 2);
  const cf64 a(0.8, 0.3), b(-0.4, 1.1);
  CoefficientVector mix = h1;
  for (std::size_t i = 0; i < mix.size(); ++i) mix.values[i] = a * h1.values[i] + b * h2.values[i];
  const IqBuffer x = oracle::random_buffer(2000, 3);
  const IqBuffer y1 = predistort_serial(x, h1, cfg);
  const IqBuffer y2 = predistort_serial(x, h2, cfg);
  const IqBuffer ym = predistort_serial(x, mix, cfg);
  std::vector<cf64> want(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) want[n] = a * cf64(y1[n]) + b * cf64(y2[n]);
  CHECK(oracle::rel_err(oracle::widen(ym.samples()), want) < 1e-5);
}

TEST_CASE("predistort_parallel is bit-identical to serial over a chunk/worker grid") {
  const AphConfig cfg = orthogonal_standard(11);
  const CoefficientVector h = oracle::random_coefficients(cfg, 12);
  const IqBuffer x = oracle::random_buffer(20011, 13);
  const IqBuffer ref = predistort_serial(x, h, cfg);
  for (std::size_t chunk : {5u, 6u, 7u, 64u, 1000u, 2048u, 4097u, 20011u, 50000u})
    for (unsigned workers : {1u, 2u, 3u, 4u, 8u}) {
      CAPTURE(chunk);
      CAPTURE(workers);
      CHECK(predistort_parallel(x, h, cfg, make_chunk_plan(cfg, chunk, workers)) == ref);
    }
}

TEST_CASE("predistort_parallel: short buffers and unequal taps") {
  AphConfig cfg = AphConfig::make(BranchSets::odd(7, 3), TapLayout{{3, 1, 6, 2}, {4, 1}},
                                  PolyBasis::plain(BranchSets::odd(7, 3)));
  const CoefficientVector h = oracle::random_coefficients(cfg, 14);
  for (std::size_t n : {0u, 1u, 3u, 5u, 6u, 17u, 333u}) {
    const IqBuffer x = oracle::random_buffer(n, 15 + n);
    const IqBuffer ref = predistort_serial(x, h, cfg);
    if (n > 0)
      CHECK(oracle::rel_err(oracle::widen(ref.samples()),
                            oracle::aph(oracle::widen(x.samples()), h, cfg)) < 1e-5);
    for (std::size_t chunk : {6u, 7u, 50u})
      for (unsigned workers : {1u, 3u})
        CHECK(predistort_parallel(x, h, cfg, make_chunk_plan(cfg, chunk, workers)) == ref);
  }
}

TEST_CASE("chunk plans must cover the halo") {
  const AphConfig cfg = AphConfig::standard();
  const IqBuffer x = oracle::random_buffer(100, 1);
  const CoefficientVector h = CoefficientVector::identity(cfg);
  CHECK_THROWS_AS(make_chunk_plan(cfg, 4, 2), ConfigError);
  CHECK_THROWS_AS(make_chunk_plan(cfg, 3, 1), ConfigError);
  CHECK_THROWS_AS(make_chunk_plan(cfg, 100, 0), ConfigError);
  ChunkPlan plan = make_chunk_plan(cfg, 5, 2);
  CHECK(plan.halo == 4);
  plan.chunk_len = 4;
  CHECK_THROWS_AS(predistort_parallel(x, h, cfg, plan), ConfigError);
}

TEST_CASE("pack and unpack coefficients") {
  const AphConfig cfg = AphConfig::standard();
  const CoefficientVector h = oracle::random_coefficients(cfg, 21);
  const UnpackedCoefficients u = unpack_coefficients(h, cfg);
  CHECK(u.taps.size() == 5);
  CHECK(u.taps.at({5, false}).size() == 5);
  CHECK(u.taps.at({3, true})[2] == h.values[22]);
  CHECK(u.taps.at({1, false})[0] == h.values[0]);
  CHECK(u.constant == h.values[25]);
  const CoefficientVector back = pack_coefficients(u.taps, u.constant, cfg);
  CHECK(back.size() == 26);
  CHECK(back == h);

  auto wrong = u.taps;
  wrong[{3, false}].pop_back();
  CHECK_THROWS_AS(pack_coefficients(wrong, 0.0, cfg), ConfigError);
  wrong = u.taps;
  wrong.erase({1, true});
  CHECK_THROWS_AS(pack_coefficients(wrong, 0.0, cfg), ConfigError);
  wrong = u.taps;
  wrong[{7, false}] = std::vector<cf64>(5);
  CHECK_THROWS_AS(pack_coefficients(wrong, 0.0, cfg), ConfigError);
  CoefficientVector short_h = h;
  short_h.values.resize(25);
  CHECK_THROWS_AS(unpack_coefficients(short_h, cfg), ConfigError);
}

TEST_CASE("coefficient JSON round trip") {
  const AphConfig cfg = orthogonal_standard(4);
  const CoefficientVector h = oracle::random_coefficients(cfg, 5);
  const nlohmann::json j = to_json(h, cfg);
  CHECK(j.at("h").size() == 25);
  CHECK(j.at("c").size() == 2);
  const auto [cfg2, h2] = coefficients_from_json(nlohmann::json::parse(j.dump()));
  CHECK(cfg2 == cfg);
  CHECK(h2 == h);
  nlohmann::json bad = j;
  bad["h"].erase(0);
  CHECK_THROWS_AS(coefficients_from_json(bad), ConfigError);
}

TEST_CASE("configuration validation") {
  const BranchSets sets = BranchSets::odd(5, 3);
  CHECK_THROWS_AS(AphConfig::make(sets, TapLayout{{5, 5}, {5, 5}}, PolyBasis::plain(sets)),
                  ConfigError);
  CHECK_THROWS_AS(AphConfig::make(sets, TapLayout{{5, 5, 0}, {5, 5}}, PolyBasis::plain(sets)),
                  ConfigError);
  CHECK_THROWS_AS(AphConfig::make(sets, TapLayout{{5, 5, 5}, {5, 5}},
                                  PolyBasis::plain(BranchSets::odd(3, 3))),
                  ConfigError);
  const BranchSets no_linear{{3, 5}, {1}};
  const AphConfig cfg =
      AphConfig::make(no_linear, TapLayout{{2, 2}, {2}}, PolyBasis::plain(no_linear));
  CHECK_THROWS_AS(CoefficientVector::identity(cfg), ConfigError);
}

TEST_CASE("kernel selection") {
  CHECK(kernel_available(KernelIsa::scalar));
  CHECK(resolve_kernel(KernelIsa::scalar) == KernelIsa::scalar);
  CHECK(kernel_available(resolve_kernel(KernelIsa::automatic)));
  CHECK(kernel_isa_from_string("avx2") == KernelIsa::avx2);
  CHECK(std::string(to_string(KernelIsa::neon)) == "neon");
  CHECK_THROWS_AS(kernel_isa_from_string("sse9"), ConfigError);

  ::setenv("DPD_KERNEL", "scalar", 1);
  CHECK(resolve_kernel(KernelIsa::automatic) == KernelIsa::scalar);
  ::unsetenv("DPD_KERNEL");
}
