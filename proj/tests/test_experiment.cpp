#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "dpd/error.hpp"
#include "dpd/experiment.hpp"

using namespace dpd;
using nlohmann::json;

namespace {

const std::filesystem::path kConfigs = DPD_CONFIG_DIR;

json minimal() {
  return {{"sample_rate_hz", 61.44e6}, {"carriers", json::array({{{"bandwidth_hz", 10e6}}})}};
}

std::string error_of(const json& j) {
  try {
    (void)parse_experiment(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool mentions(const std::string& msg, const std::string& key) {
  return msg.find(key) != std::string::npos;
}

// Restores DPD_SEED on scope exit.
struct SeedEnv {
  explicit SeedEnv(const char* value) { ::setenv("DPD_SEED", value, 1); }
  ~SeedEnv() { ::unsetenv("DPD_SEED"); }
};

}  // namespace

TEST_CASE("shipped configs load") {
  const ExperimentConfig sc = load_experiment(kConfigs / "single_carrier.json");
  CHECK(sc.sample_rate_hz == 61.44e6);
  CHECK(sc.carriers.size() == 1);
  CHECK(sc.bands.size() == 2);
  CHECK(sc.dpd.coefficient_count() == 26);
  CHECK(sc.dpd.basis.mode == BasisMode::orthogonal);
  CHECK(sc.pa.alpha1 == PaModel::reference().alpha1);
  CHECK(sc.pa.alpha5 == PaModel::reference().alpha5);
  CHECK(sc.iq_modulator.gain_imbalance_db == 1.0);
  CHECK(sc.training.iterations == 3);

  const ExperimentConfig ca = load_experiment(kConfigs / "ca_3mhz_x2.json");
  REQUIRE(ca.carriers.size() == 2);
  CHECK(ca.carriers[0].center_offset_hz == -5e6);
  CHECK(ca.carriers[1].center_offset_hz == 5e6);
  CHECK(ca.carriers[0].bandwidth_hz == 3e6);
  const IqBuffer p = ca.payload();
  CHECK(p.size() == ca.n_samples);
  CHECK(p.rms() == doctest::Approx(0.18).epsilon(1e-6));
}

TEST_CASE("defaults for omitted sections") {
  const ExperimentConfig c = parse_experiment(minimal());
  CHECK(c.n_samples == 200000);
  CHECK(c.seed == 1);
  CHECK(c.drive_rms == 0.18);
  CHECK(c.dpd.coefficient_count() == 26);
  CHECK(c.dpd.basis.mode == BasisMode::plain);
  CHECK(c.training.ridge_lambda == 1e-12);
  CHECK(!c.training.fresh_waveform);
  CHECK(c.nfft == 4096);
  CHECK(c.bands.empty());
}

TEST_CASE("missing required keys are named") {
  json j = minimal();
  j.erase("sample_rate_hz");
  CHECK(mentions(error_of(j), "sample_rate_hz"));

  j = minimal();
  j.erase("carriers");
  CHECK(mentions(error_of(j), "carriers"));

  j = minimal();
  j["carriers"][0].erase("bandwidth_hz");
  CHECK(mentions(error_of(j), "carriers[0].bandwidth_hz"));

  j = minimal();
  j["pa"] = {{"alpha3", {0.1, 0.0}}};
  CHECK(mentions(error_of(j), "pa.alpha1"));
}

TEST_CASE("unknown keys are rejected with their path") {
  json j = minimal();
  j["sample_rate"] = 1.0;
  CHECK(mentions(error_of(j), "unknown key 'sample_rate'"));

  j = minimal();
  j["training"] = {{"iteratons", 3}};
  CHECK(mentions(error_of(j), "training.iteratons"));

  j = minimal();
  j["dpd"] = {{"P", 5}, {"extra", 1}};
  CHECK(mentions(error_of(j), "dpd.extra"));
}

TEST_CASE("invalid values") {
  json j = minimal();
  j["sample_rate_hz"] = -1.0;
  CHECK(mentions(error_of(j), "sample_rate_hz"));

  j = minimal();
  j["analysis"] = {{"bands", {{-40e6, -20e6}}}};
  CHECK(mentions(error_of(j), "Nyquist"));
  CHECK(mentions(error_of(j), "analysis.bands[0]"));

  j = minimal();
  j["analysis"] = {{"bands", {{5e6, 1e6}}}};
  CHECK(mentions(error_of(j), "analysis.bands[0]"));

  j = minimal();
  j["analysis"] = {{"overlap", 1.0}};
  CHECK(mentions(error_of(j), "analysis.overlap"));

  j = minimal();
  j["carriers"][0]["bandwidth_hz"] = 70e6;
  CHECK(mentions(error_of(j), "carriers[0]"));

  j = minimal();
  j["training"] = {{"fresh_waveform", 1}};
  CHECK(mentions(error_of(j), "training.fresh_waveform"));

  j = minimal();
  j["training"] = {{"basis_source", "model"}};
  CHECK(mentions(error_of(j), "training.basis_source"));

  j = minimal();
  j["dpd"] = {{"basis_mode", "hermite"}};
  CHECK(mentions(error_of(j), "dpd.basis_mode"));

  j = minimal();
  j["dpd"] = {{"P", 4}};
  CHECK(mentions(error_of(j), "dpd.P"));

  j = minimal();
  j["dpd"] = {{"P", 3}, {"Q", 5}};
  CHECK(mentions(error_of(j), "P must be >= Q"));

  j = minimal();
  j["pa"] = {{"alpha1", {1.0}}};
  CHECK(mentions(error_of(j), "pa.alpha1"));
}

TEST_CASE("tap layout forms") {
  json j = minimal();
  j["dpd"] = {{"P", 5}, {"Q", 3}, {"taps_main", {3, 2, 1}}, {"taps_conj", 4}};
  const ExperimentConfig c = parse_experiment(j);
  CHECK(c.dpd.taps.main == std::vector<int>{3, 2, 1});
  CHECK(c.dpd.taps.conj == std::vector<int>{4, 4});
  CHECK(c.dpd.coefficient_count() == 3 + 2 + 1 + 4 + 4 + 1);

  j["dpd"]["taps_main"] = {3, 2};
  CHECK(mentions(error_of(j), "dpd.taps_main"));
}

TEST_CASE("training section") {
  json j = minimal();
  j["training"] = {{"fresh_waveform", true}, {"iterations", 5}, {"basis_source", "input"},
                   {"ridge_lambda", 0.0}};
  const ExperimentConfig c = parse_experiment(j);
  CHECK(c.training.fresh_waveform);
  CHECK(c.training.iterations == 5);
  CHECK(c.training.basis_source == BasisSource::input);
  CHECK(c.training.ridge_lambda == 0.0);
}

TEST_CASE("DPD_SEED overrides the seed") {
  json j = minimal();
  j["seed"] = 7;
  CHECK(parse_experiment(j).seed == 7);
  {
    SeedEnv env("42");
    const ExperimentConfig c = parse_experiment(j);
    CHECK(c.seed == 42);
    CHECK(c.training.seed == 42);
  }
  {
    SeedEnv env("4x");
    CHECK_THROWS_AS(parse_experiment(j), ConfigError);
  }
  CHECK(parse_experiment(j).seed == 7);
}

TEST_CASE("file errors") {
  CHECK_THROWS_AS(load_experiment(kConfigs / "does_not_exist.json"), IoError);
  const auto bad = std::filesystem::temp_directory_path() / "dpd_bad_config.json";
  {
    std::ofstream out(bad);
    out << "{ not json";
  }
  CHECK_THROWS_AS(load_experiment(bad), ConfigError);
  std::filesystem::remove(bad);
}
