#include "dpd/experiment.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "dpd/error.hpp"

namespace dpd {

namespace {

using nlohmann::json;

/// Walks one JSON object, remembering which keys were consumed so the rest
/// can be reported as unknown.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError("config: '" + where() + "' must be an object");
  }

  bool has(const char* key) const { return j_.contains(key); }

  const json& required(const char* key) {
    if (!j_.contains(key)) throw ConfigError("config: missing required key '" + name(key) + "'");
    seen_.insert(key);
    return j_.at(key);
  }

  const json* optional(const char* key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  double number(const char* key, std::optional<double> fallback = std::nullopt) {
    const json* v = fallback ? optional(key) : &required(key);
    if (v == nullptr) return *fallback;
    if (!v->is_number()) throw ConfigError("config: '" + name(key) + "' must be a number");
    return v->get<double>();
  }

  std::uint64_t count(const char* key, std::optional<std::uint64_t> fallback = std::nullopt) {
    const json* v = fallback ? optional(key) : &required(key);
    if (v == nullptr) return *fallback;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
      throw ConfigError("config: '" + name(key) + "' must be a non-negative integer");
    return v->get<std::uint64_t>();
  }

  std::string string(const char* key, const std::string& fallback) {
    const json* v = optional(key);
    if (v == nullptr) return fallback;
    if (!v->is_string()) throw ConfigError("config: '" + name(key) + "' must be a string");
    return v->get<std::string>();
  }

  bool boolean(const char* key, bool fallback) {
    const json* v = optional(key);
    if (v == nullptr) return fallback;
    if (!v->is_boolean()) throw ConfigError("config: '" + name(key) + "' must be true or false");
    return v->get<bool>();
  }

  cf64 complex(const char* key, std::optional<cf64> fallback = std::nullopt) {
    const json* v = fallback ? optional(key) : &required(key);
    if (v == nullptr) return *fallback;
    if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number())
      throw ConfigError("config: '" + name(key) + "' must be [re, im]");
    return {(*v)[0].get<double>(), (*v)[1].get<double>()};
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.contains(key)) throw ConfigError("config: unknown key '" + name(key.c_str()) + "'");
  }

  std::string name(const char* key) const { return path_.empty() ? key : path_ + "." + key; }
  std::string where() const { return path_.empty() ? "<root>" : path_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<int> tap_list(const json& v, std::size_t n, const std::string& key) {
  if (v.is_number_integer()) return std::vector<int>(n, v.get<int>());
  if (v.is_array()) {
    std::vector<int> taps;
    for (const auto& t : v) {
      if (!t.is_number_integer()) throw ConfigError("config: '" + key + "' entries must be integers");
      taps.push_back(t.get<int>());
    }
    if (taps.size() != n)
      throw ConfigError("config: '" + key + "' needs " + std::to_string(n) + " entries");
    return taps;
  }
  throw ConfigError("config: '" + key + "' must be an integer or an array");
}

template <typename Fn>
auto wrap(const std::string& key, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    if (what.rfind("config:", 0) == 0) throw;
    throw ConfigError("config: '" + key + "': " + what);
  }
}

}  // namespace

IqBuffer ExperimentConfig::payload() const {
  return normalize_power(compose_multicarrier(carriers, n_samples, sample_rate_hz, seed), drive_rms);
}

ExperimentConfig parse_experiment(const nlohmann::json& j) {
  ExperimentConfig cfg;
  Section root(j, "");
  cfg.sample_rate_hz = root.number("sample_rate_hz");
  if (!(cfg.sample_rate_hz > 0.0)) throw ConfigError("config: 'sample_rate_hz' must be positive");
  cfg.n_samples = root.count("n_samples", 200000);
  if (cfg.n_samples == 0) throw ConfigError("config: 'n_samples' must be positive");
  cfg.seed = root.count("seed", 1);
  cfg.drive_rms = root.number("drive_rms", 0.18);
  if (!(cfg.drive_rms > 0.0)) throw ConfigError("config: 'drive_rms' must be positive");

  const json& carriers = root.required("carriers");
  if (!carriers.is_array() || carriers.empty())
    throw ConfigError("config: 'carriers' must be a non-empty array");
  for (std::size_t i = 0; i < carriers.size(); ++i) {
    Section c(carriers[i], "carriers[" + std::to_string(i) + "]");
    CarrierSpec spec;
    spec.center_offset_hz = c.number("center_offset_hz", 0.0);
    spec.bandwidth_hz = c.number("bandwidth_hz");
    spec.power_db = c.number("power_db", 0.0);
    c.finish();
    wrap(c.where(), [&] { validate_carrier(spec, cfg.sample_rate_hz); return 0; });
    cfg.carriers.push_back(spec);
  }

  if (const json* d = root.optional("dpd")) {
    Section s(*d, "dpd");
    const int p = static_cast<int>(s.count("P", 5));
    const int q = static_cast<int>(s.count("Q", 3));
    if (p % 2 == 0) throw ConfigError("config: 'dpd.P' must be an odd order >= 1");
    if (q % 2 == 0) throw ConfigError("config: 'dpd.Q' must be an odd order >= 1");
    const BranchSets sets = wrap("dpd", [&] {
      BranchSets b = BranchSets::odd(p, q);
      b.validate();
      return b;
    });
    TapLayout taps{std::vector<int>(sets.main.size(), 5), std::vector<int>(sets.conj.size(), 5)};
    if (const json* t = s.optional("taps_main")) taps.main = tap_list(*t, sets.main.size(), "dpd.taps_main");
    if (const json* t = s.optional("taps_conj")) taps.conj = tap_list(*t, sets.conj.size(), "dpd.taps_conj");
    const BasisMode mode =
        wrap("dpd.basis_mode", [&] { return basis_mode_from_string(s.string("basis_mode", "plain")); });
    s.finish();
    PolyBasis basis = PolyBasis::plain(sets);
    basis.mode = mode;  // orthogonal tables are fitted during training
    cfg.dpd = wrap("dpd", [&] {
      AphConfig a{taps, basis};
      a.validate();
      return a;
    });
  }

  cfg.training.seed = cfg.seed;
  if (const json* t = root.optional("training")) {
    Section s(*t, "training");
    cfg.training.n_training_samples = s.count("n_training_samples", 20000);
    cfg.training.iterations = static_cast<int>(s.count("iterations", 3));
    cfg.training.ridge_lambda = s.number("ridge_lambda", 1e-12);
    const std::string src = s.string("basis_source", "feedback");
    if (src == "feedback") cfg.training.basis_source = BasisSource::feedback;
    else if (src == "input") cfg.training.basis_source = BasisSource::input;
    else throw ConfigError("config: 'training.basis_source' must be feedback|input");
    cfg.training.feedback_noise_rms = s.number("feedback_noise_rms", 0.0);
    cfg.training.validation_samples = s.count("validation_samples", 0);
    cfg.training.fresh_waveform = s.boolean("fresh_waveform", false);
    s.finish();
  }

  if (const json* pa = root.optional("pa")) {
    Section s(*pa, "pa");
    cfg.pa.alpha1 = s.complex("alpha1");
    cfg.pa.alpha3 = s.complex("alpha3", cf64{});
    cfg.pa.alpha5 = s.complex("alpha5", cf64{});
    s.finish();
    wrap("pa", [&] { cfg.pa.validate(); return 0; });
  }

  if (const json* m = root.optional("iq_modulator")) {
    Section s(*m, "iq_modulator");
    cfg.iq_modulator.gain_imbalance_db = s.number("gain_imbalance_db", 0.0);
    cfg.iq_modulator.phase_imbalance_deg = s.number("phase_imbalance_deg", 0.0);
    cfg.iq_modulator.lo_leakage = s.complex("lo_leakage", cf64{});
    s.finish();
    wrap("iq_modulator", [&] { cfg.iq_modulator.validate(); return 0; });
  }

  if (const json* a = root.optional("analysis")) {
    Section s(*a, "analysis");
    cfg.nfft = s.count("nfft", 4096);
    cfg.overlap = s.number("overlap", 0.5);
    if (cfg.nfft < 2) throw ConfigError("config: 'analysis.nfft' must be >= 2");
    if (!(cfg.overlap >= 0.0 && cfg.overlap < 1.0))
      throw ConfigError("config: 'analysis.overlap' must be in [0, 1)");
    if (const json* bands = s.optional("bands")) {
      if (!bands->is_array()) throw ConfigError("config: 'analysis.bands' must be an array");
      for (std::size_t i = 0; i < bands->size(); ++i) {
        const json& b = (*bands)[i];
        const std::string key = "analysis.bands[" + std::to_string(i) + "]";
        if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
          throw ConfigError("config: '" + key + "' must be [f_lo, f_hi]");
        const Band band{b[0].get<double>(), b[1].get<double>()};
        if (!(band[0] < band[1])) throw ConfigError("config: '" + key + "' needs f_lo < f_hi");
        if (band[0] < -cfg.sample_rate_hz / 2 || band[1] > cfg.sample_rate_hz / 2)
          throw ConfigError("config: '" + key + "' lies outside Nyquist (+-" +
                            std::to_string(cfg.sample_rate_hz / 2) + " Hz)");
        cfg.bands.push_back(band);
      }
    }
    s.finish();
  }
  root.finish();

  if (const char* env = std::getenv("DPD_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("DPD_SEED must be a non-negative integer, got '") + env + "'");
    }
    cfg.training.seed = cfg.seed;
  }
  wrap("training", [&] { cfg.training.validate(cfg.dpd); return 0; });
  return cfg;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << j.dump(2) << '\n';
  if (!out) throw IoError("short write to '" + path.string() + "'");
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return parse_experiment(read_json_file(path));
}

}  // namespace dpd
