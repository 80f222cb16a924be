#include "dpd/aph.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "dpd/error.hpp"
#include "kernels/aph_kernel.hpp"

namespace dpd {

std::size_t AphConfig::coefficient_count() const {
  return static_cast<std::size_t>(taps.total()) + 1;
}

AphConfig AphConfig::standard() {
  const BranchSets sets = BranchSets::odd(5, 3);
  return make(sets, TapLayout{{5, 5, 5}, {5, 5}}, PolyBasis::plain(sets));
}

AphConfig AphConfig::make(const BranchSets& sets, const TapLayout& taps, const PolyBasis& basis) {
  AphConfig cfg{taps, basis};
  if (!(basis.sets == sets)) throw ConfigError("basis branch sets differ from the configuration");
  cfg.validate();
  return cfg;
}

void AphConfig::validate() const {
  basis.validate();
  const BranchSets& s = basis.sets;
  if (std::max(s.max_main(), s.max_conj()) > 2 * kernel::kMaxPowers - 1)
    throw ConfigError("polynomial order too high (max " +
                      std::to_string(2 * kernel::kMaxPowers - 1) + ")");
  if (taps.main.size() != s.main.size())
    throw ConfigError("taps_main has " + std::to_string(taps.main.size()) + " entries, I_P has " +
                      std::to_string(s.main.size()));
  if (taps.conj.size() != s.conj.size())
    throw ConfigError("taps_conj has " + std::to_string(taps.conj.size()) + " entries, I_Q has " +
                      std::to_string(s.conj.size()));
  for (int t : taps.main)
    if (t < 1) throw ConfigError("taps_main entries must be >= 1");
  for (int t : taps.conj)
    if (t < 1) throw ConfigError("taps_conj entries must be >= 1");
}

CoefficientVector CoefficientVector::zeros(const AphConfig& cfg) {
  return CoefficientVector{std::vector<cf64>(cfg.coefficient_count())};
}

CoefficientVector CoefficientVector::identity(const AphConfig& cfg) {
  if (cfg.sets().main.empty() || cfg.sets().main.front() != 1)
    throw ConfigError("identity predistorter needs a linear main branch");
  CoefficientVector h = zeros(cfg);
  h.values[0] = 1.0;
  return h;
}

void validate_coefficients(const CoefficientVector& h, const AphConfig& cfg) {
  if (h.size() != cfg.coefficient_count())
    throw ConfigError("coefficient vector has " + std::to_string(h.size()) +
                      " entries, configuration needs " + std::to_string(cfg.coefficient_count()));
  for (const cf64& v : h.values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ConfigError("coefficient vector contains a non-finite entry");
}

namespace {

std::vector<std::pair<BranchKey, int>> branch_layout(const AphConfig& cfg) {
  std::vector<std::pair<BranchKey, int>> out;
  for (std::size_t i = 0; i < cfg.sets().main.size(); ++i)
    out.push_back({BranchKey{cfg.sets().main[i], false}, cfg.taps.main[i]});
  for (std::size_t i = 0; i < cfg.sets().conj.size(); ++i)
    out.push_back({BranchKey{cfg.sets().conj[i], true}, cfg.taps.conj[i]});
  return out;
}

std::string describe(const BranchKey& key) {
  return std::string(key.conjugate ? "conjugate" : "main") + " branch " + std::to_string(key.order);
}

}  // namespace

CoefficientVector pack_coefficients(const std::map<BranchKey, std::vector<cf64>>& per_branch,
                                    cf64 constant, const AphConfig& cfg) {
  const auto layout = branch_layout(cfg);
  if (per_branch.size() != layout.size())
    throw ConfigError("expected " + std::to_string(layout.size()) + " branches, got " +
                      std::to_string(per_branch.size()));
  CoefficientVector h;
  h.values.reserve(cfg.coefficient_count());
  for (const auto& [key, taps] : layout) {
    auto it = per_branch.find(key);
    if (it == per_branch.end()) throw ConfigError("missing " + describe(key));
    if (it->second.size() != static_cast<std::size_t>(taps))
      throw ConfigError(describe(key) + " has " + std::to_string(it->second.size()) +
                        " taps, configuration needs " + std::to_string(taps));
    h.values.insert(h.values.end(), it->second.begin(), it->second.end());
  }
  h.values.push_back(constant);
  return h;
}

UnpackedCoefficients unpack_coefficients(const CoefficientVector& h, const AphConfig& cfg) {
  validate_coefficients(h, cfg);
  UnpackedCoefficients out;
  std::size_t pos = 0;
  for (const auto& [key, taps] : branch_layout(cfg)) {
    out.taps[key].assign(h.values.begin() + static_cast<std::ptrdiff_t>(pos),
                         h.values.begin() + static_cast<std::ptrdiff_t>(pos + taps));
    pos += static_cast<std::size_t>(taps);
  }
  out.constant = h.constant();
  return out;
}

ChunkPlan make_chunk_plan(const AphConfig& cfg, std::size_t chunk_len, unsigned n_workers,
                          KernelIsa kernel) {
  ChunkPlan plan{chunk_len, static_cast<std::size_t>(cfg.halo()), n_workers, kernel};
  validate_plan(plan, cfg);
  return plan;
}

void validate_plan(const ChunkPlan& plan, const AphConfig& cfg) {
  if (plan.n_workers < 1) throw ConfigError("chunk plan needs at least one worker");
  if (plan.halo != static_cast<std::size_t>(cfg.halo()))
    throw ConfigError("chunk plan halo " + std::to_string(plan.halo) + " != max taps - 1 (" +
                      std::to_string(cfg.halo()) + ")");
  if (plan.chunk_len < 1 || plan.chunk_len <= plan.halo)
    throw ConfigError("chunk_len " + std::to_string(plan.chunk_len) + " must exceed the halo (" +
                      std::to_string(plan.halo) + ")");
}

cf32 predistort_sample(std::span<const cf32> history_window, const CoefficientVector& h,
                       const AphConfig& cfg) {
  const kernel::Plan plan = kernel::make_plan(cfg, h);
  const std::size_t L = static_cast<std::size_t>(cfg.max_taps());
  if (history_window.size() != L)
    throw ConfigError("history window has " + std::to_string(history_window.size()) +
                      " samples, expected " + std::to_string(L));

  float acc_re = 0.0f;
  float acc_im = 0.0f;
  float pw[kernel::kMaxPowers];
  for (const kernel::Branch& br : plan.branches) {
    for (int k = 0; k < br.taps; ++k) {
      const cf32 x = history_window[L - 1 - static_cast<std::size_t>(k)];
      float pr, pi;
      kernel::powers(plan, x.real(), x.imag(), pw);
      kernel::branch_value(br, x.real(), x.imag(), pw, pr, pi);
      kernel::mac(br.h_re[k], br.h_im[k], pr, pi, acc_re, acc_im);
    }
  }
  return {acc_re + plan.c_re, acc_im + plan.c_im};
}

IqBuffer predistort_serial(const IqBuffer& x, const CoefficientVector& h, const AphConfig& cfg) {
  const kernel::Plan plan = kernel::make_plan(cfg, h);
  std::vector<cf32> out(x.size());
  kernel::run(plan, KernelIsa::scalar, x.samples(), 0, x.size(), out.data());
  return IqBuffer(std::move(out), x.sample_rate_hz());
}

IqBuffer predistort_parallel(const IqBuffer& x, const CoefficientVector& h, const AphConfig& cfg,
                             const ChunkPlan& plan) {
  validate_plan(plan, cfg);
  const kernel::Plan kplan = kernel::make_plan(cfg, h);
  const KernelIsa isa = resolve_kernel(plan.kernel);

  const std::size_t n = x.size();
  std::vector<cf32> out(n);
  const std::size_t n_chunks = (n + plan.chunk_len - 1) / plan.chunk_len;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
        const std::size_t begin = c * plan.chunk_len;
        const std::size_t end = std::min(n, begin + plan.chunk_len);
        kernel::run(kplan, isa, x.samples(), begin, end, out.data());
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  const std::size_t n_threads = std::min<std::size_t>(plan.n_workers, n_chunks);
  {
    std::vector<std::jthread> threads;
    for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
  return IqBuffer(std::move(out), x.sample_rate_hz());
}

namespace {

nlohmann::json complex_json(cf64 v) { return nlohmann::json::array({v.real(), v.imag()}); }

cf64 complex_from(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(std::string(what) + ": expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

nlohmann::json to_json(const CoefficientVector& h, const AphConfig& cfg) {
  validate_coefficients(h, cfg);
  nlohmann::json hs = nlohmann::json::array();
  for (std::size_t i = 0; i + 1 < h.size(); ++i) hs.push_back(complex_json(h.values[i]));
  return {
      {"h", hs},
      {"c", complex_json(h.constant())},
      {"layout",
       {{"I_P", cfg.sets().main},
        {"I_Q", cfg.sets().conj},
        {"taps_main", cfg.taps.main},
        {"taps_conj", cfg.taps.conj},
        {"basis", to_json(cfg.basis)}}},
  };
}

std::pair<AphConfig, CoefficientVector> coefficients_from_json(const nlohmann::json& j) {
  try {
    const nlohmann::json& layout = j.at("layout");
    BranchSets sets{layout.at("I_P").get<std::vector<int>>(),
                    layout.at("I_Q").get<std::vector<int>>()};
    TapLayout taps{layout.at("taps_main").get<std::vector<int>>(),
                   layout.at("taps_conj").get<std::vector<int>>()};
    PolyBasis basis = poly_basis_from_json(layout.at("basis"));
    AphConfig cfg = AphConfig::make(sets, taps, basis);

    CoefficientVector h;
    for (const auto& v : j.at("h")) h.values.push_back(complex_from(v, "h"));
    h.values.push_back(complex_from(j.at("c"), "c"));
    validate_coefficients(h, cfg);
    return {cfg, h};
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed coefficient document: ") + e.what());
  }
}

}  // namespace dpd
