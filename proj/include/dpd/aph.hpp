#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "dpd/basis.hpp"
#include "dpd/iq_buffer.hpp"

namespace dpd {

/// Augmented parallel Hammerstein predistorter configuration.
struct AphConfig {
  TapLayout taps;
  PolyBasis basis;  // carries the branch sets

  const BranchSets& sets() const { return basis.sets; }
  std::size_t coefficient_count() const;
  int max_taps() const { return taps.max_taps(); }
  int halo() const { return taps.max_taps() - 1; }

  /// P=5, Q=3, five taps on every branch, plain basis.
  static AphConfig standard();
  static AphConfig make(const BranchSets& sets, const TapLayout& taps,
                        const PolyBasis& basis);

  void validate() const;
  friend bool operator==(const AphConfig&, const AphConfig&) = default;
};

/// Stacked [h_1 .. h_P, h~_1 .. h~_Q, c].
struct CoefficientVector {
  std::vector<cf64> values;

  std::size_t size() const { return values.size(); }
  cf64 constant() const { return values.back(); }

  /// h_{1,0} = 1, everything else zero.
  static CoefficientVector identity(const AphConfig& cfg);
  static CoefficientVector zeros(const AphConfig& cfg);

  friend bool operator==(const CoefficientVector&, const CoefficientVector&) = default;
};

/// Throws ConfigError when the length disagrees with cfg or an entry is not
/// finite.
void validate_coefficients(const CoefficientVector& h, const AphConfig& cfg);

struct BranchKey {
  int order = 1;
  bool conjugate = false;
  auto operator<=>(const BranchKey&) const = default;
};

struct UnpackedCoefficients {
  std::map<BranchKey, std::vector<cf64>> taps;
  cf64 constant{};
  friend bool operator==(const UnpackedCoefficients&, const UnpackedCoefficients&) = default;
};

CoefficientVector pack_coefficients(const std::map<BranchKey, std::vector<cf64>>& per_branch,
                                    cf64 constant, const AphConfig& cfg);
UnpackedCoefficients unpack_coefficients(const CoefficientVector& h, const AphConfig& cfg);

/// Which inner-loop implementation to run.
enum class KernelIsa { automatic, scalar, avx2, neon };

const char* to_string(KernelIsa isa);
KernelIsa kernel_isa_from_string(const std::string& s);
bool kernel_available(KernelIsa isa);
/// Best available kernel, honoring the DPD_KERNEL environment variable.
KernelIsa resolve_kernel(KernelIsa requested);

/// How a buffer is split across workers. Each chunk recomputes the `halo`
/// branch-polynomial values preceding it, so chunks are independent.
struct ChunkPlan {
  std::size_t chunk_len = 1;
  std::size_t halo = 0;
  unsigned n_workers = 1;
  KernelIsa kernel = KernelIsa::automatic;
};

ChunkPlan make_chunk_plan(const AphConfig& cfg, std::size_t chunk_len, unsigned n_workers,
                          KernelIsa kernel = KernelIsa::automatic);
void validate_plan(const ChunkPlan& plan, const AphConfig& cfg);

/// One output sample from the window x_{n-L+1} .. x_n (oldest first,
/// window.size() == cfg.max_taps(); zero-fill positions before the stream).
cf32 predistort_sample(std::span<const cf32> history_window, const CoefficientVector& h,
                       const AphConfig& cfg);

/// Reference path: scalar kernel, one pass, zero initial history.
IqBuffer predistort_serial(const IqBuffer& x, const CoefficientVector& h, const AphConfig& cfg);

/// Chunked, halo-overlapped path. Output is bit-identical to
/// predistort_serial for every valid plan.
IqBuffer predistort_parallel(const IqBuffer& x, const CoefficientVector& h, const AphConfig& cfg,
                             const ChunkPlan& plan);

nlohmann::json to_json(const CoefficientVector& h, const AphConfig& cfg);
/// Reads both the configuration (layout, including the basis) and the
/// coefficients from a coefficient document.
std::pair<AphConfig, CoefficientVector> coefficients_from_json(const nlohmann::json& j);

}  // namespace dpd
