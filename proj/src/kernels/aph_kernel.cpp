#include "aph_kernel.hpp"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <string>

#include "dpd/error.hpp"

namespace dpd::kernel {
namespace {

Branch make_branch(const std::vector<int>& orders, std::size_t row,
                   const std::vector<std::vector<cf64>>& table, bool conjugate) {
  Branch b;
  b.conjugate = conjugate;
  for (std::size_t m = 0; m <= row; ++m) {
    const cf64 u = table[row][m];
    if (u == cf64{}) continue;
    b.power.push_back((orders[m] - 1) / 2);
    b.u_re.push_back(static_cast<float>(u.real()));
    b.u_im.push_back(static_cast<float>(u.imag()));
  }
  return b;
}

std::vector<Branch> basis_branches(const PolyBasis& basis) {
  std::vector<Branch> out;
  const BranchSets& sets = basis.sets;
  for (std::size_t i = 0; i < sets.main.size(); ++i)
    out.push_back(make_branch(sets.main, i, basis.u_main, false));
  for (std::size_t i = 0; i < sets.conj.size(); ++i)
    out.push_back(make_branch(sets.conj, i, basis.u_conj, true));
  return out;
}

int power_count(const BranchSets& sets) {
  return (std::max(sets.max_main(), sets.max_conj()) - 1) / 2 + 1;
}

}  // namespace

Plan make_plan(const AphConfig& cfg, const CoefficientVector& h) {
  validate_coefficients(h, cfg);
  Plan plan;
  plan.branches = basis_branches(cfg.basis);
  plan.n_powers = power_count(cfg.sets());
  plan.halo = cfg.halo();

  std::size_t pos = 0;
  const std::size_t n_main = cfg.sets().main.size();
  for (std::size_t b = 0; b < plan.branches.size(); ++b) {
    Branch& br = plan.branches[b];
    br.taps = b < n_main ? cfg.taps.main[b] : cfg.taps.conj[b - n_main];
    for (int k = 0; k < br.taps; ++k, ++pos) {
      br.h_re.push_back(static_cast<float>(h.values[pos].real()));
      br.h_im.push_back(static_cast<float>(h.values[pos].imag()));
    }
  }
  plan.c_re = static_cast<float>(h.constant().real());
  plan.c_im = static_cast<float>(h.constant().imag());
  return plan;
}

Plan make_basis_plan(const PolyBasis& basis) {
  Plan plan;
  plan.branches = basis_branches(basis);
  plan.n_powers = power_count(basis.sets);
  for (Branch& br : plan.branches) {
    br.h_re = {1.0f};
    br.h_im = {0.0f};
  }
  return plan;
}

void run(const Plan& plan, KernelIsa isa, std::span<const cf32> x, std::size_t begin,
         std::size_t end, cf32* out) {
  if (begin >= end) return;
  PolyFn poly = poly_scalar;
  FilterFn filter = filter_scalar;
  switch (isa) {
#if defined(__x86_64__) || defined(__i386__)
    case KernelIsa::avx2:
      poly = poly_avx2;
      filter = filter_avx2;
      break;
#endif
#if defined(__ARM_NEON) || defined(__aarch64__)
    case KernelIsa::neon:
      poly = poly_neon;
      filter = filter_neon;
      break;
#endif
    case KernelIsa::scalar:
      break;
    default:
      throw ConfigError(std::string("kernel not available on this host: ") + to_string(isa));
  }

  const std::size_t halo = static_cast<std::size_t>(plan.halo);
  const std::size_t nb = plan.branches.size();
  Scratch s(nb, halo + kTile);

  // Halo before `begin`: zero before the stream start, recomputed otherwise.
  const std::size_t first = begin >= halo ? begin - halo : 0;
  const std::size_t zeros = halo - (begin - first);
  for (std::size_t b = 0; b < nb; ++b) {
    std::fill_n(s.re_row(b), zeros, 0.0f);
    std::fill_n(s.im_row(b), zeros, 0.0f);
  }
  poly_scalar(plan, x.data() + first, begin - first, s, zeros);

  for (std::size_t pos = begin; pos < end;) {
    const std::size_t n = std::min(kTile, end - pos);
    poly(plan, x.data() + pos, n, s, halo);
    filter(plan, s, halo, n, out + pos);
    pos += n;
    if (pos < end && halo > 0) {
      // Keep the newest `halo` branch values for the next tile's taps.
      for (std::size_t b = 0; b < nb; ++b) {
        std::memmove(s.re_row(b), s.re_row(b) + n, halo * sizeof(float));
        std::memmove(s.im_row(b), s.im_row(b) + n, halo * sizeof(float));
      }
    }
  }
}

}  // namespace dpd::kernel

namespace dpd {

const char* to_string(KernelIsa isa) {
  switch (isa) {
    case KernelIsa::automatic: return "auto";
    case KernelIsa::scalar: return "scalar";
    case KernelIsa::avx2: return "avx2";
    case KernelIsa::neon: return "neon";
  }
  return "?";
}

KernelIsa kernel_isa_from_string(const std::string& s) {
  if (s == "auto") return KernelIsa::automatic;
  if (s == "scalar") return KernelIsa::scalar;
  if (s == "avx2") return KernelIsa::avx2;
  if (s == "neon") return KernelIsa::neon;
  throw ConfigError("unknown kernel '" + s + "' (expected auto|scalar|avx2|neon)");
}

bool kernel_available(KernelIsa isa) {
  switch (isa) {
    case KernelIsa::automatic:
    case KernelIsa::scalar:
      return true;
    case KernelIsa::avx2:
#if defined(__x86_64__) || defined(__i386__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case KernelIsa::neon:
#if defined(__ARM_NEON) || defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

KernelIsa resolve_kernel(KernelIsa requested) {
  if (requested == KernelIsa::automatic) {
    if (const char* env = std::getenv("DPD_KERNEL"); env != nullptr && *env != '\0')
      requested = kernel_isa_from_string(env);
  }
  if (requested != KernelIsa::automatic) {
    if (!kernel_available(requested))
      throw ConfigError(std::string("kernel not available on this host: ") + to_string(requested));
    return requested;
  }
  if (kernel_available(KernelIsa::avx2)) return KernelIsa::avx2;
  if (kernel_available(KernelIsa::neon)) return KernelIsa::neon;
  return KernelIsa::scalar;
}

}  // namespace dpd
