#pragma once

// Internal to the predistortion engine. Every kernel variant performs the
// same IEEE operation sequence per sample, so scalar and SIMD outputs are
// bit-identical; the helpers below are the single definition of that
// sequence and are reused for halos and loop tails.

#include <cstddef>
#include <span>
#include <vector>

#include "dpd/aph.hpp"

namespace dpd::kernel {

/// One polynomial branch, flattened to single precision.
struct Branch {
  bool conjugate = false;
  int taps = 1;
  // w(|x|) = sum_t u[t] * (|x|^2)^power[t]; zero entries are dropped.
  std::vector<int> power;
  std::vector<float> u_re, u_im;
  std::vector<float> h_re, h_im;  // taps entries
};

struct Plan {
  std::vector<Branch> branches;  // main ascending, then conjugate ascending
  int n_powers = 1;              // pw[0..n_powers) with pw[0] = 1
  int halo = 0;
  float c_re = 0.0f, c_im = 0.0f;
};

Plan make_plan(const AphConfig& cfg, const CoefficientVector& h);

/// Plan with unit taps only: used to evaluate branch polynomials alone.
Plan make_basis_plan(const PolyBasis& basis);

inline constexpr int kMaxPowers = 16;

inline void powers(const Plan& plan, float xr, float xi, float* pw) {
  const float mag2 = xr * xr + xi * xi;
  pw[0] = 1.0f;
  if (plan.n_powers > 1) pw[1] = mag2;
  for (int j = 2; j < plan.n_powers; ++j) pw[j] = pw[j - 1] * mag2;
}

inline void branch_value(const Branch& b, float xr, float xi, const float* pw, float& out_re,
                         float& out_im) {
  float wr = b.u_re[0] * pw[b.power[0]];
  float wi = b.u_im[0] * pw[b.power[0]];
  for (std::size_t t = 1; t < b.power.size(); ++t) {
    wr = wr + b.u_re[t] * pw[b.power[t]];
    wi = wi + b.u_im[t] * pw[b.power[t]];
  }
  if (!b.conjugate) {
    out_re = wr * xr - wi * xi;
    out_im = wr * xi + wi * xr;
  } else {
    out_re = wr * xr + wi * xi;
    out_im = wi * xr - wr * xi;
  }
}

inline void mac(float hr, float hi, float pr, float pi, float& acc_re, float& acc_im) {
  acc_re = acc_re + (hr * pr - hi * pi);
  acc_im = acc_im + (hr * pi + hi * pr);
}

/// Branch-polynomial scratch for one tile: per branch, `halo` carried values
/// followed by the tile itself.
struct Scratch {
  std::size_t stride = 0;
  std::vector<float> re, im;  // branches * stride

  Scratch(std::size_t n_branches, std::size_t stride_)
      : stride(stride_), re(n_branches * stride_), im(n_branches * stride_) {}
  float* re_row(std::size_t b) { return re.data() + b * stride; }
  float* im_row(std::size_t b) { return im.data() + b * stride; }
};

inline constexpr std::size_t kTile = 2048;

/// Branch values for x[first, first + count) into scratch rows at `offset`.
using PolyFn = void (*)(const Plan&, const cf32* x, std::size_t count, Scratch& s,
                        std::size_t offset);
/// Outputs for `count` samples whose newest branch values sit at
/// scratch[offset .. offset + count).
using FilterFn = void (*)(const Plan&, Scratch& s, std::size_t offset, std::size_t count,
                          cf32* out);

void poly_scalar(const Plan&, const cf32* x, std::size_t count, Scratch& s, std::size_t offset);
void filter_scalar(const Plan&, Scratch& s, std::size_t offset, std::size_t count, cf32* out);

#if defined(__x86_64__) || defined(__i386__)
void poly_avx2(const Plan&, const cf32* x, std::size_t count, Scratch& s, std::size_t offset);
void filter_avx2(const Plan&, Scratch& s, std::size_t offset, std::size_t count, cf32* out);
#endif
#if defined(__ARM_NEON) || defined(__aarch64__)
void poly_neon(const Plan&, const cf32* x, std::size_t count, Scratch& s, std::size_t offset);
void filter_neon(const Plan&, Scratch& s, std::size_t offset, std::size_t count, cf32* out);
#endif

/// Writes out[begin, end) for input x. Branch values of the `halo` samples
/// before `begin` are recomputed from x (zero before the stream start).
void run(const Plan& plan, KernelIsa isa, std::span<const cf32> x, std::size_t begin,
         std::size_t end, cf32* out);

}  // namespace dpd::kernel
