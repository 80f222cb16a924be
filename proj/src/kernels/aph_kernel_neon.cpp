#include "aph_kernel.hpp"

#if defined(__ARM_NEON) || defined(__aarch64__)

#include <arm_neon.h>

// vmulq/vaddq/vsubq only (no vmlaq/vfmaq): lanes must round like the scalar
// kernel.

namespace dpd::kernel {

void poly_neon(const Plan& plan, const cf32* x, std::size_t count, Scratch& s,
               std::size_t offset) {
  constexpr std::size_t W = 4;
  const std::size_t n_vec = count / W * W;
  float32x4_t pw[kMaxPowers];
  for (std::size_t i = 0; i < n_vec; i += W) {
    const float32x4x2_t v = vld2q_f32(reinterpret_cast<const float*>(x + i));
    const float32x4_t xr = v.val[0];
    const float32x4_t xi = v.val[1];
    pw[0] = vdupq_n_f32(1.0f);
    if (plan.n_powers > 1) pw[1] = vaddq_f32(vmulq_f32(xr, xr), vmulq_f32(xi, xi));
    for (int j = 2; j < plan.n_powers; ++j) pw[j] = vmulq_f32(pw[j - 1], pw[1]);

    for (std::size_t b = 0; b < plan.branches.size(); ++b) {
      const Branch& br = plan.branches[b];
      float32x4_t wr = vmulq_f32(vdupq_n_f32(br.u_re[0]), pw[br.power[0]]);
      float32x4_t wi = vmulq_f32(vdupq_n_f32(br.u_im[0]), pw[br.power[0]]);
      for (std::size_t t = 1; t < br.power.size(); ++t) {
        wr = vaddq_f32(wr, vmulq_f32(vdupq_n_f32(br.u_re[t]), pw[br.power[t]]));
        wi = vaddq_f32(wi, vmulq_f32(vdupq_n_f32(br.u_im[t]), pw[br.power[t]]));
      }
      float32x4_t pr, pi;
      if (!br.conjugate) {
        pr = vsubq_f32(vmulq_f32(wr, xr), vmulq_f32(wi, xi));
        pi = vaddq_f32(vmulq_f32(wr, xi), vmulq_f32(wi, xr));
      } else {
        pr = vaddq_f32(vmulq_f32(wr, xr), vmulq_f32(wi, xi));
        pi = vsubq_f32(vmulq_f32(wi, xr), vmulq_f32(wr, xi));
      }
      vst1q_f32(s.re_row(b) + offset + i, pr);
      vst1q_f32(s.im_row(b) + offset + i, pi);
    }
  }
  if (n_vec < count) poly_scalar(plan, x + n_vec, count - n_vec, s, offset + n_vec);
}

void filter_neon(const Plan& plan, Scratch& s, std::size_t offset, std::size_t count,
                 cf32* out) {
  constexpr std::size_t W = 4;
  const std::size_t n_vec = count / W * W;
  const float32x4_t c_re = vdupq_n_f32(plan.c_re);
  const float32x4_t c_im = vdupq_n_f32(plan.c_im);
  for (std::size_t i = 0; i < n_vec; i += W) {
    float32x4_t acc_re = vdupq_n_f32(0.0f);
    float32x4_t acc_im = vdupq_n_f32(0.0f);
    for (std::size_t b = 0; b < plan.branches.size(); ++b) {
      const Branch& br = plan.branches[b];
      const float* row_re = s.re_row(b) + offset + i;
      const float* row_im = s.im_row(b) + offset + i;
      for (int k = 0; k < br.taps; ++k) {
        const float32x4_t pr = vld1q_f32(row_re - k);
        const float32x4_t pi = vld1q_f32(row_im - k);
        const float32x4_t hr = vdupq_n_f32(br.h_re[k]);
        const float32x4_t hi = vdupq_n_f32(br.h_im[k]);
        acc_re = vaddq_f32(acc_re, vsubq_f32(vmulq_f32(hr, pr), vmulq_f32(hi, pi)));
        acc_im = vaddq_f32(acc_im, vaddq_f32(vmulq_f32(hr, pi), vmulq_f32(hi, pr)));
      }
    }
    float32x4x2_t v;
    v.val[0] = vaddq_f32(acc_re, c_re);
    v.val[1] = vaddq_f32(acc_im, c_im);
    vst2q_f32(reinterpret_cast<float*>(out + i), v);
  }
  if (n_vec < count) filter_scalar(plan, s, offset + n_vec, count - n_vec, out + n_vec);
}

}  // namespace dpd::kernel

#endif
