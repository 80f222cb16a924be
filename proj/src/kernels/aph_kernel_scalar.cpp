#include "aph_kernel.hpp"

namespace dpd::kernel {

void poly_scalar(const Plan& plan, const cf32* x, std::size_t count, Scratch& s,
                 std::size_t offset) {
  float pw[kMaxPowers];
  for (std::size_t i = 0; i < count; ++i) {
    const float xr = x[i].real();
    const float xi = x[i].imag();
    powers(plan, xr, xi, pw);
    for (std::size_t b = 0; b < plan.branches.size(); ++b) {
      branch_value(plan.branches[b], xr, xi, pw, s.re_row(b)[offset + i], s.im_row(b)[offset + i]);
    }
  }
}

void filter_scalar(const Plan& plan, Scratch& s, std::size_t offset, std::size_t count,
                   cf32* out) {
  for (std::size_t i = 0; i < count; ++i) {
    float acc_re = 0.0f;
    float acc_im = 0.0f;
    for (std::size_t b = 0; b < plan.branches.size(); ++b) {
      const Branch& br = plan.branches[b];
      const float* pr = s.re_row(b) + offset + i;
      const float* pi = s.im_row(b) + offset + i;
      for (int k = 0; k < br.taps; ++k) {
        mac(br.h_re[k], br.h_im[k], pr[-k], pi[-k], acc_re, acc_im);
      }
    }
    out[i] = cf32(acc_re + plan.c_re, acc_im + plan.c_im);
  }
}

}  // namespace dpd::kernel
