#include "aph_kernel.hpp"

#if defined(__x86_64__) || defined(__i386__)

#include <immintrin.h>

// Compiled for the baseline ISA; only these functions are AVX2 code and they
// are reached solely after a runtime CPU check. No FMA: the lanes must round
// exactly like the scalar kernel.
#define DPD_AVX2 __attribute__((target("avx2")))

namespace dpd::kernel {
namespace {

DPD_AVX2 inline void load_deinterleaved(const cf32* x, __m256& re, __m256& im) {
  const float* p = reinterpret_cast<const float*>(x);
  const __m256 a = _mm256_loadu_ps(p);      // r0 i0 r1 i1 | r2 i2 r3 i3
  const __m256 b = _mm256_loadu_ps(p + 8);  // r4 i4 r5 i5 | r6 i6 r7 i7
  const __m256 r = _mm256_shuffle_ps(a, b, _MM_SHUFFLE(2, 0, 2, 0));
  const __m256 i = _mm256_shuffle_ps(a, b, _MM_SHUFFLE(3, 1, 3, 1));
  re = _mm256_castpd_ps(_mm256_permute4x64_pd(_mm256_castps_pd(r), _MM_SHUFFLE(3, 1, 2, 0)));
  im = _mm256_castpd_ps(_mm256_permute4x64_pd(_mm256_castps_pd(i), _MM_SHUFFLE(3, 1, 2, 0)));
}

DPD_AVX2 inline void store_interleaved(cf32* out, __m256 re, __m256 im) {
  float* p = reinterpret_cast<float*>(out);
  const __m256 lo = _mm256_unpacklo_ps(re, im);
  const __m256 hi = _mm256_unpackhi_ps(re, im);
  _mm256_storeu_ps(p, _mm256_permute2f128_ps(lo, hi, 0x20));
  _mm256_storeu_ps(p + 8, _mm256_permute2f128_ps(lo, hi, 0x31));
}

}  // namespace

DPD_AVX2 void poly_avx2(const Plan& plan, const cf32* x, std::size_t count, Scratch& s,
                        std::size_t offset) {
  constexpr std::size_t W = 8;
  const std::size_t n_vec = count / W * W;
  __m256 pw[kMaxPowers];
  for (std::size_t i = 0; i < n_vec; i += W) {
    __m256 xr, xi;
    load_deinterleaved(x + i, xr, xi);
    pw[0] = _mm256_set1_ps(1.0f);
    if (plan.n_powers > 1) pw[1] = _mm256_add_ps(_mm256_mul_ps(xr, xr), _mm256_mul_ps(xi, xi));
    for (int j = 2; j < plan.n_powers; ++j) pw[j] = _mm256_mul_ps(pw[j - 1], pw[1]);

    for (std::size_t b = 0; b < plan.branches.size(); ++b) {
      const Branch& br = plan.branches[b];
      __m256 wr = _mm256_mul_ps(_mm256_set1_ps(br.u_re[0]), pw[br.power[0]]);
      __m256 wi = _mm256_mul_ps(_mm256_set1_ps(br.u_im[0]), pw[br.power[0]]);
      for (std::size_t t = 1; t < br.power.size(); ++t) {
        wr = _mm256_add_ps(wr, _mm256_mul_ps(_mm256_set1_ps(br.u_re[t]), pw[br.power[t]]));
        wi = _mm256_add_ps(wi, _mm256_mul_ps(_mm256_set1_ps(br.u_im[t]), pw[br.power[t]]));
      }
      __m256 pr, pi;
      if (!br.conjugate) {
        pr = _mm256_sub_ps(_mm256_mul_ps(wr, xr), _mm256_mul_ps(wi, xi));
        pi = _mm256_add_ps(_mm256_mul_ps(wr, xi), _mm256_mul_ps(wi, xr));
      } else {
        pr = _mm256_add_ps(_mm256_mul_ps(wr, xr), _mm256_mul_ps(wi, xi));
        pi = _mm256_sub_ps(_mm256_mul_ps(wi, xr), _mm256_mul_ps(wr, xi));
      }
      _mm256_storeu_ps(s.re_row(b) + offset + i, pr);
      _mm256_storeu_ps(s.im_row(b) + offset + i, pi);
    }
  }
  if (n_vec < count) poly_scalar(plan, x + n_vec, count - n_vec, s, offset + n_vec);
}

DPD_AVX2 void filter_avx2(const Plan& plan, Scratch& s, std::size_t offset, std::size_t count,
                          cf32* out) {
  constexpr std::size_t W = 8;
  const std::size_t n_vec = count / W * W;
  const __m256 c_re = _mm256_set1_ps(plan.c_re);
  const __m256 c_im = _mm256_set1_ps(plan.c_im);
  for (std::size_t i = 0; i < n_vec; i += W) {
    __m256 acc_re = _mm256_setzero_ps();
    __m256 acc_im = _mm256_setzero_ps();
    for (std::size_t b = 0; b < plan.branches.size(); ++b) {
      const Branch& br = plan.branches[b];
      const float* row_re = s.re_row(b) + offset + i;
      const float* row_im = s.im_row(b) + offset + i;
      for (int k = 0; k < br.taps; ++k) {
        // Unaligned load at a k-sample lag regroups neighbouring vectors.
        const __m256 pr = _mm256_loadu_ps(row_re - k);
        const __m256 pi = _mm256_loadu_ps(row_im - k);
        const __m256 hr = _mm256_set1_ps(br.h_re[k]);
        const __m256 hi = _mm256_set1_ps(br.h_im[k]);
        acc_re = _mm256_add_ps(acc_re, _mm256_sub_ps(_mm256_mul_ps(hr, pr), _mm256_mul_ps(hi, pi)));
        acc_im = _mm256_add_ps(acc_im, _mm256_add_ps(_mm256_mul_ps(hr, pi), _mm256_mul_ps(hi, pr)));
      }
    }
    store_interleaved(out + i, _mm256_add_ps(acc_re, c_re), _mm256_add_ps(acc_im, c_im));
  }
  if (n_vec < count) filter_scalar(plan, s, offset + n_vec, count - n_vec, out + n_vec);
}

}  // namespace dpd::kernel

#endif
