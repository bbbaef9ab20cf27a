#include "bird/kernels.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

// NEON lane. Same mod-8 accumulator layout as the scalar reference:
// acc01/acc23/acc45/acc67 are float64x2 pairs covering lanes (0,1)..(6,7).

namespace bird::kernels::detail {

namespace {

inline double dot_neon_impl(const float* a, const float* b, size_t n) noexcept {
    float64x2_t acc01 = vdupq_n_f64(0.0);
    float64x2_t acc23 = vdupq_n_f64(0.0);
    float64x2_t acc45 = vdupq_n_f64(0.0);
    float64x2_t acc67 = vdupq_n_f64(0.0);
    const size_t blocks = n / 8;
    for (size_t i = 0; i < blocks * 8; i += 8) {
        const float32x4_t va0 = vld1q_f32(a + i);
        const float32x4_t vb0 = vld1q_f32(b + i);
        const float32x4_t va1 = vld1q_f32(a + i + 4);
        const float32x4_t vb1 = vld1q_f32(b + i + 4);
        acc01 = vaddq_f64(acc01, vmulq_f64(vcvt_f64_f32(vget_low_f32(va0)),
                                           vcvt_f64_f32(vget_low_f32(vb0))));
        acc23 = vaddq_f64(acc23, vmulq_f64(vcvt_f64_f32(vget_high_f32(va0)),
                                           vcvt_f64_f32(vget_high_f32(vb0))));
        acc45 = vaddq_f64(acc45, vmulq_f64(vcvt_f64_f32(vget_low_f32(va1)),
                                           vcvt_f64_f32(vget_low_f32(vb1))));
        acc67 = vaddq_f64(acc67, vmulq_f64(vcvt_f64_f32(vget_high_f32(va1)),
                                           vcvt_f64_f32(vget_high_f32(vb1))));
    }
    double acc[8];
    vst1q_f64(acc, acc01);
    vst1q_f64(acc + 2, acc23);
    vst1q_f64(acc + 4, acc45);
    vst1q_f64(acc + 6, acc67);
    for (size_t j = 0; j < n % 8; ++j) {
        const size_t i = blocks * 8 + j;
        acc[j] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return reduce8(acc);
}

}  // namespace

double dot_neon(const float* a, const float* b, size_t n) noexcept {
    return dot_neon_impl(a, b, n);
}

void dot_batch_neon(const float* q, const float* base, size_t count, size_t dim,
                    double* out) noexcept {
    for (size_t r = 0; r < count; ++r) {
        out[r] = dot_neon_impl(q, base + r * dim, dim);
    }
}

}  // namespace bird::kernels::detail

#endif
