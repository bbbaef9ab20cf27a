#include "bird/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

// AVX2 lane. Floats are widened to double before multiplying (mul + add, no
// FMA) so each acc lane matches the scalar reference bit for bit. accA holds
// mod-8 lanes 0..3, accB lanes 4..7.

namespace bird::kernels::detail {

namespace {

inline double dot_avx2_impl(const float* a, const float* b, size_t n) noexcept {
    __m256d accA = _mm256_setzero_pd();
    __m256d accB = _mm256_setzero_pd();
    const size_t blocks = n / 8;
    for (size_t i = 0; i < blocks * 8; i += 8) {
        const __m256 va = _mm256_loadu_ps(a + i);
        const __m256 vb = _mm256_loadu_ps(b + i);
        const __m256d a_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(va));
        const __m256d a_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(va, 1));
        const __m256d b_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(vb));
        const __m256d b_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1));
        accA = _mm256_add_pd(accA, _mm256_mul_pd(a_lo, b_lo));
        accB = _mm256_add_pd(accB, _mm256_mul_pd(a_hi, b_hi));
    }
    alignas(32) double acc[8];
    _mm256_store_pd(acc, accA);
    _mm256_store_pd(acc + 4, accB);
    for (size_t j = 0; j < n % 8; ++j) {
        const size_t i = blocks * 8 + j;
        acc[j] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return reduce8(acc);
}

}  // namespace

double dot_avx2(const float* a, const float* b, size_t n) noexcept {
    return dot_avx2_impl(a, b, n);
}

void dot_batch_avx2(const float* q, const float* base, size_t count, size_t dim,
                    double* out) noexcept {
    for (size_t r = 0; r < count; ++r) {
        out[r] = dot_avx2_impl(q, base + r * dim, dim);
    }
}

}  // namespace bird::kernels::detail

#endif
