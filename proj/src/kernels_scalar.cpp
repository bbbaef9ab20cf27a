#include "bird/kernels.hpp"

// Reference lane. The 8-accumulator structure mirrors the vector lanes
// exactly: acc[j] collects index ≡ j (mod 8), products are computed as
// double(a)*double(b) and added (no FMA), and reduce8 fixes the final order.

namespace bird::kernels::detail {

double dot_scalar(const float* a, const float* b, size_t n) noexcept {
    double acc[8] = {0, 0, 0, 0, 0, 0, 0, 0};
    const size_t blocks = n / 8;
    for (size_t i = 0; i < blocks * 8; i += 8) {
        for (size_t j = 0; j < 8; ++j) {
            acc[j] += static_cast<double>(a[i + j]) * static_cast<double>(b[i + j]);
        }
    }
    for (size_t j = 0; j < n % 8; ++j) {
        const size_t i = blocks * 8 + j;
        acc[j] += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return reduce8(acc);
}

void dot_batch_scalar(const float* q, const float* base, size_t count, size_t dim,
                      double* out) noexcept {
    for (size_t r = 0; r < count; ++r) {
        out[r] = dot_scalar(q, base + r * dim, dim);
    }
}

}  // namespace bird::kernels::detail
