#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "bird/types.hpp"

// Data-parallel inner loops for similarity scoring. Every lane accumulates
// products in 64-bit using the same 8-accumulator layout and the same final
// reduction order, so scalar, AVX2 and NEON return bit-identical doubles.

namespace bird::kernels {

enum class Lane { scalar, avx2, neon };

inline const char* to_string(Lane l) {
    switch (l) {
        case Lane::scalar: return "scalar";
        case Lane::avx2: return "avx2";
        case Lane::neon: return "neon";
    }
    return "?";
}

struct Ops {
    Lane lane;
    // dot(a, b, n): sum of a[i]*b[i], accumulated in double.
    double (*dot)(const float* a, const float* b, size_t n) noexcept;
    // dot_batch: q against `count` contiguous rows of `base` (row-major,
    // row length = dim); out[i] = dot(q, base + i*dim, dim).
    void (*dot_batch)(const float* q, const float* base, size_t count, size_t dim,
                      double* out) noexcept;
};

/// Currently selected lane (best available unless forced).
const Ops& active() noexcept;

/// Lanes usable on this machine, best first.
std::vector<Lane> available_lanes();

/// Pin a specific lane (tests / reproducibility). Throws Errc::invalid_input
/// if the lane is not usable on this machine. Not safe to call while other
/// threads are scoring.
void force_lane(Lane lane);

/// Return to automatic selection.
void reset_lane();

inline double dot(std::span<const float> a, std::span<const float> b) noexcept {
    return active().dot(a.data(), b.data(), a.size());
}

// Canonical reduction shared by every lane. acc[j] holds the partial sum of
// elements with index ≡ j (mod 8).
inline double reduce8(const double* acc) noexcept {
    return ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
}

namespace detail {
double dot_scalar(const float* a, const float* b, size_t n) noexcept;
void dot_batch_scalar(const float* q, const float* base, size_t count, size_t dim,
                      double* out) noexcept;
#if defined(__x86_64__) || defined(_M_X64)
double dot_avx2(const float* a, const float* b, size_t n) noexcept;
void dot_batch_avx2(const float* q, const float* base, size_t count, size_t dim,
                    double* out) noexcept;
#endif
#if defined(__aarch64__)
double dot_neon(const float* a, const float* b, size_t n) noexcept;
void dot_batch_neon(const float* q, const float* base, size_t count, size_t dim,
                    double* out) noexcept;
#endif
}  // namespace detail

}  // namespace bird::kernels
