#include "bird/similarity.hpp"

#include <cmath>

#include "bird/kernels.hpp"

namespace bird {

double similarity(std::span<const float> a, std::span<const float> b, Metric metric) {
    if (a.size() != b.size()) {
        throw Error(Errc::invalid_input,
                    "similarity: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
    }
    const auto& ops = kernels::active();
    const double ab = ops.dot(a.data(), b.data(), a.size());
    if (metric == Metric::dot_product) return ab;

    const double aa = ops.dot(a.data(), a.data(), a.size());
    const double bb = ops.dot(b.data(), b.data(), b.size());
    if (aa == 0.0 || bb == 0.0) {
        throw Error(Errc::invalid_input, "similarity: cosine of an all-zero vector is undefined");
    }
    return ab / (std::sqrt(aa) * std::sqrt(bb));
}

}  // namespace bird
