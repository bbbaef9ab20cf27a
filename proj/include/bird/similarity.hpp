#pragma once

#include <span>

#include "bird/types.hpp"

namespace bird {

/// Similarity between two equal-dimension vectors. Cosine results lie in
/// [-1, 1] up to rounding; dot product is unbounded. Symmetric in a and b.
/// Throws Errc::invalid_input on dimension mismatch or an all-zero vector
/// under cosine.
double similarity(std::span<const float> a, std::span<const float> b, Metric metric);

}  // namespace bird
