#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "nids/dataset.hpp"

namespace nids {

struct SmoteConfig {
    std::size_t k = 5;
    // Desired minority row count after oversampling; 0 means "match the
    // majority class".
    std::size_t target_minority_count = 0;
    std::uint64_t seed = 0;
};

// Where a synthetic row came from. Row indices refer to the input dataset.
struct SyntheticOrigin {
    std::size_t base_row;
    std::size_t neighbor_row;
    double gap;
};

struct SmoteResult {
    Dataset data;  // input rows first, in order, then synthetic rows
    std::vector<SyntheticOrigin> origins;
    Label minority = 1;
};

// base + gap * (neighbor - base)
std::vector<double> interpolate(std::span<const double> base, std::span<const double> neighbor, double gap);

// Indices (into `candidates`) of the k nearest candidates to candidates[self]
// by Euclidean distance, excluding self. Distance ties go to the lower index.
std::vector<std::size_t> nearest_neighbors(const Matrix& points, std::span<const std::size_t> candidates,
                                           std::size_t self, std::size_t k);

/// Appends synthetic minority rows until the minority class reaches its target
/// count. Base instances are taken round-robin over the minority rows; each
/// base draws from its own RNG stream, so the output does not depend on the
/// thread count.
SmoteResult oversample_traced(const Dataset& train, const SmoteConfig& cfg);

Dataset oversample(const Dataset& train, const SmoteConfig& cfg);

}  // namespace nids
