#pragma once
// Borderline minority oversampling: synthetic points are convex combinations
// of a minority sample and one of its k nearest minority neighbors, drawn
// preferentially from samples near the class margin (small nearest-enemy
// distance).

#include <cstdint>
#include <vector>

#include "vigil/nn/tensor.hpp"

namespace vigil::detect {

struct SmoteSample {
    nn::Vec point;
    std::size_t base_index = 0;      // minority sample it interpolates from
    std::size_t neighbor_index = 0;  // minority neighbor
    double lambda = 0.0;             // point = base + lambda*(neighbor-base)
};

std::vector<SmoteSample> smote_oversample(const std::vector<nn::Vec>& minority,
                                          const std::vector<nn::Vec>& majority,
                                          std::size_t n_needed, std::size_t k,
                                          std::uint64_t seed);

} // namespace vigil::detect
