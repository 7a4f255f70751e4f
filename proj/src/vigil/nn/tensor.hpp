#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vigil::nn {

using Vec = std::vector<double>;
// A sequence of timestep vectors. Non-recurrent models use length-1 sequences.
using Seq = std::vector<Vec>;

struct ShapeMismatch : std::runtime_error {
    explicit ShapeMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct Divergence : std::runtime_error {
    explicit Divergence(const std::string& what) : std::runtime_error(what) {}
};

inline Seq as_seq(Vec v) { return Seq{std::move(v)}; }

} // namespace vigil::nn
