#pragma once
// Central-difference gradient verification for any network/loss pairing.

#include "vigil/nn/network.hpp"
#include "vigil/nn/train.hpp"

namespace vigil::nn {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::size_t checked_params = 0;
    // rectifier-kink straddles, where a difference quotient measures nothing
    std::size_t kink_skipped = 0;
};

// Compares analytic gradients against (f(p+h)-f(p-h))/2h with h=1e-5.
// `max_params` caps the number of parameters probed (0 = all), sampled
// deterministically across the network.
GradCheckResult grad_check(Network& net, LossKind loss, const Seq& input,
                           const Seq& target, std::size_t max_params = 0);

} // namespace vigil::nn
