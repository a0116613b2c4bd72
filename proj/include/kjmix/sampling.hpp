#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "kjmix/mixture.hpp"

namespace kjmix {

/// Raised when a proposal's density exceeds the certified envelope height;
/// indicates an envelope construction bug, never bad data.
struct EnvelopeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// i.i.d. draws from the mixture. Component picked by the weights (the
/// uniform share yields a uniform angle); within a component, rejection
/// sampling against a flat envelope certified on an 8192-point grid.
/// Output depends only on (mix, n, seed), not on the thread count.
std::vector<Angle> sample(const ReparamMixture& mix, std::size_t n, std::uint64_t seed);

}  // namespace kjmix
