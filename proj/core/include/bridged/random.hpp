#ifndef BRIDGED_RANDOM_HPP
#define BRIDGED_RANDOM_HPP

#include <cstdint>
#include <random>

#include "bridged/types.hpp"

namespace bridged {

using Engine = std::mt19937_64;

/// Child seed for an indexed sub-stream. Pure function of (parent, stream),
/// so work split across threads or blocks draws the same numbers.
RngSeed derive_seed(RngSeed parent, std::uint64_t stream);

/// Convenience for two-level derivation (e.g. trial, then phase).
RngSeed derive_seed(RngSeed parent, std::uint64_t stream, std::uint64_t sub);

Engine make_engine(RngSeed seed);

}  // namespace bridged

#endif  // BRIDGED_RANDOM_HPP
