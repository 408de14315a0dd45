#pragma once

#include <cstdint>
#include <string>

#include "liqsurf/config.hpp"

namespace oracle {

struct EquivalenceStats {
    int compared = 0;
    int both_rejected = 0;
    int mismatches = 0;
    double max_error = 0.0;
    std::string first_failure;
};

/// Relative agreement bound between the library and the oracle.
inline constexpr double kTolerance = 1e-9;

/// Scores `curves` random candidates on each of `images` random 64x64 images
/// with the library and with the oracle and compares the results.
EquivalenceStats compare_with_library(const liqsurf::Preset& preset, int images, int curves, std::uint64_t seed);

} // namespace oracle
