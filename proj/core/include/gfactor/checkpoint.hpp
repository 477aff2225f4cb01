#pragma once

#include <filesystem>
#include <string>

#include "gfactor/chain.hpp"

namespace gfactor {

/// Everything needed to resume a chain bit-exactly.
struct Checkpoint {
    static constexpr std::uint32_t kVersion = 1;

    long next_iteration = 0;
    ChainState state;
    std::string rng_state;
    std::uint64_t rng_seed = 0;
    std::uint64_t rng_stream = 0;
    Matrix working_Y;
    PosteriorSamples samples;
};

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path);
/// Throws DataError on a missing, truncated or foreign file.
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace gfactor
