#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>

namespace gfactor {

/// A seeded stream of pseudo-random numbers.
///
/// Streams with the same (seed, stream id) produce identical sequences; every
/// distinct stream id is seeded through its own seed_seq so two chains never
/// share engine state. Not thread-safe: one stream per thread.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }
    /// Uniform on the open interval (0, 1).
    double uniform();
    /// Standard normal (Box-Muller, one variate per call, no cached state).
    double normal();

    /// Full engine state, suitable for checkpoints.
    std::string serialize() const;
    void restore(const std::string& state);

    friend bool operator==(const RngStream& a, const RngStream& b) {
        return a.seed_ == b.seed_ && a.stream_id_ == b.stream_id_ && a.engine_ == b.engine_;
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
};

}  // namespace gfactor
