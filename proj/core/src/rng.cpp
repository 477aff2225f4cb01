#include "gfactor/rng.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gfactor/error.hpp"

namespace gfactor {

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32), 0x6a09e667U};
    return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

double RngStream::uniform() {
    // 53 random bits, shifted off zero: (k + 0.5) / 2^53.
    const std::uint64_t k = engine_() >> 11;
    return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RngStream::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::string RngStream::serialize() const {
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void RngStream::restore(const std::string& state) {
    std::istringstream is(state);
    is >> engine_;
    if (!is) throw DataError("corrupt random-number engine state");
}

}  // namespace gfactor
