#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

#include "gfactor/linalg.hpp"

namespace gfactor {

/// 64-bit FNV-1a, used for provenance and reproducibility digests.
class Fnv1a {
public:
    void update(const void* data, std::size_t len) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < len; ++i) {
            hash_ ^= bytes[i];
            hash_ *= 1099511628211ULL;
        }
    }
    void update(std::string_view s) { update(s.data(), s.size()); }
    void update(double v) { update(&v, sizeof v); }
    void update(std::int64_t v) { update(&v, sizeof v); }
    void update(const Matrix& m) {
        update(static_cast<std::int64_t>(m.rows()));
        update(static_cast<std::int64_t>(m.cols()));
        update(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
    }
    void update(const Vector& v) {
        update(static_cast<std::int64_t>(v.size()));
        update(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
    }
    std::uint64_t value() const { return hash_; }

private:
    std::uint64_t hash_ = 14695981039346656037ULL;
};

}  // namespace gfactor
