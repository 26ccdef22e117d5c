#include "evolearn/rng.hpp"

#include <bit>
#include <limits>
#include <stdexcept>

namespace evolearn {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("uniform_int: empty interval");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == std::numeric_limits<std::uint64_t>::max()) return static_cast<std::int64_t>(engine_());
    const std::uint64_t range = span + 1;
    // Largest multiple of range that fits; draws above it are rejected.
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % range);
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return lo + static_cast<std::int64_t>(x % range);
}

std::uint64_t hash_double(double v) {
    if (v == 0.0) v = 0.0;  // fold -0.0 onto +0.0
    return std::bit_cast<std::uint64_t>(v);
}

}  // namespace evolearn
