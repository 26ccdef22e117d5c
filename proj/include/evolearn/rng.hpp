#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace evolearn {

// Deterministic random stream backed by std::mt19937_64, whose output
// sequence is fixed by the standard. The distributions below are written out
// by hand because the std:: distribution algorithms are implementation
// defined, and records must reproduce across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform on [lo, hi].
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Uniform integer on the inclusive interval [lo, hi]; unbiased (rejection).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

// Child stream roles. Each replication owns one root seed and derives one
// independent stream per role, so e.g. enabling fitness noise leaves the
// mutation stream untouched.
enum class Stream : std::uint64_t {
    init = 1,
    mutation = 2,
    noise = 3,
    task = 4,
};

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Order-sensitive combination of a running hash with one more word.
constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v) {
    return mix64(h ^ mix64(v));
}

// FNV-1a, used to fold identifiers into seed hashes.
constexpr std::uint64_t hash_string(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t hash_double(double v);

inline std::uint64_t derive_seed(std::uint64_t root, Stream role) {
    return hash_combine(root, static_cast<std::uint64_t>(role));
}

inline Rng child_stream(std::uint64_t root, Stream role) { return Rng(derive_seed(root, role)); }

}  // namespace evolearn
