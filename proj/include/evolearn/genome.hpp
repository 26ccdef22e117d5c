#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "evolearn/rng.hpp"

namespace evolearn {

using Gene = std::int32_t;

// Inclusive integer interval for every gene position.
class GeneBounds {
public:
    GeneBounds() = default;

    // n positions sharing the interval [lo, hi].
    static GeneBounds uniform(std::size_t n, Gene lo, Gene hi);

    void push_back(Gene lo, Gene hi);

    std::size_t size() const { return lo_.size(); }
    bool empty() const { return lo_.empty(); }
    Gene lo(std::size_t k) const { return lo_[k]; }
    Gene hi(std::size_t k) const { return hi_[k]; }

    bool contains(std::span<const Gene> genes) const;

    friend bool operator==(const GeneBounds&, const GeneBounds&) = default;

private:
    std::vector<Gene> lo_;
    std::vector<Gene> hi_;
};

using SharedBounds = std::shared_ptr<const GeneBounds>;

// Gene vector kept inside its bounds. Copies share the bounds object.
class IntGenotype {
public:
    IntGenotype() = default;

    // Throws std::invalid_argument when the genes do not conform to bounds.
    IntGenotype(std::vector<Gene> genes, SharedBounds bounds);

    std::span<const Gene> genes() const { return genes_; }
    const GeneBounds& bounds() const { return *bounds_; }
    const SharedBounds& shared_bounds() const { return bounds_; }
    std::size_t size() const { return genes_.size(); }
    Gene operator[](std::size_t k) const { return genes_[k]; }

    friend bool operator==(const IntGenotype& a, const IntGenotype& b) { return a.genes_ == b.genes_; }

private:
    friend IntGenotype mutate(const IntGenotype&, double, Rng&);

    std::vector<Gene> genes_;
    SharedBounds bounds_;
};

// Each gene drawn independently and uniformly from its interval.
IntGenotype init_random(SharedBounds bounds, Rng& rng);

// Copy of g where every position is, with probability mut_rate, replaced by a
// fresh uniform draw from its own interval. The draw may reproduce the old
// value. Mutated positions are located by geometric gap sampling, which is
// distributionally identical to one Bernoulli trial per gene.
IntGenotype mutate(const IntGenotype& g, double mut_rate, Rng& rng);

inline constexpr Gene kWeightGeneMax = 255;
inline constexpr double kWeightRange = 8.0;

// Linear map [0, 255] -> [-8, 8] with exact endpoints.
template <typename Scalar = double>
Scalar decode_weight(Gene gene) {
    if (gene < 0 || gene > kWeightGeneMax) throw std::out_of_range("decode_weight: gene outside [0, 255]");
    return Scalar(-kWeightRange) + Scalar(2 * kWeightRange) * Scalar(gene) / Scalar(kWeightGeneMax);
}

}  // namespace evolearn
