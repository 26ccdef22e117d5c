#include "evolearn/genome.hpp"

#include <cmath>

namespace evolearn {

GeneBounds GeneBounds::uniform(std::size_t n, Gene lo, Gene hi) {
    GeneBounds b;
    b.lo_.reserve(n);
    b.hi_.reserve(n);
    for (std::size_t k = 0; k < n; ++k) b.push_back(lo, hi);
    return b;
}

void GeneBounds::push_back(Gene lo, Gene hi) {
    if (lo > hi) throw std::invalid_argument("GeneBounds: lo > hi");
    lo_.push_back(lo);
    hi_.push_back(hi);
}

bool GeneBounds::contains(std::span<const Gene> genes) const {
    if (genes.size() != size()) return false;
    for (std::size_t k = 0; k < genes.size(); ++k) {
        if (genes[k] < lo_[k] || genes[k] > hi_[k]) return false;
    }
    return true;
}

IntGenotype::IntGenotype(std::vector<Gene> genes, SharedBounds bounds)
    : genes_(std::move(genes)), bounds_(std::move(bounds)) {
    if (!bounds_) throw std::invalid_argument("IntGenotype: null bounds");
    if (!bounds_->contains(genes_)) throw std::invalid_argument("IntGenotype: genes violate bounds");
}

IntGenotype init_random(SharedBounds bounds, Rng& rng) {
    if (!bounds || bounds->empty()) throw std::invalid_argument("init_random: empty bounds");
    std::vector<Gene> genes(bounds->size());
    for (std::size_t k = 0; k < genes.size(); ++k) {
        genes[k] = static_cast<Gene>(rng.uniform_int(bounds->lo(k), bounds->hi(k)));
    }
    return IntGenotype(std::move(genes), std::move(bounds));
}

IntGenotype mutate(const IntGenotype& g, double mut_rate, Rng& rng) {
    if (!(mut_rate >= 0.0 && mut_rate <= 1.0)) throw std::invalid_argument("mutate: mut_rate outside [0, 1]");
    IntGenotype out = g;
    if (mut_rate == 0.0) return out;

    const GeneBounds& b = *out.bounds_;
    const std::size_t n = out.genes_.size();
    if (mut_rate == 1.0) {
        for (std::size_t k = 0; k < n; ++k) out.genes_[k] = static_cast<Gene>(rng.uniform_int(b.lo(k), b.hi(k)));
        return out;
    }

    // Gap to the next mutated position ~ Geometric(mut_rate) (failures before success).
    const double log_q = std::log1p(-mut_rate);
    std::size_t k = 0;
    while (true) {
        const double u = 1.0 - rng.uniform01();  // (0, 1]
        const double gap = std::floor(std::log(u) / log_q);
        if (gap >= static_cast<double>(n - k)) break;
        k += static_cast<std::size_t>(gap);
        out.genes_[k] = static_cast<Gene>(rng.uniform_int(b.lo(k), b.hi(k)));
        if (++k >= n) break;
    }
    return out;
}

}  // namespace evolearn
