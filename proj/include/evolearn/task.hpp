#pragma once

#include <cstdint>

#include "evolearn/genome.hpp"
#include "evolearn/rng.hpp"

namespace evolearn {

// True fitness of one evaluation and the evaluation steps it consumed.
struct EvalOutcome {
    double fitness = 0.0;
    std::int64_t steps = 0;

    friend bool operator==(const EvalOutcome&, const EvalOutcome&) = default;
};

// Problem interface driven by the evolutionary algorithms. evaluate must
// return fitness in [0, 1] and consume at least one step.
class Task {
public:
    virtual ~Task() = default;

    virtual const SharedBounds& bounds() const = 0;
    virtual EvalOutcome evaluate(const IntGenotype& g, Rng& rng) const = 0;

    // True when evaluate is a pure function of the genotype and never touches
    // rng. The algorithms then replay a parent's stored outcome instead of
    // simulating it again; the steps are still charged.
    virtual bool deterministic() const { return false; }
};

}  // namespace evolearn
