#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "evolearn/genome.hpp"
#include "evolearn/rng.hpp"
#include "evolearn/task.hpp"

namespace evolearn {

// Acceptance rule of the SSSHC learning loop.
enum class LearnAccept {
    strict,  // candidate replaces the survivor only on strictly higher noisy fitness
    ties,    // equal noisy fitness also replaces it, allowing neutral drift
};

// Optional hooks into the inner loops; the default implementations do nothing.
class RunObserver {
public:
    virtual ~RunObserver() = default;
    // SSSHC: state of survivor `individual` after learning iteration `iter`.
    virtual void learning_step(std::size_t individual, int iter, double fitness, double score) {
        (void)individual, (void)iter, (void)fitness, (void)score;
    }
    // HC: state of `lineage` after the replacement decision of `generation`.
    virtual void lineage_step(std::size_t lineage, std::int64_t generation, double fitness, double score) {
        (void)lineage, (void)generation, (void)fitness, (void)score;
    }
};

struct AlgoConfig {
    int n_parents = 10;
    double mut_rate = 0.01;
    double noise_range = 0.0;
    int n_learn_iters = 0;  // SSSHC only
    LearnAccept learn_accept = LearnAccept::strict;  // SSSHC only
    std::int64_t max_steps = 100'000'000;
    std::uint64_t seed = 1;
    std::vector<double> thresholds{0.95, 1.0};
    RunObserver* observer = nullptr;  // not owned

    // Throws std::invalid_argument on out-of-range fields.
    void validate() const;
};

// State at the end of one generation (after selection, and after learning
// for SSSHC). Fitness values are true (noise-free) fitness.
struct GenerationRecord {
    std::int64_t generation = 0;
    std::int64_t steps = 0;       // cumulative evaluation steps
    double best_fitness = 0.0;    // best in the current population
    double mean_fitness = 0.0;    // mean over the current population
    double best_ever = 0.0;       // best over every evaluation so far

    friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

// Cumulative steps at the first generation boundary where best_ever reached
// the threshold; steps = max_steps when it never did.
struct ThresholdCrossing {
    double threshold = 0.0;
    std::int64_t steps = 0;
    bool reached = false;

    friend bool operator==(const ThresholdCrossing&, const ThresholdCrossing&) = default;
};

struct RunLog {
    std::vector<GenerationRecord> generations;
    std::vector<ThresholdCrossing> crossings;
    IntGenotype best_genotype;  // highest true fitness over every evaluation
    double best_fitness = 0.0;
    std::vector<IntGenotype> final_population;
    std::vector<double> final_population_fitness;
    std::int64_t total_steps = 0;
    std::int64_t evaluations = 0;

    friend bool operator==(const RunLog&, const RunLog&) = default;
};

// f + u with u ~ Uniform[-noise_range, noise_range]; not clamped.
double noisy(double f, double noise_range, Rng& rng);

// Stochastic steady state: (mu + mu) selection on noisy fitness. Ties keep
// parents ahead of offspring.
RunLog run_sss(const Task& task, const AlgoConfig& cfg);

// mu independent (1 + 1) lineages; the offspring replaces its parent when its
// noisy fitness is not lower. Each lineage owns its random streams.
RunLog run_hc(const Task& task, const AlgoConfig& cfg);

// Same, with explicit per-lineage seeds (one per parent).
RunLog run_hc(const Task& task, const AlgoConfig& cfg, std::span<const std::uint64_t> lineage_seeds);

// Seeds run_hc(task, cfg) assigns to its lineages.
std::vector<std::uint64_t> hc_lineage_seeds(const AlgoConfig& cfg);

// SSS followed, every generation, by n_learn_iters rounds of hill climbing on
// each survivor. A learned variation is written back into the genotype when
// its noisy fitness beats the survivor's current noisy fitness under
// cfg.learn_accept.
RunLog run_ssshc(const Task& task, const AlgoConfig& cfg);

}  // namespace evolearn
