#include "evolearn/algorithms.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace evolearn {

void AlgoConfig::validate() const {
    if (n_parents < 1) throw std::invalid_argument("AlgoConfig: n_parents must be >= 1");
    if (!(mut_rate >= 0.0 && mut_rate <= 1.0)) throw std::invalid_argument("AlgoConfig: mut_rate outside [0, 1]");
    if (!(noise_range >= 0.0)) throw std::invalid_argument("AlgoConfig: noise_range must be >= 0");
    if (n_learn_iters < 0) throw std::invalid_argument("AlgoConfig: n_learn_iters must be >= 0");
    if (max_steps < 1) throw std::invalid_argument("AlgoConfig: max_steps must be >= 1");
}

double noisy(double f, double noise_range, Rng& rng) {
    if (noise_range < 0.0) throw std::invalid_argument("noisy: negative noise_range");
    if (noise_range == 0.0) return f;
    return f + rng.uniform(-noise_range, noise_range);
}

namespace {

struct Individual {
    IntGenotype genotype;
    double fitness = 0.0;   // true
    double score = 0.0;     // noisy, used for every comparison
    std::int64_t steps = 0;  // 0 until evaluated
};

struct Streams {
    Rng init;
    Rng mutation;
    Rng noise;
    Rng task;

    explicit Streams(std::uint64_t root)
        : init(child_stream(root, Stream::init)),
          mutation(child_stream(root, Stream::mutation)),
          noise(child_stream(root, Stream::noise)),
          task(child_stream(root, Stream::task)) {}
};

// Step accounting, best-ever tracking and per-generation logging shared by
// all three algorithms.
class Recorder {
public:
    Recorder(const Task& task, const AlgoConfig& cfg) : task_(task), cfg_(cfg) {
        for (double t : cfg.thresholds) log_.crossings.push_back({t, cfg.max_steps, false});
    }

    bool budget_left() const { return log_.total_steps < cfg_.max_steps; }

    Individual evaluate(IntGenotype g, Streams& rng) {
        const EvalOutcome out = task_.evaluate(g, rng.task);
        if (out.steps < 1) throw std::logic_error("task evaluation consumed no steps");
        if (log_.evaluations == 0 || out.fitness > log_.best_fitness) {
            log_.best_fitness = out.fitness;
            log_.best_genotype = g;
        }
        return charge(Individual{std::move(g), out.fitness, 0.0, out.steps}, rng);
    }

    // Parent evaluation at the start of a generation.
    Individual reevaluate(Individual ind, Streams& rng) {
        if (ind.steps > 0 && task_.deterministic()) return charge(std::move(ind), rng);
        return evaluate(std::move(ind.genotype), rng);
    }

    Individual charge(Individual ind, Streams& rng) {
        log_.total_steps += ind.steps;
        ++log_.evaluations;
        ind.score = noisy(ind.fitness, cfg_.noise_range, rng.noise);
        return ind;
    }

    void end_generation(const std::vector<Individual>& population) {
        GenerationRecord rec;
        rec.generation = static_cast<std::int64_t>(log_.generations.size());
        rec.steps = log_.total_steps;
        double sum = 0.0;
        rec.best_fitness = population.front().fitness;
        for (const Individual& ind : population) {
            rec.best_fitness = std::max(rec.best_fitness, ind.fitness);
            sum += ind.fitness;
        }
        rec.mean_fitness = sum / static_cast<double>(population.size());
        rec.best_ever = log_.best_fitness;
        log_.generations.push_back(rec);
        for (ThresholdCrossing& c : log_.crossings) {
            if (!c.reached && log_.best_fitness >= c.threshold) {
                c.reached = true;
                c.steps = log_.total_steps;
            }
        }
    }

    RunLog finish(std::vector<Individual> population) {
        for (Individual& ind : population) {
            log_.final_population_fitness.push_back(ind.fitness);
            log_.final_population.push_back(std::move(ind.genotype));
        }
        return std::move(log_);
    }

private:
    const Task& task_;
    const AlgoConfig& cfg_;
    RunLog log_;
};

RunLog run_steady_state(const Task& task, const AlgoConfig& cfg, int learn_iters) {
    cfg.validate();
    const std::size_t mu = static_cast<std::size_t>(cfg.n_parents);
    Streams rng(cfg.seed);
    Recorder rec(task, cfg);

    std::vector<Individual> population(mu);
    for (std::size_t p = 0; p < mu; ++p) population[p].genotype = init_random(task.bounds(), rng.init);

    std::vector<Individual> pool(2 * mu);
    std::vector<std::size_t> order(2 * mu);
    while (rec.budget_left()) {
        for (std::size_t p = 0; p < mu; ++p) {
            pool[p] = rec.reevaluate(std::move(population[p]), rng);
            pool[mu + p] = rec.evaluate(mutate(pool[p].genotype, cfg.mut_rate, rng.mutation), rng);
        }
        // Stable descending rank: on equal scores parents (lower index) stay first.
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pool[a].score > pool[b].score; });
        for (std::size_t p = 0; p < mu; ++p) population[p] = std::move(pool[order[p]]);

        const bool ties = cfg.learn_accept == LearnAccept::ties;
        for (std::size_t p = 0; p < mu && learn_iters > 0; ++p) {
            Individual& selected = population[p];
            for (int iter = 0; iter < learn_iters; ++iter) {
                Individual candidate = rec.evaluate(mutate(selected.genotype, cfg.mut_rate, rng.mutation), rng);
                if (candidate.score > selected.score || (ties && candidate.score == selected.score)) {
                    selected = std::move(candidate);
                }
                if (cfg.observer) cfg.observer->learning_step(p, iter, selected.fitness, selected.score);
            }
        }

        rec.end_generation(population);
    }
    return rec.finish(std::move(population));
}

}  // namespace

RunLog run_sss(const Task& task, const AlgoConfig& cfg) { return run_steady_state(task, cfg, 0); }

RunLog run_ssshc(const Task& task, const AlgoConfig& cfg) { return run_steady_state(task, cfg, cfg.n_learn_iters); }

std::vector<std::uint64_t> hc_lineage_seeds(const AlgoConfig& cfg) {
    std::vector<std::uint64_t> seeds(static_cast<std::size_t>(std::max(cfg.n_parents, 0)));
    for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = hash_combine(cfg.seed, k);
    return seeds;
}

RunLog run_hc(const Task& task, const AlgoConfig& cfg) {
    const std::vector<std::uint64_t> seeds = hc_lineage_seeds(cfg);
    return run_hc(task, cfg, seeds);
}

RunLog run_hc(const Task& task, const AlgoConfig& cfg, std::span<const std::uint64_t> lineage_seeds) {
    cfg.validate();
    const std::size_t mu = static_cast<std::size_t>(cfg.n_parents);
    if (lineage_seeds.size() != mu) throw std::invalid_argument("run_hc: need one seed per lineage");

    std::vector<Streams> rng;
    rng.reserve(mu);
    for (std::uint64_t s : lineage_seeds) rng.emplace_back(s);
    Recorder rec(task, cfg);

    std::vector<Individual> population(mu);
    for (std::size_t p = 0; p < mu; ++p) population[p].genotype = init_random(task.bounds(), rng[p].init);

    for (std::int64_t generation = 0; rec.budget_left(); ++generation) {
        for (std::size_t p = 0; p < mu; ++p) {
            Individual parent = rec.reevaluate(std::move(population[p]), rng[p]);
            Individual child = rec.evaluate(mutate(parent.genotype, cfg.mut_rate, rng[p].mutation), rng[p]);
            population[p] = child.score >= parent.score ? std::move(child) : std::move(parent);
            if (cfg.observer) {
                cfg.observer->lineage_step(p, generation, population[p].fitness, population[p].score);
            }
        }
        rec.end_generation(population);
    }
    return rec.finish(std::move(population));
}

}  // namespace evolearn
