#include "evolearn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "evolearn/cartpole.hpp"
#include "evolearn/circuits.hpp"

namespace evolearn {

std::string_view to_string(TaskId t) {
    switch (t) {
        case TaskId::parity: return "parity";
        case TaskId::dpole_fixed: return "dpole-fixed";
        case TaskId::dpole_random: return "dpole-random";
    }
    throw std::invalid_argument("unknown TaskId");
}

std::string_view to_string(AlgoId a) {
    switch (a) {
        case AlgoId::sss: return "sss";
        case AlgoId::hc: return "hc";
        case AlgoId::ssshc: return "ssshc";
    }
    throw std::invalid_argument("unknown AlgoId");
}

std::string_view to_string(LearnAccept a) {
    switch (a) {
        case LearnAccept::strict: return "strict";
        case LearnAccept::ties: return "ties";
    }
    throw std::invalid_argument("unknown LearnAccept");
}

TaskId parse_task(std::string_view s) {
    for (TaskId t : {TaskId::parity, TaskId::dpole_fixed, TaskId::dpole_random}) {
        if (s == to_string(t)) return t;
    }
    throw std::invalid_argument("unknown task: " + std::string(s));
}

AlgoId parse_algo(std::string_view s) {
    for (AlgoId a : {AlgoId::sss, AlgoId::hc, AlgoId::ssshc}) {
        if (s == to_string(a)) return a;
    }
    throw std::invalid_argument("unknown algorithm: " + std::string(s));
}

LearnAccept parse_learn_accept(std::string_view s) {
    for (LearnAccept a : {LearnAccept::strict, LearnAccept::ties}) {
        if (s == to_string(a)) return a;
    }
    throw std::invalid_argument("unknown learning acceptance rule: " + std::string(s));
}

std::unique_ptr<Task> make_task(TaskId t) {
    switch (t) {
        case TaskId::parity: return std::make_unique<ParityTask>();
        case TaskId::dpole_fixed: return std::make_unique<DoublePoleTask>(EpisodeProtocol{InitialStates::fixed});
        case TaskId::dpole_random: return std::make_unique<DoublePoleTask>(EpisodeProtocol{InitialStates::random});
    }
    throw std::invalid_argument("unknown TaskId");
}

void ExperimentSpec::validate() const {
    if (mut_rates.empty() || pop_sizes.empty() || noise_ranges.empty() || learn_iters.empty()) {
        throw std::invalid_argument("ExperimentSpec: every parameter grid needs at least one value");
    }
    for (double m : mut_rates) {
        if (!(m >= 0.0 && m <= 1.0)) throw std::invalid_argument("ExperimentSpec: mut_rate outside [0, 1]");
    }
    for (int p : pop_sizes) {
        if (p < 1) throw std::invalid_argument("ExperimentSpec: pop_size must be >= 1");
    }
    for (double n : noise_ranges) {
        if (!(n >= 0.0 && std::isfinite(n))) throw std::invalid_argument("ExperimentSpec: noise must be >= 0");
    }
    for (int l : learn_iters) {
        if (l < 0) throw std::invalid_argument("ExperimentSpec: learn_iters must be >= 0");
    }
    if (replications < 1) throw std::invalid_argument("ExperimentSpec: replications must be >= 1");
    if (max_steps < 1) throw std::invalid_argument("ExperimentSpec: max_steps must be >= 1");
    for (double t : thresholds) {
        if (!std::isfinite(t)) throw std::invalid_argument("ExperimentSpec: non-finite threshold");
    }
}

std::vector<GridPoint> ExperimentSpec::grid() const {
    std::vector<GridPoint> out;
    for (double m : mut_rates)
        for (int p : pop_sizes)
            for (double n : noise_ranges)
                for (int l : learn_iters) out.push_back({m, p, n, l});
    return out;
}

std::uint64_t run_seed(std::uint64_t base_seed, TaskId task, AlgoId algo, const GridPoint& point, int replication) {
    std::uint64_t h = base_seed;
    h = hash_combine(h, hash_string(to_string(task)));
    h = hash_combine(h, hash_string(to_string(algo)));
    h = hash_combine(h, hash_double(point.mut_rate));
    h = hash_combine(h, static_cast<std::uint64_t>(point.pop_size));
    h = hash_combine(h, hash_double(point.noise));
    h = hash_combine(h, static_cast<std::uint64_t>(point.learn_iters));
    return hash_combine(h, static_cast<std::uint64_t>(replication));
}

std::vector<CurvePoint> thin_curve(const std::vector<GenerationRecord>& generations, std::size_t max_points) {
    if (max_points < 2) throw std::invalid_argument("thin_curve: max_points must be >= 2");
    std::vector<CurvePoint> out;
    if (generations.empty()) return out;
    const std::int64_t first = generations.front().steps;
    const std::int64_t span = generations.back().steps - first;
    // Bucket b covers steps in [first + b*span/(B), ...); one kept per bucket,
    // plus the last generation.
    const auto n_buckets = static_cast<std::int64_t>(max_points - 1);
    std::int64_t last_bucket = -1;
    for (std::size_t g = 0; g + 1 < generations.size(); ++g) {
        const std::int64_t offset = generations[g].steps - first;
        const std::int64_t bucket =
            span == 0 ? 0
                      : static_cast<std::int64_t>(static_cast<long double>(offset) * n_buckets / span);
        if (bucket != last_bucket && bucket < n_buckets) {
            out.push_back({generations[g].steps, generations[g].best_ever});
            last_bucket = bucket;
        }
    }
    out.push_back({generations.back().steps, generations.back().best_ever});
    return out;
}

const ThresholdCrossing& RunRecord::crossing(double threshold) const {
    for (const ThresholdCrossing& c : steps_to) {
        if (c.threshold == threshold) return c;
    }
    throw std::out_of_range("record has no crossing for threshold " + format_double(threshold));
}

RunRecord run_single(const ExperimentSpec& spec, const GridPoint& point, int replication) {
    const std::unique_ptr<Task> task = make_task(spec.task);
    AlgoConfig cfg;
    cfg.n_parents = point.pop_size;
    cfg.mut_rate = point.mut_rate;
    cfg.noise_range = point.noise;
    cfg.n_learn_iters = point.learn_iters;
    cfg.learn_accept = spec.learn_accept;
    cfg.max_steps = spec.max_steps;
    cfg.thresholds = spec.thresholds;
    cfg.seed = run_seed(spec.base_seed, spec.task, spec.algo, point, replication);

    RunLog log;
    switch (spec.algo) {
        case AlgoId::sss: log = run_sss(*task, cfg); break;
        case AlgoId::hc: log = run_hc(*task, cfg); break;
        case AlgoId::ssshc: log = run_ssshc(*task, cfg); break;
    }

    RunRecord r;
    r.task = spec.task;
    r.algo = spec.algo;
    r.params = point;
    r.learn_accept = spec.learn_accept;
    r.max_steps = spec.max_steps;
    r.replication = replication;
    r.seed = cfg.seed;
    r.final_fitness = log.best_fitness;
    r.steps_to = log.crossings;
    r.curve = thin_curve(log.generations);
    r.total_steps = log.total_steps;
    r.evaluations = log.evaluations;
    r.best_genotype.assign(log.best_genotype.genes().begin(), log.best_genotype.genes().end());
    r.final_population_fitness = log.final_population_fitness;
    if (spec.task == TaskId::dpole_random) r.generalization_fitness = generalization_eval(r);
    return r;
}

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, int jobs) {
    spec.validate();
    if (jobs < 1) throw std::invalid_argument("run_experiment: jobs must be >= 1");
    const std::vector<GridPoint> grid = spec.grid();
    const std::size_t reps = static_cast<std::size_t>(spec.replications);
    const std::size_t total = grid.size() * reps;
    std::vector<RunRecord> out(total);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t k = next++; k < total; k = next++) {
            try {
                out[k] = run_single(spec, grid[k / reps], static_cast<int>(k % reps));
            } catch (...) {
                const std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = total;
            }
        }
    };
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(jobs), total);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

double generalization_eval(const RunRecord& record) {
    if (record.task != TaskId::dpole_random) {
        throw std::invalid_argument("generalization_eval: record is not from dpole-random");
    }
    const DoublePoleTask fixed_task(EpisodeProtocol{InitialStates::fixed});
    const IntGenotype g(record.best_genotype, fixed_task.bounds());
    Rng unused(0);
    return fixed_task.evaluate(g, unused).fitness;
}

namespace {

struct GroupKey {
    TaskId task;
    AlgoId algo;
    GridPoint params;
    LearnAccept learn_accept;
    std::int64_t max_steps;

    friend bool operator==(const GroupKey&, const GroupKey&) = default;
};

GroupKey key_of(const RunRecord& r) { return {r.task, r.algo, r.params, r.learn_accept, r.max_steps}; }

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records) {
    std::vector<GroupKey> keys;
    std::vector<std::vector<const RunRecord*>> groups;
    for (const RunRecord& r : records) {
        const GroupKey k = key_of(r);
        const auto it = std::find(keys.begin(), keys.end(), k);
        if (it == keys.end()) {
            keys.push_back(k);
            groups.push_back({&r});
        } else {
            groups[static_cast<std::size_t>(it - keys.begin())].push_back(&r);
        }
    }

    std::vector<SummaryRow> rows;
    for (std::size_t g = 0; g < keys.size(); ++g) {
        const auto& members = groups[g];
        SummaryRow row;
        row.task = keys[g].task;
        row.algo = keys[g].algo;
        row.params = keys[g].params;
        row.learn_accept = keys[g].learn_accept;
        row.max_steps = keys[g].max_steps;
        row.n = static_cast<int>(members.size());

        std::vector<double> fitness;
        for (const RunRecord* r : members) fitness.push_back(r->final_fitness);
        row.fitness_mean = stats::mean(fitness);
        row.fitness_sd = stats::population_sd(fitness);

        for (const ThresholdCrossing& c : members.front()->steps_to) {
            StepsSummary s;
            s.threshold = c.threshold;
            std::vector<double> steps;
            for (const RunRecord* r : members) {
                const ThresholdCrossing& rc = r->crossing(c.threshold);
                steps.push_back(static_cast<double>(rc.steps));
                s.reached += rc.reached ? 1 : 0;
            }
            s.mean = stats::mean(steps);
            s.sd = stats::population_sd(steps);
            row.steps.push_back(s);
        }

        std::vector<double> gen;
        for (const RunRecord* r : members) {
            if (r->generalization_fitness) gen.push_back(*r->generalization_fitness);
        }
        if (!gen.empty()) {
            row.generalization_mean = stats::mean(gen);
            row.generalization_sd = stats::population_sd(gen);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "# sd columns are population standard deviations (divide by n); "
          "steps of unreached thresholds count as max_steps\n";
    os << "task,algo,mut_rate,pop_size,noise,learn_iters,learn_accept,max_steps,n,fitness_mean,fitness_sd";
    const std::vector<StepsSummary> no_steps;
    const auto& thresholds = rows.empty() ? no_steps : rows.front().steps;
    for (const StepsSummary& s : thresholds) {
        char buf[32];
        const std::string t(buf, std::to_chars(buf, buf + sizeof buf, s.threshold).ptr);  // shortest round-trip
        os << ",steps_mean@" << t << ",steps_sd@" << t << ",reached@" << t;
    }
    os << ",generalization_mean,generalization_sd\n";
    for (const SummaryRow& r : rows) {
        if (r.steps.size() != thresholds.size()) {
            throw std::invalid_argument("write_summary_csv: rows use different threshold lists");
        }
        os << to_string(r.task) << ',' << to_string(r.algo) << ',' << format_double(r.params.mut_rate) << ','
           << r.params.pop_size << ',' << format_double(r.params.noise) << ',' << r.params.learn_iters << ','
           << to_string(r.learn_accept) << ',' << r.max_steps << ',' << r.n << ',' << format_double(r.fitness_mean)
           << ',' << format_double(r.fitness_sd);
        for (std::size_t k = 0; k < r.steps.size(); ++k) {
            if (r.steps[k].threshold != thresholds[k].threshold) {
                throw std::invalid_argument("write_summary_csv: rows use different threshold lists");
            }
            os << ',' << format_double(r.steps[k].mean) << ',' << format_double(r.steps[k].sd) << ','
               << r.steps[k].reached;
        }
        os << ',' << (r.generalization_mean ? format_double(*r.generalization_mean) : "") << ','
           << (r.generalization_sd ? format_double(*r.generalization_sd) : "") << '\n';
    }
}

Metric parse_metric(std::string_view s) {
    if (s == "fitness") return Metric::fitness;
    if (s == "steps") return Metric::steps;
    if (s == "generalization") return Metric::generalization;
    throw std::invalid_argument("unknown metric: " + std::string(s));
}

std::vector<double> metric_values(const std::vector<RunRecord>& records, Metric metric, double threshold) {
    std::vector<double> out;
    out.reserve(records.size());
    for (const RunRecord& r : records) {
        switch (metric) {
            case Metric::fitness: out.push_back(r.final_fitness); break;
            case Metric::steps: out.push_back(static_cast<double>(r.crossing(threshold).steps)); break;
            case Metric::generalization:
                if (!r.generalization_fitness) throw std::invalid_argument("record has no generalization fitness");
                out.push_back(*r.generalization_fitness);
                break;
        }
    }
    return out;
}

stats::TestResult compare(std::span<const double> a, std::span<const double> b, std::size_t m) {
    stats::TestResult t = stats::mann_whitney_u(a, b);
    t.p_value = stats::bonferroni(t.p_value, m);
    return t;
}

std::vector<CurveRow> emit_curves(const std::vector<RunRecord>& records, std::size_t n_points, std::uint64_t seed,
                                  std::size_t n_resamples) {
    if (records.empty()) throw std::invalid_argument("emit_curves: no records");
    if (n_points < 2) throw std::invalid_argument("emit_curves: need at least two points");
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    for (const RunRecord& r : records) {
        if (r.curve.empty()) throw std::invalid_argument("emit_curves: record without a curve");
        lo = std::max(lo, r.curve.front().steps);
        hi = std::max(hi, r.curve.back().steps);
    }

    Rng rng(seed);
    std::vector<CurveRow> rows;
    rows.reserve(n_points);
    std::vector<std::size_t> cursor(records.size(), 0);
    std::vector<double> values(records.size());
    for (std::size_t k = 0; k < n_points; ++k) {
        const double steps = static_cast<double>(lo) +
                             static_cast<double>(hi - lo) * static_cast<double>(k) / static_cast<double>(n_points - 1);
        for (std::size_t i = 0; i < records.size(); ++i) {
            const auto& curve = records[i].curve;
            // Step function: the last logged point at or before `steps`.
            while (cursor[i] + 1 < curve.size() && static_cast<double>(curve[cursor[i] + 1].steps) <= steps) {
                ++cursor[i];
            }
            values[i] = curve[cursor[i]].best;
        }
        const stats::Interval ci = stats::bootstrap_ci(values, kCurveLevel, n_resamples, rng);
        rows.push_back({steps, stats::mean(values), ci.lo, ci.hi});
    }
    return rows;
}

void write_curves_csv(std::ostream& os, const std::vector<CurveRow>& rows) {
    os << "steps,mean,lo,hi\n";
    for (const CurveRow& r : rows) {
        os << format_double(r.steps) << ',' << format_double(r.mean) << ',' << format_double(r.lo) << ','
           << format_double(r.hi) << '\n';
    }
}

ExperimentSpec control_popsize_spec(int replications, std::uint64_t base_seed, std::int64_t max_steps) {
    ExperimentSpec spec;
    spec.task = TaskId::dpole_fixed;
    spec.algo = AlgoId::ssshc;
    spec.mut_rates = {0.05};
    spec.pop_sizes = {10, 20, 50, 100, 200, 500};
    spec.noise_ranges = {0.0};
    spec.learn_iters = {5};
    spec.replications = replications;
    spec.base_seed = base_seed;
    spec.max_steps = max_steps;
    return spec;
}

stats::TestResult control_popsize_correlation(const std::vector<RunRecord>& records) {
    std::vector<double> sizes;
    std::vector<double> fitness;
    for (const RunRecord& r : records) {
        if (r.final_population_fitness.size() != static_cast<std::size_t>(r.params.pop_size)) {
            throw std::invalid_argument("control_popsize_correlation: final population size mismatch");
        }
        for (double f : r.final_population_fitness) {
            sizes.push_back(r.params.pop_size);
            fitness.push_back(f);
        }
    }
    return stats::spearman(sizes, fitness);
}

}  // namespace evolearn
