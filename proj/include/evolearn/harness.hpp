#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evolearn/algorithms.hpp"
#include "evolearn/stats.hpp"
#include "evolearn/task.hpp"

namespace evolearn {

enum class TaskId { parity, dpole_fixed, dpole_random };
enum class AlgoId { sss, hc, ssshc };

std::string_view to_string(TaskId t);
std::string_view to_string(AlgoId a);
std::string_view to_string(LearnAccept a);
// Throw std::invalid_argument on unknown names.
TaskId parse_task(std::string_view s);
AlgoId parse_algo(std::string_view s);
LearnAccept parse_learn_accept(std::string_view s);

std::unique_ptr<Task> make_task(TaskId t);

// One point of a parameter grid.
struct GridPoint {
    double mut_rate = 0.01;
    int pop_size = 10;
    double noise = 0.0;
    int learn_iters = 0;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct ExperimentSpec {
    TaskId task = TaskId::parity;
    AlgoId algo = AlgoId::sss;
    std::vector<double> mut_rates{0.01};
    std::vector<int> pop_sizes{10};
    std::vector<double> noise_ranges{0.0};
    std::vector<int> learn_iters{0};
    LearnAccept learn_accept = LearnAccept::strict;
    int replications = 1;
    std::uint64_t base_seed = 1;
    std::int64_t max_steps = 100'000'000;
    std::vector<double> thresholds{0.95, 1.0};

    // Throws std::invalid_argument on empty grids or invalid values.
    void validate() const;

    // Canonical order: mut_rate outermost, then pop_size, noise, learn_iters.
    std::vector<GridPoint> grid() const;
};

// Stable hash of (base_seed, task, algo, mut_rate, pop_size, noise,
// learn_iters, replication). Floats enter through their bit patterns.
std::uint64_t run_seed(std::uint64_t base_seed, TaskId task, AlgoId algo, const GridPoint& point, int replication);

struct CurvePoint {
    std::int64_t steps = 0;
    double best = 0.0;  // best-ever true fitness

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

inline constexpr std::size_t kMaxCurvePoints = 2000;

// At most max_points generations, spread uniformly over cumulative steps.
// Always keeps the first and the last generation.
std::vector<CurvePoint> thin_curve(const std::vector<GenerationRecord>& generations,
                                   std::size_t max_points = kMaxCurvePoints);

inline constexpr int kSchemaVersion = 1;

struct RunRecord {
    TaskId task = TaskId::parity;
    AlgoId algo = AlgoId::sss;
    GridPoint params;
    LearnAccept learn_accept = LearnAccept::strict;
    std::int64_t max_steps = 0;
    int replication = 0;
    std::uint64_t seed = 0;
    double final_fitness = 0.0;  // best-ever true fitness of the run
    std::vector<ThresholdCrossing> steps_to;
    std::vector<CurvePoint> curve;
    std::optional<double> generalization_fitness;  // dpole-random only
    std::int64_t total_steps = 0;
    std::int64_t evaluations = 0;
    std::vector<Gene> best_genotype;
    std::vector<double> final_population_fitness;

    friend bool operator==(const RunRecord&, const RunRecord&) = default;

    // Steps to the given threshold; throws std::out_of_range when absent.
    const ThresholdCrossing& crossing(double threshold) const;
};

// One run of one grid point; the seed is run_seed(...).
RunRecord run_single(const ExperimentSpec& spec, const GridPoint& point, int replication);

// Records in canonical order (grid order, then replication index), whatever
// the execution schedule. jobs >= 1 replications run concurrently.
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, int jobs = 1);

// Fitness of a dpole-random record's best genotype under the fixed
// initial-state protocol. Throws std::invalid_argument for other tasks.
double generalization_eval(const RunRecord& record);

void write_record(std::ostream& os, const RunRecord& r);
void write_records(std::ostream& os, const std::vector<RunRecord>& records);
RunRecord parse_record(std::string_view line);
std::vector<RunRecord> read_records(std::istream& is);

inline constexpr const char* kRecordsFile = "records.jsonl";

// Creates dir if needed and opens dir/records.jsonl for writing; throws
// std::runtime_error when that is impossible. Call before computing.
std::ofstream open_records_for_write(const std::filesystem::path& dir);
std::vector<RunRecord> load_records(const std::filesystem::path& dir);

// Record filter written "key=value,key=value" over task, algo, mut_rate,
// pop_size, noise, learn_iters and learn_accept. Numeric values compare by
// value. An empty selector matches everything.
class Selector {
public:
    Selector() = default;
    explicit Selector(std::string_view text);

    bool matches(const RunRecord& r) const;

private:
    std::vector<std::pair<std::string, std::string>> terms_;
};

// Splits "DIR/selector" into (DIR, selector) when the last path component
// contains '='; otherwise the whole text is the directory.
std::pair<std::filesystem::path, Selector> parse_group_ref(std::string_view text);

std::vector<RunRecord> select(const std::vector<RunRecord>& records, const Selector& selector);

struct StepsSummary {
    double threshold = 0.0;
    double mean = 0.0;
    double sd = 0.0;
    int reached = 0;
};

struct SummaryRow {
    TaskId task = TaskId::parity;
    AlgoId algo = AlgoId::sss;
    GridPoint params;
    LearnAccept learn_accept = LearnAccept::strict;
    std::int64_t max_steps = 0;
    int n = 0;
    double fitness_mean = 0.0;
    double fitness_sd = 0.0;
    std::vector<StepsSummary> steps;
    std::optional<double> generalization_mean;
    std::optional<double> generalization_sd;
};

// Groups by parameter tuple in order of first appearance. SDs are population
// SDs. Unreached thresholds contribute max_steps to the step statistics.
std::vector<SummaryRow> summarize(const std::vector<RunRecord>& records);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);

enum class Metric { fitness, steps, generalization };
Metric parse_metric(std::string_view s);

std::vector<double> metric_values(const std::vector<RunRecord>& records, Metric metric, double threshold = 1.0);

// Mann-Whitney U on the two samples with the p-value Bonferroni-adjusted by m.
stats::TestResult compare(std::span<const double> a, std::span<const double> b, std::size_t m);

struct CurveRow {
    double steps = 0.0;
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    friend bool operator==(const CurveRow&, const CurveRow&) = default;
};

inline constexpr double kCurveLevel = 0.85;

// Resamples every record's best-ever curve onto n_points evenly spaced steps
// (from the latest first logged step to the latest last logged step; a curve
// holds its last value beyond its end) and reports the mean with a percentile
// bootstrap interval across records.
std::vector<CurveRow> emit_curves(const std::vector<RunRecord>& records, std::size_t n_points,
                                  std::uint64_t seed = 1,
                                  std::size_t n_resamples = stats::kDefaultBootstrapResamples);
void write_curves_csv(std::ostream& os, const std::vector<CurveRow>& rows);

// Population-size control: SSSHC on dpole-fixed, mut 5%, 5 learning
// iterations, no noise, pop sizes {10, 20, 50, 100, 200, 500}.
ExperimentSpec control_popsize_spec(int replications, std::uint64_t base_seed, std::int64_t max_steps);

// Spearman correlation between population size and the final fitness of
// every individual of every final population.
stats::TestResult control_popsize_correlation(const std::vector<RunRecord>& records);

// Text form of a double with 17 significant digits.
std::string format_double(double v);

}  // namespace evolearn
