#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evolearn/harness.hpp"

namespace {

using namespace evolearn;

std::ofstream open_output(const std::filesystem::path& file) {
    if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    return os;
}

void finish_output(std::ofstream& os, const std::filesystem::path& file) {
    os.close();
    if (!os) throw std::runtime_error("error while writing " + file.string());
}

struct RunOptions {
    std::string task;
    std::string algo;
    std::vector<double> mut_rates{0.01};
    std::vector<int> pop_sizes{10};
    std::vector<double> noise{0.0};
    std::vector<int> learn_iters{0};
    std::string learn_accept = "strict";
    int replications = 1;
    std::int64_t max_steps = 100'000'000;
    std::uint64_t seed = 1;
    int jobs = 1;
    std::string out;
};

int cmd_run(const RunOptions& o) {
    ExperimentSpec spec;
    spec.task = parse_task(o.task);
    spec.algo = parse_algo(o.algo);
    spec.mut_rates = o.mut_rates;
    spec.pop_sizes = o.pop_sizes;
    spec.noise_ranges = o.noise;
    spec.learn_iters = o.learn_iters;
    spec.learn_accept = parse_learn_accept(o.learn_accept);
    spec.replications = o.replications;
    spec.max_steps = o.max_steps;
    spec.base_seed = o.seed;
    spec.validate();

    const std::filesystem::path dir(o.out);
    std::ofstream os = open_records_for_write(dir);
    const std::vector<RunRecord> records = run_experiment(spec, o.jobs);
    write_records(os, records);
    finish_output(os, dir / kRecordsFile);
    std::cout << "wrote " << records.size() << " records to " << (dir / kRecordsFile).string() << '\n';
    return 0;
}

int cmd_summarize(const std::string& in, const std::string& out) {
    const std::vector<SummaryRow> rows = summarize(load_records(in));
    std::ofstream os = open_output(out);
    write_summary_csv(os, rows);
    finish_output(os, out);
    std::cout << "wrote " << rows.size() << " summary rows to " << out << '\n';
    return 0;
}

int cmd_compare(const std::string& a_ref, const std::string& b_ref, std::size_t m, const std::string& metric_name,
                double threshold) {
    const Metric metric = parse_metric(metric_name);
    auto load_group = [&](const std::string& ref) {
        const auto [dir, selector] = parse_group_ref(ref);
        std::vector<RunRecord> group = select(load_records(dir), selector);
        if (group.empty()) throw std::runtime_error("no records match " + ref);
        return metric_values(group, metric, threshold);
    };
    const std::vector<double> a = load_group(a_ref);
    const std::vector<double> b = load_group(b_ref);
    const stats::TestResult raw = stats::mann_whitney_u(a, b);
    const stats::TestResult adj = compare(a, b, m);
    std::cout << "metric,n_a,n_b,mean_a,mean_b,U,p_raw,m,p_adjusted\n"
              << metric_name << ',' << a.size() << ',' << b.size() << ',' << format_double(stats::mean(a)) << ','
              << format_double(stats::mean(b)) << ',' << format_double(adj.statistic) << ','
              << format_double(raw.p_value) << ',' << m << ',' << format_double(adj.p_value) << '\n';
    return 0;
}

int cmd_curves(const std::string& in, std::size_t points, const std::string& out, std::uint64_t seed) {
    const auto [dir, selector] = parse_group_ref(in);
    const std::vector<RunRecord> records = select(load_records(dir), selector);
    if (records.empty()) throw std::runtime_error("no records match " + in);
    const std::vector<SummaryRow> groups = summarize(records);
    if (groups.size() != 1) {
        std::string msg = "curves need a single parameter group; narrow the selection (DIR/key=value,...). Groups:";
        for (const SummaryRow& g : groups) {
            msg += "\n  task=" + std::string(to_string(g.task)) + ",algo=" + std::string(to_string(g.algo)) +
                   ",mut_rate=" + format_double(g.params.mut_rate) + ",pop_size=" + std::to_string(g.params.pop_size) +
                   ",noise=" + format_double(g.params.noise) + ",learn_iters=" + std::to_string(g.params.learn_iters) +
                   ",learn_accept=" + std::string(to_string(g.learn_accept));
        }
        throw std::runtime_error(msg);
    }
    const std::vector<CurveRow> rows = emit_curves(records, points, seed);
    std::ofstream os = open_output(out);
    write_curves_csv(os, rows);
    finish_output(os, out);
    std::cout << "wrote " << rows.size() << " curve points to " << out << '\n';
    return 0;
}

int cmd_control(const std::string& out, int replications, std::int64_t max_steps, std::uint64_t seed, int jobs) {
    const ExperimentSpec spec = control_popsize_spec(replications, seed, max_steps);
    spec.validate();
    const std::filesystem::path dir(out);
    std::ofstream os = open_records_for_write(dir);
    std::ofstream corr_os = open_output(dir / "correlation.csv");

    const std::vector<RunRecord> records = run_experiment(spec, jobs);
    write_records(os, records);
    finish_output(os, dir / kRecordsFile);

    const stats::TestResult t = control_popsize_correlation(records);
    std::size_t n = 0;
    for (const RunRecord& r : records) n += r.final_population_fitness.size();
    corr_os << "rho,p_value,n_individuals\n"
            << format_double(t.statistic) << ',' << format_double(t.p_value) << ',' << n << '\n';
    finish_output(corr_os, dir / "correlation.csv");
    std::cout << "spearman rho " << format_double(t.statistic) << " p " << format_double(t.p_value) << " over " << n
              << " individuals\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Evolution with and without Lamarckian learning on 5-bit parity and double-pole balancing"};
    app.require_subcommand(1);

    RunOptions run;
    CLI::App* run_cmd = app.add_subcommand("run", "Run a parameter grid and write DIR/records.jsonl");
    run_cmd->add_option("--task", run.task, "parity | dpole-fixed | dpole-random")
        ->required()
        ->check(CLI::IsMember({"parity", "dpole-fixed", "dpole-random"}));
    run_cmd->add_option("--algo", run.algo, "sss | hc | ssshc")
        ->required()
        ->check(CLI::IsMember({"sss", "hc", "ssshc"}));
    run_cmd->add_option("--mut-rate", run.mut_rates, "Per-gene mutation probabilities")
        ->delimiter(',')
        ->capture_default_str();
    run_cmd->add_option("--pop-size", run.pop_sizes, "Population sizes")->delimiter(',')->capture_default_str();
    run_cmd->add_option("--noise", run.noise, "Fitness noise ranges")->delimiter(',')->capture_default_str();
    run_cmd->add_option("--learn-iters", run.learn_iters, "Learning iterations (ssshc)")
        ->delimiter(',')
        ->capture_default_str();
    run_cmd->add_option("--learn-accept", run.learn_accept, "Learning acceptance rule: strict | ties (ssshc)")
        ->check(CLI::IsMember({"strict", "ties"}))
        ->capture_default_str();
    run_cmd->add_option("--replications", run.replications)->capture_default_str();
    run_cmd->add_option("--max-steps", run.max_steps, "Evaluation-step budget per run")->capture_default_str();
    run_cmd->add_option("--seed", run.seed, "Base seed")->capture_default_str();
    run_cmd->add_option("--jobs", run.jobs, "Concurrent runs")->capture_default_str();
    run_cmd->add_option("--out", run.out, "Output directory")->required();

    std::string sum_in;
    std::string sum_out;
    CLI::App* sum_cmd = app.add_subcommand("summarize", "Per-parameter mean and SD table");
    sum_cmd->add_option("--in", sum_in, "Directory holding records.jsonl")->required();
    sum_cmd->add_option("--out", sum_out, "Summary CSV path")->required();

    std::string cmp_a;
    std::string cmp_b;
    std::size_t cmp_m = 1;
    std::string cmp_metric = "fitness";
    double cmp_threshold = 1.0;
    CLI::App* cmp_cmd = app.add_subcommand("compare", "Mann-Whitney U test with Bonferroni correction");
    cmp_cmd->add_option("--a", cmp_a, "DIR or DIR/key=value,...")->required();
    cmp_cmd->add_option("--b", cmp_b, "DIR or DIR/key=value,...")->required();
    cmp_cmd->add_option("--m", cmp_m, "Number of comparisons")->capture_default_str();
    cmp_cmd->add_option("--metric", cmp_metric, "fitness | steps | generalization")
        ->check(CLI::IsMember({"fitness", "steps", "generalization"}))
        ->capture_default_str();
    cmp_cmd->add_option("--threshold", cmp_threshold, "Threshold for --metric steps")->capture_default_str();

    std::string cur_in;
    std::string cur_out;
    std::size_t cur_points = 100;
    std::uint64_t cur_seed = 1;
    CLI::App* cur_cmd = app.add_subcommand("curves", "Mean best-ever curve with 85% bootstrap interval");
    cur_cmd->add_option("--in", cur_in, "DIR or DIR/key=value,...")->required();
    cur_cmd->add_option("--points", cur_points)->capture_default_str();
    cur_cmd->add_option("--out", cur_out, "Curve CSV path")->required();
    cur_cmd->add_option("--seed", cur_seed, "Bootstrap seed")->capture_default_str();

    std::string ctl_out;
    int ctl_reps = 30;
    std::int64_t ctl_steps = 50'000'000;
    std::uint64_t ctl_seed = 1;
    int ctl_jobs = 1;
    CLI::App* ctl_cmd = app.add_subcommand("control-popsize", "Population-size control experiment");
    ctl_cmd->add_option("--out", ctl_out, "Output directory")->required();
    ctl_cmd->add_option("--replications", ctl_reps)->capture_default_str();
    ctl_cmd->add_option("--max-steps", ctl_steps)->capture_default_str();
    ctl_cmd->add_option("--seed", ctl_seed)->capture_default_str();
    ctl_cmd->add_option("--jobs", ctl_jobs)->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(run);
        if (sum_cmd->parsed()) return cmd_summarize(sum_in, sum_out);
        if (cmp_cmd->parsed()) return cmd_compare(cmp_a, cmp_b, cmp_m, cmp_metric, cmp_threshold);
        if (cur_cmd->parsed()) return cmd_curves(cur_in, cur_points, cur_out, cur_seed);
        if (ctl_cmd->parsed()) return cmd_control(ctl_out, ctl_reps, ctl_steps, ctl_seed, ctl_jobs);
    } catch (const std::exception& e) {
        std::cerr << "evolearn: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
