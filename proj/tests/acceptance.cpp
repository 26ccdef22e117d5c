// Acceptance suite: one PASS/FAIL line per criterion.
//
//   evolearn_acceptance [--criterion N]... [--jobs N] [--all-seeds]
//
// Criteria 1-6 are exact oracle and property checks. Criteria 7-12 are
// reduced-scale statistical reproductions; each runs on the committed base
// seeds and passes when at least two of the three seeds pass. The third seed
// is skipped once the first two agree.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evolearn/algorithms.hpp"
#include "evolearn/cartpole.hpp"
#include "evolearn/circuits.hpp"
#include "evolearn/harness.hpp"
#include "evolearn/stats.hpp"
#include "support.hpp"

using namespace evolearn;

namespace {

// Committed base seeds for the statistical criteria.
constexpr std::array<std::uint64_t, 3> kBaseSeeds{20231, 40462, 60693};

int g_jobs = 1;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << v;
    return os.str();
}

std::string fmt_mean(const std::vector<double>& v) { return fmt(stats::mean(v)); }

// ---------------------------------------------------------------------------
// A. Oracle and property suites

Verdict circuit_oracle() {
    ParityTask task;
    Rng rng(1001);
    int disagreements = 0;
    for (int t = 0; t < 200; ++t) {
        const IntGenotype g = init_random(task.bounds(), rng);
        const TruthTable tt = truth_table(decode(g));
        testing::RecursiveOracle oracle(g);
        int correct = 0;
        for (std::uint32_t p = 0; p < 32; ++p) {
            const bool want = oracle.output(p);
            disagreements += ((tt >> p) & 1U) != want;
            correct += want == target_parity(p);
        }
        const EvalOutcome out = task.evaluate(g, rng);
        disagreements += out.fitness != correct / 32.0 || out.steps != 32;
    }
    return {disagreements == 0, "200 genotypes x 32 patterns, disagreements " + std::to_string(disagreements)};
}

Verdict parity_identities() {
    ParityTask task;
    Rng rng(0);
    const double perfect = task.evaluate(testing::even_parity_circuit(), rng).fitness;
    const double zero = task.evaluate(testing::constant_circuit(false), rng).fitness;
    const double one = task.evaluate(testing::constant_circuit(true), rng).fitness;
    int even = 0;
    for (std::uint32_t p = 0; p < 32; ++p) even += target_parity(p);
    const bool ok = perfect == 1.0 && zero == 0.5 && one == 0.5 && even == 16;
    return {ok, "perfect " + fmt(perfect) + ", constant-0 " + fmt(zero) + ", constant-1 " + fmt(one) +
                    ", even patterns " + std::to_string(even)};
}

Verdict physics() {
    const PhysicsParams p;
    const CartPoleState zero = CartPoleState::Zero();
    const bool fixed_point = rk4_step(zero, 0.0, p) == zero && control_step(zero, 0.0, p) == zero;

    Rng rng(1003);
    auto random_state = [&] {
        CartPoleState s;
        s << rng.uniform(-2.4, 2.4), rng.uniform(-2, 2), rng.uniform(-0.6, 0.6), rng.uniform(-3, 3),
            rng.uniform(-0.6, 0.6), rng.uniform(-3, 3);
        return s;
    };
    double mirror = 0.0;
    for (int t = 0; t < 100; ++t) {
        const CartPoleState s = random_state();
        const double f = rng.uniform(-10, 10);
        mirror = std::max(mirror, (derivatives(s, f, p) + derivatives<double>(-s, -f, p)).cwiseAbs().maxCoeff());
    }

    // Halving tau over 0.1 s against a long-double reference at tau / 100.
    const CartPoleModel<double> model(p);
    const CartPoleModel<long double> fine(p);
    double min_ratio = 1e300;
    for (int t = 0; t < 20; ++t) {
        const CartPoleState s0 = random_state() * 0.2;
        const double f = rng.uniform(-10, 10);
        CartPoleStateT<long double> ref = s0.cast<long double>();
        for (int k = 0; k < 1000; ++k) ref = fine.rk4_step(ref, static_cast<long double>(f), 1e-4L);
        auto error = [&](double h, int n) {
            CartPoleState s = s0;
            for (int k = 0; k < n; ++k) s = model.rk4_step(s, f, h);
            return static_cast<double>((s.cast<long double>() - ref).cwiseAbs().maxCoeff());
        };
        min_ratio = std::min(min_ratio, error(0.01, 10) / error(0.005, 20));
    }
    const bool ok = fixed_point && mirror <= 1e-12 && min_ratio >= 12.0;
    return {ok, std::string("rest fixed point ") + (fixed_point ? "exact" : "broken") + ", mirror residual " +
                    fmt(mirror) + " (<= 1e-12), min rk4 halving ratio " + fmt(min_ratio) + " (>= 12)"};
}

class Monitor final : public RunObserver {
public:
    void learning_step(std::size_t individual, int iter, double, double score) override {
        if (iter > 0 && individual == last_individual && score < last_score) ++violations;
        last_individual = individual;
        last_score = score;
        ++learning_steps;
    }
    void lineage_step(std::size_t lineage, std::int64_t, double fitness, double) override {
        auto [it, fresh] = lineage_fitness.try_emplace(lineage, fitness);
        if (!fresh && fitness < it->second) ++violations;
        it->second = fitness;
    }
    std::size_t last_individual = 0;
    double last_score = 0.0;
    std::int64_t learning_steps = 0;
    std::map<std::size_t, double> lineage_fitness;
    int violations = 0;
};

Verdict algorithms() {
    ParityTask parity;
    DoublePoleTask dpole({InitialStates::fixed});
    std::vector<std::string> failures;
    int audited = 0;
    // Every run goes through the audit wrapper (replay disabled).
    auto audited_run = [&](auto run, const Task& inner, const AlgoConfig& cfg) {
        testing::AuditTask audit(inner);
        RunLog log = run(audit, cfg);
        ++audited;
        if (log.evaluations != audit.calls || log.total_steps != audit.steps) {
            failures.push_back("step audit");
        }
        return log;
    };
    auto sss = [](const Task& t, const AlgoConfig& c) { return run_sss(t, c); };
    auto hc = [](const Task& t, const AlgoConfig& c) { return run_hc(t, c); };
    auto ssshc = [](const Task& t, const AlgoConfig& c) { return run_ssshc(t, c); };

    AlgoConfig cfg;
    cfg.n_parents = 10;
    cfg.mut_rate = 0.02;
    cfg.seed = 1004;
    cfg.max_steps = 200 * 20 * 32;
    const RunLog s = audited_run(sss, parity, cfg);
    bool monotone = s.generations.size() == 200;
    for (std::size_t g = 1; g < s.generations.size(); ++g) {
        monotone = monotone && s.generations[g].best_fitness >= s.generations[g - 1].best_fitness;
    }
    if (!monotone) failures.push_back("SSS best-fitness monotonicity");

    for (double noise : {0.0, 0.1}) {
        AlgoConfig c = cfg;
        c.noise_range = noise;
        c.max_steps = 300'000;
        c.n_learn_iters = 5;
        Monitor m;
        c.observer = &m;
        if (noise == 0.0) audited_run(hc, parity, c);
        audited_run(ssshc, parity, c);
        if (m.violations != 0 || m.learning_steps == 0) failures.push_back("learning/lineage monotonicity");

        c.observer = nullptr;
        c.n_learn_iters = 0;
        if (!(audited_run(ssshc, parity, c) == audited_run(sss, parity, c))) failures.push_back("SSSHC(0) vs SSS");

        AlgoConfig d = c;
        d.mut_rate = 0.05;
        d.n_learn_iters = 2;
        d.max_steps = 400'000;
        audited_run(ssshc, dpole, d);
        audited_run(hc, dpole, d);
    }
    std::string detail = std::to_string(audited) + " audited runs";
    for (const std::string& f : failures) detail += "; failed: " + f;
    return {failures.empty(), detail};
}

Verdict statistics() {
    std::vector<std::string> notes;
    bool ok = true;
    const std::vector<double> a{1, 2, 3};
    const std::vector<double> b{4, 5, 6};
    const double p_sep = stats::mann_whitney_u(a, b).p_value;
    ok = ok && std::abs(p_sep - 0.1) < 1e-12;
    notes.push_back("p({1,2,3},{4,5,6}) = " + fmt(p_sep, 12));

    Rng rng(1005);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
        std::vector<double> x(6);
        std::vector<double> y(6);
        for (double& v : x) v = rng.uniform(0, 1);
        for (double& v : y) v = rng.uniform(0.2, 1.2);
        worst = std::max(worst, std::abs(stats::mann_whitney_u_exact(x, y).p_value -
                                         stats::mann_whitney_u_normal(x, y).p_value));
    }
    ok = ok && worst <= 0.02;
    notes.push_back("max |exact - normal| " + fmt(worst));

    const std::vector<double> x{1, 2, 3, 4, 5, 6};
    const double up = stats::spearman(x, std::vector<double>{1, 4, 9, 16, 25, 36}).statistic;
    const double down = stats::spearman(x, std::vector<double>{9, 8, 7, 3, 2, 1}).statistic;
    ok = ok && up == 1.0 && down == -1.0;
    notes.push_back("spearman " + fmt(up) + "/" + fmt(down));

    const std::vector<double> c(10, 0.42);
    const stats::Interval ci = stats::bootstrap_ci(c, 0.85, 2000, rng);
    ok = ok && ci.lo == 0.42 && ci.hi == 0.42;
    notes.push_back("constant bootstrap [" + fmt(ci.lo) + ", " + fmt(ci.hi) + "]");

    std::string detail;
    for (const std::string& n : notes) detail += (detail.empty() ? "" : ", ") + n;
    return {ok, detail};
}

#ifndef EVOLEARN_CLI_PATH
#error "EVOLEARN_CLI_PATH must name the evolearn executable"
#endif

std::string slurp(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Verdict cli_determinism() {
    const auto root = std::filesystem::temp_directory_path() / "evolearn_acceptance_determinism";
    std::filesystem::remove_all(root);
    const std::vector<std::string> runs{
        "--task parity --algo ssshc --mut-rate 0.01,0.05 --pop-size 4,10 --noise 0,0.03 --learn-iters 3 "
        "--replications 2 --max-steps 20000 --seed 9",
        "--task dpole-random --algo hc --mut-rate 0.05 --pop-size 5 --noise 0.06 --learn-iters 0 "
        "--replications 2 --max-steps 100000 --seed 9 --jobs 2",
        "--task dpole-fixed --algo sss --mut-rate 0.05 --pop-size 6 --noise 0 --learn-iters 0 "
        "--replications 2 --max-steps 100000 --seed 3"};
    int identical = 0;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        std::string texts[2];
        for (int rep = 0; rep < 2; ++rep) {
            const auto out = root / (std::to_string(k) + "_" + std::to_string(rep));
            const std::string cmd = std::string("\"") + EVOLEARN_CLI_PATH + "\" run " + runs[k] + " --out \"" +
                                    out.string() + "\" > /dev/null";
            if (std::system(cmd.c_str()) != 0) return {false, "evolearn run failed: " + runs[k]};
            texts[rep] = slurp(out / kRecordsFile);
        }
        identical += !texts[0].empty() && texts[0] == texts[1];
    }
    std::filesystem::remove_all(root);
    return {identical == static_cast<int>(runs.size()),
            std::to_string(identical) + "/" + std::to_string(runs.size()) + " repeated runs byte-identical"};
}

// ---------------------------------------------------------------------------
// B. Reduced-scale reproductions

ExperimentSpec spec_for(TaskId task, AlgoId algo, double mut, int pop, double noise, int learn, int reps,
                        std::int64_t budget, std::uint64_t seed, LearnAccept accept = LearnAccept::strict) {
    ExperimentSpec s;
    s.task = task;
    s.algo = algo;
    s.mut_rates = {mut};
    s.pop_sizes = {pop};
    s.noise_ranges = {noise};
    s.learn_iters = {learn};
    s.learn_accept = accept;
    s.replications = reps;
    s.base_seed = seed;
    s.max_steps = budget;
    return s;
}

std::vector<RunRecord> run(const ExperimentSpec& spec) { return run_experiment(spec, g_jobs); }

double median_of(std::vector<double> v) { return stats::median(v); }

Verdict parity_table3(std::uint64_t seed) {
    const std::int64_t budget = 20'000'000;
    const auto records = run(spec_for(TaskId::parity, AlgoId::ssshc, 0.01, 10, 0.0, 2000, 10, budget, seed));
    int solved = 0;
    for (const RunRecord& r : records) solved += r.crossing(1.0).reached;
    const std::vector<double> steps = metric_values(records, Metric::steps, 1.0);
    const double med = median_of(steps);
    const bool ok = solved >= 8 && med >= 2e6 && med <= 1.5e7;
    return {ok, "solved " + std::to_string(solved) + "/10 (>= 8), median steps " + fmt(med, 8) +
                    " (in [2e6, 1.5e7]), mean best " + fmt_mean(metric_values(records, Metric::fitness))};
}

Verdict parity_ordering(std::uint64_t seed) {
    const std::int64_t budget = 20'000'000;
    std::map<AlgoId, std::vector<double>> steps;
    std::map<AlgoId, std::vector<double>> fitness;
    for (AlgoId algo : {AlgoId::ssshc, AlgoId::hc, AlgoId::sss}) {
        const int learn = algo == AlgoId::ssshc ? 2000 : 0;
        const auto records = run(spec_for(TaskId::parity, algo, 0.01, 10, 0.0, learn, 10, budget, seed));
        steps[algo] = metric_values(records, Metric::steps, 0.95);  // censored at the budget
        fitness[algo] = metric_values(records, Metric::fitness);
    }
    const double m_ssshc = stats::mean(steps[AlgoId::ssshc]);
    const double m_hc = stats::mean(steps[AlgoId::hc]);
    const double m_sss = stats::mean(steps[AlgoId::sss]);
    // Three pairwise algorithm comparisons: Bonferroni m = 3.
    const double p = compare(steps[AlgoId::ssshc], steps[AlgoId::sss], 3).p_value;
    const bool ok = m_ssshc < m_hc && m_hc < m_sss && p < 0.05;
    return {ok, "mean steps to 0.95: SSSHC " + fmt(m_ssshc, 8) + ", HC " + fmt(m_hc, 8) + ", SSS " + fmt(m_sss, 8) +
                    "; SSSHC vs SSS adjusted p " + fmt(p) + "; mean best SSSHC/HC/SSS " +
                    fmt_mean(fitness[AlgoId::ssshc]) + "/" + fmt_mean(fitness[AlgoId::hc]) + "/" +
                    fmt_mean(fitness[AlgoId::sss])};
}

Verdict dpole_fixed_clean(std::uint64_t seed) {
    const std::int64_t budget = 50'000'000;
    auto mean_final = [&](AlgoId algo, int learn) {
        return stats::mean(metric_values(
            run(spec_for(TaskId::dpole_fixed, algo, 0.05, 200, 0.0, learn, 5, budget, seed)), Metric::fitness));
    };
    const double sss = mean_final(AlgoId::sss, 0);
    const double ssshc = mean_final(AlgoId::ssshc, 1);
    const double hc = mean_final(AlgoId::hc, 0);
    const bool ok = sss >= 0.9 && ssshc >= 0.9 && hc <= sss - 0.05;
    return {ok, "mean final SSS " + fmt(sss) + ", SSSHC " + fmt(ssshc) + " (both >= 0.9), HC " + fmt(hc) +
                    " (<= SSS - 0.05)"};
}

Verdict dpole_fixed_noisy(std::uint64_t seed) {
    const std::int64_t budget = 50'000'000;
    auto mean_final = [&](AlgoId algo, int learn) {
        return stats::mean(metric_values(
            run(spec_for(TaskId::dpole_fixed, algo, 0.05, 200, 0.06, learn, 5, budget, seed)), Metric::fitness));
    };
    const double ssshc = mean_final(AlgoId::ssshc, 50);
    const double hc = mean_final(AlgoId::hc, 0);
    const double sss = mean_final(AlgoId::sss, 0);
    const bool ok = ssshc >= hc + 0.15 && ssshc > sss;
    return {ok, "mean final SSSHC " + fmt(ssshc) + ", HC " + fmt(hc) + " (SSSHC - HC >= 0.15), SSS " + fmt(sss) +
                    " (SSSHC > SSS)"};
}

Verdict popsize_control(std::uint64_t seed) {
    const auto records = run(control_popsize_spec(5, seed, 50'000'000));
    const stats::TestResult t = control_popsize_correlation(records);
    std::string per_size;
    for (int pop : {10, 20, 50, 100, 200, 500}) {
        std::vector<double> f;
        for (const RunRecord& r : records) {
            if (r.params.pop_size == pop) f.insert(f.end(), r.final_population_fitness.begin(), r.final_population_fitness.end());
        }
        per_size += " " + std::to_string(pop) + ":" + fmt(stats::mean(f), 3);
    }
    const bool ok = t.statistic < -0.3 && t.p_value < 0.05;
    return {ok, "rho " + fmt(t.statistic) + " (< -0.3), p " + fmt(t.p_value) + " (< 0.05); mean final-population "
                "fitness by size" + per_size};
}

Verdict generalization(std::uint64_t seed) {
    const std::int64_t budget = 50'000'000;
    auto mean_gen = [&](AlgoId algo, int learn) {
        return stats::mean(metric_values(
            run(spec_for(TaskId::dpole_random, algo, 0.05, 50, 0.0, learn, 5, budget, seed)), Metric::generalization));
    };
    const double ssshc = mean_gen(AlgoId::ssshc, 2);
    const double hc = mean_gen(AlgoId::hc, 0);
    const bool ok = ssshc >= hc + 0.15;
    return {ok, "mean generalization SSSHC " + fmt(ssshc) + ", HC " + fmt(hc) + " (SSSHC - HC >= 0.15)"};
}

// Same parity configuration with equal-score acceptance in the learning loop.
void parity_ties_info(std::uint64_t seed) {
    const auto records = run(
        spec_for(TaskId::parity, AlgoId::ssshc, 0.01, 10, 0.0, 2000, 10, 20'000'000, seed, LearnAccept::ties));
    int solved = 0;
    for (const RunRecord& r : records) solved += r.crossing(1.0).reached;
    std::cout << "  info seed " << seed << ": learn-accept=ties variant solved " << solved << "/10, median steps "
              << fmt(median_of(metric_values(records, Metric::steps, 1.0)), 8) << ", mean steps to 0.95 "
              << fmt(stats::mean(metric_values(records, Metric::steps, 0.95)), 8) << std::endl;
}

struct Criterion {
    int id;
    std::string name;
    std::function<Verdict()> exact;
    std::function<Verdict(std::uint64_t)> seeded;
    std::function<void(std::uint64_t)> info;
};

bool report(int id, const std::string& name, const Verdict& v) {
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << name << " - " << v.detail << std::endl;
    return v.pass;
}

bool evaluate(const Criterion& c, bool all_seeds) {
    if (c.exact) return report(c.id, c.name, c.exact());
    int passed = 0;
    int tried = 0;
    for (std::size_t k = 0; k < kBaseSeeds.size(); ++k) {
        if (!all_seeds && k == 2 && (passed == 2 || passed == 0)) {
            std::cout << "  seed " << kBaseSeeds[k] << ": skipped, first two seeds agree" << std::endl;
            break;
        }
        const Verdict v = c.seeded(kBaseSeeds[k]);
        ++tried;
        passed += v.pass;
        std::cout << "  seed " << kBaseSeeds[k] << ": " << (v.pass ? "pass" : "miss") << " - " << v.detail
                  << std::endl;
        if (c.info) c.info(kBaseSeeds[k]);
    }
    return report(c.id, c.name,
                  {passed >= 2, std::to_string(passed) + "/" + std::to_string(tried) + " seeds passed (need 2 of 3)"});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"evolearn acceptance suite"};
    std::vector<int> selected;
    bool all_seeds = false;
    bool with_info = false;
    app.add_option("--criterion", selected, "Criterion number (repeatable); default all")->check(CLI::Range(1, 12));
    app.add_option("--jobs", g_jobs, "Concurrent runs")->check(CLI::PositiveNumber);
    app.add_flag("--all-seeds", all_seeds, "Run all three base seeds even when the first two agree");
    app.add_flag("--info", with_info, "Also report the learn-accept=ties variant for criterion 7");
    CLI11_PARSE(app, argc, argv);

    const std::vector<Criterion> criteria{
        {1, "circuit oracle", circuit_oracle, {}, {}},
        {2, "parity fitness identities", parity_identities, {}, {}},
        {3, "physics fixed point, mirror symmetry and RK4 order", physics, {}, {}},
        {4, "algorithm invariants and step audit", algorithms, {}, {}},
        {5, "statistics oracles", statistics, {}, {}},
        {6, "byte-identical repeated CLI runs", cli_determinism, {}, {}},
        {7, "parity SSSHC solves (mut 1%, pop 10, learn 2000, 2e7 steps, 10 reps)", {}, parity_table3,
         with_info ? std::function<void(std::uint64_t)>(parity_ties_info) : nullptr},
        {8, "parity ordering SSSHC < HC < SSS in steps to 0.95", {}, parity_ordering, {}},
        {9, "dpole-fixed no noise: SSS, SSSHC >= 0.9 and HC below SSS", {}, dpole_fixed_clean, {}},
        {10, "dpole-fixed noise 6%: SSSHC beats HC by 0.15 and SSS", {}, dpole_fixed_noisy, {}},
        {11, "population-size control: negative Spearman correlation", {}, popsize_control, {}},
        {12, "dpole-random generalization: SSSHC beats HC by 0.15", {}, generalization, {}},
    };

    bool all_pass = true;
    for (const Criterion& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        try {
            all_pass = evaluate(c, all_seeds) && all_pass;
        } catch (const std::exception& e) {
            report(c.id, c.name, {false, std::string("exception: ") + e.what()});
            all_pass = false;
        }
    }
    return all_pass ? 0 : 1;
}
