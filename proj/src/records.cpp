#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "evolearn/harness.hpp"

namespace evolearn {

std::string format_double(double v) {
    if (!std::isfinite(v)) throw std::invalid_argument("format_double: non-finite value");
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

void put_string(std::ostream& os, std::string_view s) {
    // Only identifiers and fixed names are written; none need escaping.
    os << '"' << s << '"';
}

void put_key(std::ostream& os, std::string_view key) {
    put_string(os, key);
    os << ':';
}

}  // namespace

// Field order is fixed so that equal records serialize to equal bytes.
void write_record(std::ostream& os, const RunRecord& r) {
    os << '{';
    put_key(os, "schema_version");
    os << kSchemaVersion << ',';
    put_key(os, "task");
    put_string(os, to_string(r.task));
    os << ',';
    put_key(os, "algo");
    put_string(os, to_string(r.algo));
    os << ',';

    put_key(os, "params");
    os << '{';
    put_key(os, "mut_rate");
    os << format_double(r.params.mut_rate) << ',';
    put_key(os, "pop_size");
    os << r.params.pop_size << ',';
    put_key(os, "noise");
    os << format_double(r.params.noise) << ',';
    put_key(os, "learn_iters");
    os << r.params.learn_iters << ',';
    put_key(os, "learn_accept");
    put_string(os, to_string(r.learn_accept));
    os << ',';
    put_key(os, "max_steps");
    os << r.max_steps << "},";

    put_key(os, "replication");
    os << r.replication << ',';
    put_key(os, "seed");
    os << r.seed << ',';
    put_key(os, "final_fitness");
    os << format_double(r.final_fitness) << ',';

    put_key(os, "steps_to");
    os << '[';
    for (std::size_t k = 0; k < r.steps_to.size(); ++k) {
        const ThresholdCrossing& c = r.steps_to[k];
        if (k) os << ',';
        os << '{';
        put_key(os, "threshold");
        os << format_double(c.threshold) << ',';
        put_key(os, "steps");
        os << c.steps << ',';
        put_key(os, "reached");
        os << (c.reached ? "true" : "false") << '}';
    }
    os << "],";

    put_key(os, "curve");
    os << '[';
    for (std::size_t k = 0; k < r.curve.size(); ++k) {
        if (k) os << ',';
        os << '[' << r.curve[k].steps << ',' << format_double(r.curve[k].best) << ']';
    }
    os << "],";

    if (r.generalization_fitness) {
        put_key(os, "generalization_fitness");
        os << format_double(*r.generalization_fitness) << ',';
    }
    put_key(os, "total_steps");
    os << r.total_steps << ',';
    put_key(os, "evaluations");
    os << r.evaluations << ',';

    put_key(os, "best_genotype");
    os << '[';
    for (std::size_t k = 0; k < r.best_genotype.size(); ++k) os << (k ? "," : "") << r.best_genotype[k];
    os << "],";

    put_key(os, "final_population_fitness");
    os << '[';
    for (std::size_t k = 0; k < r.final_population_fitness.size(); ++k) {
        os << (k ? "," : "") << format_double(r.final_population_fitness[k]);
    }
    os << "]}\n";
}

void write_records(std::ostream& os, const std::vector<RunRecord>& records) {
    for (const RunRecord& r : records) write_record(os, r);
}

RunRecord parse_record(std::string_view line) {
    const nlohmann::json j = nlohmann::json::parse(line);
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
        throw std::runtime_error("unsupported records schema_version " + std::to_string(version));
    }
    RunRecord r;
    r.task = parse_task(j.at("task").get<std::string>());
    r.algo = parse_algo(j.at("algo").get<std::string>());
    const nlohmann::json& p = j.at("params");
    r.params.mut_rate = p.at("mut_rate").get<double>();
    r.params.pop_size = p.at("pop_size").get<int>();
    r.params.noise = p.at("noise").get<double>();
    r.params.learn_iters = p.at("learn_iters").get<int>();
    r.learn_accept = parse_learn_accept(p.at("learn_accept").get<std::string>());
    r.max_steps = p.at("max_steps").get<std::int64_t>();
    r.replication = j.at("replication").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.final_fitness = j.at("final_fitness").get<double>();
    for (const nlohmann::json& c : j.at("steps_to")) {
        r.steps_to.push_back(
            {c.at("threshold").get<double>(), c.at("steps").get<std::int64_t>(), c.at("reached").get<bool>()});
    }
    for (const nlohmann::json& c : j.at("curve")) {
        r.curve.push_back({c.at(0).get<std::int64_t>(), c.at(1).get<double>()});
    }
    if (j.contains("generalization_fitness")) r.generalization_fitness = j["generalization_fitness"].get<double>();
    r.total_steps = j.at("total_steps").get<std::int64_t>();
    r.evaluations = j.at("evaluations").get<std::int64_t>();
    r.best_genotype = j.at("best_genotype").get<std::vector<Gene>>();
    r.final_population_fitness = j.at("final_population_fitness").get<std::vector<double>>();
    return r;
}

std::vector<RunRecord> read_records(std::istream& is) {
    std::vector<RunRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            out.push_back(parse_record(line));
        } catch (const std::exception& e) {
            throw std::runtime_error("records line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

std::ofstream open_records_for_write(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    const std::filesystem::path file = dir / kRecordsFile;
    std::ofstream os(file, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + file.string());
    return os;
}

std::vector<RunRecord> load_records(const std::filesystem::path& dir) {
    const std::filesystem::path file = std::filesystem::is_directory(dir) ? dir / kRecordsFile : dir;
    std::ifstream is(file, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + file.string());
    return read_records(is);
}

namespace {

bool numeric_equal(std::string_view text, double value) {
    double parsed = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), parsed);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw std::invalid_argument("selector: not a number: " + std::string(text));
    }
    return parsed == value;
}

}  // namespace

Selector::Selector(std::string_view text) {
    static constexpr std::string_view keys[] = {"task",  "algo",        "mut_rate",    "pop_size",
                                                "noise", "learn_iters", "learn_accept"};
    while (!text.empty()) {
        const std::size_t comma = text.find(',');
        const std::string_view term = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        if (term.empty()) continue;
        const std::size_t eq = term.find('=');
        if (eq == std::string_view::npos) throw std::invalid_argument("selector term without '=': " + std::string(term));
        const std::string_view key = term.substr(0, eq);
        if (std::find(std::begin(keys), std::end(keys), key) == std::end(keys)) {
            throw std::invalid_argument("selector: unknown key " + std::string(key));
        }
        terms_.emplace_back(std::string(key), std::string(term.substr(eq + 1)));
    }
}

bool Selector::matches(const RunRecord& r) const {
    for (const auto& [key, value] : terms_) {
        bool ok = false;
        if (key == "task") ok = parse_task(value) == r.task;
        else if (key == "algo") ok = parse_algo(value) == r.algo;
        else if (key == "mut_rate") ok = numeric_equal(value, r.params.mut_rate);
        else if (key == "pop_size") ok = numeric_equal(value, r.params.pop_size);
        else if (key == "noise") ok = numeric_equal(value, r.params.noise);
        else if (key == "learn_iters") ok = numeric_equal(value, r.params.learn_iters);
        else if (key == "learn_accept") ok = parse_learn_accept(value) == r.learn_accept;
        if (!ok) return false;
    }
    return true;
}

std::pair<std::filesystem::path, Selector> parse_group_ref(std::string_view text) {
    const std::size_t slash = text.find_last_of('/');
    const std::string_view last = slash == std::string_view::npos ? text : text.substr(slash + 1);
    if (last.find('=') == std::string_view::npos) return {std::filesystem::path(text), Selector{}};
    const std::string_view dir = slash == std::string_view::npos ? std::string_view{"."} : text.substr(0, slash);
    return {std::filesystem::path(dir.empty() ? "/" : dir), Selector(last)};
}

std::vector<RunRecord> select(const std::vector<RunRecord>& records, const Selector& selector) {
    std::vector<RunRecord> out;
    for (const RunRecord& r : records) {
        if (selector.matches(r)) out.push_back(r);
    }
    return out;
}

}  // namespace evolearn
