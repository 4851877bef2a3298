#include "ecproc/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include "ecproc/ec_process.hpp"
#include "ecproc/errors.hpp"
#include "ecproc/io.hpp"
#include "ecproc/rng.hpp"

namespace ecproc {

namespace {

std::vector<std::uint64_t> seed_range(std::uint64_t count) {
    std::vector<std::uint64_t> seeds(count);
    for (std::uint64_t i = 0; i < count; ++i) seeds[i] = i + 1;
    return seeds;
}

const char* proposal_name(McProposal p) { return p == McProposal::Box ? "box" : "linf_support"; }

McProposal proposal_from_name(const std::string& name) {
    if (name == "box") return McProposal::Box;
    if (name == "linf_support") return McProposal::LinfSupport;
    throw ConfigError("unknown Monte Carlo proposal '" + name + "'");
}

RunRow run_one(const ExperimentConfig& config, std::span<const double> grid, const std::vector<double>& limit,
               std::uint64_t n, std::uint64_t seed) {
    RunRow row;
    row.n = n;
    row.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        const PointCloud cloud = sample_cloud(config.law, n, seed);
        row.R_n = n == 0 ? std::numeric_limits<double>::infinity()
                         : radius_R_n(config.law, static_cast<double>(n), config.xi);
        ProcessOptions opts;
        opts.enumeration.budget = config.simplex_budget;
        const ECProcess proc = ec_process(cloud, config.rule, row.R_n, grid, opts);
        row.scale = proc.scale;
        row.exterior_count = proc.exterior_count;
        row.chi = proc.chi;
        row.chi_scaled = proc.chi_scaled();
        std::vector<double> diff(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) diff[j] = row.chi_scaled[j] - limit[j];
        row.sup_distance = sup_functional(grid, diff, config.sup_a, config.sup_b);
    } catch (const Error& e) {
        row.error = e.what();
        row.sup_distance = std::numeric_limits<double>::quiet_NaN();
        row.chi.clear();
        row.chi_scaled.clear();
    }
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

}  // namespace

ExperimentConfig ExperimentConfig::preset(const std::string& name) {
    ExperimentConfig c;
    c.seeds = seed_range(20);
    if (name == "example_3_2") {
        c.law = RadialLaw::example_3_2();
        c.n_values = {1'000, 10'000, 100'000};
    } else if (name == "example_4_2") {
        c.law = RadialLaw::example_4_2(2, 1.0);
        c.n_values = {10'000, 100'000, 1'000'000};
    } else {
        throw ConfigError("unknown experiment preset '" + name + "'");
    }
    return c;
}

void ExperimentConfig::validate() const {
    if (n_values.empty()) throw ConfigError("experiment needs at least one n");
    for (std::size_t i = 1; i < n_values.size(); ++i)
        if (n_values[i] <= n_values[i - 1]) throw ConfigError("n_values must be strictly increasing");
    if (n_values.back() > max_n)
        throw ConfigError("n = " + std::to_string(n_values.back()) + " exceeds the limit max_n = " +
                          std::to_string(max_n));
    if (seeds.empty()) throw ConfigError("experiment needs at least one seed");
    if (!(t_max > 0.0)) throw ConfigError("t_max must be positive");
    if (!(step > 0.0)) throw ConfigError("grid step must be positive");
    if (!(sup_a >= 0.0 && sup_a < sup_b)) throw ConfigError("sup interval needs 0 <= a < b");
    if (sup_b > t_max + 1e-9) throw ConfigError("sup interval must lie inside [0, t_max]");
    if (!(xi > 0.0)) throw ConfigError("xi must be positive");
    if (!(eps > 0.0)) throw ConfigError("eps must be positive");
    if (jobs == 0) throw ConfigError("jobs must be at least 1");
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
    nlohmann::json doc;
    doc["law"] = law_to_json(c.law);
    doc["rule"] = rule_to_json(c.rule);
    doc["xi"] = c.xi;
    doc["n_values"] = c.n_values;
    doc["seeds"] = c.seeds;
    doc["t_max"] = c.t_max;
    doc["step"] = c.step;
    doc["sup_interval"] = {c.sup_a, c.sup_b};
    doc["eps"] = c.eps;
    doc["mc"] = {{"samples", c.mc.samples},
                 {"seed", c.mc.seed},
                 {"proposal", proposal_name(c.mc.proposal)},
                 {"tolerance", c.mc.tolerance},
                 {"max_samples", c.mc.max_samples}};
    doc["max_n"] = c.max_n;
    doc["simplex_budget"] = c.simplex_budget;
    return doc;
}

ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig c) {
    if (!doc.is_object()) throw ConfigError("experiment configuration must be a JSON object");
    try {
        if (doc.contains("preset")) c = ExperimentConfig::preset(doc["preset"].get<std::string>());
        if (doc.contains("law")) c.law = law_from_json(doc["law"]);
        if (doc.contains("rule")) {
            const auto& r = doc["rule"];
            c.rule = r.is_string() ? rule_from_string(r.get<std::string>(), c.rule.unit_threshold())
                                   : rule_from_json(r);
        }
        if (doc.contains("xi")) c.xi = doc["xi"].get<double>();
        if (doc.contains("n_values")) c.n_values = doc["n_values"].get<std::vector<std::uint64_t>>();
        if (doc.contains("seeds")) c.seeds = doc["seeds"].get<std::vector<std::uint64_t>>();
        if (doc.contains("t_max")) c.t_max = doc["t_max"].get<double>();
        if (doc.contains("step")) c.step = doc["step"].get<double>();
        if (doc.contains("sup_interval")) {
            const auto ab = doc["sup_interval"].get<std::vector<double>>();
            if (ab.size() != 2) throw ConfigError("sup_interval must be [a, b]");
            c.sup_a = ab[0];
            c.sup_b = ab[1];
        }
        if (doc.contains("eps")) c.eps = doc["eps"].get<double>();
        if (doc.contains("mc")) {
            const auto& mc = doc["mc"];
            if (mc.contains("samples")) c.mc.samples = mc["samples"].get<std::size_t>();
            if (mc.contains("seed")) c.mc.seed = mc["seed"].get<std::uint64_t>();
            if (mc.contains("proposal")) c.mc.proposal = proposal_from_name(mc["proposal"].get<std::string>());
            if (mc.contains("tolerance")) c.mc.tolerance = mc["tolerance"].get<double>();
            if (mc.contains("max_samples")) c.mc.max_samples = mc["max_samples"].get<std::size_t>();
        }
        if (doc.contains("jobs")) c.jobs = doc["jobs"].get<unsigned>();
        if (doc.contains("max_n")) c.max_n = doc["max_n"].get<std::uint64_t>();
        if (doc.contains("simplex_budget")) c.simplex_budget = doc["simplex_budget"].get<std::uint64_t>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed experiment configuration: ") + e.what());
    }
    return c;
}

ExperimentResult run_convergence(const ExperimentConfig& config) {
    config.validate();
    ExperimentResult result;
    result.t_grid = make_grid(config.t_max, config.step);

    McSettings mc = config.mc;
    mc.jobs = config.jobs;
    const LimitFunction limit(LimitParams::from_law(config.law, config.rule, config.xi), config.eps, mc);
    result.limit = limit.curve(result.t_grid);
    std::vector<double> limit_values(result.limit.size());
    for (std::size_t j = 0; j < limit_values.size(); ++j) limit_values[j] = result.limit[j].value;

    std::vector<std::pair<std::uint64_t, std::uint64_t>> units;
    for (auto n : config.n_values)
        for (auto s : config.seeds) units.emplace_back(n, s);
    std::sort(units.begin(), units.end());
    // Largest clouds first so the pool does not end on a long straggler.
    std::vector<std::size_t> order(units.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = units.size() - 1 - i;

    result.rows.resize(units.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < order.size(); i = next++) {
            const auto [n, seed] = units[order[i]];
            result.rows[order[i]] = run_one(config, result.t_grid, limit_values, n, seed);
        }
    };
    const unsigned jobs = std::max(1u, std::min<unsigned>(config.jobs, static_cast<unsigned>(units.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return result;
}

double nearest_rank_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw DomainError("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    std::sort(values.begin(), values.end());
    const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    return values[rank == 0 ? 0 : rank - 1];
}

std::vector<SummaryRow> sup_distance_table(const ExperimentResult& result) {
    std::map<std::uint64_t, std::pair<std::vector<double>, std::size_t>> by_n;
    for (const auto& row : result.rows) {
        auto& [values, errors] = by_n[row.n];
        if (row.error.empty())
            values.push_back(row.sup_distance);
        else
            ++errors;
    }
    std::vector<SummaryRow> table;
    for (const auto& [n, entry] : by_n) {
        const auto& [values, errors] = entry;
        SummaryRow s;
        s.n = n;
        s.runs = values.size() + errors;
        s.errors = errors;
        if (values.empty()) {
            s.median = s.q10 = s.q90 = std::numeric_limits<double>::quiet_NaN();
        } else {
            s.median = nearest_rank_quantile(values, 0.5);
            s.q10 = nearest_rank_quantile(values, 0.1);
            s.q90 = nearest_rank_quantile(values, 0.9);
        }
        table.push_back(s);
    }
    return table;
}

std::string results_csv(const ExperimentResult& result) {
    std::ostringstream os;
    os << "n,seed,R_n,scale,exterior_count,sup_distance,error\n";
    for (const auto& r : result.rows)
        os << r.n << ',' << r.seed << ',' << format_double(r.R_n) << ',' << format_double(r.scale) << ','
           << r.exterior_count << ',' << format_double(r.sup_distance) << ',' << csv_field(r.error) << '\n';
    return os.str();
}

std::string summary_csv(const std::vector<SummaryRow>& table) {
    std::ostringstream os;
    os << "n,runs,errors,median,q10,q90\n";
    for (const auto& s : table)
        os << s.n << ',' << s.runs << ',' << s.errors << ',' << format_double(s.median) << ','
           << format_double(s.q10) << ',' << format_double(s.q90) << '\n';
    return os.str();
}

void write_experiment(const ExperimentConfig& config, const ExperimentResult& result, const std::string& dir) {
    nlohmann::json meta;
    meta["version"] = toolkit_version;
    meta["rng"] = CounterRng::algorithm_name;
    meta["config"] = config_to_json(config);
    write_text_file(dir + "/meta.json", meta.dump(2) + "\n");
    write_text_file(dir + "/results.csv", results_csv(result));
    write_text_file(dir + "/summary.csv", summary_csv(sup_distance_table(result)));

    std::ostringstream limit;
    limit << "t,value,std_error,K_used\n";
    for (std::size_t j = 0; j < result.t_grid.size(); ++j)
        limit << format_double(result.t_grid[j]) << ',' << format_double(result.limit[j].value) << ','
              << format_double(result.limit[j].std_error) << ',' << result.limit[j].K_used << '\n';
    write_text_file(dir + "/limit.csv", limit.str());

    std::ostringstream timing;
    timing << "n,seed,wall_time\n";
    for (const auto& r : result.rows) {
        timing << r.n << ',' << r.seed << ',' << format_double(r.wall_time) << '\n';
        if (!r.error.empty()) continue;
        std::ostringstream curve;
        curve << "t,chi,chi_scaled\n";
        for (std::size_t j = 0; j < result.t_grid.size(); ++j)
            curve << format_double(result.t_grid[j]) << ',' << r.chi[j] << ',' << format_double(r.chi_scaled[j])
                  << '\n';
        write_text_file(dir + "/curves/run_" + std::to_string(r.n) + "_" + std::to_string(r.seed) + ".csv",
                        curve.str());
    }
    write_text_file(dir + "/timing.csv", timing.str());
}

}  // namespace ecproc
