// Command-line front end: simulate, limit, experiment, oracle, breakpoints.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "ecproc/ec_process.hpp"
#include "ecproc/errors.hpp"
#include "ecproc/experiments.hpp"
#include "ecproc/io.hpp"
#include "ecproc/limits.hpp"
#include "ecproc/oracle.hpp"
#include "ecproc/radial_law.hpp"

using namespace ecproc;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitResource = 3;
const double kDefaultThreshold = 1.0 / std::sqrt(2.0);

struct Common {
    std::string preset = "example_3_2";
    double xi = 1.0;
    std::string rule = "rips_linf";
    double t_max = 3.0;
    double step = 0.02;
    std::string out;
    unsigned jobs = 1;
};

RadialLaw law_for(const std::string& preset) {
    if (preset == "example_3_2") return RadialLaw::example_3_2();
    if (preset == "example_4_2") return RadialLaw::example_4_2(2, 1.0);
    throw ConfigError("unknown preset '" + preset + "' (expected example_3_2 or example_4_2)");
}

// Writes to the file named by `path`, or stdout when it is empty.
void emit(const std::string& path, const std::string& text) {
    if (path.empty())
        std::cout << text;
    else
        write_text_file(path, text);
}

int run_simulate(const Common& c, std::uint64_t n, std::uint64_t seed, std::optional<std::uint64_t> budget) {
    const RadialLaw law = law_for(c.preset);
    const ComplexRule rule = rule_from_string(c.rule, kDefaultThreshold);
    const PointCloud cloud = sample_cloud(law, n, seed, c.jobs);
    const double R_n = n == 0 ? std::numeric_limits<double>::infinity() : radius_R_n(law, static_cast<double>(n), c.xi);
    ProcessOptions opts;
    opts.retain_per_k = true;
    opts.enumeration.jobs = c.jobs;
    if (budget) opts.enumeration.budget = *budget;
    const auto grid = make_grid(c.t_max, c.step);
    const ECProcess proc = ec_process(cloud, rule, R_n, grid, opts);

    std::ostringstream csv;
    write_process_csv(csv, proc);
    emit(c.out, csv.str());
    if (!c.out.empty()) {
        nlohmann::json meta;
        meta["n"] = n;
        meta["seed"] = seed;
        meta["R_n"] = format_double(R_n);
        meta["scale"] = format_double(proc.scale);
        meta["exterior_count"] = proc.exterior_count;
        meta["xi"] = c.xi;
        meta["law"] = law_to_json(law);
        meta["rule"] = rule_to_json(rule);
        meta["truncated"] = proc.truncated;
        meta["rng"] = CounterRng::algorithm_name;
        write_text_file(c.out + ".json", meta.dump(2) + "\n");
    }
    return 0;
}

int run_limit(const Common& c, double eps, const McSettings& base) {
    const RadialLaw law = law_for(c.preset);
    const ComplexRule rule = rule_from_string(c.rule, kDefaultThreshold);
    McSettings mc = base;
    mc.jobs = c.jobs;
    const LimitFunction limit(LimitParams::from_law(law, rule, c.xi), eps, mc);
    const auto grid = make_grid(c.t_max, c.step);
    const auto values = limit.curve(grid);
    std::ostringstream csv;
    csv << "t,value,std_error,K_used\n";
    for (std::size_t j = 0; j < grid.size(); ++j)
        csv << format_double(grid[j]) << ',' << format_double(values[j].value) << ','
            << format_double(values[j].std_error) << ',' << values[j].K_used << '\n';
    emit(c.out, csv.str());
    return 0;
}

int run_experiment(const Common& c, const CLI::App& sub, const std::string& config_path,
                   const std::vector<std::uint64_t>& n_values, const std::vector<std::uint64_t>& seeds, double eps,
                   std::size_t mc_samples, std::optional<std::uint64_t> max_n) {
    ExperimentConfig config = ExperimentConfig::preset(c.preset);
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ConfigError("cannot open configuration file '" + config_path + "'");
        nlohmann::json doc;
        try {
            in >> doc;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
        }
        config = config_from_json(doc, config);
    }
    // Flags win over the file.
    if (sub.count("--preset") && config_path.empty()) config = ExperimentConfig::preset(c.preset);
    if (sub.count("--preset") && !config_path.empty()) config.law = law_for(c.preset);
    if (sub.count("--rule")) config.rule = rule_from_string(c.rule, kDefaultThreshold);
    if (sub.count("--xi")) config.xi = c.xi;
    if (sub.count("--t-max")) config.t_max = c.t_max;
    if (sub.count("--step")) config.step = c.step;
    if (sub.count("--jobs")) config.jobs = c.jobs;
    if (sub.count("--n")) config.n_values = n_values;
    if (sub.count("--seed")) config.seeds = seeds;
    if (sub.count("--eps")) config.eps = eps;
    if (sub.count("--mc-samples")) config.mc.samples = mc_samples;
    if (max_n) config.max_n = *max_n;
    if (config.sup_b > config.t_max) config.sup_b = config.t_max;

    const std::string dir = c.out.empty() ? "experiment_out" : c.out;
    const ExperimentResult result = run_convergence(config);
    write_experiment(config, result, dir);
    std::cout << summary_csv(sup_distance_table(result));
    return 0;
}

int run_oracle(std::size_t max_n, std::size_t trials, std::uint64_t seed) {
    const auto report = oracle::run_suite(max_n, trials, seed);
    for (const auto& m : report.messages) std::cout << "MISMATCH " << m << '\n';
    std::cout << (report.ok() ? "PASS" : "FAIL") << " oracle: " << report.clouds << " clouds, " << report.comparisons
              << " comparisons, " << report.failures << " failures\n";
    return report.ok() ? 0 : 1;
}

int run_breakpoints(const Common& c, const std::string& points_path, std::uint64_t n, std::uint64_t seed) {
    const ComplexRule rule = rule_from_string(c.rule, kDefaultThreshold);
    PointSet points;
    if (!points_path.empty()) {
        std::ifstream in(points_path);
        if (!in) throw ConfigError("cannot open points file '" + points_path + "'");
        points = read_points_csv(in);
    } else {
        const RadialLaw law = law_for(c.preset);
        const PointCloud cloud = sample_cloud(law, n, seed, c.jobs);
        const double R_n = n == 0 ? std::numeric_limits<double>::infinity()
                                  : radius_R_n(law, static_cast<double>(n), c.xi);
        points = points_outside(cloud, R_n);
    }
    std::ostringstream out;
    out << "t\n";
    for (double t : breakpoints(points, rule)) out << format_double(t) << '\n';
    emit(c.out, out.str());
    return 0;
}

void add_common(CLI::App* sub, Common& c, bool grid) {
    sub->add_option("--preset", c.preset, "Law preset: example_3_2 or example_4_2");
    sub->add_option("--xi", c.xi, "Weak-core constant xi");
    sub->add_option("--rule", c.rule, "rips_l2, rips_linf or cech, optionally ':<threshold>'");
    if (grid) {
        sub->add_option("--t-max", c.t_max, "Largest grid scale");
        sub->add_option("--step", c.step, "Grid step");
    }
    sub->add_option("--out", c.out, "Output file (directory for experiment)");
    sub->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euler characteristic processes of random geometric complexes"};
    app.require_subcommand(1);

    Common common;
    std::uint64_t n = 1000, seed = 1;
    McSettings mc;
    std::optional<std::uint64_t> budget;
    std::vector<std::uint64_t> n_list, seed_list;
    double eps = 1e-6;
    std::size_t mc_samples = McSettings{}.samples;
    std::size_t max_n = 12, trials = 50;
    std::optional<std::uint64_t> max_cloud;
    std::string config_path, points_path;

    auto* simulate = app.add_subcommand("simulate", "Sample a cloud and write its Euler characteristic curve");
    add_common(simulate, common, true);
    simulate->add_option("--n", n, "Sample size");
    simulate->add_option("--seed", seed, "Sampling seed");
    simulate->add_option("--budget", budget, "Largest number of simplices to enumerate");

    auto* limit = app.add_subcommand("limit", "Write the limit curve");
    add_common(limit, common, true);
    limit->add_option("--eps", eps, "Series truncation tolerance");
    limit->add_option("--mc-samples", mc.samples, "Initial Monte Carlo samples per term");
    limit->add_option("--mc-seed", mc.seed, "Monte Carlo seed");
    limit->add_option("--mc-tolerance", mc.tolerance, "Target Monte Carlo std error");
    limit->add_option("--mc-max-samples", mc.max_samples, "Largest Monte Carlo sample size per term");

    auto* experiment = app.add_subcommand("experiment", "Run a convergence study");
    add_common(experiment, common, true);
    experiment->add_option("--config", config_path, "JSON configuration (flags take precedence)");
    experiment->add_option("--n", n_list, "Sample sizes");
    experiment->add_option("--seed", seed_list, "Seeds");
    experiment->add_option("--eps", eps, "Series truncation tolerance");
    experiment->add_option("--mc-samples", mc_samples, "Initial Monte Carlo samples per term");
    experiment->add_option("--max-cloud", max_cloud, "Largest accepted n");

    auto* oracle_cmd = app.add_subcommand("oracle", "Check fast paths against brute-force references");
    oracle_cmd->add_option("--max-n", max_n, "Largest cloud size (at most 20)");
    oracle_cmd->add_option("--trials", trials, "Number of clouds");
    oracle_cmd->add_option("--seed", seed, "Seed");

    auto* bp = app.add_subcommand("breakpoints", "List the exact scales where chi can change");
    add_common(bp, common, false);
    bp->add_option("--points", points_path, "Point CSV (otherwise the exterior of a sampled cloud)");
    bp->add_option("--n", n, "Sample size");
    bp->add_option("--seed", seed, "Sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        std::cerr << app.help();
        return kExitConfig;
    }

    try {
        if (*simulate) return run_simulate(common, n, seed, budget);
        if (*limit) return run_limit(common, eps, mc);
        if (*experiment)
            return run_experiment(common, *experiment, config_path, n_list, seed_list, eps, mc_samples, max_cloud);
        if (*oracle_cmd) return run_oracle(max_n, trials, seed);
        if (*bp) return run_breakpoints(common, points_path, n, seed);
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitResource;
    } catch (const PrecisionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitResource;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitConfig;
}
