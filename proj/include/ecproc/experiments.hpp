#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecproc/complex_rule.hpp"
#include "ecproc/limits.hpp"
#include "ecproc/radial_law.hpp"

namespace ecproc {

inline constexpr const char* toolkit_version = "1.0.0";

/// A convergence study: one sampled cloud per (n, seed), compared with the
/// limit curve on a common grid.
struct ExperimentConfig {
    RadialLaw law = RadialLaw::example_3_2();
    ComplexRule rule = ComplexRule::rips_linf(0.70710678118654752);
    double xi = 1.0;
    std::vector<std::uint64_t> n_values;
    std::vector<std::uint64_t> seeds;
    double t_max = 3.0;
    double step = 0.02;
    double sup_a = 0.1;
    double sup_b = 3.0;
    double eps = 1e-6;
    McSettings mc;
    unsigned jobs = 1;
    /// Largest n accepted; bigger studies must raise it explicitly.
    std::uint64_t max_n = 1'000'000;
    std::uint64_t simplex_budget = 100'000'000;

    /// "example_3_2" (n = 1e3, 1e4, 1e5) or "example_4_2" (n = 1e4, 1e5,
    /// 1e6), both with Rips-l_inf at 1/sqrt(2), xi = 1 and seeds 1..20.
    static ExperimentConfig preset(const std::string& name);

    void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& config);
/// Fields present in `doc` override those of `base`.
ExperimentConfig config_from_json(const nlohmann::json& doc, ExperimentConfig base = {});

struct RunRow {
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    double R_n = 0.0;
    double scale = 0.0;
    std::size_t exterior_count = 0;
    /// sup over grid points in [a, b] of |chi_n / scale - limit|; NaN on error.
    double sup_distance = 0.0;
    /// Empty unless the run failed.
    std::string error;
    double wall_time = 0.0;
    std::vector<std::int64_t> chi;
    std::vector<double> chi_scaled;
};

struct ExperimentResult {
    std::vector<double> t_grid;
    std::vector<LimitValue> limit;
    /// Sorted by (n, seed).
    std::vector<RunRow> rows;
};

/// Runs every (n, seed) pair on a pool of config.jobs workers. The limit
/// curve is evaluated once. Failing runs are kept as error rows.
ExperimentResult run_convergence(const ExperimentConfig& config);

struct SummaryRow {
    std::uint64_t n = 0;
    std::size_t runs = 0;
    std::size_t errors = 0;
    double median = 0.0;
    double q10 = 0.0;
    double q90 = 0.0;
};

/// Nearest-rank quantile: the ceil(q m)-th smallest of m values.
double nearest_rank_quantile(std::vector<double> values, double q);

/// Per-n quantiles of sup_distance over successful runs.
std::vector<SummaryRow> sup_distance_table(const ExperimentResult& result);

std::string results_csv(const ExperimentResult& result);
std::string summary_csv(const std::vector<SummaryRow>& table);

/// Writes meta.json, results.csv, summary.csv, timing.csv, limit.csv and
/// curves/run_{n}_{seed}.csv under `dir`. Everything except timing.csv is a
/// function of the configuration alone.
void write_experiment(const ExperimentConfig& config, const ExperimentResult& result, const std::string& dir);

}  // namespace ecproc
