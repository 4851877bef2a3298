#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <filesystem>
#include <map>
#include <fstream>
#include <sstream>

#include "ecproc/errors.hpp"
#include "ecproc/experiments.hpp"

using namespace ecproc;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_heavy() {
    ExperimentConfig c = ExperimentConfig::preset("example_3_2");
    c.n_values = {200, 1000};
    c.seeds = {1, 2, 3, 4, 5};
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.emplace_back();
        rows.push_back(fields);
    }
    return rows;
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("ecproc_test_" + name);
    fs::remove_all(p);
    return p;
}

}  // namespace

TEST_CASE("presets") {
    const ExperimentConfig h = ExperimentConfig::preset("example_3_2");
    CHECK(h.n_values == std::vector<std::uint64_t>{1000, 10000, 100000});
    CHECK(h.seeds.size() == 20);
    CHECK(h.seeds.front() == 1);
    CHECK(h.seeds.back() == 20);
    CHECK(h.rule.kind() == RuleKind::RipsLinf);
    CHECK(h.law.family() == TailFamily::RegularlyVarying);
    const ExperimentConfig l = ExperimentConfig::preset("example_4_2");
    CHECK(l.n_values == std::vector<std::uint64_t>{10000, 100000, 1000000});
    CHECK(l.law.family() == TailFamily::ExponentialType);
    CHECK_THROWS_AS(ExperimentConfig::preset("nope"), ConfigError);
}

TEST_CASE("configuration validation") {
    ExperimentConfig c = small_heavy();
    CHECK_NOTHROW(c.validate());
    auto broken = [&](auto mutate) {
        ExperimentConfig b = small_heavy();
        mutate(b);
        CHECK_THROWS_AS(b.validate(), ConfigError);
        CHECK_THROWS_AS(run_convergence(b), ConfigError);
    };
    broken([](ExperimentConfig& b) { b.n_values.clear(); });
    broken([](ExperimentConfig& b) { b.n_values = {1000, 200}; });
    broken([](ExperimentConfig& b) { b.seeds.clear(); });
    broken([](ExperimentConfig& b) { b.step = 0.0; });
    broken([](ExperimentConfig& b) { b.sup_b = 4.0; });
    broken([](ExperimentConfig& b) { b.sup_a = 3.0; });
    broken([](ExperimentConfig& b) { b.xi = 0.0; });
    broken([](ExperimentConfig& b) { b.jobs = 0; });
    broken([](ExperimentConfig& b) { b.n_values = {2'000'000}; });

    ExperimentConfig raised = small_heavy();
    raised.n_values = {2'000'000};
    raised.max_n = 2'000'000;
    CHECK_NOTHROW(raised.validate());
}

TEST_CASE("one row per (n, seed), sorted and reproducible") {
    const ExperimentConfig c = small_heavy();
    const ExperimentResult r = run_convergence(c);
    REQUIRE(r.rows.size() == 10);
    CHECK(r.t_grid.size() == 151);
    CHECK(r.limit.size() == 151);
    CHECK(r.limit.front().value == doctest::Approx(M_PI));
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const RunRow& row = r.rows[i];
        CHECK(row.n == c.n_values[i / 5]);
        CHECK(row.seed == c.seeds[i % 5]);
        CHECK(row.error.empty());
        CHECK(row.chi.size() == 151);
        CHECK(row.R_n == doctest::Approx(radius_R_n(c.law, static_cast<double>(row.n), 1.0)));
        CHECK(row.scale == doctest::Approx(row.R_n * row.R_n));
        // The recorded distance is the sup over grid points in [0.1, 3].
        double sup = 0.0;
        for (std::size_t j = 5; j < r.t_grid.size(); ++j)
            sup = std::max(sup, std::abs(row.chi_scaled[j] - r.limit[j].value));
        CHECK(row.sup_distance == sup);
    }

    ExperimentConfig par = c;
    par.jobs = 3;
    const ExperimentResult r3 = run_convergence(par);
    CHECK(results_csv(r) == results_csv(r3));
    for (std::size_t i = 0; i < r.rows.size(); ++i) CHECK(r.rows[i].chi == r3.rows[i].chi);
    CHECK(results_csv(run_convergence(c)) == results_csv(r));
}

TEST_CASE("runs with an empty exterior") {
    ExperimentConfig c = small_heavy();
    c.xi = 0.01;
    c.n_values = {10};
    c.seeds.clear();
    for (std::uint64_t s = 1; s <= 200; ++s) c.seeds.push_back(s);
    const ExperimentResult r = run_convergence(c);
    double sup_limit = 0.0;
    for (std::size_t j = 5; j < r.t_grid.size(); ++j) sup_limit = std::max(sup_limit, std::abs(r.limit[j].value));
    int empty = 0;
    for (const RunRow& row : r.rows) {
        CHECK(row.error.empty());
        if (row.exterior_count != 0) continue;
        ++empty;
        for (auto v : row.chi) CHECK(v == 0);
        CHECK(row.sup_distance == doctest::Approx(sup_limit).epsilon(1e-15));
    }
    CHECK(empty > 0);
}

TEST_CASE("failing runs become error rows") {
    ExperimentConfig c = small_heavy();
    c.simplex_budget = 1;
    const ExperimentResult r = run_convergence(c);
    REQUIRE(r.rows.size() == 10);
    for (const RunRow& row : r.rows) {
        CHECK_FALSE(row.error.empty());
        CHECK(std::isnan(row.sup_distance));
    }
    const auto table = sup_distance_table(r);
    REQUIRE(table.size() == 2);
    CHECK(table[0].errors == 5);
    CHECK(table[0].runs == 5);
    CHECK(std::isnan(table[0].median));
    const auto csv = parse_csv(results_csv(r));
    CHECK(csv.size() == 11);
    for (std::size_t i = 1; i < csv.size(); ++i) CHECK_FALSE(csv[i].back().empty());
}

TEST_CASE("nearest-rank quantiles") {
    CHECK(nearest_rank_quantile({3, 1, 2}, 0.5) == 2);
    CHECK(nearest_rank_quantile({4, 1, 3, 2}, 0.5) == 2);
    CHECK(nearest_rank_quantile({4, 1, 3, 2}, 0.1) == 1);
    CHECK(nearest_rank_quantile({4, 1, 3, 2}, 0.9) == 4);
    CHECK(nearest_rank_quantile({5}, 0.0) == 5);
    std::vector<double> twenty;
    for (int i = 20; i >= 1; --i) twenty.push_back(i);
    CHECK(nearest_rank_quantile(twenty, 0.1) == 2);
    CHECK(nearest_rank_quantile(twenty, 0.5) == 10);
    CHECK(nearest_rank_quantile(twenty, 0.9) == 18);
    CHECK_THROWS_AS(nearest_rank_quantile({}, 0.5), DomainError);
    CHECK_THROWS_AS(nearest_rank_quantile({1.0}, 1.5), DomainError);
}

TEST_CASE("summary recomputed from the raw CSV") {
    const ExperimentConfig c = small_heavy();
    const ExperimentResult r = run_convergence(c);
    const auto raw = parse_csv(results_csv(r));
    REQUIRE(raw.front() == std::vector<std::string>{"n", "seed", "R_n", "scale", "exterior_count", "sup_distance", "error"});
    std::map<std::uint64_t, std::vector<double>> by_n;
    for (std::size_t i = 1; i < raw.size(); ++i) by_n[std::stoull(raw[i][0])].push_back(std::stod(raw[i][5]));
    const auto table = sup_distance_table(r);
    REQUIRE(table.size() == by_n.size());
    for (const SummaryRow& s : table) {
        auto v = by_n.at(s.n);
        std::sort(v.begin(), v.end());
        CHECK(s.runs == 5);
        CHECK(s.errors == 0);
        CHECK(s.median == doctest::Approx(v[2]).epsilon(1e-15));
        CHECK(s.q10 == doctest::Approx(v[0]).epsilon(1e-15));
        CHECK(s.q90 == doctest::Approx(v[4]).epsilon(1e-15));
    }
    const auto summary = parse_csv(summary_csv(table));
    CHECK(summary.front() == std::vector<std::string>{"n", "runs", "errors", "median", "q10", "q90"});
    CHECK(summary.size() == 3);
}

TEST_CASE("light regime scale is R_n") {
    ExperimentConfig c = ExperimentConfig::preset("example_4_2");
    c.n_values = {500};
    c.seeds = {1, 2};
    c.t_max = 1.0;
    c.sup_b = 1.0;
    c.mc.samples = 20000;
    c.mc.tolerance = 0.05;
    const ExperimentResult r = run_convergence(c);
    for (const RunRow& row : r.rows) {
        CHECK(row.error.empty());
        CHECK(row.scale == doctest::Approx(row.R_n).epsilon(1e-12));
    }
    CHECK(r.limit.front().value == doctest::Approx(2.0 * M_PI));
}

TEST_CASE("output files") {
    const ExperimentConfig c = small_heavy();
    const ExperimentResult r = run_convergence(c);
    const fs::path dir = scratch_dir("experiment_files");
    write_experiment(c, r, dir.string());
    for (const char* f : {"meta.json", "results.csv", "summary.csv", "limit.csv", "timing.csv"})
        CHECK(fs::exists(dir / f));
    CHECK(fs::exists(dir / "curves" / "run_200_1.csv"));
    CHECK(fs::exists(dir / "curves" / "run_1000_5.csv"));
    CHECK(slurp(dir / "results.csv") == results_csv(r));

    const auto curve = parse_csv(slurp(dir / "curves" / "run_1000_3.csv"));
    REQUIRE(curve.size() == 152);
    CHECK(curve[0] == std::vector<std::string>{"t", "chi", "chi_scaled"});
    CHECK(std::stoll(curve[1][1]) == r.rows[7].chi[0]);

    const auto limit = parse_csv(slurp(dir / "limit.csv"));
    CHECK(limit.size() == 152);
    CHECK(limit[0] == std::vector<std::string>{"t", "value", "std_error", "K_used"});

    const nlohmann::json meta = nlohmann::json::parse(slurp(dir / "meta.json"));
    CHECK(meta["version"] == toolkit_version);
    const ExperimentConfig back = config_from_json(meta["config"]);
    CHECK(config_to_json(back) == config_to_json(c));
    fs::remove_all(dir);
}

TEST_CASE("configuration JSON") {
    ExperimentConfig c = ExperimentConfig::preset("example_4_2");
    c.rule = ComplexRule::cech(0.8);
    c.mc.proposal = McProposal::Box;
    c.sup_a = 0.5;
    c.jobs = 2;
    const ExperimentConfig back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK(back.rule.kind() == RuleKind::Cech);

    const ExperimentConfig over = config_from_json(nlohmann::json{{"preset", "example_3_2"}, {"xi", 2.0}});
    CHECK(over.xi == 2.0);
    CHECK(over.law.family() == TailFamily::RegularlyVarying);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"xi", "two"}}), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json::array()), ConfigError);
    CHECK_THROWS_AS(config_from_json(nlohmann::json{{"preset", "missing"}}), ConfigError);
}
