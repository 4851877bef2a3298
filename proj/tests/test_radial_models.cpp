#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "ecproc/errors.hpp"
#include "ecproc/radial_law.hpp"

using namespace ecproc;
constexpr double pi = std::numbers::pi;

namespace {

double ks_statistic(std::vector<double> sample, const RadialLaw& law) {
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double D = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double F = law.radial_cdf(sample[i]);
        D = std::max({D, std::abs(F - i / n), std::abs((i + 1) / n - F)});
    }
    return D;
}

std::vector<double> norms(const PointCloud& cloud) {
    std::vector<double> r(cloud.points.size());
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = euclidean_norm(cloud.points[i]);
    return r;
}

}  // namespace

TEST_CASE("densities integrate to one") {
    CHECK(RadialLaw::example_3_2().total_mass() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(RadialLaw::example_4_2().total_mass() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(RadialLaw::regularly_varying(3, 5.0).total_mass() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(RadialLaw::exponential_type(3, 0.5).total_mass() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(RadialLaw::example_3_2().norm_const() == doctest::Approx(2.0 / (pi * pi)).epsilon(1e-12));
    CHECK(RadialLaw::example_4_2().norm_const() == doctest::Approx(1.0 / (2.0 * pi)).epsilon(1e-9));
}

TEST_CASE("radial CDFs agree with independent special-function forms") {
    // Tabulated generic laws against closed forms through boost.
    const RadialLaw heavy2 = RadialLaw::regularly_varying(2, 4.0);
    const RadialLaw heavy3 = RadialLaw::regularly_varying(3, 5.0);
    const RadialLaw light2 = RadialLaw::exponential_type(2, 1.0);
    const RadialLaw light3 = RadialLaw::exponential_type(3, 0.5);
    for (double r : {0.01, 0.3, 1.0, 2.5, 7.0, 30.0, 400.0}) {
        CAPTURE(r);
        CHECK(heavy2.radial_cdf(r) == doctest::Approx(2.0 / pi * std::atan(r * r)).epsilon(1e-9));
        CHECK(RadialLaw::example_3_2().radial_cdf(r) == doctest::Approx(2.0 / pi * std::atan(r * r)).epsilon(1e-9));
        const double x = std::pow(r, 5.0);
        CHECK(heavy3.radial_cdf(r) == doctest::Approx(boost::math::ibeta(0.6, 0.4, x / (1.0 + x))).epsilon(1e-8));
        CHECK(light2.radial_cdf(r) == doctest::Approx(boost::math::gamma_p(2.0, r)).epsilon(1e-9));
        CHECK(light3.radial_cdf(r) == doctest::Approx(boost::math::gamma_p(6.0, 2.0 * std::sqrt(r))).epsilon(1e-8));
    }
}

TEST_CASE("quantiles invert the CDF") {
    for (const RadialLaw& law : {RadialLaw::example_3_2(), RadialLaw::example_4_2(), RadialLaw::regularly_varying(2, 4.0),
                                 RadialLaw::regularly_varying(3, 5.0), RadialLaw::exponential_type(3, 0.5)}) {
        for (int i = 1; i <= 99; ++i) {
            const double u = i / 100.0;
            CAPTURE(u);
            CHECK(std::abs(law.radial_cdf(law.radial_quantile(u)) - u) < 1e-8);
        }
    }
    // Table inverse against the closed form sqrt(tan(pi u / 2)).
    const RadialLaw table = RadialLaw::regularly_varying(2, 4.0);
    for (double u : {1e-6, 0.01, 0.25, 0.5, 0.9, 0.999, 0.999999}) {
        CAPTURE(u);
        CHECK(table.radial_quantile(u) == doctest::Approx(std::sqrt(std::tan(pi * u / 2.0))).epsilon(1e-9));
        CHECK(RadialLaw::example_4_2().radial_quantile(u) ==
              doctest::Approx(boost::math::gamma_p_inv(2.0, u)).epsilon(1e-9));
    }
}

TEST_CASE("regular variation of the heavy profile") {
    for (const RadialLaw& law : {RadialLaw::example_3_2(), RadialLaw::regularly_varying(3, 5.0)}) {
        for (double r : {1e2, 1e3, 1e4})
            for (double t : {2.0, 5.0}) {
                const double ratio = law.density(r * t) / law.density(r);
                CHECK(std::abs(ratio / std::pow(t, -law.alpha()) - 1.0) < 0.05);
            }
    }
}

TEST_CASE("sample_cloud basics") {
    const RadialLaw law = RadialLaw::example_3_2();
    const PointCloud empty = sample_cloud(law, 0, 7);
    CHECK(empty.points.size() == 0);
    CHECK(empty.n == 0);

    const PointCloud a = sample_cloud(law, 1000, 3);
    const PointCloud b = sample_cloud(law, 1000, 3, 4);
    CHECK(a.points.size() == 1000);
    CHECK(a.points == b.points);
    CHECK(a.seed == 3);

    // Point i uses stream i, so smaller clouds are prefixes of larger ones.
    const PointCloud c = sample_cloud(law, 400, 3);
    for (std::size_t i = 0; i < 400; ++i) CHECK(std::equal(c.points[i].begin(), c.points[i].end(), a.points[i].begin()));
    CHECK(!(sample_cloud(law, 1000, 4).points == a.points));
}

TEST_CASE("heavy cloud: half the mass lies outside the unit ball") {
    const std::size_t n = 100000;
    const PointCloud cloud = sample_cloud(RadialLaw::example_3_2(), n, 1);
    std::size_t outside = 0;
    for (double r : norms(cloud)) outside += r >= 1.0;
    const double frac = static_cast<double>(outside) / n;
    CHECK(std::abs(frac - 0.5) < 3.0 * std::sqrt(0.25 / n));
}

TEST_CASE("light cloud: mean norm of the Gamma(2,1) marginal") {
    const std::size_t n = 10000;
    const auto r = norms(sample_cloud(RadialLaw::example_4_2(2, 1.0), n, 2));
    double mean = 0.0;
    for (double x : r) mean += x;
    mean /= n;
    CHECK(std::abs(mean - 2.0) < 3.0 * std::sqrt(2.0 / n));
}

TEST_CASE("Kolmogorov-Smirnov check of sampled radii") {
    const std::size_t n = 20000;
    for (const RadialLaw& law : {RadialLaw::example_3_2(), RadialLaw::example_4_2(), RadialLaw::regularly_varying(3, 5.0),
                                 RadialLaw::exponential_type(3, 0.5)}) {
        const double D = ks_statistic(norms(sample_cloud(law, n, 11)), law);
        CAPTURE(law.dim());
        CHECK(D < 1.63 / std::sqrt(static_cast<double>(n)));
    }
}

TEST_CASE("directions are uniform (chi-square over 16 angular bins)") {
    const std::size_t n = 32000;
    const PointCloud cloud = sample_cloud(RadialLaw::example_3_2(), n, 9);
    std::vector<double> bins(16, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = std::atan2(cloud.points[i][1], cloud.points[i][0]) + pi;
        bins[std::min<std::size_t>(15, static_cast<std::size_t>(phi / (2.0 * pi) * 16.0))] += 1.0;
    }
    const double expected = n / 16.0;
    double chi2 = 0.0;
    for (double b : bins) chi2 += (b - expected) * (b - expected) / expected;
    CHECK(chi2 < 30.578);  // 99% quantile with 15 degrees of freedom
}

TEST_CASE("radius_R_n examples") {
    const RadialLaw heavy = RadialLaw::example_3_2();
    const double R = radius_R_n(heavy, 1e4, 1.0);
    CHECK(R == doctest::Approx(std::pow(2e4 / (pi * pi) - 1.0, 0.25)).epsilon(1e-12));
    CHECK(std::abs(R - std::pow(2e4 / (pi * pi), 0.25)) < 1e-3);
    CHECK(std::abs(R - 6.709) < 1e-3);

    const RadialLaw light = RadialLaw::example_4_2(2, 1.0);
    CHECK(radius_R_n(light, std::exp(10.0) * 2.0 * pi, 1.0) == doctest::Approx(10.0).epsilon(1e-11));

    CHECK_THROWS_AS(radius_R_n(heavy, 1.0, heavy.density(0.0) * 1.01), DomainError);
    CHECK_THROWS_AS(radius_R_n(heavy, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(radius_R_n(heavy, 10.0, -1.0), DomainError);
}

TEST_CASE("radius_R_n consistency and monotonicity") {
    for (const RadialLaw& law : {RadialLaw::example_3_2(), RadialLaw::example_4_2(), RadialLaw::regularly_varying(3, 5.0),
                                 RadialLaw::exponential_type(3, 0.5)}) {
        for (double n : {1e3, 1e6})
            for (double xi : {0.5, 1.0, 2.0}) {
                const double R = radius_R_n(law, n, xi);
                CHECK(std::abs(n * law.density(R) / xi - 1.0) < 1e-9);
            }
        double prev = 0.0;
        for (double n = 100; n <= 1e7; n *= 1.7) {
            const double R = radius_R_n(law, n, 1.0);
            CHECK(R > prev);
            prev = R;
        }
    }
}

TEST_CASE("scaling_denominator") {
    CHECK(scaling_denominator(RadialLaw::example_3_2(), 10.0) == doctest::Approx(100.0));
    CHECK(scaling_denominator(RadialLaw::example_4_2(2, 1.0), 10.0) == doctest::Approx(10.0));
    CHECK(scaling_denominator(RadialLaw::exponential_type(2, 0.5), 100.0) == doctest::Approx(1000.0));
    const RadialLaw custom = RadialLaw::exponential_type(
        2, 0.5, [](double r) { return 2.0 * std::sqrt(r); }, [](double r) { return 1.0 / std::sqrt(r); },
        std::numeric_limits<double>::infinity());
    CHECK(scaling_denominator(custom, 100.0) == doctest::Approx(1000.0));
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(RadialLaw::regularly_varying(2, 2.0), ConfigError);
    CHECK_THROWS_AS(RadialLaw::regularly_varying(1, 4.0), ConfigError);
    CHECK_THROWS_AS(RadialLaw::exponential_type(2, 1.5), ConfigError);
    CHECK_THROWS_AS(RadialLaw::exponential_type(2, 0.0), ConfigError);
    // Not normalized.
    CHECK_THROWS_AS(RadialLaw::regularly_varying(2, 4.0, [](double r) { return 1.0 / (1.0 + r * r * r * r); }),
                    ConfigError);
    // psi' must be positive.
    CHECK_THROWS_AS(RadialLaw::exponential_type(
                        2, 1.0, [](double r) { return r; }, [](double r) { return r < 3.0 ? 1.0 : -1.0; }, 1.0),
                    ConfigError);
    CHECK_FALSE(RadialLaw::example_4_2(2, 1.0).theorem_hypotheses_hold());
    CHECK(RadialLaw::example_4_2(2, 0.5).theorem_hypotheses_hold());
    CHECK(RadialLaw::example_4_2(3, 1.0).theorem_hypotheses_hold());
}

TEST_CASE("law JSON round trip") {
    for (const RadialLaw& law : {RadialLaw::example_3_2(), RadialLaw::example_4_2(), RadialLaw::example_4_2(3, 0.5),
                                 RadialLaw::regularly_varying(3, 5.0), RadialLaw::exponential_type(2, 0.7)}) {
        const auto doc = law_to_json(law);
        const RadialLaw back = law_from_json(doc);
        CHECK(law_to_json(back) == doc);
        CHECK(back.norm_const() == law.norm_const());
        CHECK(back.radial_quantile(0.3) == law.radial_quantile(0.3));
    }
    CHECK(law_to_json(RadialLaw::exponential_type(2, 0.5))["zeta"] == "inf");
    CHECK(law_to_json(RadialLaw::example_4_2())["zeta"] == 1.0);
    CHECK_THROWS_AS(law_from_json({{"preset", "example_9"}}), ConfigError);
    CHECK_THROWS_AS(law_from_json({{"family", "exponential_type"}, {"d", 2}, {"tau", 1.0}, {"zeta", "inf"}}),
                    ConfigError);
    CHECK_THROWS_AS(law_from_json({{"family", "gaussian"}, {"d", 2}}), ConfigError);
    CHECK_THROWS_AS(law_from_json(nlohmann::json::array()), ConfigError);
}
