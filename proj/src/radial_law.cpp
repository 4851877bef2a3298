#include "ecproc/radial_law.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <thread>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ecproc/errors.hpp"

namespace ecproc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kTableNodes = 4096;
constexpr double kMassTolerance = 1e-6;
constexpr double kSegmentTolerance = 1e-9;

enum class RadiusSampler { Table, Example32, Gamma2 };

std::string fmt_range(double a, double b) {
    std::ostringstream os;
    os.precision(6);
    os << "[" << a << ", " << b << "]";
    return os.str();
}

}  // namespace

struct RadialLaw::Impl {
    TailFamily family = TailFamily::RegularlyVarying;
    LawPreset preset = LawPreset::None;
    int d = 2;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double tau = std::numeric_limits<double>::quiet_NaN();
    double zeta = std::numeric_limits<double>::quiet_NaN();
    double C = 1.0;
    bool custom = false;
    double surface = 0.0;

    // Unnormalized profile: f(r) = C * shape(r) for the heavy family,
    // f(r) = C * exp(-psi(r)) for the exponential family.
    Profile shape;
    Profile psi;
    Profile psi_prime;

    RadiusSampler sampler = RadiusSampler::Table;
    std::vector<double> nodes;
    std::vector<double> cdf;
    double mass = 0.0;
    double peak = 0.0;

    double density(double r) const {
        if (family == TailFamily::RegularlyVarying) return C * shape(r);
        return C * std::exp(-psi(r));
    }

    double marginal(double r) const {
        if (r <= 0.0) return d == 1 ? surface * density(0.0) : 0.0;
        return surface * std::pow(r, d - 1) * density(r);
    }

    // Adaptive Gauss-Kronrod; `depth` bounds the bisection levels. Table
    // segments are short and smooth, so they need only a few levels.
    double integrate(double a, double b, double* error, unsigned depth = 10) const {
        double err = 0.0;
        const double v = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
            [this](double r) { return marginal(r); }, a, b, depth, 1e-12, &err);
        if (error) *error = err;
        return v;
    }

    double segment(std::size_t i, double r) const {
        return boost::math::quadrature::gauss<double, 15>::integrate(
            [this](double x) { return marginal(x); }, nodes[i], r);
    }

    void normalize() {
        double err = 0.0;
        const double unnormalized = integrate(0.0, kInf, &err);
        if (!std::isfinite(unnormalized) || unnormalized <= 0.0 || err > 1e-8 * unnormalized)
            throw ConfigError("radial normalization integral did not converge on [0, inf)");
        C = 1.0 / unnormalized;
    }

    void tabulate() {
        // Median-ish scale so the table resolves the bulk of the law.
        double scale = 1.0;
        for (int i = 0; i < 200 && integrate(0.0, scale, nullptr) < 0.5; ++i) scale *= 2.0;

        nodes.resize(kTableNodes);
        cdf.resize(kTableNodes);
        for (std::size_t i = 0; i < kTableNodes; ++i) {
            const double x = static_cast<double>(i) / kTableNodes;
            nodes[i] = scale * x / (1.0 - x);
        }
        cdf[0] = 0.0;
        peak = 0.0;
        double peak_value = density(0.0);
        for (std::size_t i = 1; i < kTableNodes; ++i) {
            double err = 0.0;
            const double piece = integrate(nodes[i - 1], nodes[i], &err, 3);
            if (!std::isfinite(piece) || piece < 0.0 || err > kSegmentTolerance)
                throw ConfigError("radial CDF quadrature did not converge on " +
                                  fmt_range(nodes[i - 1], nodes[i]));
            cdf[i] = cdf[i - 1] + piece;
            if (density(nodes[i]) > peak_value) {
                peak_value = density(nodes[i]);
                peak = nodes[i];
            }
        }
        double err = 0.0;
        const double tail = integrate(nodes.back(), kInf, &err);
        if (!std::isfinite(tail) || err > kSegmentTolerance)
            throw ConfigError("radial CDF quadrature did not converge on " +
                              fmt_range(nodes.back(), kInf));
        mass = cdf.back() + tail;
        if (std::abs(mass - 1.0) > kMassTolerance) {
            std::ostringstream os;
            os << "density does not integrate to 1 (radial mass " << mass << ")";
            throw ConfigError(os.str());
        }
    }

    double table_cdf(double r) const {
        if (r <= 0.0) return 0.0;
        if (r >= nodes.back()) return cdf.back() + integrate(nodes.back(), r, nullptr, 6);
        const auto it = std::upper_bound(nodes.begin(), nodes.end(), r);
        const std::size_t i = static_cast<std::size_t>(it - nodes.begin()) - 1;
        return cdf[i] + segment(i, r);
    }

    double table_quantile(double u) const {
        if (u >= cdf.back()) return tail_quantile(u);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        const std::size_t i = static_cast<std::size_t>(it - cdf.begin()) - 1;
        double lo = nodes[i];
        double hi = nodes[i + 1];
        const double span = cdf[i + 1] - cdf[i];
        double r = span > 0.0 ? lo + (hi - lo) * (u - cdf[i]) / span : 0.5 * (lo + hi);
        // Safeguarded Newton: every iterate stays inside the bracket.
        for (int iter = 0; iter < 200; ++iter) {
            const double F = cdf[i] + segment(i, r) - u;
            if (F == 0.0) return r;
            (F > 0.0 ? hi : lo) = r;
            const double g = marginal(r);
            double next = g > 0.0 ? r - F / g : 0.5 * (lo + hi);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - r) <= 1e-14 * next || hi - lo <= 1e-14 * hi) return next;
            r = next;
        }
        return r;
    }

    double tail_quantile(double u) const {
        double lo = nodes.back();
        double hi = 2.0 * lo;
        int guard = 0;
        while (table_cdf(hi) < u && guard++ < 200) {
            lo = hi;
            hi *= 2.0;
        }
        for (int iter = 0; iter < 200 && hi - lo > 1e-12 * hi; ++iter) {
            const double mid = 0.5 * (lo + hi);
            (table_cdf(mid) < u ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

    void check_psi_prime() const {
        for (std::size_t i = 1; i < nodes.size(); ++i) {
            if (!(psi_prime(nodes[i]) > 0.0)) {
                std::ostringstream os;
                os << "psi'(r) must be positive for r > 0 (fails at r = " << nodes[i] << ")";
                throw ConfigError(os.str());
            }
        }
    }
};

double sphere_surface(int d) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

double ball_volume(int d) { return sphere_surface(d) / d; }

namespace {

void check_dim(int d) {
    if (d < 2) throw ConfigError("ambient dimension d must be >= 2");
}

void check_alpha(int d, double alpha) {
    if (!(std::isfinite(alpha) && alpha > d)) throw ConfigError("tail exponent alpha must exceed d");
}

void check_tau_zeta(double tau, double zeta) {
    if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
    if (!(zeta > 0.0)) throw ConfigError("zeta must lie in (0, inf]");
}

}  // namespace

RadialLaw RadialLaw::regularly_varying(int d, double alpha) {
    check_dim(d);
    check_alpha(d, alpha);
    auto impl = std::make_shared<Impl>();
    impl->family = TailFamily::RegularlyVarying;
    impl->d = d;
    impl->alpha = alpha;
    impl->surface = sphere_surface(d);
    impl->shape = [alpha](double r) { return 1.0 / (1.0 + std::pow(r, alpha)); };
    impl->normalize();
    impl->tabulate();
    return RadialLaw(std::move(impl));
}

RadialLaw RadialLaw::regularly_varying(int d, double alpha, Profile density) {
    check_dim(d);
    check_alpha(d, alpha);
    if (!density) throw ConfigError("density profile is empty");
    auto impl = std::make_shared<Impl>();
    impl->family = TailFamily::RegularlyVarying;
    impl->d = d;
    impl->alpha = alpha;
    impl->custom = true;
    impl->surface = sphere_surface(d);
    impl->shape = std::move(density);
    impl->C = 1.0;
    impl->tabulate();
    return RadialLaw(std::move(impl));
}

RadialLaw RadialLaw::exponential_type(int d, double tau) {
    check_dim(d);
    check_tau_zeta(tau, 1.0);
    auto impl = std::make_shared<Impl>();
    impl->family = TailFamily::ExponentialType;
    impl->d = d;
    impl->tau = tau;
    impl->zeta = tau == 1.0 ? 1.0 : kInf;
    impl->surface = sphere_surface(d);
    impl->psi = [tau](double r) { return std::pow(r, tau) / tau; };
    impl->psi_prime = [tau](double r) { return std::pow(r, tau - 1.0); };
    impl->normalize();
    impl->tabulate();
    return RadialLaw(std::move(impl));
}

RadialLaw RadialLaw::exponential_type(int d, double tau, Profile psi, Profile psi_prime, double zeta) {
    check_dim(d);
    check_tau_zeta(tau, zeta);
    if (!psi || !psi_prime) throw ConfigError("psi and psi' must both be supplied");
    auto impl = std::make_shared<Impl>();
    impl->family = TailFamily::ExponentialType;
    impl->d = d;
    impl->tau = tau;
    impl->zeta = zeta;
    impl->custom = true;
    impl->surface = sphere_surface(d);
    impl->psi = std::move(psi);
    impl->psi_prime = std::move(psi_prime);
    impl->normalize();
    impl->tabulate();
    impl->check_psi_prime();
    return RadialLaw(std::move(impl));
}

RadialLaw RadialLaw::example_3_2() {
    auto impl = std::make_shared<Impl>();
    impl->family = TailFamily::RegularlyVarying;
    impl->preset = LawPreset::Example32;
    impl->d = 2;
    impl->alpha = 4.0;
    impl->surface = 2.0 * std::numbers::pi;
    impl->shape = [](double r) { return 1.0 / (1.0 + r * r * r * r); };
    impl->C = 2.0 / (std::numbers::pi * std::numbers::pi);
    impl->sampler = RadiusSampler::Example32;
    impl->tabulate();
    return RadialLaw(std::move(impl));
}

RadialLaw RadialLaw::example_4_2(int d, double tau) {
    if (d == 2 && tau == 1.0) {
        auto impl = std::make_shared<Impl>();
        impl->family = TailFamily::ExponentialType;
        impl->preset = LawPreset::Example42;
        impl->d = 2;
        impl->tau = 1.0;
        impl->zeta = 1.0;
        impl->surface = 2.0 * std::numbers::pi;
        impl->psi = [](double r) { return r; };
        impl->psi_prime = [](double) { return 1.0; };
        impl->C = 1.0 / (2.0 * std::numbers::pi);
        impl->sampler = RadiusSampler::Gamma2;
        impl->tabulate();
        return RadialLaw(std::move(impl));
    }
    RadialLaw law = exponential_type(d, tau);
    auto impl = std::make_shared<Impl>(*law.impl_);
    impl->preset = LawPreset::Example42;
    return RadialLaw(std::move(impl));
}

TailFamily RadialLaw::family() const noexcept { return impl_->family; }
LawPreset RadialLaw::preset() const noexcept { return impl_->preset; }
int RadialLaw::dim() const noexcept { return impl_->d; }
double RadialLaw::norm_const() const noexcept { return impl_->C; }
bool RadialLaw::is_custom() const noexcept { return impl_->custom; }
double RadialLaw::total_mass() const { return impl_->mass; }
double RadialLaw::density_peak() const noexcept { return impl_->peak; }

double RadialLaw::alpha() const {
    if (impl_->family != TailFamily::RegularlyVarying)
        throw ConfigError("alpha is only defined for regularly varying laws");
    return impl_->alpha;
}

double RadialLaw::tau() const {
    if (impl_->family != TailFamily::ExponentialType)
        throw ConfigError("tau is only defined for exponential-type laws");
    return impl_->tau;
}

double RadialLaw::zeta() const {
    if (impl_->family != TailFamily::ExponentialType)
        throw ConfigError("zeta is only defined for exponential-type laws");
    return impl_->zeta;
}

bool RadialLaw::theorem_hypotheses_hold() const noexcept {
    if (impl_->family == TailFamily::RegularlyVarying) return true;
    return !(impl_->d == 2 && impl_->tau == 1.0);
}

double RadialLaw::density(double r) const { return impl_->density(r); }

double RadialLaw::psi(double r) const {
    if (impl_->family != TailFamily::ExponentialType)
        throw ConfigError("psi is only defined for exponential-type laws");
    return impl_->psi(r);
}

double RadialLaw::psi_prime(double r) const {
    if (impl_->family != TailFamily::ExponentialType)
        throw ConfigError("psi' is only defined for exponential-type laws");
    return impl_->psi_prime(r);
}

double RadialLaw::aux_scale(double z) const { return 1.0 / psi_prime(z); }

double RadialLaw::radial_cdf(double r) const {
    if (impl_->sampler == RadiusSampler::Example32) {
        if (r <= 0.0) return 0.0;
        return 2.0 / std::numbers::pi * std::atan(r * r);
    }
    return impl_->table_cdf(r);
}

double RadialLaw::radial_quantile(double u) const {
    if (!(u > 0.0 && u < 1.0)) throw DomainError("radial quantile needs u in (0, 1)");
    if (impl_->sampler == RadiusSampler::Example32)
        return std::sqrt(std::tan(0.5 * std::numbers::pi * u));
    return impl_->table_quantile(u);
}

double RadialLaw::sample_radius(CounterRng& rng) const {
    switch (impl_->sampler) {
        case RadiusSampler::Example32:
            return std::sqrt(std::tan(0.5 * std::numbers::pi * rng.uniform()));
        case RadiusSampler::Gamma2:
            // Radial marginal r e^{-r} is Gamma(2, 1).
            return rng.exponential(1.0) + rng.exponential(1.0);
        case RadiusSampler::Table:
            break;
    }
    return impl_->table_quantile(rng.uniform());
}

PointCloud sample_cloud(const RadialLaw& law, std::size_t n, std::uint64_t seed, unsigned jobs) {
    const int d = law.dim();
    std::vector<double> coords(n * static_cast<std::size_t>(d));

    auto fill = [&](std::size_t begin, std::size_t end) {
        std::vector<double> dir(d);
        for (std::size_t i = begin; i < end; ++i) {
            CounterRng rng(seed, i);
            double norm = 0.0;
            while (norm == 0.0) {
                for (double& x : dir) x = rng.normal();
                norm = euclidean_norm(dir);
            }
            const double radius = law.sample_radius(rng);
            for (int k = 0; k < d; ++k) coords[i * d + k] = radius * dir[k] / norm;
        }
    };

    jobs = std::max(1u, jobs);
    if (jobs == 1 || n < 4096) {
        fill(0, n);
    } else {
        std::vector<std::thread> workers;
        const std::size_t chunk = (n + jobs - 1) / jobs;
        for (unsigned j = 0; j < jobs; ++j) {
            const std::size_t begin = std::min(n, j * chunk);
            const std::size_t end = std::min(n, begin + chunk);
            workers.emplace_back(fill, begin, end);
        }
        for (auto& w : workers) w.join();
    }
    return PointCloud{n == 0 ? PointSet(d) : PointSet(d, std::move(coords)), n, seed, law};
}

double radius_R_n(const RadialLaw& law, double n, double xi) {
    if (!(n >= 1.0)) throw DomainError("radius_R_n needs n >= 1");
    if (!(xi > 0.0)) throw DomainError("radius_R_n needs xi > 0");
    const double peak = law.density_peak();
    const double fmax = law.density(peak);
    if (xi >= n * fmax)
        throw DomainError("n f(R) = xi has no solution on the decreasing tail (xi >= n sup f)");

    double lo = peak;
    double hi = std::max(1.0, 2.0 * peak);
    for (int i = 0; i < 2000 && n * law.density(hi) >= xi; ++i) {
        lo = hi;
        hi *= 2.0;
    }
    // Bisect down to adjacent doubles.
    for (int i = 0; i < 2000; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (n * law.density(mid) >= xi ? lo : hi) = mid;
    }
    const double flo = std::abs(n * law.density(lo) - xi);
    const double fhi = std::abs(n * law.density(hi) - xi);
    return flo <= fhi ? lo : hi;
}

double scaling_denominator(const RadialLaw& law, double R_n) {
    if (!(R_n > 0.0)) throw DomainError("scaling_denominator needs R_n > 0");
    const int d = law.dim();
    if (law.family() == TailFamily::RegularlyVarying) return std::pow(R_n, d);
    return law.aux_scale(R_n) * std::pow(R_n, d - 1);
}

std::string to_string(TailFamily family) {
    return family == TailFamily::RegularlyVarying ? "regularly_varying" : "exponential_type";
}

nlohmann::json law_to_json(const RadialLaw& law) {
    if (law.is_custom()) throw ConfigError("laws with custom profiles are not serializable");
    nlohmann::json doc;
    doc["family"] = to_string(law.family());
    doc["d"] = law.dim();
    if (law.family() == TailFamily::RegularlyVarying) {
        doc["alpha"] = law.alpha();
    } else {
        doc["tau"] = law.tau();
        if (std::isinf(law.zeta()))
            doc["zeta"] = "inf";
        else
            doc["zeta"] = law.zeta();
    }
    switch (law.preset()) {
        case LawPreset::Example32: doc["preset"] = "example_3_2"; break;
        case LawPreset::Example42: doc["preset"] = "example_4_2"; break;
        case LawPreset::None: doc["preset"] = nullptr; break;
    }
    return doc;
}

namespace {

double read_number(const nlohmann::json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (v.is_string() && v.get<std::string>() == "inf") return kInf;
    if (!v.is_number()) throw ConfigError(std::string("law field '") + key + "' must be a number");
    return v.get<double>();
}

void check_zeta_matches(const nlohmann::json& doc, const RadialLaw& law) {
    if (!doc.contains("zeta") || doc["zeta"].is_null()) return;
    const double z = read_number(doc, "zeta");
    if (z != law.zeta())
        throw ConfigError("zeta is fixed by psi; the built-in profile has a different limit");
}

}  // namespace

RadialLaw law_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) throw ConfigError("law specification must be a JSON object");
    try {
        const std::string preset =
            doc.contains("preset") && !doc["preset"].is_null() ? doc["preset"].get<std::string>() : "";
        if (preset == "example_3_2") {
            if (doc.contains("d") && doc["d"].get<int>() != 2)
                throw ConfigError("preset example_3_2 lives in d = 2");
            if (doc.contains("alpha") && !doc["alpha"].is_null() && read_number(doc, "alpha") != 4.0)
                throw ConfigError("preset example_3_2 has alpha = 4");
            return RadialLaw::example_3_2();
        }
        if (preset == "example_4_2") {
            const int d = doc.contains("d") ? doc["d"].get<int>() : 2;
            const double tau = doc.contains("tau") && !doc["tau"].is_null() ? read_number(doc, "tau") : 1.0;
            RadialLaw law = RadialLaw::example_4_2(d, tau);
            check_zeta_matches(doc, law);
            return law;
        }
        if (!preset.empty()) throw ConfigError("unknown law preset '" + preset + "'");

        const std::string family = doc.at("family").get<std::string>();
        const int d = doc.at("d").get<int>();
        if (family == "regularly_varying") return RadialLaw::regularly_varying(d, read_number(doc, "alpha"));
        if (family == "exponential_type") {
            RadialLaw law = RadialLaw::exponential_type(d, read_number(doc, "tau"));
            check_zeta_matches(doc, law);
            return law;
        }
        throw ConfigError("unknown law family '" + family + "'");
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed law specification: ") + e.what());
    }
}

}  // namespace ecproc
