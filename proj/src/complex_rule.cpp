#include "ecproc/complex_rule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ecproc/errors.hpp"
#include "ecproc/miniball.hpp"
#include "ecproc/rng.hpp"

namespace ecproc {

namespace {

void check_threshold(double w) {
    if (!(w > 0.0 && std::isfinite(w))) throw ConfigError("unit threshold must be positive and finite");
}

double diameter(const PointSet& s, bool linf) {
    double diam = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j)
            diam = std::max(diam, linf ? chebyshev_distance(s[i], s[j]) : euclidean_distance(s[i], s[j]));
    return diam;
}

}  // namespace

ComplexRule ComplexRule::rips_l2(double w) {
    check_threshold(w);
    return ComplexRule(RuleKind::RipsL2, w, "rips_l2");
}

ComplexRule ComplexRule::rips_linf(double w) {
    check_threshold(w);
    return ComplexRule(RuleKind::RipsLinf, w, "rips_linf");
}

ComplexRule ComplexRule::cech(double w) {
    check_threshold(w);
    return ComplexRule(RuleKind::Cech, w, "cech");
}

ComplexRule ComplexRule::custom(std::string name, Indicator h, double locality_c, int audit_dim,
                                std::uint64_t audit_seed) {
    if (!h) throw ConfigError("custom rule needs an indicator");
    check_threshold(locality_c);
    ComplexRule rule(RuleKind::Custom, locality_c, std::move(name));
    rule.custom_c_ = locality_c;
    rule.h_ = std::move(h);
    const RuleAudit audit = audit_rule(rule, audit_dim, 256, audit_seed);
    if (!audit.ok()) throw ConfigError("custom rule '" + rule.name_ + "' failed audit: " + audit.first_failure);
    return rule;
}

double ComplexRule::locality_c(int d) const {
    switch (kind_) {
        case RuleKind::RipsL2:
        case RuleKind::Cech: return threshold_;
        case RuleKind::RipsLinf: return std::sqrt(static_cast<double>(d)) * threshold_;
        case RuleKind::Custom: return custom_c_;
    }
    return threshold_;
}

double ComplexRule::linf_extent() const noexcept {
    return kind_ == RuleKind::Custom ? custom_c_ : threshold_;
}

double critical_scale(double value, double threshold) {
    if (value <= 0.0) return std::numeric_limits<double>::denorm_min();
    double t = value / threshold;
    constexpr double inf = std::numeric_limits<double>::infinity();
    while (t > 0.0) {
        const double prev = std::nextafter(t, 0.0);
        if (prev > 0.0 && value / prev <= threshold)
            t = prev;
        else
            break;
    }
    while (!(value / t <= threshold)) t = std::nextafter(t, inf);
    return t;
}

double rips_pair_value(const ComplexRule& rule, std::span<const double> p, std::span<const double> q) {
    return rule.kind() == RuleKind::RipsLinf ? chebyshev_distance(p, q) : euclidean_distance(p, q);
}

double critical_threshold(const ComplexRule& rule) {
    switch (rule.kind()) {
        case RuleKind::RipsL2:
        case RuleKind::RipsLinf: return rule.unit_threshold();
        case RuleKind::Cech: return 0.5 * rule.unit_threshold();
        case RuleKind::Custom: break;
    }
    throw UnsupportedError("custom rules have no closed-form critical value");
}

double simplex_value(const ComplexRule& rule, const PointSet& simplex) {
    switch (rule.kind()) {
        case RuleKind::RipsL2: return diameter(simplex, false);
        case RuleKind::RipsLinf: return diameter(simplex, true);
        case RuleKind::Cech: return simplex.size() <= 1 ? 0.0 : smallest_enclosing_ball(simplex).radius;
        case RuleKind::Custom: break;
    }
    throw UnsupportedError("custom rules have no closed-form critical value");
}

bool evaluate_h(const ComplexRule& rule, double t, const PointSet& simplex) {
    if (simplex.empty()) throw DomainError("evaluate_h needs a non-empty simplex");
    if (!(t >= 0.0)) throw DomainError("evaluate_h needs t >= 0");
    if (rule.kind() == RuleKind::Cech && simplex.dim() > 3)
        throw UnsupportedError("Cech rule is only supported for d <= 3");
    if (simplex.size() == 1) return true;
    if (t == 0.0) return false;
    if (rule.kind() == RuleKind::Custom) return rule.indicator()(simplex.scaled(1.0 / t));
    return simplex_value(rule, simplex) / t <= critical_threshold(rule);
}

RuleAudit audit_rule(const ComplexRule& rule, int d, std::size_t cases, std::uint64_t seed) {
    RuleAudit audit;
    audit.cases = cases;
    const double c = rule.locality_c(d);
    // Dyadic coordinates and integer shifts keep translations exact.
    const double grid = 0x1.0p-20;
    auto dyadic = [&](CounterRng& rng, double half_width) {
        const double x = rng.uniform(-half_width, half_width);
        return std::round(x / grid) * grid;
    };
    auto fail = [&](bool& flag, const std::string& what) {
        if (flag && audit.first_failure.empty()) audit.first_failure = what;
        flag = false;
    };

    for (std::size_t trial = 0; trial < cases; ++trial) {
        CounterRng rng(seed, trial);
        const std::size_t m = 1 + rng() % 5;
        const double half_width = c * (0.3 + 0.5 * rng.uniform());
        PointSet X(d);
        std::vector<double> p(d);
        for (std::size_t i = 0; i < m; ++i) {
            for (double& x : p) x = dyadic(rng, half_width);
            X.push_back(p);
        }
        const double t = 0.25 + 1.75 * rng.uniform();
        const bool hX = evaluate_h(rule, t, X);

        for (std::size_t drop = 0; drop < m && m > 1; ++drop) {
            std::vector<std::size_t> keep;
            for (std::size_t i = 0; i < m; ++i)
                if (i != drop) keep.push_back(i);
            if (hX && !evaluate_h(rule, t, X.select(keep)))
                fail(audit.monotone, "H1: a face of a simplex is not a simplex");
        }

        std::vector<double> shift(d);
        for (double& v : shift) v = std::round(rng.uniform(-512.0, 512.0));
        PointSet shifted = X;
        for (std::size_t i = 0; i < m; ++i) {
            auto q = shifted.mutable_point(i);
            for (int k = 0; k < d; ++k) q[k] += shift[k];
        }
        if (evaluate_h(rule, t, shifted) != hX) fail(audit.translation, "H2: not translation invariant");

        double diam = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j) diam = std::max(diam, euclidean_distance(X[i], X[j]));
        if (evaluate_h(rule, 1.0, X) && diam > c) fail(audit.local, "H3: simplex wider than locality constant");

        const double s = t * rng.uniform();
        if (evaluate_h(rule, s, X) && !hX) fail(audit.scale_monotone, "H4: h_s > h_t for s <= t");
    }
    return audit;
}

std::string to_string(RuleKind kind) {
    switch (kind) {
        case RuleKind::RipsL2: return "rips_l2";
        case RuleKind::RipsLinf: return "rips_linf";
        case RuleKind::Cech: return "cech";
        case RuleKind::Custom: return "custom";
    }
    return "custom";
}

nlohmann::json rule_to_json(const ComplexRule& rule) {
    if (rule.kind() == RuleKind::Custom) throw ConfigError("custom rules are not serializable");
    return {{"kind", to_string(rule.kind())}, {"unit_threshold", rule.unit_threshold()}};
}

namespace {

ComplexRule make_rule(const std::string& kind, double w) {
    if (kind == "rips_l2") return ComplexRule::rips_l2(w);
    if (kind == "rips_linf") return ComplexRule::rips_linf(w);
    if (kind == "cech") return ComplexRule::cech(w);
    throw ConfigError("unknown complex rule '" + kind + "'");
}

}  // namespace

ComplexRule rule_from_json(const nlohmann::json& doc) {
    try {
        return make_rule(doc.at("kind").get<std::string>(), doc.at("unit_threshold").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed rule specification: ") + e.what());
    }
}

ComplexRule rule_from_string(const std::string& text, double default_threshold) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) return make_rule(text, default_threshold);
    double w = 0.0;
    std::istringstream is(text.substr(colon + 1));
    if (!(is >> w) || !is.eof()) throw ConfigError("bad rule threshold in '" + text + "'");
    return make_rule(text.substr(0, colon), w);
}

}  // namespace ecproc
