#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include <json.hpp>

#include "ecproc/point_set.hpp"

namespace ecproc {

enum class RuleKind { RipsL2, RipsLinf, Cech, Custom };

/// Indicator h (at scale 1) defining which finite point sets span a simplex.
///
/// Built-in rules with unit threshold w:
///   - RipsL2:   h(X) = 1{diam_2(X) <= w}
///   - RipsLinf: h(X) = 1{diam_inf(X) <= w}
///   - Cech:     h(X) = 1{miniball radius of X <= w / 2}
/// The scaled indicator is h_t(X) = h(X / t).
class ComplexRule {
public:
    using Indicator = std::function<bool(const PointSet&)>;

    static ComplexRule rips_l2(double unit_threshold);
    static ComplexRule rips_linf(double unit_threshold);
    static ComplexRule cech(double unit_threshold);

    /// Caller-supplied indicator with declared Euclidean locality constant c.
    /// The rule is audited for monotonicity, translation invariance, locality
    /// and scale monotonicity on random point sets in R^`audit_dim`; a failing
    /// audit throws ConfigError.
    static ComplexRule custom(std::string name, Indicator h, double locality_c, int audit_dim = 2,
                              std::uint64_t audit_seed = 1);

    RuleKind kind() const noexcept { return kind_; }
    double unit_threshold() const noexcept { return threshold_; }
    const std::string& name() const noexcept { return name_; }
    bool is_rips() const noexcept { return kind_ == RuleKind::RipsL2 || kind_ == RuleKind::RipsLinf; }

    /// Euclidean locality constant c: h(X) = 0 whenever diam_2(X) > c.
    /// For RipsLinf this is sqrt(d) * w, since diam_2 <= sqrt(d) diam_inf.
    double locality_c(int d) const;

    /// Bound on the l_inf diameter of any simplex at scale 1.
    double linf_extent() const noexcept;

    /// The raw indicator at scale 1 (custom rules only).
    const Indicator& indicator() const noexcept { return h_; }

private:
    ComplexRule(RuleKind kind, double threshold, std::string name)
        : kind_(kind), threshold_(threshold), name_(std::move(name)) {}

    RuleKind kind_;
    double threshold_;
    std::string name_;
    double custom_c_ = 0.0;
    Indicator h_;
};

/// h_t(simplex). A singleton is always a simplex; at t = 0 nothing else is.
bool evaluate_h(const ComplexRule& rule, double t, const PointSet& simplex);

/// Smallest double t > 0 with `value / t <= threshold`, i.e. the exact scale
/// at which a simplex with critical value `value` enters the filtration.
double critical_scale(double value, double threshold);

/// Pairwise critical value for Rips rules (the distance in the rule's norm).
double rips_pair_value(const ComplexRule& rule, std::span<const double> p, std::span<const double> q);

/// Critical value of a whole simplex: Rips diameter or Cech miniball radius.
/// The simplex is present at scale t iff value / t <= critical_threshold(rule).
double simplex_value(const ComplexRule& rule, const PointSet& simplex);
double critical_threshold(const ComplexRule& rule);

struct RuleAudit {
    bool monotone = true;       // H1
    bool translation = true;    // H2
    bool local = true;          // H3
    bool scale_monotone = true; // H4
    std::size_t cases = 0;
    std::string first_failure;
    bool ok() const noexcept { return monotone && translation && local && scale_monotone; }
};

/// Randomized audit of the four structural conditions on `cases` point sets.
RuleAudit audit_rule(const ComplexRule& rule, int d, std::size_t cases, std::uint64_t seed);

nlohmann::json rule_to_json(const ComplexRule& rule);
ComplexRule rule_from_json(const nlohmann::json& doc);
/// Parses "rips_l2", "rips_linf", "cech", optionally suffixed ":<threshold>".
ComplexRule rule_from_string(const std::string& text, double default_threshold);
std::string to_string(RuleKind kind);

}  // namespace ecproc
