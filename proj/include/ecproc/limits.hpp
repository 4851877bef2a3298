#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <vector>

#include "ecproc/complex_rule.hpp"
#include "ecproc/radial_law.hpp"

namespace ecproc {

enum class Regime { Heavy, Light };

/// Parameters of a limit function sum_k (-1)^k s_k(t).
struct LimitParams {
    Regime regime = Regime::Heavy;
    int d = 2;
    double alpha = 0.0;                                        // heavy
    double tau = 1.0;                                          // light
    double zeta = std::numeric_limits<double>::infinity();     // light
    double xi = 1.0;
    ComplexRule rule = ComplexRule::rips_linf(1.0);

    static LimitParams from_law(const RadialLaw& law, const ComplexRule& rule, double xi);
    void validate() const;
};

/// Proposal used by the Monte Carlo estimators of the y-integrals.
enum class McProposal {
    /// Uniform on {y : l_inf diam(0, y_1..y_k) <= L}, sampled exactly.
    LinfSupport,
    /// Uniform on the box [-L, L]^{dk}.
    Box,
};

struct McSettings {
    std::size_t samples = 200'000;
    std::uint64_t seed = 1;
    McProposal proposal = McProposal::LinfSupport;
    /// Use Monte Carlo even where a closed form exists (RipsLinf).
    bool force_mc = false;
    /// Target for the aggregated std error of a limit value. Samples of the
    /// terms dominating the error are doubled, up to max_samples per term,
    /// before a PrecisionError is raised.
    double tolerance = 1e-2;
    std::size_t max_samples = 12'800'000;
    /// Worker threads across series terms; results do not depend on it.
    unsigned jobs = 1;
};

struct Estimate {
    double estimate = 0.0;
    double std_error = 0.0;
};

/// Integral of h_t(0, y_1, ..., y_k) over (R^d)^k, k >= 1.
/// Closed form (w t)^{dk} (k+1)^d for RipsLinf, Monte Carlo otherwise.
Estimate h_integral(const ComplexRule& rule, int d, int k, double t, const McSettings& mc = {});

/// (pi/2) [exp(-t^2/2) + sqrt(pi/2) (2 Phi(t) - 1) / t], continuous at 0.
double closed_form_example32(double t);

struct LimitValue {
    double value = 0.0;
    double std_error = 0.0;
    int K_used = 0;
    /// Bound on the absolute truncation error (sum of omitted terms).
    double truncation_bound = 0.0;
};

/// Deterministic limit of the scaled Euler characteristic process.
///
/// Heavy:  s_k(t) = s_{d-1} xi^{k+1} / ((k+1)! (alpha(k+1) - d)) * I_k(t)
/// Light:  s_k(t) = xi^{k+1} / (k+1)! * int_rho int_theta int_y ...
/// with s_0 = s_{d-1} xi / (alpha - d) resp. s_{d-1} xi. In the light regime
/// the rho-integral is done in closed form; the remaining (theta, y)
/// integral is estimated with the same samples for every t.
///
/// The series is truncated at the first K whose omitted tail, bounded via
/// I_k(t) <= min((c t)^{dk} w_d^k, (k+1)^d (L t)^{dk}), is below eps.
///
/// Evaluation is thread-safe; Monte Carlo data are built lazily per k.
class LimitFunction {
public:
    explicit LimitFunction(LimitParams params, double eps = 1e-6, McSettings mc = {});

    const LimitParams& params() const noexcept;
    double eps() const noexcept;

    LimitValue value(double t) const;
    std::vector<LimitValue> curve(std::span<const double> t_grid) const;

    /// s_k(t) with its Monte Carlo std error (zero for closed forms).
    Estimate term(int k, double t) const;
    /// Analytic bound on |s_k(t)|.
    double term_bound(int k, double t) const;
    /// Truncation order K at t and the bound on the omitted tail.
    std::pair<int, double> truncation(double t) const;

    struct Cache;

private:
    std::shared_ptr<Cache> cache_;
};

/// max |value| over the points a, a + step, ..., b of [a, b].
double sup_functional(const LimitFunction& f, double a, double b, double step = 0.02);

LimitValue limit_heavy(const LimitParams& params, double t, double eps, const McSettings& mc = {});
LimitValue limit_light(const LimitParams& params, double t, double eps, const McSettings& mc = {});

}  // namespace ecproc
