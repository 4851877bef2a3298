#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include <json.hpp>

#include "ecproc/point_set.hpp"
#include "ecproc/rng.hpp"

namespace ecproc {

enum class TailFamily { RegularlyVarying, ExponentialType };

enum class LawPreset { None, Example32, Example42 };

/// Surface measure of the unit sphere S^{d-1}.
double sphere_surface(int d);
/// Volume of the unit ball in R^d.
double ball_volume(int d);

/// Spherically symmetric density on R^d, described through its radial
/// profile f(r) = f(r * theta).
///
/// Two families are supported:
///   - RegularlyVarying: f(rt)/f(r) -> t^{-alpha}, alpha > d. The built-in
///     profile is f(r) = C / (1 + r^alpha).
///   - ExponentialType: f(r) = C exp(-psi(r)) with psi regularly varying of
///     index tau in (0, 1]. The built-in profile is psi(r) = r^tau / tau.
///
/// Custom profiles can be supplied as callables. psi is assumed twice
/// differentiable with psi' and psi'' eventually non-increasing; only
/// psi' > 0 is checked.
///
/// Instances are immutable handles and cheap to copy.
class RadialLaw {
public:
    using Profile = std::function<double(double)>;

    static RadialLaw regularly_varying(int d, double alpha);
    static RadialLaw regularly_varying(int d, double alpha, Profile density);
    static RadialLaw exponential_type(int d, double tau);
    /// `zeta` is lim a(z) = lim 1/psi'(z) and must be supplied analytically
    /// (pass infinity for zeta = inf).
    static RadialLaw exponential_type(int d, double tau, Profile psi, Profile psi_prime, double zeta);

    /// f(x) = 2 / (pi^2 (1 + |x|^4)) on R^2.
    static RadialLaw example_3_2();
    /// f(x) = C exp(-|x|^tau / tau) on R^d.
    static RadialLaw example_4_2(int d = 2, double tau = 1.0);

    TailFamily family() const noexcept;
    LawPreset preset() const noexcept;
    int dim() const noexcept;
    double alpha() const;
    double tau() const;
    double zeta() const;
    double norm_const() const noexcept;
    bool is_custom() const noexcept;

    /// False when the law is valid but outside the hypotheses of the
    /// exponential-tail limit theorem (d = 2 with tau = 1).
    bool theorem_hypotheses_hold() const noexcept;

    /// Density value f(r) at any point of norm r.
    double density(double r) const;
    double psi(double r) const;
    double psi_prime(double r) const;
    /// a(z) = 1 / psi'(z).
    double aux_scale(double z) const;

    /// P(|X| <= r).
    double radial_cdf(double r) const;
    /// Inverse of radial_cdf for u in (0, 1).
    double radial_quantile(double u) const;
    double sample_radius(CounterRng& rng) const;

    /// Radius beyond which f is non-increasing (argmax over the CDF table).
    double density_peak() const noexcept;

    /// Total mass of the density, from the tabulated radial marginal.
    double total_mass() const;

    struct Impl;

private:
    explicit RadialLaw(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Sampled point cloud together with how it was generated.
struct PointCloud {
    PointSet points;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    RadialLaw law;
};

/// n i.i.d. points R * Theta with Theta uniform on the sphere (normalized
/// Gaussian) and R from the radial marginal. Point i uses RNG stream i, so
/// the result does not depend on `jobs`.
PointCloud sample_cloud(const RadialLaw& law, std::size_t n, std::uint64_t seed, unsigned jobs = 1);

/// Radius solving n f(R) = xi on the decreasing tail of f.
double radius_R_n(const RadialLaw& law, double n, double xi);

/// R^d for regularly varying laws, a(R) R^{d-1} for exponential-type laws.
double scaling_denominator(const RadialLaw& law, double R_n);

nlohmann::json law_to_json(const RadialLaw& law);
RadialLaw law_from_json(const nlohmann::json& doc);

std::string to_string(TailFamily family);

}  // namespace ecproc
