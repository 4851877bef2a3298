#include "ecproc/limits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "ecproc/errors.hpp"
#include "ecproc/miniball.hpp"
#include "ecproc/rng.hpp"

namespace ecproc {

namespace {

constexpr std::uint64_t kIntegralTag = 0x68696e7465677261ULL;
constexpr std::uint64_t kLightTag = 0x6c69676874746169ULL;
constexpr int kMaxTerms = 400;

// Draws y_1..y_k (row-major, k x d) from the proposal at scale 1.
struct Proposal {
    int d;
    int k;
    double L;
    McProposal kind;

    double log_volume() const {
        if (kind == McProposal::Box) return d * k * std::log(2.0 * L);
        return d * std::log(k + 1.0) + d * k * std::log(L);
    }

    void draw(CounterRng& rng, std::vector<double>& y) const {
        y.resize(static_cast<std::size_t>(k) * d);
        if (kind == McProposal::Box) {
            for (double& v : y) v = rng.uniform(-L, L);
            return;
        }
        // Per coordinate: choose which of the k+1 points is the minimum, put
        // it at 0 and the others uniform in [0, L], then translate so the
        // first point sits at the origin.
        for (int c = 0; c < d; ++c) {
            const auto lowest = static_cast<int>(rng() % static_cast<std::uint64_t>(k + 1));
            const double q0 = lowest == 0 ? 0.0 : rng.uniform(0.0, L);
            for (int i = 1; i <= k; ++i) {
                const double qi = i == lowest ? 0.0 : rng.uniform(0.0, L);
                y[(i - 1) * d + c] = qi - q0;
            }
        }
    }
};

// h(0, y_1, ..., y_k) at scale 1.
class OriginIndicator {
public:
    OriginIndicator(const ComplexRule& rule, int d, int k) : rule_(rule), d_(d), k_(k), simplex_(d) {
        if (rule.kind() == RuleKind::Cech && d > 3) throw UnsupportedError("Cech rule is only supported for d <= 3");
    }

    bool operator()(const std::vector<double>& y) {
        const double w = rule_.unit_threshold();
        switch (rule_.kind()) {
            case RuleKind::RipsL2:
            case RuleKind::RipsLinf: {
                const bool linf = rule_.kind() == RuleKind::RipsLinf;
                const std::vector<double> origin(d_, 0.0);
                for (int i = 0; i < k_; ++i) {
                    const std::span<const double> yi(y.data() + i * d_, d_);
                    if (!(dist(linf, origin, yi) <= w)) return false;
                    for (int j = i + 1; j < k_; ++j)
                        if (!(dist(linf, yi, std::span<const double>(y.data() + j * d_, d_)) <= w)) return false;
                }
                return true;
            }
            case RuleKind::Cech:
            case RuleKind::Custom: {
                std::vector<double> coords(d_, 0.0);
                coords.insert(coords.end(), y.begin(), y.end());
                simplex_ = PointSet(d_, std::move(coords));
                return evaluate_h(rule_, 1.0, simplex_);
            }
        }
        return false;
    }

private:
    static double dist(bool linf, std::span<const double> a, std::span<const double> b) {
        return linf ? chebyshev_distance(a, b) : euclidean_distance(a, b);
    }

    const ComplexRule& rule_;
    int d_;
    int k_;
    PointSet simplex_;
};

Proposal make_proposal(const ComplexRule& rule, int d, int k, McProposal kind) {
    return Proposal{d, k, rule.linf_extent(), kind};
}

// Fraction-of-hits estimator of I_k(1) from n proposals.
Estimate integral_at_unit_scale(const ComplexRule& rule, int d, int k, const McSettings& mc, std::size_t n) {
    const Proposal prop = make_proposal(rule, d, k, mc.proposal);
    OriginIndicator h(rule, d, k);
    CounterRng rng(mix64(mc.seed ^ kIntegralTag), static_cast<std::uint64_t>(k));
    std::vector<double> y;
    std::size_t hits = 0;
    for (std::size_t j = 0; j < n; ++j) {
        prop.draw(rng, y);
        if (h(y)) ++hits;
    }
    const double volume = std::exp(prop.log_volume());
    const double N = static_cast<double>(n);
    const double p = static_cast<double>(hits) / N;
    // With no hits, fall back to p = 1/N so the error is not reported as 0.
    const double p_var = hits == 0 ? 1.0 / N : p;
    return {volume * p, volume * std::sqrt(p_var * (1.0 - p_var) / N)};
}

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace

LimitParams LimitParams::from_law(const RadialLaw& law, const ComplexRule& rule, double xi) {
    LimitParams p;
    p.d = law.dim();
    p.xi = xi;
    p.rule = rule;
    if (law.family() == TailFamily::RegularlyVarying) {
        p.regime = Regime::Heavy;
        p.alpha = law.alpha();
    } else {
        p.regime = Regime::Light;
        p.tau = law.tau();
        p.zeta = law.zeta();
    }
    p.validate();
    return p;
}

void LimitParams::validate() const {
    if (d < 2) throw ConfigError("limit needs d >= 2");
    if (!(xi > 0.0 && std::isfinite(xi))) throw ConfigError("limit needs xi in (0, inf)");
    if (regime == Regime::Heavy) {
        if (!(alpha > d)) throw ConfigError("heavy-tail limit needs alpha > d");
    } else {
        if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("light-tail limit needs tau in (0, 1]");
        if (!(zeta > 0.0)) throw ConfigError("light-tail limit needs zeta in (0, inf]");
    }
    if (rule.kind() == RuleKind::Cech && d > 3) throw UnsupportedError("Cech rule is only supported for d <= 3");
}

Estimate h_integral(const ComplexRule& rule, int d, int k, double t, const McSettings& mc) {
    if (k < 1) throw DomainError("h_integral needs k >= 1 (the k = 0 term is constant)");
    if (!(t > 0.0)) throw DomainError("h_integral needs t > 0");
    if (d < 1) throw DomainError("h_integral needs d >= 1");
    const double scale = std::pow(t, d * k);
    if (rule.kind() == RuleKind::RipsLinf && !mc.force_mc) {
        const double w = rule.unit_threshold();
        return {std::pow(w * t, d * k) * std::pow(k + 1.0, d), 0.0};
    }
    if (mc.samples == 0) throw ConfigError("Monte Carlo needs at least one sample");
    const Estimate unit = integral_at_unit_scale(rule, d, k, mc, mc.samples);
    return {unit.estimate * scale, unit.std_error * scale};
}

double closed_form_example32(double t) {
    if (t < 0.0) throw DomainError("closed_form_example32 needs t >= 0");
    constexpr double pi = std::numbers::pi;
    if (t == 0.0) return pi;
    // 2 Phi(t) - 1 = erf(t / sqrt 2).
    const double phi_term = std::erf(t / std::numbers::sqrt2) / t;
    return 0.5 * pi * (std::exp(-0.5 * t * t) + std::sqrt(0.5 * pi) * phi_term);
}

struct LimitFunction::Cache {
    LimitParams p;
    double eps;
    McSettings mc;
    double surface;

    std::mutex mutex;
    std::map<std::pair<int, std::size_t>, Estimate> unit_integrals;

    bool light_mc() const { return p.regime == Regime::Light && std::isfinite(p.zeta); }
    bool closed_form() const { return p.rule.kind() == RuleKind::RipsLinf && !mc.force_mc && !light_mc(); }

    double log_coef(int k) const {
        const double denom = p.regime == Regime::Heavy ? p.alpha * (k + 1) - p.d : k + 1.0;
        return std::log(surface) + (k + 1) * std::log(p.xi) - log_factorial(k + 1) - std::log(denom);
    }

    double s0() const {
        return p.regime == Regime::Heavy ? surface * p.xi / (p.alpha - p.d) : surface * p.xi;
    }

    double log_bound(int k, double t) const {
        const int d = p.d;
        const double c = p.rule.locality_c(d);
        const double L = p.rule.linf_extent();
        const double ball = k * (std::log(ball_volume(d)) + d * std::log(c * t));
        const double box = d * std::log(k + 1.0) + d * k * std::log(L * t);
        return log_coef(k) + std::min(ball, box);
    }

    Estimate unit_integral(int k, std::size_t n) {
        {
            std::lock_guard lock(mutex);
            if (auto it = unit_integrals.find({k, n}); it != unit_integrals.end()) return it->second;
        }
        Estimate e;
        if (p.rule.kind() == RuleKind::RipsLinf && !mc.force_mc) {
            e = h_integral(p.rule, p.d, k, 1.0, mc);
        } else {
            e = integral_at_unit_scale(p.rule, p.d, k, mc, n);
        }
        std::lock_guard lock(mutex);
        unit_integrals[{k, n}] = e;
        return e;
    }

    // Light regime with finite zeta: after integrating rho out,
    //   s_k(t) = coef_k t^{dk} V E[h(0,u) exp(t g(theta, u))],
    //   g = -(sum_i <theta,u_i> + (k+1) max(0, max_i -<theta,u_i>)) / zeta,
    // with u from the proposal and theta uniform on the sphere (fixed to e_1
    // for rotation-invariant rules).
    std::vector<Estimate> light_term(int k, std::span<const double> ts, std::size_t n) const {
        const int d = p.d;
        const Proposal prop = make_proposal(p.rule, d, k, mc.proposal);
        OriginIndicator h(p.rule, d, k);
        const bool fixed_theta = p.rule.kind() == RuleKind::RipsL2 || p.rule.kind() == RuleKind::Cech;
        CounterRng rng(mix64(mc.seed ^ kLightTag), static_cast<std::uint64_t>(k));
        std::vector<double> y, theta(d, 0.0);
        std::vector<double> sum(ts.size(), 0.0), sum_sq(ts.size(), 0.0);
        const double step = ts.size() > 1 ? (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1) : 0.0;
        bool uniform = ts.size() > 2;
        for (std::size_t m = 1; m < ts.size() && uniform; ++m)
            uniform = std::abs(ts[m] - ts[m - 1] - step) <= 1e-9 * step;
        for (std::size_t j = 0; j < n; ++j) {
            prop.draw(rng, y);
            if (fixed_theta) {
                std::fill(theta.begin(), theta.end(), 0.0);
                theta[0] = 1.0;
            } else {
                double norm = 0.0;
                while (norm == 0.0) {
                    for (double& v : theta) v = rng.normal();
                    norm = euclidean_norm(theta);
                }
                for (double& v : theta) v /= norm;
            }
            if (!h(y)) continue;
            double inner_sum = 0.0, deepest = 0.0;
            for (int i = 0; i < k; ++i) {
                double dot = 0.0;
                for (int c = 0; c < d; ++c) dot += theta[c] * y[i * d + c];
                inner_sum += dot;
                deepest = std::max(deepest, -dot);
            }
            const double g = -(inner_sum + (k + 1) * deepest) / p.zeta;
            if (uniform) {
                // exp(t_m g) = exp(t_0 g) * exp(step g)^m on an evenly spaced grid.
                const double ratio = std::exp(step * g);
                double w = std::exp(ts.front() * g);
                for (std::size_t m = 0; m < ts.size(); ++m, w *= ratio) {
                    sum[m] += w;
                    sum_sq[m] += w * w;
                }
            } else {
                for (std::size_t m = 0; m < ts.size(); ++m) {
                    const double w = std::exp(ts[m] * g);
                    sum[m] += w;
                    sum_sq[m] += w * w;
                }
            }
        }
        const double N = static_cast<double>(n);
        std::vector<Estimate> out(ts.size());
        for (std::size_t m = 0; m < ts.size(); ++m) {
            const double mean = sum[m] / N;
            const double var = std::max(0.0, sum_sq[m] / N - mean * mean);
            const double factor = std::exp(log_coef(k) + prop.log_volume() + d * k * std::log(ts[m]));
            out[m] = {factor * mean, factor * std::sqrt(var / N)};
        }
        return out;
    }

    // s_k at every t in ts (ts > 0).
    std::vector<Estimate> terms(int k, std::span<const double> ts, std::size_t n) {
        if (light_mc()) return light_term(k, ts, n);
        const Estimate unit = unit_integral(k, n);
        std::vector<Estimate> out(ts.size());
        for (std::size_t m = 0; m < ts.size(); ++m) {
            const double factor = std::exp(log_coef(k) + p.d * k * std::log(ts[m]));
            out[m] = {factor * unit.estimate, factor * unit.std_error};
        }
        return out;
    }

    std::pair<int, double> truncation(double t) const {
        if (t == 0.0) return {0, 0.0};
        std::vector<double> bounds{0.0};  // index k, bounds[0] unused
        int k_end = 0;
        for (int k = 1; k <= 4 * kMaxTerms; ++k) {
            bounds.push_back(std::exp(log_bound(k, t)));
            if (k >= 2 && bounds[k] <= 0.5 * bounds[k - 1] && bounds[k] < 1e-3 * eps) {
                k_end = k;
                break;
            }
        }
        if (k_end == 0) throw PrecisionError("limit series does not reach the truncation tolerance", bounds.back());
        // Beyond k_end the bounds decay at least geometrically with ratio 1/2.
        double tail = bounds[k_end];
        int K = k_end;
        while (K > 0 && tail + bounds[K] < eps) {
            tail += bounds[K];
            --K;
        }
        if (K > kMaxTerms) throw PrecisionError("limit series needs more than 400 terms", tail);
        return {K, tail};
    }
};

LimitFunction::LimitFunction(LimitParams params, double eps, McSettings mc) : cache_(std::make_shared<Cache>()) {
    params.validate();
    if (!(eps > 0.0)) throw DomainError("truncation tolerance eps must be positive");
    if (mc.samples == 0) throw ConfigError("Monte Carlo needs at least one sample");
    cache_->p = std::move(params);
    cache_->eps = eps;
    cache_->mc = mc;
    cache_->surface = sphere_surface(cache_->p.d);
}

const LimitParams& LimitFunction::params() const noexcept { return cache_->p; }
double LimitFunction::eps() const noexcept { return cache_->eps; }

double LimitFunction::term_bound(int k, double t) const {
    if (k == 0) return cache_->s0();
    if (t <= 0.0) return 0.0;
    return std::exp(cache_->log_bound(k, t));
}

std::pair<int, double> LimitFunction::truncation(double t) const {
    if (!(t >= 0.0)) throw DomainError("limit needs t >= 0");
    return cache_->truncation(t);
}

Estimate LimitFunction::term(int k, double t) const {
    if (k < 0) throw DomainError("term index must be non-negative");
    if (!(t >= 0.0)) throw DomainError("limit needs t >= 0");
    if (k == 0) return {cache_->s0(), 0.0};
    if (t == 0.0) return {0.0, 0.0};
    const double ts[1] = {t};
    return cache_->terms(k, ts, cache_->mc.samples).front();
}

LimitValue LimitFunction::value(double t) const {
    const double ts[1] = {t};
    return curve(ts).front();
}

std::vector<LimitValue> LimitFunction::curve(std::span<const double> t_grid) const {
    Cache& c = *cache_;
    std::vector<LimitValue> out(t_grid.size());
    int K_max = 0;
    for (std::size_t m = 0; m < t_grid.size(); ++m) {
        if (!(t_grid[m] >= 0.0)) throw DomainError("limit needs t >= 0");
        const auto [K, tail] = c.truncation(t_grid[m]);
        out[m].K_used = K;
        out[m].truncation_bound = tail;
        K_max = std::max(K_max, K);
    }

    std::vector<std::vector<std::size_t>> slots(K_max + 1);
    std::vector<std::vector<double>> ts(K_max + 1);
    for (int k = 1; k <= K_max; ++k)
        for (std::size_t m = 0; m < t_grid.size(); ++m)
            if (out[m].K_used >= k) {
                slots[k].push_back(m);
                ts[k].push_back(t_grid[m]);
            }

    // Samples per term. Only the terms carrying most of the variance are
    // refined, which keeps the cost of high-order terms at the base size.
    std::vector<std::size_t> samples(K_max + 1, c.mc.samples);
    std::vector<std::size_t> computed(K_max + 1, 0);
    std::vector<std::vector<Estimate>> per_k(K_max + 1);
    while (true) {
        std::vector<int> todo;
        for (int k = 1; k <= K_max; ++k)
            if (computed[k] != samples[k]) todo.push_back(k);
        const unsigned jobs = std::max(1u, std::min<unsigned>(c.mc.jobs, static_cast<unsigned>(todo.size())));
        std::vector<std::exception_ptr> errors(jobs);
        auto work = [&](unsigned j) {
            try {
                for (std::size_t i = j; i < todo.size(); i += jobs) {
                    const int k = todo[i];
                    per_k[k] = c.terms(k, ts[k], samples[k]);
                }
            } catch (...) {
                errors[j] = std::current_exception();
            }
        };
        if (jobs <= 1) {
            work(0);
        } else {
            std::vector<std::thread> threads;
            for (unsigned j = 0; j < jobs; ++j) threads.emplace_back(work, j);
            for (auto& th : threads) th.join();
        }
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
        for (int k : todo) computed[k] = samples[k];

        for (auto& v : out) {
            v.value = c.s0();
            v.std_error = 0.0;
        }
        for (int k = 1; k <= K_max; ++k) {
            const double sign = k % 2 == 0 ? 1.0 : -1.0;
            for (std::size_t i = 0; i < slots[k].size(); ++i) {
                LimitValue& v = out[slots[k][i]];
                v.value += sign * per_k[k][i].estimate;
                v.std_error += per_k[k][i].std_error * per_k[k][i].std_error;
            }
        }
        std::size_t worst_m = 0;
        for (std::size_t m = 0; m < out.size(); ++m) {
            out[m].std_error = std::sqrt(out[m].std_error);
            if (out[m].std_error > out[worst_m].std_error) worst_m = m;
        }
        const double worst = out.empty() ? 0.0 : out[worst_m].std_error;
        if (worst <= c.mc.tolerance || c.closed_form()) return out;

        // Refine every term whose variance share at the worst t exceeds the
        // average share allowed by the tolerance; at least one always does.
        const double share = c.mc.tolerance * c.mc.tolerance / K_max;
        bool refined = false;
        for (int k = 1; k <= out[worst_m].K_used; ++k) {
            const auto it = std::find(slots[k].begin(), slots[k].end(), worst_m);
            const double se = per_k[k][static_cast<std::size_t>(it - slots[k].begin())].std_error;
            if (se * se > share && 2 * samples[k] <= c.mc.max_samples) {
                samples[k] *= 2;
                refined = true;
            }
        }
        if (!refined) {
            std::ostringstream os;
            os << "Monte Carlo std error " << worst << " at t = " << t_grid[worst_m] << " above tolerance "
               << c.mc.tolerance << " with at most " << c.mc.max_samples << " samples per term";
            throw PrecisionError(os.str(), worst);
        }
    }
}

double sup_functional(const LimitFunction& f, double a, double b, double step) {
    if (!(a >= 0.0 && a < b)) throw DomainError("sup_functional needs 0 <= a < b");
    if (!(step > 0.0)) throw DomainError("sup_functional needs a positive step");
    const auto J = static_cast<std::size_t>(std::ceil((b - a) / step - 1e-9));
    std::vector<double> grid(J + 1);
    for (std::size_t j = 0; j < J; ++j) grid[j] = a + static_cast<double>(j) * step;
    grid[J] = b;
    double best = 0.0;
    for (const auto& v : f.curve(grid)) best = std::max(best, std::abs(v.value));
    return best;
}

LimitValue limit_heavy(const LimitParams& params, double t, double eps, const McSettings& mc) {
    if (params.regime != Regime::Heavy) throw ConfigError("limit_heavy needs heavy-tail parameters");
    return LimitFunction(params, eps, mc).value(t);
}

LimitValue limit_light(const LimitParams& params, double t, double eps, const McSettings& mc) {
    if (params.regime != Regime::Light) throw ConfigError("limit_light needs light-tail parameters");
    return LimitFunction(params, eps, mc).value(t);
}

}  // namespace ecproc
