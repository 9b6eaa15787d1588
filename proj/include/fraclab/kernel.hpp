#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "bernstein.hpp"
#include "errors.hpp"
#include "numerics.hpp"
#include "radial.hpp"
#include "report.hpp"
#include "specfun.hpp"

namespace fraclab {

enum class Route { fourier, subordination };

inline std::string route_name(Route r) { return r == Route::fourier ? "fourier" : "subordination"; }

inline Route parse_route(const std::string& s) {
    if (s == "fourier") return Route::fourier;
    if (s == "subordination") return Route::subordination;
    throw ConfigError("unknown route '" + s + "', expected fourier or subordination");
}

/// Radial kernel tabulated at fixed time.
struct RadialProfile {
    int dim = 1;
    double t = 1.0;
    std::vector<double> radii;
    std::vector<double> values;
    Route route = Route::fourier;
    bool degraded = false;
    double max_rel_error = 0.0;  // largest quadrature error estimate over the radii

    [[nodiscard]] double max_value() const {
        double m = 0.0;
        for (double v : values)
            if (std::isfinite(v)) m = std::max(m, std::abs(v));
        return m;
    }
};

struct KernelOptions {
    double rtol = 1e-10;         // target of the radial Fourier quadrature
    double degraded_tol = 1e-6;  // error estimates above this flag the profile
};

namespace detail {

inline void require_kernel_dim(int d, int max_dim = 3) {
    if (d < 1 || d > max_dim) throw ConfigError("dimension must be in 1.." + std::to_string(max_dim));
}

inline void require_radii(const std::vector<double>& radii) {
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] >= 0.0) || !std::isfinite(radii[i])) throw DomainError("radii must be finite and nonnegative");
        if (i > 0 && !(radii[i] > radii[i - 1])) throw DomainError("radii must be strictly increasing");
    }
}

// phi(lambda) with phi(0) = 0 and +inf past the representable range
inline double phi_at(const BernsteinSpec& s, double lam) {
    if (!(lam > 0.0)) return 0.0;
    if (!(lam < 1e300)) return std::numeric_limits<double>::infinity();
    return eval(s, lam);
}

// Frequency beyond which e^{-t phi(rho^2)} < 1e-16.
inline double frequency_cutoff(const BernsteinSpec& s, double t) {
    const double level = 16.0 * std::log(10.0) / t;
    double lam;
    try {
        lam = inverse(s, level);
    } catch (const NumericError&) {
        lam = std::numeric_limits<double>::infinity();
    }
    const double rho = std::sqrt(lam);
    if (!(rho < 1e150))
        throw NumericError("frequency cutoff for t = " + format_double(t) +
                           " exceeds the overflow-safe range; use a larger t or a smaller radii set");
    return rho;
}

// Radial symbol g(rho) together with h = g + rho g'(rho), the integrand of the d = 3 by-parts form.
struct HeatSymbol {
    const BernsteinSpec* spec;
    double t;
    double operator()(double rho) const {
        const double p = phi_at(*spec, rho * rho);
        return std::exp(-t * p);
    }
    double by_parts(double rho) const {
        const double lam = rho * rho;
        if (!(lam > 0.0)) return 1.0;
        if (!(lam < 1e300)) return 0.0;
        const auto [p, dp] = eval_with_deriv(*spec, lam);
        const double g = std::exp(-t * p);
        if (g == 0.0) return 0.0;
        return g * (1.0 - 2.0 * t * lam * dp);
    }
    double deriv(double rho) const {
        const double lam = rho * rho;
        if (!(lam > 0.0) || !(lam < 1e300)) return 0.0;
        const auto [p, dp] = eval_with_deriv(*spec, lam);
        const double g = std::exp(-t * p);
        return g == 0.0 ? 0.0 : -2.0 * t * rho * dp * g;
    }
};

// t^{alpha-beta} E_{alpha, 1-beta+alpha}(-t^alpha phi(rho^2))
struct FundamentalSymbol {
    const BernsteinSpec* spec;
    std::shared_ptr<const MittagLeffler> ml;
    double scale;  // t^{alpha-beta}
    double tau;    // t^alpha
    mutable bool degraded = false;

    double operator()(double rho) const {
        const double p = phi_at(*spec, rho * rho);
        if (!std::isfinite(p)) return 0.0;
        const auto e = ml->value(-tau * p);
        degraded = degraded || e.degraded;
        return scale * e.value;
    }
    double by_parts(double rho) const {
        const double lam = rho * rho;
        if (!(lam > 0.0)) return scale * ml->value(0.0).value;
        if (!(lam < 1e300)) return 0.0;
        const auto [p, dp] = eval_with_deriv(*spec, lam);
        const auto e = ml->value(-tau * p);
        const auto de = ml->derivative(-tau * p);
        degraded = degraded || e.degraded || de.degraded;
        return scale * (e.value - 2.0 * tau * lam * dp * de.value);
    }
    double deriv(double rho) const {
        const double lam = rho * rho;
        if (!(lam > 0.0) || !(lam < 1e300)) return 0.0;
        const auto [p, dp] = eval_with_deriv(*spec, lam);
        const auto de = ml->derivative(-tau * p);
        degraded = degraded || de.degraded;
        return -2.0 * scale * tau * rho * dp * de.value;
    }
};

// Inverse transform of a radial symbol at one radius; d = 3 and even d use by-parts forms.
template <class Symbol>
RadialValue invert_symbol(RadialInverter& inv, const Symbol& g, double r) {
    if (r == 0.0) return {inv.at_origin(g), 0.0};
    if (inv.dim() == 3) return inv.dim3_by_parts([&](double rho) { return g.by_parts(rho); }, r);
    if (inv.dim() % 2 == 0) return inv.hankel_by_parts([&](double rho) { return g.deriv(rho); }, r);
    return inv(g, r);
}

// Flags the profile when a value above 1e-8 of the profile maximum carries an error estimate beyond tol;
// a diverging value at r = 0 (singular kernels) is not a failure.
inline void flag_profile(RadialProfile& prof, const std::vector<double>& rel_errors, double tol) {
    const double floor = 1e-8 * prof.max_value();
    for (std::size_t i = 0; i < prof.values.size(); ++i) {
        const double v = prof.values[i];
        if (prof.radii[i] == 0.0 && std::isinf(v)) continue;
        if (!std::isfinite(v)) {
            prof.degraded = true;
            continue;
        }
        const double e = rel_errors[i];
        const double abs_err = std::isfinite(e) ? e * std::abs(v) : std::numeric_limits<double>::infinity();
        if (std::abs(v) >= floor && std::isfinite(e)) prof.max_rel_error = std::max(prof.max_rel_error, e);
        if (abs_err > tol * std::max(std::abs(v), floor)) prof.degraded = true;
    }
}

inline std::shared_ptr<const MittagLeffler> symbol_ml(const FracOrder& ord) {
    return std::make_shared<const MittagLeffler>(ord.alpha, 1.0 - ord.beta + ord.alpha);
}

}  // namespace detail

/// Transition density p_d(t, r) of subordinate Brownian motion, by radial Fourier inversion
/// of e^{-t phi(|xi|^2)}.
inline RadialProfile subbm_density(const BernsteinSpec& spec, int d, double t, const std::vector<double>& radii,
                                   const KernelOptions& opts = {}) {
    detail::require_kernel_dim(d);
    detail::require_radii(radii);
    if (!(t > 0.0)) throw DomainError("subbm_density requires t > 0");
    detail::frequency_cutoff(spec, t);
    RadialProfile prof{d, t, radii, std::vector<double>(radii.size()), Route::fourier};
    RadialInverter inv(d, opts.rtol);
    const detail::HeatSymbol g{&spec, t};
    std::vector<double> errors(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const auto v = detail::invert_symbol(inv, g, radii[i]);
        prof.values[i] = v.value;
        errors[i] = v.rel_error;
    }
    detail::flag_profile(prof, errors, opts.degraded_tol);
    return prof;
}

/// Single value of p_d(t, r); d may be 1..5.
inline double subbm_value(const BernsteinSpec& spec, int d, double t, double r, const KernelOptions& opts = {}) {
    detail::require_kernel_dim(d, 5);
    if (!(t > 0.0)) throw DomainError("subbm_value requires t > 0");
    if (!(r >= 0.0)) throw DomainError("subbm_value requires r >= 0");
    RadialInverter inv(d, opts.rtol);
    return detail::invert_symbol(inv, detail::HeatSymbol{&spec, t}, r).value;
}

/// Radial derivative of p_d at r computed as -2 pi r p_{d+2}(t, r).
inline double subbm_density_dimshift(const BernsteinSpec& spec, int d, double t, double r,
                                     const KernelOptions& opts = {}) {
    detail::require_kernel_dim(d);
    if (!(t > 0.0)) throw DomainError("subbm_density_dimshift requires t > 0");
    if (!(r >= 0.0)) throw DomainError("subbm_density_dimshift requires r >= 0");
    if (r == 0.0) return 0.0;
    detail::frequency_cutoff(spec, t);
    return -2.0 * pi * r * subbm_value(spec, d + 2, t, r, opts);
}

/// q_{alpha,beta}(t, .) by radial inversion of its Mittag-Leffler symbol.
inline RadialProfile q_kernel_fourier(const BernsteinSpec& spec, const FracOrder& ord, int d, double t,
                                      const std::vector<double>& radii, const KernelOptions& opts = {}) {
    ord.validate();
    detail::require_kernel_dim(d);
    detail::require_radii(radii);
    if (!(t > 0.0)) throw DomainError("q_kernel_fourier requires t > 0");
    RadialProfile prof{d, t, radii, std::vector<double>(radii.size()), Route::fourier};
    RadialInverter inv(d, opts.rtol);
    const detail::FundamentalSymbol g{&spec, detail::symbol_ml(ord), std::pow(t, ord.alpha - ord.beta),
                                      std::pow(t, ord.alpha)};
    std::vector<double> errors(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const auto v = detail::invert_symbol(inv, g, radii[i]);
        prof.values[i] = v.value;
        errors[i] = v.rel_error;
    }
    detail::flag_profile(prof, errors, opts.degraded_tol);
    prof.degraded = prof.degraded || g.degraded;
    return prof;
}

/// Heat-kernel values p_d(s, r_i) memoized by s, shared between subordination profiles with the
/// same spec, dimension and radii.
class HeatTable {
public:
    HeatTable(BernsteinSpec spec, int d, std::vector<double> radii, KernelOptions opts = {})
        : spec_(std::move(spec)), d_(d), radii_(std::move(radii)), opts_(opts), inv_(d, opts.rtol) {
        detail::require_kernel_dim(d);
        detail::require_radii(radii_);
    }

    [[nodiscard]] int dim() const { return d_; }
    [[nodiscard]] const std::vector<double>& radii() const { return radii_; }
    [[nodiscard]] const BernsteinSpec& spec() const { return spec_; }
    [[nodiscard]] bool degraded() const { return degraded_; }
    [[nodiscard]] double max_rel_error() const { return max_err_; }
    [[nodiscard]] std::size_t size() const { return cache_.size(); }

    const std::vector<double>& at(double s) {
        auto it = cache_.find(s);
        if (it != cache_.end()) return it->second;
        std::vector<double> v(radii_.size());
        const detail::HeatSymbol g{&spec_, s};
        for (std::size_t i = 0; i < radii_.size(); ++i) {
            const auto x = detail::invert_symbol(inv_, g, radii_[i]);
            v[i] = x.value;
            if (radii_[i] > 0.0) {
                if (std::isfinite(x.rel_error)) max_err_ = std::max(max_err_, x.rel_error * std::abs(x.value));
                if (!std::isfinite(x.value)) degraded_ = true;
            }
        }
        return cache_.emplace(s, std::move(v)).first->second;
    }

private:
    BernsteinSpec spec_;
    int d_;
    std::vector<double> radii_;
    KernelOptions opts_;
    RadialInverter inv_;
    std::map<double, std::vector<double>> cache_;
    bool degraded_ = false;
    double max_err_ = 0.0;
};

namespace detail {

// Quadrature nodes in z = s t^{-alpha}: decade panels on [1e-10, 1e-2], half decades up to 1 and beyond it
// until the Wright envelope drops below e^{-40}; nodes past that point are dropped.
inline QuadratureNodes subordination_nodes(double alpha) {
    std::vector<double> breaks;
    for (int k = -10; k < -2; ++k) breaks.push_back(std::pow(10.0, k));
    const double zmax = wright_cutoff(alpha, 40.0);
    for (int k = -4; std::pow(10.0, 0.5 * (k - 1)) < zmax; ++k) breaks.push_back(std::pow(10.0, 0.5 * k));
    auto nodes = composite_gauss_legendre<16>(breaks);
    QuadratureNodes kept;
    for (std::size_t i = 0; i < nodes.x.size(); ++i) {
        if (nodes.x[i] > zmax) continue;
        kept.x.push_back(nodes.x[i]);
        kept.w.push_back(nodes.w[i]);
    }
    return kept;
}

}  // namespace detail

/// q_{alpha,beta}(t, r) = int_0^inf p_d(s, r) phi_{alpha,beta}(t, s) ds, split at s = t^alpha.
inline RadialProfile q_kernel_subordination(HeatTable& table, const FracOrder& ord, double t) {
    ord.validate();
    if (!(t > 0.0)) throw DomainError("q_kernel_subordination requires t > 0");
    const auto& radii = table.radii();
    RadialProfile prof{table.dim(), t, radii, std::vector<double>(radii.size(), 0.0), Route::subordination};
    const double ta = std::pow(t, ord.alpha);
    const auto nodes = detail::subordination_nodes(ord.alpha);
    std::vector<CompensatedSum> acc(radii.size());
    for (std::size_t j = 0; j < nodes.x.size(); ++j) {
        const double s = ta * nodes.x[j];
        const auto w = wright_phi(ord, t, s);
        prof.degraded = prof.degraded || w.degraded;
        if (w.value == 0.0) continue;
        const auto& p = table.at(s);
        for (std::size_t i = 0; i < radii.size(); ++i) acc[i] += nodes.w[j] * ta * w.value * p[i];
    }
    for (std::size_t i = 0; i < radii.size(); ++i) prof.values[i] = acc[i].value();
    prof.degraded = prof.degraded || table.degraded();
    return prof;
}

inline RadialProfile q_kernel_subordination(const BernsteinSpec& spec, const FracOrder& ord, int d, double t,
                                            const std::vector<double>& radii, const KernelOptions& opts = {}) {
    HeatTable table(spec, d, radii, opts);
    return q_kernel_subordination(table, ord, t);
}

/// Pointwise evaluator of q_{alpha,beta}(t, r) through the Fourier route.
class FundamentalKernel {
public:
    FundamentalKernel(const BernsteinSpec& spec, const FracOrder& ord, int d, double t, const KernelOptions& opts = {})
        : spec_(spec), inv_(d, opts.rtol) {
        ord.validate();
        detail::require_kernel_dim(d);
        if (!(t > 0.0)) throw DomainError("kernel time must be positive");
        sym_ = detail::FundamentalSymbol{&spec_, detail::symbol_ml(ord), std::pow(t, ord.alpha - ord.beta),
                                         std::pow(t, ord.alpha)};
        // radius where t^alpha phi(r^{-2}) = 1
        scale_ = 1.0 / std::sqrt(inverse(spec_, 1.0 / sym_.tau));
    }

    RadialValue evaluate(double r) { return detail::invert_symbol(inv_, sym_, r); }
    double operator()(double r) { return evaluate(r).value; }

    [[nodiscard]] double length_scale() const { return scale_; }
    [[nodiscard]] int dim() const { return inv_.dim(); }
    [[nodiscard]] bool degraded() const { return sym_.degraded; }

private:
    BernsteinSpec spec_;
    RadialInverter inv_;
    detail::FundamentalSymbol sym_{};
    double scale_ = 1.0;
};

struct MassResult {
    double value = 0.0;
    double error = 0.0;  // accumulated quadrature error estimate of the profile values
    bool degraded = false;
};

namespace detail {

// int_lo^inf sigma_d r^{d-1} f(r) dr (or of |f|) on decade panels in log r. Panels stop early once two in a
// row contribute below 1e-14 of the running sum; otherwise the tail beyond hi is extrapolated from the local
// power law, as is the head below lo when requested. f returns RadialValue.
template <class F>
MassResult radial_integral(F&& f, int d, double lo, double hi, bool absolute, bool head, double tol = 1e-7) {
    MassResult out;
    const double sd = sphere_area(d);
    CompensatedSum err;
    auto density = [&](double r) {
        const auto v = f(r);
        return absolute ? std::abs(v.value) : v.value;
    };
    auto panel = [&](double a, double b) {
        return gauss_legendre<20>([&](double u) {
            const double r = std::exp(u);
            const auto v = f(r);
            const double w = sd * std::pow(r, d);
            if (std::isfinite(v.rel_error)) err += w * std::abs(v.value) * v.rel_error * (b - a);
            else err += w * std::abs(v.value) * (b - a);
            return w * (absolute ? std::abs(v.value) : v.value);
        }, a, b);
    };
    auto value = [&](double u) { return f(std::exp(u)).value; };
    CompensatedSum sum;
    const double ua = std::log(lo), ub = std::log(hi);
    const int panels = std::max(1, static_cast<int>(std::ceil((ub - ua) / std::log(10.0))));
    const double h = (ub - ua) / panels;
    int quiet = 0;
    bool truncated = false;
    for (int k = 0; k < panels; ++k) {
        const double a = ua + k * h, b = a + h;
        double contrib = 0.0;
        if (!absolute) {
            contrib = panel(a, b);
        } else {
            // split the panel at sign changes of f so |f| is smooth on each piece
            const int probes = 16;
            std::vector<double> cuts{a};
            double prev_u = a, prev_v = value(a);
            for (int i = 1; i <= probes; ++i) {
                const double u = a + h * i / probes;
                const double v = value(u);
                if (prev_v * v < 0.0) {
                    std::uintmax_t iters = 100;
                    const auto root = boost::math::tools::toms748_solve(
                        value, prev_u, u, prev_v, v, boost::math::tools::eps_tolerance<double>(40), iters);
                    cuts.push_back(0.5 * (root.first + root.second));
                }
                prev_u = u;
                prev_v = v;
            }
            cuts.push_back(b);
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) contrib += panel(cuts[i], cuts[i + 1]);
        }
        sum += contrib;
        if (std::abs(contrib) <= 1e-14 * std::abs(sum.value())) {
            if (++quiet >= 2) {
                truncated = true;
                break;
            }
        } else {
            quiet = 0;
        }
    }
    // local power law f ~ r^kappa near an end: int r^{d-1} r^kappa dr = r^{d+kappa} / (d+kappa)
    auto exponent = [&](double r) { return std::log(density(r * 1.1) / density(r)) / std::log(1.1); };
    if (!truncated) {
        const double fhi = density(hi);
        const double kappa = exponent(hi);
        if (fhi != 0.0 && std::isfinite(kappa) && d + kappa < -0.05)
            sum += sd * std::pow(hi, d) * fhi / -(d + kappa);
        else if (fhi != 0.0)
            out.degraded = true;
    }
    if (head) {
        const double flo = density(lo);
        const double kappa = exponent(lo);
        if (std::isfinite(kappa) && d + kappa > 0.05)
            sum += sd * std::pow(lo, d) * flo / (d + kappa);
        else
            out.degraded = true;
    }
    out.value = sum.value();
    out.error = err.value();
    if (!std::isfinite(out.value) || !(out.error <= tol * std::abs(out.value))) out.degraded = true;
    return out;
}

}  // namespace detail

/// t^{beta-alpha} int |q_{alpha,beta}(t, x)| dx over R^d.
inline MassResult q_mass(const BernsteinSpec& spec, const FracOrder& ord, double t, int d = 1,
                         const KernelOptions& opts = {}) {
    FundamentalKernel q(spec, ord, d, t, opts);
    const double rc = q.length_scale();
    auto m = detail::radial_integral([&](double r) { return q.evaluate(r); }, d, 1e-6 * rc, 1e8 * rc, true, true);
    const double norm = std::pow(t, ord.beta - ord.alpha);
    m.value *= norm;
    m.error *= norm;
    m.degraded = m.degraded || q.degraded();
    return m;
}

/// Signed mass int q_{alpha,beta}(t, x) dx over R^d (no time normalization).
inline MassResult q_signed_mass(const BernsteinSpec& spec, const FracOrder& ord, double t, int d = 1,
                                const KernelOptions& opts = {}) {
    FundamentalKernel q(spec, ord, d, t, opts);
    const double rc = q.length_scale();
    auto m = detail::radial_integral([&](double r) { return q.evaluate(r); }, d, 1e-6 * rc, 1e8 * rc, false, true);
    m.degraded = m.degraded || q.degraded();
    return m;
}

/// int_{|y| >= b} q_{alpha,alpha}(t, y) dy / (t^alpha phi(b^{-2})).
inline MassResult tail_mass(const BernsteinSpec& spec, double alpha, double t, double b, int d = 1,
                            const KernelOptions& opts = {}) {
    if (!(b > 0.0)) throw DomainError("tail_mass requires b > 0");
    FundamentalKernel q(spec, FracOrder{alpha, alpha}, d, t, opts);
    const double hi = 1e8 * std::max(b, q.length_scale());
    auto m = detail::radial_integral([&](double r) { return q.evaluate(r); }, d, b, hi, false, false);
    const double norm = std::pow(t, alpha) * eval(spec, 1.0 / (b * b));
    m.value /= norm;
    m.error /= norm;
    m.degraded = m.degraded || q.degraded();
    return m;
}

/// tail_mass at every cut-off b of a grid, from the symbol g of q_{alpha,alpha} without pointwise kernel values:
///   d = 1: P(|Y| > b) = (2/pi) int_0^inf (1 - g(rho)) sin(b rho) / rho d rho,
///   d = 3: the d = 1 value plus 2 b q_1(b), with q_1(b) = (1/pi) int_0^inf g(rho) cos(b rho) d rho.
inline std::vector<MassResult> tail_mass_sweep(const BernsteinSpec& spec, double alpha, double t,
                                               const std::vector<double>& cutoffs, int d = 1,
                                               const KernelOptions& opts = {}) {
    detail::require_radii(cutoffs);
    if (!(cutoffs.front() > 0.0)) throw DomainError("tail_mass requires b > 0");
    if (d != 1 && d != 3) throw CapabilityError("tail_mass_sweep supports d = 1 and d = 3");
    const FracOrder ord{alpha, alpha};
    ord.validate();
    if (!(t > 0.0)) throw DomainError("kernel time must be positive");
    const detail::FundamentalSymbol g{&spec, detail::symbol_ml(ord), 1.0, std::pow(t, alpha)};
    boost::math::quadrature::ooura_fourier_sin<double> sine(opts.rtol, 8);
    boost::math::quadrature::ooura_fourier_cos<double> cosine(opts.rtol, 8);
    auto complement = [&](double rho) { return rho > 0.0 ? (1.0 - g(rho)) / rho : 0.0; };
    std::vector<MassResult> out;
    for (double b : cutoffs) {
        const auto [vs, es] = sine.integrate(complement, b);
        double value = 2.0 / pi * vs, err = 2.0 / pi * es * std::abs(vs);
        if (d == 3) {
            const auto [vc, ec] = cosine.integrate(g, b);
            value += 2.0 * b * vc / pi;
            err += 2.0 * b * ec * std::abs(vc) / pi;
        }
        const double norm = std::pow(t, alpha) * eval(spec, 1.0 / (b * b));
        out.push_back({value / norm, err / norm, g.degraded || !(err <= opts.degraded_tol * std::abs(value))});
    }
    return out;
}

/// sup over (t, b) of int_{|y| >= b} q(t, y) dy / (t^alpha phi(b^{-2})), refined in both directions.
inline BoundReport check_tail_mass_bound(const BernsteinSpec& spec, double alpha, int d, const Range& t_grid,
                                         const Range& b_grid, const KernelOptions& opts = {}) {
    FracOrder{alpha, alpha}.validate();
    detail::require_kernel_dim(d);
    // refined grids keep every base node at even indices, so one sweep serves both sups
    const auto tf = t_grid.refined().points();
    const auto bf = b_grid.refined().points();
    SupTracker base, fine;
    for (std::size_t i = 0; i < tf.size(); ++i) {
        const auto m = tail_mass_sweep(spec, alpha, tf[i], bf, d, opts);
        for (std::size_t k = 0; k < bf.size(); ++k) {
            fine.add(m[k].value, tf[i], bf[k]);
            if (i % 2 == 0 && k % 2 == 0) base.add(m[k].value, tf[i], bf[k]);
        }
    }
    BoundReport rep;
    rep.name = "tail_mass_bound";
    rep.formula = "int_{|y|>=b} q(t,y) dy <= N t^alpha phi(b^-2)";
    rep.grid = "t " + t_grid.str() + ", b " + b_grid.str() + ", d=" + std::to_string(d) + ", phi=" + spec.str() +
               ", alpha=" + format_double(alpha);
    rep.sup_ratio = base.result();
    rep.arg_t = base.at_t;
    rep.arg_r = base.at_r;
    rep.refined_sup = fine.result();
    rep.set_drift();
    return rep;
}

/// sup over t of t^{beta-alpha} int |q_{alpha,beta}(t, x)| dx, with the refined t grid.
inline BoundReport check_mass_bound(const BernsteinSpec& spec, const FracOrder& ord, int d, const Range& t_grid,
                                    const KernelOptions& opts = {}) {
    ord.validate();
    const auto tf = t_grid.refined().points();
    SupTracker base, fine;
    for (std::size_t i = 0; i < tf.size(); ++i) {
        const double m = q_mass(spec, ord, tf[i], d, opts).value;
        fine.add(m, tf[i], 0.0);
        if (i % 2 == 0) base.add(m, tf[i], 0.0);
    }
    BoundReport rep;
    rep.name = "q_mass_bound";
    rep.formula = "int |q_{a,b}(t,x)| dx <= N t^(a-b)";
    rep.grid = "t " + t_grid.str() + ", d=" + std::to_string(d) + ", phi=" + spec.str() +
               ", alpha=" + format_double(ord.alpha) + ", beta=" + format_double(ord.beta);
    rep.sup_ratio = base.result();
    rep.arg_t = base.at_t;
    rep.refined_sup = fine.result();
    rep.set_drift();
    return rep;
}

/// sup over (t, r) of p_d(t, r) / min((phi^{-1}(1/t))^{d/2}, t phi(r^{-2}) / r^d), with the same sweep
/// on grids refined in both directions.
inline BoundReport check_p_bound(const BernsteinSpec& spec, int d, const Range& t_grid, const Range& r_grid,
                                 const KernelOptions& opts = {}) {
    detail::require_kernel_dim(d);
    auto sweep = [&](const Range& tg, const Range& rg) {
        SupTracker sup;
        const auto radii = rg.points();
        for (double t : tg.points()) {
            const auto prof = subbm_density(spec, d, t, radii, opts);
            const double near = std::pow(inverse(spec, 1.0 / t), 0.5 * d);
            for (std::size_t i = 0; i < radii.size(); ++i) {
                const double r = radii[i];
                const double far = r > 0.0 ? t * eval(spec, 1.0 / (r * r)) / std::pow(r, d) : near;
                sup.add(prof.values[i] / std::min(near, far), t, r);
            }
        }
        return sup;
    };
    BoundReport rep;
    rep.name = "p_upper_bound";
    rep.formula = "p_d(t,r) <= N min((phi^-1(1/t))^(d/2), t phi(r^-2) / r^d)";
    rep.grid = "t " + t_grid.str() + ", r " + r_grid.str() + ", d=" + std::to_string(d) + ", phi=" + spec.str();
    const auto base = sweep(t_grid, r_grid);
    rep.sup_ratio = base.result();
    rep.arg_t = base.at_t;
    rep.arg_r = base.at_r;
    rep.refined_sup = sweep(t_grid.refined(), r_grid.refined()).result();
    rep.set_drift();
    return rep;
}

/// sup over (t, r) of |q_{alpha,beta}(t, r)| r^d / (t^{2 alpha - beta} phi(r^{-2})).
inline BoundReport check_q_bound(const BernsteinSpec& spec, const FracOrder& ord, int d, const Range& t_grid,
                                 const Range& r_grid, const KernelOptions& opts = {}) {
    detail::require_kernel_dim(d);
    ord.validate();
    auto sweep = [&](const Range& tg, const Range& rg) {
        SupTracker sup;
        const auto radii = rg.points();
        for (double t : tg.points()) {
            const auto prof = q_kernel_fourier(spec, ord, d, t, radii, opts);
            for (std::size_t i = 0; i < radii.size(); ++i) {
                const double r = radii[i];
                if (r == 0.0) continue;
                const double env = std::pow(t, 2.0 * ord.alpha - ord.beta) * eval(spec, 1.0 / (r * r)) / std::pow(r, d);
                sup.add(std::abs(prof.values[i]) / env, t, r);
            }
        }
        return sup;
    };
    BoundReport rep;
    rep.name = "q_upper_bound";
    rep.formula = "|q_{a,b}(t,r)| <= N t^(2a-b) phi(r^-2) / r^d";
    rep.grid = "t " + t_grid.str() + ", r " + r_grid.str() + ", d=" + std::to_string(d) + ", phi=" + spec.str() +
               ", alpha=" + format_double(ord.alpha) + ", beta=" + format_double(ord.beta);
    const auto base = sweep(t_grid, r_grid);
    rep.sup_ratio = base.result();
    rep.arg_t = base.at_t;
    rep.arg_r = base.at_r;
    rep.refined_sup = sweep(t_grid.refined(), r_grid.refined()).result();
    rep.set_drift();
    return rep;
}

}  // namespace fraclab
