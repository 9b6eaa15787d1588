#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "bernstein.hpp"
#include "errors.hpp"
#include "kernel.hpp"
#include "numerics.hpp"
#include "solver.hpp"
#include "specfun.hpp"

namespace fraclab {

/// Counter-based generator: output k of stream (seed, stream) is splitmix64 of a Weyl sequence keyed by both.
/// Streams are independent of the order in which workers consume them.
class CounterRng {
public:
    using result_type = std::uint64_t;

    CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(mix(seed) ^ (stream * 0xd1b54a32d192ed03ULL))) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

    double exponential() { return -std::log(uniform()); }

    /// Standard normal by Box-Muller (one draw per pair of uniforms).
    double normal() { return std::sqrt(-2.0 * std::log(uniform())) * std::cos(2.0 * pi * uniform()); }

    [[nodiscard]] std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
};

/// Parameters of Y_t = X_{R_t} with X = W_S, S stable of index beta (phi(lambda) = lambda^beta) and R the inverse of
/// an alpha-stable subordinator.
struct MCConfig {
    double alpha = 0.5;
    double beta = 0.5;
    int dim = 1;
    double t = 1.0;
    std::size_t n = 100000;
    std::uint64_t seed = 1;
    int workers = 1;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1), got " + format_double(alpha));
        if (!(beta > 0.0 && beta <= 1.0)) throw ConfigError("beta must lie in (0, 1], got " + format_double(beta));
        if (dim < 1 || dim > 3) throw ConfigError("dim must be 1, 2 or 3");
        if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("t must be positive");
        if (n == 0) throw ConfigError("sample count n must be at least 1");
    }
};

namespace detail {

inline void require_index(double index, const char* name) {
    if (!(index > 0.0 && index < 1.0)) throw DomainError(std::string(name) + " must lie in (0, 1)");
}

/// Kanter's representation: Q = (A(U) / E)^{(1-a)/a}, U uniform on (0, pi), E standard exponential, with
/// A(u) = (sin(a u) / sin u)^{1/(1-a)} sin((1-a) u) / sin(a u).
inline double kanter_draw(double a, CounterRng& rng) {
    const double u = pi * rng.uniform();
    const double e = rng.exponential();
    const double A = std::pow(std::sin(a * u) / std::sin(u), 1.0 / (1.0 - a)) * std::sin((1.0 - a) * u) / std::sin(a * u);
    return std::pow(A / e, (1.0 - a) / a);
}

inline double subordinator_draw(double index, CounterRng& rng) { return index == 1.0 ? 1.0 : kanter_draw(index, rng); }

template <class Draw>
std::vector<double> draw_all(std::size_t n, std::uint64_t seed, int workers, Draw&& draw) {
    std::vector<double> out(n);
    constexpr std::size_t chunk = 4096;
    const std::size_t chunks = (n + chunk - 1) / chunk;
    run_parallel(chunks, workers, [&](std::size_t c) {
        for (std::size_t i = c * chunk; i < std::min(n, (c + 1) * chunk); ++i) {
            CounterRng rng(seed, i);
            out[i] = draw(rng);
        }
    });
    return out;
}

}  // namespace detail

/// Q_1 of the standard index-stable subordinator, E exp(-lambda Q_1) = exp(-lambda^index).
inline std::vector<double> sample_stable_subordinator(double index, std::size_t n, std::uint64_t seed, int workers = 1) {
    detail::require_index(index, "stable index");
    return detail::draw_all(n, seed, workers, [&](CounterRng& rng) { return detail::kanter_draw(index, rng); });
}

/// R_t = (t / Q_1)^alpha in distribution.
inline std::vector<double> sample_inverse_stable(double alpha, double t, std::size_t n, std::uint64_t seed,
                                                 int workers = 1) {
    detail::require_index(alpha, "alpha");
    if (!(t > 0.0)) throw DomainError("sample_inverse_stable requires t > 0");
    return detail::draw_all(n, seed, workers,
                            [&](CounterRng& rng) { return std::pow(t / detail::kanter_draw(alpha, rng), alpha); });
}

/// n samples in dimension dim, stored point after point.
struct Samples {
    int dim = 1;
    std::vector<double> data;

    [[nodiscard]] std::size_t size() const { return data.size() / static_cast<std::size_t>(dim); }
    [[nodiscard]] double coord(std::size_t i, int a) const { return data[i * static_cast<std::size_t>(dim) + a]; }
    [[nodiscard]] std::vector<double> magnitudes() const {
        std::vector<double> r(size());
        for (std::size_t i = 0; i < r.size(); ++i) {
            double s = 0.0;
            for (int a = 0; a < dim; ++a) s += coord(i, a) * coord(i, a);
            r[i] = std::sqrt(s);
        }
        return r;
    }
};

/// Y_t: R = R_t, S = R^{1/beta} S_1, Y = sqrt(2 S) Z with Z standard normal in R^d.
inline Samples sample_y(const MCConfig& cfg) {
    cfg.validate();
    Samples y{cfg.dim, std::vector<double>(cfg.n * static_cast<std::size_t>(cfg.dim))};
    constexpr std::size_t chunk = 4096;
    const std::size_t chunks = (cfg.n + chunk - 1) / chunk;
    detail::run_parallel(chunks, cfg.workers, [&](std::size_t c) {
        for (std::size_t i = c * chunk; i < std::min(cfg.n, (c + 1) * chunk); ++i) {
            CounterRng rng(cfg.seed, i);
            const double r = std::pow(cfg.t / detail::kanter_draw(cfg.alpha, rng), cfg.alpha);
            const double s = std::pow(r, 1.0 / cfg.beta) * detail::subordinator_draw(cfg.beta, rng);
            const double scale = std::sqrt(2.0 * s);
            for (int a = 0; a < cfg.dim; ++a) y.data[i * cfg.dim + a] = scale * rng.normal();
        }
    });
    return y;
}

/// Sample mean and its standard error.
struct MeanEstimate {
    double mean = 0.0;
    double se = 0.0;

    /// |mean - exact| in units of the standard error.
    [[nodiscard]] double z_score(double exact) const {
        return se > 0.0 ? std::abs(mean - exact) / se : (mean == exact ? 0.0 : std::numeric_limits<double>::infinity());
    }
};

template <class F>
MeanEstimate estimate_mean(std::size_t n, F&& value) {
    if (n < 2) throw ConfigError("a standard error needs at least 2 samples");
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = value(i), d = x - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (x - mean);
    }
    return {mean, std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n))};
}

/// E exp(-lambda X)
inline MeanEstimate laplace_statistic(const std::vector<double>& x, double lambda) {
    return estimate_mean(x.size(), [&](std::size_t i) { return std::exp(-lambda * x[i]); });
}

/// Real part of E exp(i xi Y_a); the imaginary part vanishes by symmetry.
inline MeanEstimate characteristic_statistic(const Samples& y, double xi, int axis = 0) {
    return estimate_mean(y.size(), [&](std::size_t i) { return std::cos(xi * y.coord(i, axis)); });
}

/// E_alpha(-t^alpha |xi|^{2 beta})
inline double characteristic_exact(const MCConfig& cfg, double xi) {
    return mittag_leffler(cfg.alpha, 1.0, -std::pow(cfg.t, cfg.alpha) * std::pow(std::abs(xi), 2.0 * cfg.beta)).value;
}

struct CharacteristicCheck {
    std::vector<double> xi;
    std::vector<double> exact;
    std::vector<MeanEstimate> empirical;
    double max_z = 0.0;
    double z_threshold = 3.0;

    [[nodiscard]] bool passed() const { return std::isfinite(max_z) && max_z <= z_threshold; }
};

inline CharacteristicCheck check_characteristic(const Samples& y, const MCConfig& cfg, const std::vector<double>& xi) {
    CharacteristicCheck c;
    c.xi = xi;
    for (double x : xi) {
        c.exact.push_back(characteristic_exact(cfg, x));
        c.empirical.push_back(characteristic_statistic(y, x));
        c.max_z = std::max(c.max_z, c.empirical.back().z_score(c.exact.back()));
    }
    return c;
}

/// Density of a nonnegative variable tabulated on increasing nodes, with its distribution function.
class DensityTable {
public:
    DensityTable(std::vector<double> nodes, std::vector<double> pdf) : x_(std::move(nodes)), f_(std::move(pdf)) {
        if (x_.size() < 3 || x_.size() != f_.size()) throw ConfigError("density table needs >= 3 matching nodes");
        if (!(x_.front() > 0.0)) throw ConfigError("density table nodes must be positive");
        for (std::size_t i = 1; i < x_.size(); ++i)
            if (!(x_[i] > x_[i - 1])) throw ConfigError("density table nodes must increase");
        for (double& v : f_) {
            if (!std::isfinite(v)) throw NumericError("non-finite density value");
            v = std::max(v, 0.0);
        }
        // [0, x_0] at the first value; trapezoid in log x above (the nodes are typically log-spaced)
        cdf_.resize(x_.size());
        cdf_[0] = x_[0] * f_[0];
        for (std::size_t i = 1; i < x_.size(); ++i)
            cdf_[i] = cdf_[i - 1] + 0.5 * std::log(x_[i] / x_[i - 1]) * (x_[i] * f_[i] + x_[i - 1] * f_[i - 1]);
    }

    /// Magnitude |Y| of a radial density q in R^d: |S^{d-1}| r^{d-1} q(r).
    static DensityTable from_profile(const RadialProfile& p) {
        std::vector<double> pdf(p.radii.size());
        for (std::size_t i = 0; i < pdf.size(); ++i)
            pdf[i] = sphere_area(p.dim) * std::pow(p.radii[i], p.dim - 1) * p.values[i];
        return {p.radii, std::move(pdf)};
    }

    [[nodiscard]] double lo() const { return x_.front(); }
    [[nodiscard]] double hi() const { return x_.back(); }
    [[nodiscard]] const std::vector<double>& nodes() const { return x_; }

    /// P(X <= x), linear in log x between nodes; mass beyond the last node is not represented.
    [[nodiscard]] double cdf(double x) const {
        if (x <= 0.0) return 0.0;
        if (x <= x_[0]) return cdf_[0] * x / x_[0];
        if (x >= x_.back()) return cdf_.back();
        const auto it = std::upper_bound(x_.begin(), x_.end(), x);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin());
        const double w = std::log(x / x_[i - 1]) / std::log(x_[i] / x_[i - 1]);
        return (1.0 - w) * cdf_[i - 1] + w * cdf_[i];
    }

    /// Generalized inverse of cdf (for synthetic samples); values beyond the table mass map to the last node.
    [[nodiscard]] double quantile(double u) const {
        if (u <= cdf_[0]) return x_[0] * u / cdf_[0];
        if (u >= cdf_.back()) return x_.back();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        const std::size_t i = static_cast<std::size_t>(it - cdf_.begin());
        const double w = (u - cdf_[i - 1]) / (cdf_[i] - cdf_[i - 1]);
        return x_[i - 1] * std::pow(x_[i] / x_[i - 1], w);
    }

    [[nodiscard]] double total_mass() const { return cdf_.back(); }

private:
    std::vector<double> x_, f_, cdf_;
};

/// Histogram-versus-density comparison of a nonnegative sample (|Y| or R_t).
struct DistanceReport {
    std::size_t n = 0;
    std::size_t bins = 0;
    double bin_width = 0.0;  // Freedman-Diaconis width
    double range_hi = 0.0;   // histogram covers [0, range_hi]; the rest is one tail bin
    double l1 = 0.0;         // sum over bins of |empirical - analytic| probability
    double ks = 0.0;         // sup |F_n - F| over the sample points
    double noise_floor = 0.0;
    double table_deficit = 0.0;  // 1 - mass represented by the density table

    [[nodiscard]] std::string str() const {
        return "n=" + std::to_string(n) + " bins=" + std::to_string(bins) + " width=" + format_double(bin_width) +
               " L1=" + format_double(l1) + " KS=" + format_double(ks) + " floor=" + format_double(noise_floor);
    }
};

/// L1 distance between the Freedman-Diaconis histogram of x >= 0 and the binned density, plus the
/// Kolmogorov-Smirnov statistic. The histogram spans [0, 99th percentile]; mass above is compared as one
/// tail bin. The noise floor is the expected L1 distance of an exact sample, sum_b sqrt(2 P_b (1 - P_b) / (pi n)).
inline DistanceReport compare_density(std::vector<double> x, const DensityTable& density) {
    if (x.empty()) throw ConfigError("compare_density needs at least one sample");
    std::sort(x.begin(), x.end());
    const std::size_t n = x.size();
    if (x.front() < 0.0) throw ConfigError("compare_density expects nonnegative samples");
    const double deficit = 1.0 - density.total_mass();
    if (std::abs(deficit) > 0.01)
        throw ConfigError("density table misses " + format_double(deficit) + " of the mass; extend its range");
    auto quantile = [&](double p) { return x[std::min(n - 1, static_cast<std::size_t>(p * static_cast<double>(n - 1)))]; };
    const double hi = quantile(0.99);
    if (hi > density.hi()) throw ConfigError("density table ends at " + format_double(density.hi()) +
                                             " below the sample range " + format_double(hi));
    const std::size_t above = static_cast<std::size_t>(x.end() - std::upper_bound(x.begin(), x.end(), density.hi()));
    if (static_cast<double>(above) > 0.01 * static_cast<double>(n))
        throw ConfigError("more than 1% of the samples lie beyond the density table");

    DistanceReport rep;
    rep.n = n;
    rep.table_deficit = deficit;
    const double iqr = quantile(0.75) - quantile(0.25);
    double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));
    if (!(width > 0.0)) width = hi > 0.0 ? hi : 1.0;
    rep.bins = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(hi / width)));
    rep.bin_width = width;
    rep.range_hi = width * static_cast<double>(rep.bins);

    std::vector<double> counts(rep.bins + 1, 0.0);
    for (double v : x) counts[std::min(rep.bins, static_cast<std::size_t>(v / width))] += 1.0;
    const double nd = static_cast<double>(n);
    double prev = 0.0;
    for (std::size_t b = 0; b <= rep.bins; ++b) {
        const double next = b < rep.bins ? density.cdf(width * static_cast<double>(b + 1)) : 1.0;
        const double pb = std::max(next - prev, 0.0);
        rep.l1 += std::abs(counts[b] / nd - pb);
        rep.noise_floor += std::sqrt(2.0 * pb * (1.0 - pb) / (pi * nd));
        prev = next;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double F = density.cdf(x[i]);
        rep.ks = std::max({rep.ks, std::abs(static_cast<double>(i + 1) / nd - F), std::abs(static_cast<double>(i) / nd - F)});
    }
    return rep;
}

inline DistanceReport compare_density(const Samples& y, const RadialProfile& profile) {
    if (y.size() == 0) throw ConfigError("compare_density needs at least one sample");
    if (y.dim != profile.dim) throw ConfigError("sample and profile dimensions differ");
    return compare_density(y.magnitudes(), DensityTable::from_profile(profile));
}

/// Radial nodes for the reference kernel of Y_t: log-spaced over [1e-6, 1e6] times the scale t^{alpha/(2 beta)}.
inline std::vector<double> reference_radii(const MCConfig& cfg, std::size_t per_decade = 48) {
    const double scale = std::pow(cfg.t, cfg.alpha / (2.0 * cfg.beta));
    return logspace(1e-6 * scale, 1e6 * scale, 12 * per_decade + 1);
}

/// q_{alpha,alpha}(t, .) for phi = lambda^beta, the law of Y_t.
inline RadialProfile reference_profile(const MCConfig& cfg) {
    cfg.validate();
    return q_kernel_fourier(BernsteinSpec::stable(cfg.beta), FracOrder{cfg.alpha, cfg.alpha}, cfg.dim, cfg.t,
                            reference_radii(cfg));
}

/// Density table of R_t from the inverse-subordinator density.
inline DensityTable inverse_stable_table(double alpha, double t, std::size_t per_decade = 200) {
    detail::require_index(alpha, "alpha");
    const double scale = std::pow(t, alpha);
    const auto r = logspace(1e-8 * scale, 1e2 * scale, 10 * per_decade + 1);
    std::vector<double> pdf(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) pdf[i] = inv_subordinator_density(alpha, t, r[i]);
    return {r, std::move(pdf)};
}

/// Inverse-transform samples of a density table, streamed like the other samplers.
inline std::vector<double> sample_table(const DensityTable& table, std::size_t n, std::uint64_t seed) {
    return detail::draw_all(n, seed, 1, [&](CounterRng& rng) { return table.quantile(rng.uniform()); });
}

/// Index used for the wrong-alpha negative control.
inline double control_alpha(double alpha) { return alpha + 0.3 < 1.0 ? alpha + 0.3 : alpha - 0.3; }

}  // namespace fraclab
