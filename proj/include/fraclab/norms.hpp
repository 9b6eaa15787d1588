#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bernstein.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "numerics.hpp"
#include "report.hpp"
#include "solver.hpp"
#include "specfun.hpp"

namespace fraclab {

namespace detail {

inline double smooth_bump_tail(double y) { return y > 0.0 ? std::exp(-1.0 / y) : 0.0; }

}  // namespace detail

/// C-infinity ramp: 1 on [0,1], 0 on [2,inf), exp(-1/x) smoothstep in between.
inline double lp_ramp(double x) {
    if (x <= 1.0) return 1.0;
    if (x >= 2.0) return 0.0;
    const double a = detail::smooth_bump_tail(2.0 - x), b = detail::smooth_bump_tail(x - 1.0);
    return a / (a + b);
}

/// Base bump eta(|xi|) - eta(2|xi|), supported in 1/2 <= |xi| <= 2.
inline double lp_bump(double xi) { return lp_ramp(xi) - lp_ramp(2.0 * xi); }

/// (h^d sum |u|^p)^{1/p}
inline double lp_norm(const GridFunction& u, double p) {
    if (!(p >= 1.0)) throw ConfigError("p must be at least 1");
    CompensatedSum s;
    double peak = u.max_abs();
    if (peak == 0.0) return 0.0;
    for (const auto& v : u.data) s += std::pow(std::abs(v) / peak, p);
    return peak * std::pow(s.value() * u.grid.cell_volume(), 1.0 / p);
}

/// Applies the radial Fourier multiplier m(|xi|^2) (given per integer |k|^2) to u.
template <class M>
GridFunction apply_multiplier(const GridFunction& u, M&& m) {
    const auto& g = u.grid;
    const auto table = k2_table(g, [&](int k2) { return m(g.xi2_of_k2(k2)); });
    auto c = u.data;
    CubeFft::forward(c, g.dim, g.N);
    for (std::size_t j = 0; j < c.size(); ++j) c[j] *= table[g.k2(j)];
    CubeFft::inverse(c, g.dim, g.N);
    GridFunction out(g);
    out.data = std::move(c);
    out.aliased = u.aliased;
    return out;
}

/// Littlewood-Paley bank Psi_0 = eta(|xi|), Psi_j = Psi(2^{-j} xi) for j = 1..J on a grid.
class FilterBank {
public:
    /// Smallest J whose bands cover every grid frequency.
    static int min_levels(const GridSpec& g) {
        const double xi_max = pi * std::sqrt(static_cast<double>(g.max_k2())) / g.L;
        return std::max(1, static_cast<int>(std::ceil(std::log2(xi_max))));
    }

    explicit FilterBank(const GridSpec& g, int J = -1) : grid_(g) {
        g.validate();
        const int need = min_levels(g);
        if (J < 0) J = need;
        if (J < need)
            throw ConfigError("filter bank with J=" + std::to_string(J) + " does not cover the grid; need J >= " +
                              std::to_string(need));
        J_ = J;
        symbols_.assign(static_cast<std::size_t>(J_) + 1, std::vector<double>(static_cast<std::size_t>(g.max_k2()) + 1));
        active_ = g.active_k2();
        for (int k2 : active_) {
            const double xi = std::sqrt(g.xi2_of_k2(k2));
            symbols_[0][k2] = lp_ramp(xi);
            for (int j = 1; j <= J_; ++j) symbols_[j][k2] = lp_bump(std::ldexp(xi, -j));
        }
    }

    [[nodiscard]] int levels() const { return J_; }
    [[nodiscard]] const GridSpec& grid() const { return grid_; }

    /// Psi_j at |xi|^2 = (pi/L)^2 k2.
    [[nodiscard]] double symbol(int j, int k2) const { return symbols_[j][k2]; }
    [[nodiscard]] const std::vector<int>& active_k2() const { return active_; }

    /// max over nonzero grid frequencies of |sum_j Psi_j - 1|
    [[nodiscard]] double partition_defect() const {
        double d = 0.0;
        for (int k2 : active_) {
            if (k2 == 0) continue;
            double s = 0.0;
            for (int j = 0; j <= J_; ++j) s += symbols_[j][k2];
            d = std::max(d, std::abs(s - 1.0));
        }
        return d;
    }

    /// u_j = Psi_j * u
    [[nodiscard]] GridFunction band(const GridFunction& u, int j) const {
        require_grid(u);
        return bands_of(u, j, j).front();
    }
    [[nodiscard]] std::vector<GridFunction> bands(const GridFunction& u) const {
        require_grid(u);
        return bands_of(u, 0, J_);
    }

    void require_grid(const GridFunction& u) const {
        if (!(u.grid == grid_)) throw ConfigError("filter bank was built for a different grid");
    }

    /// Band j must sit below the axis Nyquist frequency.
    void require_resolved(int j) const {
        const double nyquist = pi * (grid_.N / 2) / grid_.L;
        if (j < 0 || j > J_ || (j > 0 && std::ldexp(1.0, j + 1) > nyquist))
            throw ConfigError("grid cannot resolve band j=" + std::to_string(j) + " (axis Nyquist frequency " +
                              format_double(nyquist) + ")");
    }

private:
    GridSpec grid_;
    int J_ = 0;
    std::vector<int> active_;
    std::vector<std::vector<double>> symbols_;

    [[nodiscard]] std::vector<GridFunction> bands_of(const GridFunction& u, int lo, int hi) const {
        auto c = u.data;
        CubeFft::forward(c, grid_.dim, grid_.N);
        std::vector<GridFunction> out;
        for (int j = lo; j <= hi; ++j) {
            auto b = c;
            for (std::size_t i = 0; i < b.size(); ++i) b[i] *= symbols_[j][grid_.k2(i)];
            CubeFft::inverse(b, grid_.dim, grid_.N);
            GridFunction g(grid_);
            g.data = std::move(b);
            out.push_back(std::move(g));
        }
        return out;
    }
};

/// Integrability exponents, smoothness, and the symbol phi of a norm.
struct NormSpec {
    double p = 2.0;
    double q = 2.0;
    double smoothness = 0.0;
    BernsteinSpec spec = BernsteinSpec::stable(1.0);

    void validate() const {
        if (!(p > 1.0) || !std::isfinite(p)) throw ConfigError("p must lie in (1, inf)");
        if (!(q > 1.0) || !std::isfinite(q)) throw ConfigError("q must lie in (1, inf)");
        if (!std::isfinite(smoothness)) throw ConfigError("smoothness must be finite");
    }
};

/// (||u_0||_p^q + sum_{j>=1} phi(2^{2j})^{sq/2} ||u_j||_p^q)^{1/q}
inline double besov_norm(const FilterBank& bank, const GridFunction& u, const NormSpec& ns) {
    ns.validate();
    const auto parts = bank.bands(u);
    std::vector<double> terms;
    terms.reserve(parts.size());
    for (int j = 0; j <= bank.levels(); ++j) {
        const double w = j == 0 ? 1.0 : std::pow(eval(ns.spec, std::ldexp(1.0, 2 * j)), 0.5 * ns.smoothness);
        terms.push_back(w * lp_norm(parts[j], ns.p));
    }
    const double peak = *std::max_element(terms.begin(), terms.end());
    if (peak == 0.0) return 0.0;
    CompensatedSum s;
    for (double t : terms) s += std::pow(t / peak, ns.q);
    return peak * std::pow(s.value(), 1.0 / ns.q);
}

/// ||(1 + phi(|xi|^2))^{gamma/2} u||_p with gamma = ns.smoothness
inline double bessel_norm(const GridFunction& u, const NormSpec& ns) {
    ns.validate();
    const double half = 0.5 * ns.smoothness;
    return lp_norm(apply_multiplier(u, [&](double xi2) {
                       return std::pow(1.0 + (xi2 > 0.0 ? eval(ns.spec, xi2) : 0.0), half);
                   }),
                   ns.p);
}

/// ||phi(|xi|^2)^{gamma/2} u||_p, the homogeneous part of the Bessel norm.
inline double phi_power_norm(const GridFunction& u, const BernsteinSpec& spec, double gamma, double p) {
    return lp_norm(apply_multiplier(u, [&](double xi2) { return xi2 > 0.0 ? std::pow(eval(spec, xi2), 0.5 * gamma) : 0.0; }),
                   p);
}

/// Trapezoid weights on n+1 uniform nodes (half weight at both ends).
inline double trapezoid_weight(std::size_t n, std::size_t steps, double dt) {
    return (n == 0 || n == steps) ? 0.5 * dt : dt;
}

/// (int_0^T ||u(t)||_p^q dt)^{1/q} with trapezoid weights on the field's time grid.
inline double lqlp_norm(const SpaceTimeField& u, double p, double q) {
    u.validate();
    if (!(q >= 1.0)) throw ConfigError("q must be at least 1");
    std::vector<double> norms;
    for (const auto& s : u.slices) norms.push_back(lp_norm(s, p));
    const double peak = *std::max_element(norms.begin(), norms.end());
    if (peak == 0.0) return 0.0;
    CompensatedSum s;
    for (std::size_t n = 0; n < norms.size(); ++n) s += trapezoid_weight(n, u.steps(), u.dt) * std::pow(norms[n] / peak, q);
    return peak * std::pow(s.value(), 1.0 / q);
}

/// q_{alpha,alpha}(t, .) periodized on the grid, band-filtered by Psi_j:
///   (2L)^{-d} sum_k Psi_j(xi_k) E_alpha(-t^alpha phi(|xi_k|^2)) e^{i xi_k x}.
inline GridFunction band_kernel(const FilterBank& bank, const BernsteinSpec& spec, double alpha, int j, double t) {
    const auto& g = bank.grid();
    const MittagLeffler e(alpha, 1.0);
    const double ta = std::pow(t, alpha);
    const double vol = std::pow(2.0 * g.L, g.dim);
    std::vector<double> table(static_cast<std::size_t>(g.max_k2()) + 1, 0.0);
    for (int k2 : bank.active_k2()) {
        const double w = bank.symbol(j, k2);
        table[k2] = w == 0.0 ? 0.0 : w * e(k2 == 0 ? 0.0 : -ta * eval(spec, g.xi2_of_k2(k2))) / vol;
    }
    std::vector<cplx> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = table[g.k2(i)];
    return GridFunction::from_spectrum(g, std::move(s));
}

/// Psi_j itself on the grid (continuum normalization), for Young-inequality checks.
inline GridFunction band_filter(const FilterBank& bank, int j) {
    const auto& g = bank.grid();
    const double vol = std::pow(2.0 * g.L, g.dim);
    std::vector<cplx> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = bank.symbol(j, g.k2(i)) / vol;
    return GridFunction::from_spectrum(g, std::move(s));
}

/// Envelopes for ||Psi_j * q(t)||_L1, j >= 1 (the j = 0 band is bounded by ||q(t)||_L1 and gets envelope 1):
/// `stated` is phi(2^{2j})^{-1/alpha} t^{-1} wedge 1; `mittag_leffler` is (phi(2^{2j}) t^alpha)^{-1} wedge 1,
/// the decay rate of E_alpha(-phi t^alpha) on the band.
enum class BandEnvelope { stated, mittag_leffler };

inline std::string envelope_formula(BandEnvelope kind) {
    return kind == BandEnvelope::stated ? "||Psi_j * q(t)||_L1 <= N (phi(2^(2j))^(-1/alpha) / t wedge 1)"
                                        : "||Psi_j * q(t)||_L1 <= N (1 / (phi(2^(2j)) t^alpha) wedge 1)";
}

inline double band_envelope(const BernsteinSpec& spec, double alpha, int j, double t,
                            BandEnvelope kind = BandEnvelope::stated) {
    if (j == 0) return 1.0;
    const double phi = eval(spec, std::ldexp(1.0, 2 * j));
    const double decay = kind == BandEnvelope::stated ? std::pow(phi, -1.0 / alpha) / t : 1.0 / (phi * std::pow(t, alpha));
    return std::min(1.0, decay);
}

/// ||Psi_j * q(t, .)||_{L_1} on the periodic grid divided by the band envelope.
inline double band_l1_bound(const FilterBank& bank, const BernsteinSpec& spec, double alpha, int j, double t,
                            BandEnvelope kind = BandEnvelope::stated) {
    FracOrder{alpha, alpha}.validate();
    bank.require_resolved(j);
    if (!(t > 0.0)) throw DomainError("band_l1_bound requires t > 0");
    return lp_norm(band_kernel(bank, spec, alpha, j, t), 1.0) / band_envelope(spec, alpha, j, t, kind);
}

/// Sup of band_l1_bound over j in [0, j_max] and a time range. The inequality is claimed for all t > 0, so the
/// comparison sweep doubles the logarithmic span of the time range (and its point count).
inline BoundReport check_band_bound(const FilterBank& bank, const BernsteinSpec& spec, double alpha, int j_max,
                                    const Range& t_grid, BandEnvelope kind = BandEnvelope::stated) {
    for (int j = 0; j <= j_max; ++j) bank.require_resolved(j);
    if (!t_grid.logarithmic) throw ConfigError("band bound sweeps need a logarithmic time range");
    auto sweep = [&](const Range& tg) {
        SupTracker sup;
        for (double t : tg.points())
            for (int j = 0; j <= j_max; ++j) sup.add(band_l1_bound(bank, spec, alpha, j, t, kind), t, j);
        return sup;
    };
    const double span = std::sqrt(t_grid.hi / t_grid.lo);
    const Range wide = Range::log(t_grid.lo / span, t_grid.hi * span, 2 * t_grid.n - 1);
    BoundReport rep;
    rep.name = kind == BandEnvelope::stated ? "band_l1_bound" : "band_l1_bound_ml_rate";
    rep.formula = envelope_formula(kind);
    rep.grid = "t " + t_grid.str() + " (extended " + wide.str() + "), j 0.." + std::to_string(j_max) +
               ", phi=" + spec.str() + ", alpha=" + format_double(alpha) + ", N=" + std::to_string(bank.grid().N) +
               ", L=" + format_double(bank.grid().L);
    const auto base = sweep(t_grid);
    rep.sup_ratio = base.result();
    rep.arg_t = base.at_t;
    rep.arg_r = base.at_r;
    rep.refined_sup = sweep(wide).result();
    rep.set_drift();
    return rep;
}

/// Per-sample ratios of an inequality lhs <= N rhs and the stability of their supremum between two
/// sample sets (sample doubling) or two horizons (T versus 4T).
struct SampleReport {
    std::string name;
    std::string formula;
    std::string grid;
    std::string comparison;  // what sup_alt was computed on
    std::vector<std::uint64_t> seeds;
    std::vector<double> ratios;
    std::vector<double> ratios_alt;
    std::size_t excluded = 0;  // degenerate samples (zero data)
    double sup = 0.0;
    double sup_alt = 0.0;
    double spread = 0.0;     // relative change or factor, see comparison
    double threshold = 0.0;  // spread must stay below this
    bool accuracy_flag = false;

    [[nodiscard]] bool finite() const { return std::isfinite(sup) && std::isfinite(sup_alt) && sup > 0.0 && sup_alt > 0.0; }
    [[nodiscard]] bool passed() const { return finite() && spread < threshold; }
};

struct HarnessOptions {
    std::size_t samples = 50;
    std::uint64_t seed = 1;
    std::size_t steps = 64;  // time steps on [0, T]
    int workers = 1;
};

namespace detail {

inline double finite_sup(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s = std::isfinite(x) ? std::max(s, x) : std::numeric_limits<double>::infinity();
    return s;
}

}  // namespace detail

/// u(t) = q(t) * u0 at fixed times: per-mode E_alpha(-t^alpha phi_k), tabulated once per time node.
/// The time nodes are log-spaced on [1e-10 T, T] (24 per decade) for the L_q time integral.
class HomogeneousPropagator {
public:
    HomogeneousPropagator(const BernsteinSpec& spec, double alpha, const GridSpec& g, double T)
        : grid_(g), times_(logspace(1e-10 * T, T, 241)) {
        const MittagLeffler e(alpha, 1.0);
        const auto sym = symbol_by_k2(spec, g);
        for (double t : times_) {
            const double ta = std::pow(t, alpha);
            tables_.push_back(k2_table(g, [&](int k2) { return k2 == 0 ? 1.0 : e(-ta * sym[k2]); }));
        }
    }

    [[nodiscard]] const std::vector<double>& times() const { return times_; }

    [[nodiscard]] GridFunction at(const std::vector<cplx>& u0_raw, std::size_t node) const {
        auto c = u0_raw;
        const auto& table = tables_[node];
        for (std::size_t i = 0; i < c.size(); ++i) c[i] *= table[grid_.k2(i)];
        CubeFft::inverse(c, grid_.dim, grid_.N);
        GridFunction out(grid_);
        out.data = std::move(c);
        return out;
    }

    /// int_0^T ||q(t) * u0||_p^q dt: Simpson's rule in log t over the nodes plus [0, 1e-10 T] at the t = 0 value.
    [[nodiscard]] double lqlp_power(const GridFunction& u0, double p, double q) const {
        auto raw = u0.data;
        CubeFft::forward(raw, grid_.dim, grid_.N);
        const std::size_t m = times_.size() - 1;
        const double h = std::log(times_[m] / times_[0]) / static_cast<double>(m);
        CompensatedSum s;
        s += times_.front() * std::pow(lp_norm(u0, p), q);
        for (std::size_t i = 0; i <= m; ++i) {
            const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
            s += w * h / 3.0 * times_[i] * std::pow(lp_norm(at(raw, i), p), q);
        }
        return s.value();
    }

private:
    GridSpec grid_;
    std::vector<double> times_;
    std::vector<std::vector<double>> tables_;
};

inline double homogeneous_lqlp(const BernsteinSpec& spec, double alpha, const GridFunction& u0, double p, double q,
                               double T) {
    return HomogeneousPropagator(spec, alpha, u0.grid, T).lqlp_power(u0, p, q);
}

/// Random u0 for the homogeneous harness: band-limited field with seed `seed`.
inline GridFunction harness_initial_data(const GridSpec& g, std::uint64_t seed) { return random_field(g, seed, g.N / 4); }

/// sup over samples of int_0^T ||q * u0||_p^q dt / ||u0||^q_{B^{phi, -2/(alpha q)}_{p,q}};
/// stable if the sup over 2n samples is within 20% of the sup over n samples.
inline SampleReport homogeneous_besov_ratio(const BernsteinSpec& spec, double alpha, double p, double q, double T,
                                            const GridSpec& g, const HarnessOptions& opts = {}) {
    FracOrder{alpha, alpha}.validate();
    const NormSpec ns{p, q, -2.0 / (alpha * q), spec};
    ns.validate();
    if (!(T > 0.0)) throw ConfigError("T must be positive");
    const FilterBank bank(g);
    const HomogeneousPropagator prop(spec, alpha, g, T);
    SampleReport rep;
    rep.name = "homogeneous_besov_ratio";
    rep.formula = "int_0^T ||q(t) * u0||_Lp^q dt <= N ||u0||^q_B(phi, -2/(alpha q))_(p,q)";
    rep.grid = "d=" + std::to_string(g.dim) + ", N=" + std::to_string(g.N) + ", L=" + format_double(g.L) +
               ", phi=" + spec.str() + ", alpha=" + format_double(alpha) + ", p=" + format_double(p) +
               ", q=" + format_double(q) + ", T=" + format_double(T);
    rep.comparison = "sup over " + std::to_string(2 * opts.samples) + " samples";
    rep.threshold = 0.2;
    const std::size_t total = 2 * opts.samples;
    std::vector<double> ratio(total, std::numeric_limits<double>::quiet_NaN());
    std::vector<char> aliased(total, 0);
    detail::run_parallel(total, opts.workers, [&](std::size_t i) {
        const auto u0 = harness_initial_data(g, opts.seed + i);
        if (u0.max_abs() == 0.0) return;
        aliased[i] = u0.tail_ratio() > alias_tolerance;
        const double rhs = std::pow(besov_norm(bank, u0, ns), q);
        ratio[i] = prop.lqlp_power(u0, p, q) / rhs;
    });
    for (std::size_t i = 0; i < total; ++i) {
        if (std::isnan(ratio[i])) {
            ++rep.excluded;
            continue;
        }
        (i < opts.samples ? rep.ratios : rep.ratios_alt).push_back(ratio[i]);
        if (i < opts.samples) rep.seeds.push_back(opts.seed + i);
        rep.accuracy_flag = rep.accuracy_flag || aliased[i];
    }
    rep.sup = detail::finite_sup(rep.ratios);
    rep.sup_alt = std::max(rep.sup, detail::finite_sup(rep.ratios_alt));
    rep.spread = std::abs(rep.sup_alt - rep.sup) / std::max(rep.sup, 1e-300);
    return rep;
}

/// Smooth band-limited random forcing f(t,x) = g1(x) cos(w1 t + th) + g2(x) sin(w2 t), frequencies in [0.5, 3].
inline SpaceTimeField random_forcing(const GridSpec& g, std::uint64_t seed, double T, std::size_t steps) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> freq(0.5, 3.0), phase(0.0, 2.0 * pi);
    const double w1 = freq(rng), w2 = freq(rng), th = phase(rng);
    const auto g1 = random_field(g, 2 * seed + 101);
    const auto g2 = random_field(g, 2 * seed + 102);
    auto f = SpaceTimeField::zeros(g, T, steps);
    for (std::size_t n = 0; n <= steps; ++n) {
        const double t = f.time(n);
        f.slices[n] = std::cos(w1 * t + th) * g1 + std::sin(w2 * t) * g2;
    }
    return f;
}

/// ||phi(Delta) u||_{L_q(L_p)} / ||f||_{L_q(L_p)} for the solution with u0 = 0.
inline double maximal_reg_sample(const BernsteinSpec& spec, double alpha, const SpaceTimeField& f, double p, double q,
                                 bool* flag = nullptr) {
    const auto u = solve(spec, alpha, GridFunction(f.grid()), f, f.final_time());
    SpaceTimeField lu = u;
    for (auto& s : lu.slices) s = apply_phi_delta(spec, s);
    if (flag) *flag = u.aliased || u.ml_degraded || lu.slices.front().aliased;
    return lqlp_norm(lu, p, q) / lqlp_norm(f, p, q);
}

/// Maximal-regularity ratios for several (p, q) pairs at horizons T and 4T (same dt), one report per pair.
inline std::vector<SampleReport> maximal_reg_ratios(const BernsteinSpec& spec, double alpha,
                                                    const std::vector<std::pair<double, double>>& pq, double T,
                                                    const GridSpec& g, const HarnessOptions& opts = {}) {
    FracOrder{alpha, alpha}.validate();
    if (!(T > 0.0)) throw ConfigError("T must be positive");
    for (auto [p, q] : pq) NormSpec{p, q, 0.0, spec}.validate();
    const std::size_t m = pq.size();
    // ratio[h][i][k]: horizon h, sample i, pair k
    std::vector<std::vector<std::vector<double>>> ratio(
        2, std::vector<std::vector<double>>(opts.samples, std::vector<double>(m, std::numeric_limits<double>::quiet_NaN())));
    std::vector<char> flags(opts.samples, 0);
    detail::run_parallel(opts.samples, opts.workers, [&](std::size_t i) {
        for (int h = 0; h < 2; ++h) {
            const double horizon = h == 0 ? T : 4.0 * T;
            const std::size_t steps = h == 0 ? opts.steps : 4 * opts.steps;
            const auto f = random_forcing(g, opts.seed + i, horizon, steps);
            if (f.is_zero()) return;
            const auto u = solve(spec, alpha, GridFunction(g), f, horizon);
            SpaceTimeField lu = u;
            for (auto& s : lu.slices) s = apply_phi_delta(spec, s);
            flags[i] = flags[i] || u.aliased || u.ml_degraded;
            for (std::size_t k = 0; k < m; ++k)
                ratio[h][i][k] = lqlp_norm(lu, pq[k].first, pq[k].second) / lqlp_norm(f, pq[k].first, pq[k].second);
        }
    });
    std::vector<SampleReport> out;
    for (std::size_t k = 0; k < m; ++k) {
        SampleReport rep;
        rep.name = "maximal_reg_ratio";
        rep.formula = "||phi(Delta) u||_Lq(0,T;Lp) <= N0 ||f||_Lq(0,T;Lp), N0 independent of T";
        rep.grid = "d=" + std::to_string(g.dim) + ", N=" + std::to_string(g.N) + ", L=" + format_double(g.L) +
                   ", phi=" + spec.str() + ", alpha=" + format_double(alpha) + ", p=" + format_double(pq[k].first) +
                   ", q=" + format_double(pq[k].second) + ", T=" + format_double(T) +
                   ", Nt=" + std::to_string(opts.steps);
        rep.comparison = "horizon 4T, same dt";
        rep.threshold = 2.0;
        for (std::size_t i = 0; i < opts.samples; ++i) {
            if (std::isnan(ratio[0][i][k])) {
                ++rep.excluded;
                continue;
            }
            rep.seeds.push_back(opts.seed + i);
            rep.ratios.push_back(ratio[0][i][k]);
            rep.ratios_alt.push_back(ratio[1][i][k]);
            rep.accuracy_flag = rep.accuracy_flag || flags[i];
        }
        rep.sup = detail::finite_sup(rep.ratios);
        rep.sup_alt = detail::finite_sup(rep.ratios_alt);
        rep.spread = std::max(rep.sup, rep.sup_alt) / std::max(std::min(rep.sup, rep.sup_alt), 1e-300);
        out.push_back(std::move(rep));
    }
    return out;
}

inline SampleReport maximal_reg_ratio(const BernsteinSpec& spec, double alpha, double p, double q, double T,
                                      const GridSpec& g, const HarnessOptions& opts = {}) {
    return maximal_reg_ratios(spec, alpha, {{p, q}}, T, g, opts).front();
}

}  // namespace fraclab
