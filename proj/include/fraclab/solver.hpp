#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "bernstein.hpp"
#include "errors.hpp"
#include "fft.hpp"
#include "fraccalc.hpp"
#include "numerics.hpp"
#include "specfun.hpp"

namespace fraclab {

/// Spectral tail (relative to the peak coefficient) above which a field counts as under-resolved.
inline constexpr double alias_tolerance = 1e-10;

using Point = std::array<double, 3>;
using WaveVector = std::array<int, 3>;

/// Uniform periodic grid on [-L, L)^d with N points per axis; modes xi_k = pi k / L.
struct GridSpec {
    int dim = 1;
    double L = 8.0;
    int N = 512;

    /// Desk-scale defaults per dimension.
    static GridSpec defaults(int dim) {
        switch (dim) {
            case 1: return {1, 8.0, 512};
            case 2: return {2, 8.0, 128};
            case 3: return {3, 8.0, 48};
            default: throw ConfigError("dim must be 1, 2 or 3");
        }
    }
    static int default_steps(int dim) { return dim == 1 ? 256 : dim == 2 ? 128 : 64; }

    void validate() const {
        if (dim < 1 || dim > 3) throw ConfigError("dim must be 1, 2 or 3");
        if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("L must be positive");
        if (N < 4 || N % 2 != 0) throw ConfigError("N must be even and at least 4");
        int m = N;
        for (int p : {2, 3, 5})
            while (m % p == 0) m /= p;
        if (m != 1) throw ConfigError("N must have no prime factors other than 2, 3, 5");
    }

    [[nodiscard]] std::size_t size() const {
        std::size_t s = 1;
        for (int a = 0; a < dim; ++a) s *= static_cast<std::size_t>(N);
        return s;
    }
    [[nodiscard]] double spacing() const { return 2.0 * L / N; }
    [[nodiscard]] double cell_volume() const { return std::pow(spacing(), dim); }
    [[nodiscard]] double coordinate(int i) const { return -L + i * spacing(); }
    [[nodiscard]] int wavenumber(int m) const { return m < N / 2 ? m : m - N; }
    [[nodiscard]] int index_of(int k) const { return ((k % N) + N) % N; }

    [[nodiscard]] WaveVector indices(std::size_t flat) const {
        WaveVector i{0, 0, 0};
        for (int a = dim - 1; a >= 0; --a) {
            i[a] = static_cast<int>(flat % static_cast<std::size_t>(N));
            flat /= static_cast<std::size_t>(N);
        }
        return i;
    }
    [[nodiscard]] std::size_t flat(const WaveVector& i) const {
        std::size_t f = 0;
        for (int a = 0; a < dim; ++a) f = f * static_cast<std::size_t>(N) + static_cast<std::size_t>(i[a]);
        return f;
    }
    [[nodiscard]] Point point(std::size_t flat_index) const {
        const auto i = indices(flat_index);
        Point x{0, 0, 0};
        for (int a = 0; a < dim; ++a) x[a] = coordinate(i[a]);
        return x;
    }
    /// Signed wavenumbers of a storage index.
    [[nodiscard]] WaveVector wave(std::size_t flat_index) const {
        auto i = indices(flat_index);
        for (int a = 0; a < dim; ++a) i[a] = wavenumber(i[a]);
        return i;
    }
    [[nodiscard]] int k2(std::size_t flat_index) const {
        const auto k = wave(flat_index);
        int s = 0;
        for (int a = 0; a < dim; ++a) s += k[a] * k[a];
        return s;
    }
    [[nodiscard]] double xi2_of_k2(int k2) const { return pi * pi * k2 / (L * L); }
    [[nodiscard]] double xi2(std::size_t flat_index) const { return xi2_of_k2(k2(flat_index)); }
    [[nodiscard]] int max_k2() const { return dim * (N / 2) * (N / 2); }
    /// Distinct |k|^2 values present on the grid, ascending.
    [[nodiscard]] std::vector<int> active_k2() const {
        std::vector<char> seen(static_cast<std::size_t>(max_k2()) + 1, 0);
        const std::size_t n = size();
        for (std::size_t j = 0; j < n; ++j) seen[k2(j)] = 1;
        std::vector<int> out;
        for (std::size_t k = 0; k < seen.size(); ++k)
            if (seen[k]) out.push_back(static_cast<int>(k));
        return out;
    }
    [[nodiscard]] std::size_t mirror(std::size_t flat_index) const {
        auto i = indices(flat_index);
        for (int a = 0; a < dim; ++a) i[a] = (N - i[a]) % N;
        return flat(i);
    }

    bool operator==(const GridSpec& o) const { return dim == o.dim && L == o.L && N == o.N; }
};

/// Complex samples on a GridSpec; `aliased` marks fields whose spectral tail exceeded alias_tolerance.
class GridFunction {
public:
    GridSpec grid;
    std::vector<cplx> data;
    bool aliased = false;

    GridFunction() = default;
    explicit GridFunction(const GridSpec& g) : grid(g), data((g.validate(), g.size())) {}

    template <class F>
    static GridFunction sample(const GridSpec& g, F&& f) {
        GridFunction u(g);
        for (std::size_t j = 0; j < u.data.size(); ++j) u.data[j] = f(g.point(j));
        return u;
    }

    /// e^{i xi_k . x}
    static GridFunction plane_wave(const GridSpec& g, const WaveVector& k) {
        return sample(g, [&](const Point& x) {
            double phase = 0.0;
            for (int a = 0; a < g.dim; ++a) phase += pi * k[a] / g.L * x[a];
            return std::polar(1.0, phase);
        });
    }

    /// Coefficients c_k with u(x) = sum_k c_k e^{i xi_k . x}, in FFT storage order.
    [[nodiscard]] std::vector<cplx> spectrum() const {
        auto c = data;
        CubeFft::forward(c, grid.dim, grid.N);
        const double s = 1.0 / static_cast<double>(c.size());
        for (std::size_t j = 0; j < c.size(); ++j) c[j] *= s * parity(j);
        return c;
    }

    static GridFunction from_spectrum(const GridSpec& g, std::vector<cplx> c) {
        GridFunction u(g);
        if (c.size() != u.data.size()) throw ConfigError("spectrum size does not match the grid");
        for (std::size_t j = 0; j < c.size(); ++j) c[j] *= u.parity(j) * static_cast<double>(c.size());
        CubeFft::inverse(c, g.dim, g.N);
        u.data = std::move(c);
        return u;
    }

    [[nodiscard]] double max_abs() const {
        double m = 0.0;
        for (const auto& v : data) m = std::max(m, std::abs(v));
        return m;
    }
    [[nodiscard]] double max_imag() const {
        double m = 0.0;
        for (const auto& v : data) m = std::max(m, std::abs(v.imag()));
        return m;
    }
    /// (h^d sum |u|^2)^{1/2}
    [[nodiscard]] double l2_norm() const {
        CompensatedSum s;
        for (const auto& v : data) s += std::norm(v);
        return std::sqrt(s.value() * grid.cell_volume());
    }
    /// ((2L)^d sum |c_k|^2)^{1/2}, equal to l2_norm by Parseval.
    [[nodiscard]] double spectral_l2_norm() const {
        CompensatedSum s;
        for (const auto& v : spectrum()) s += std::norm(v);
        return std::sqrt(s.value() * std::pow(2.0 * grid.L, grid.dim));
    }
    [[nodiscard]] double parseval_defect() const {
        const double a = l2_norm(), b = spectral_l2_norm();
        return a == 0.0 ? b : std::abs(a * a - b * b) / (a * a);
    }
    /// max |c_k - conj(c_{-k})| / max |c|; zero for real fields.
    [[nodiscard]] double conjugate_symmetry_defect() const {
        const auto c = spectrum();
        double peak = 0.0, d = 0.0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            peak = std::max(peak, std::abs(c[j]));
            d = std::max(d, std::abs(c[j] - std::conj(c[grid.mirror(j)])));
        }
        return peak == 0.0 ? 0.0 : d / peak;
    }
    /// Largest |c_k| with some |k_a| > 3N/8, relative to the peak.
    [[nodiscard]] double tail_ratio() const {
        auto c = data;
        CubeFft::forward(c, grid.dim, grid.N);
        return tail_ratio_of(grid, c);
    }
    /// max |u| on the faces x_a = -L.
    [[nodiscard]] double boundary_max() const {
        double m = 0.0;
        for (std::size_t j = 0; j < data.size(); ++j) {
            const auto i = grid.indices(j);
            for (int a = 0; a < grid.dim; ++a)
                if (i[a] == 0) m = std::max(m, std::abs(data[j]));
        }
        return m;
    }

    GridFunction& operator+=(const GridFunction& o) {
        require_same_grid(o);
        for (std::size_t j = 0; j < data.size(); ++j) data[j] += o.data[j];
        aliased = aliased || o.aliased;
        return *this;
    }
    GridFunction& operator-=(const GridFunction& o) {
        require_same_grid(o);
        for (std::size_t j = 0; j < data.size(); ++j) data[j] -= o.data[j];
        aliased = aliased || o.aliased;
        return *this;
    }
    GridFunction& operator*=(cplx s) {
        for (auto& v : data) v *= s;
        return *this;
    }
    friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
    friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
    friend GridFunction operator*(cplx s, GridFunction a) { return a *= s; }

    void require_same_grid(const GridFunction& o) const {
        if (!(grid == o.grid)) throw ConfigError("grid functions live on different grids");
    }

    static double tail_ratio_of(const GridSpec& g, const std::vector<cplx>& raw) {
        double peak = 0.0, tail = 0.0;
        const int edge = 3 * g.N / 8;
        for (std::size_t j = 0; j < raw.size(); ++j) {
            const double v = std::abs(raw[j]);
            peak = std::max(peak, v);
            const auto k = g.wave(j);
            bool outer = false;
            for (int a = 0; a < g.dim; ++a) outer = outer || std::abs(k[a]) > edge;
            if (outer) tail = std::max(tail, v);
        }
        return peak == 0.0 ? 0.0 : tail / peak;
    }

private:
    // (-1)^{sum k}: the grid starts at -L rather than 0
    [[nodiscard]] double parity(std::size_t j) const {
        const auto k = grid.wave(j);
        int s = 0;
        for (int a = 0; a < grid.dim; ++a) s += k[a];
        return (s % 2 == 0) ? 1.0 : -1.0;
    }
};

/// f(k2) tabulated at the |k|^2 values present on the grid (zero elsewhere), indexed by k2.
template <class F>
std::vector<double> k2_table(const GridSpec& g, F&& f) {
    std::vector<double> out(static_cast<std::size_t>(g.max_k2()) + 1, 0.0);
    for (int k2 : g.active_k2()) out[k2] = f(k2);
    return out;
}

/// phi(|xi|^2) per integer |k|^2, zero at the zero mode.
inline std::vector<double> symbol_by_k2(const BernsteinSpec& spec, const GridSpec& g) {
    return k2_table(g, [&](int k2) { return k2 == 0 ? 0.0 : eval(spec, g.xi2_of_k2(k2)); });
}

/// phi(Delta) u = -F^{-1}[phi(|xi|^2) F u]; flags aliasing when the input is not band-resolved.
inline GridFunction apply_phi_delta(const BernsteinSpec& spec, const GridFunction& u) {
    const auto& g = u.grid;
    const auto sym = symbol_by_k2(spec, g);
    auto c = u.data;
    CubeFft::forward(c, g.dim, g.N);
    const bool aliased = u.aliased || GridFunction::tail_ratio_of(g, c) > alias_tolerance;
    for (std::size_t j = 0; j < c.size(); ++j) c[j] *= -sym[g.k2(j)];
    CubeFft::inverse(c, g.dim, g.N);
    GridFunction out(g);
    out.data = std::move(c);
    out.aliased = aliased;
    return out;
}

/// Time slices u(t_n, .) on a uniform time grid t_n = n dt, n = 0..Nt.
struct SpaceTimeField {
    double dt = 0.0;
    std::vector<GridFunction> slices;
    bool aliased = false;
    bool ml_degraded = false;

    static SpaceTimeField zeros(const GridSpec& g, double T, std::size_t steps) {
        check_time_grid(T, steps);
        SpaceTimeField f;
        f.dt = T / static_cast<double>(steps);
        f.slices.assign(steps + 1, GridFunction(g));
        return f;
    }

    template <class F>
    static SpaceTimeField sample(const GridSpec& g, double T, std::size_t steps, F&& fn) {
        auto f = zeros(g, T, steps);
        for (std::size_t n = 0; n <= steps; ++n) {
            const double t = f.time(n);
            f.slices[n] = GridFunction::sample(g, [&](const Point& x) { return fn(t, x); });
        }
        return f;
    }

    /// u(t, x) = a(t) g(x)
    static SpaceTimeField separable(const GridFunction& g, double T, std::size_t steps,
                                    const std::function<cplx(double)>& a) {
        auto f = zeros(g.grid, T, steps);
        for (std::size_t n = 0; n <= steps; ++n) f.slices[n] = a(f.time(n)) * g;
        return f;
    }

    static void check_time_grid(double T, std::size_t steps) {
        if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("T must be positive");
        if (steps < 2) throw ConfigError("Nt must be at least 2");
    }

    [[nodiscard]] std::size_t steps() const { return slices.size() - 1; }
    [[nodiscard]] double time(std::size_t n) const { return static_cast<double>(n) * dt; }
    [[nodiscard]] double final_time() const { return time(steps()); }
    [[nodiscard]] const GridSpec& grid() const { return slices.front().grid; }

    void validate() const {
        if (slices.size() < 3 || !(dt > 0.0)) throw ConfigError("a space-time field needs dt > 0 and Nt >= 2");
        for (const auto& s : slices)
            if (!(s.grid == grid())) throw ConfigError("time slices live on different grids");
    }
    [[nodiscard]] bool matches(const SpaceTimeField& o) const {
        return slices.size() == o.slices.size() && std::abs(dt - o.dt) <= 1e-12 * dt && grid() == o.grid();
    }

    /// max over n >= first and all grid points of |u|
    [[nodiscard]] double sup_norm(std::size_t first = 0) const {
        double m = 0.0;
        for (std::size_t n = first; n < slices.size(); ++n) m = std::max(m, slices[n].max_abs());
        return m;
    }
    [[nodiscard]] double max_imag() const {
        double m = 0.0;
        for (const auto& s : slices) m = std::max(m, s.max_imag());
        return m;
    }
    [[nodiscard]] bool is_zero() const {
        for (const auto& s : slices)
            for (const auto& v : s.data)
                if (v != cplx{}) return false;
        return true;
    }
    /// Real part of u(t_n, x_j) as a time series.
    [[nodiscard]] TimeSeries series_at(std::size_t point) const {
        std::vector<double> v(slices.size());
        for (std::size_t n = 0; n < slices.size(); ++n) v[n] = slices[n].data[point].real();
        return TimeSeries(dt, std::move(v));
    }
};

inline double max_difference(const SpaceTimeField& a, const SpaceTimeField& b, std::size_t first = 0) {
    if (!a.matches(b)) throw ConfigError("space-time fields live on different grids");
    double m = 0.0;
    for (std::size_t n = first; n < a.slices.size(); ++n)
        for (std::size_t j = 0; j < a.slices[n].data.size(); ++j)
            m = std::max(m, std::abs(a.slices[n].data[j] - b.slices[n].data[j]));
    return m;
}

struct SolverOptions {
    int workers = 1;
};

namespace detail {

// Per-|k|^2 propagation weights for one symbol value lambda:
//   E_n = E_alpha(-lambda t_n^alpha),
//   A_b, B_b: exact integrals of (t_n - s)^{alpha-1} E_{alpha,alpha}(-lambda (t_n - s)^alpha) against the two
//   hat functions of the segment [t_m, t_{m+1}] with b = n - m, from the primitives
//   H0(tau) = tau^alpha E_{alpha,alpha+1}(-lambda tau^alpha), H1(tau) = tau^{alpha+1} E_{alpha,alpha+2}(-lambda tau^alpha).
struct ModeWeights {
    std::vector<double> E, A, B;
    bool degraded = false;
};

struct DuhamelFunctions {
    MittagLeffler e1, h0, h1;
    explicit DuhamelFunctions(double alpha) : e1(alpha, 1.0), h0(alpha, alpha + 1.0), h1(alpha, alpha + 2.0) {}
};

inline ModeWeights mode_weights(const DuhamelFunctions& ml, double alpha, double lambda, double dt, std::size_t steps,
                                bool forced) {
    ModeWeights w;
    w.E.resize(steps + 1);
    std::vector<double> H0(steps + 1, 0.0), H1(steps + 1, 0.0);
    for (std::size_t j = 0; j <= steps; ++j) {
        const double tau = static_cast<double>(j) * dt;
        const double ta = std::pow(tau, alpha);
        const auto e = ml.e1.value(-lambda * ta);
        w.E[j] = e.value;
        w.degraded = w.degraded || e.degraded;
        if (forced && j > 0) {
            const auto a = ml.h0.value(-lambda * ta);
            const auto b = ml.h1.value(-lambda * ta);
            H0[j] = ta * a.value;
            H1[j] = ta * tau * b.value;
            w.degraded = w.degraded || a.degraded || b.degraded;
        }
    }
    if (forced) {
        w.A.assign(steps + 1, 0.0);
        w.B.assign(steps + 1, 0.0);
        for (std::size_t b = 1; b <= steps; ++b) {
            const double D = (H1[b] - H1[b - 1]) / dt;
            w.A[b] = H0[b] - D;
            w.B[b] = D - H0[b - 1];
        }
    }
    return w;
}

template <class Job>
void run_parallel(std::size_t count, int workers, Job&& job) {
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(count)));
    if (n == 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < n; ++w)
        pool.emplace_back([&, w] {
            for (std::size_t i = static_cast<std::size_t>(w); i < count; i += static_cast<std::size_t>(n)) job(i);
        });
    for (auto& t : pool) t.join();
}

}  // namespace detail

/// Solves the time-fractional equation d_t^alpha u = phi(Delta) u + f, u(0) = u0, on the torus, per Fourier mode:
///   u_k(t_n) = E_alpha(-t_n^alpha phi_k) u0_k + sum_m [A_{n-m} f_k(t_m) + B_{n-m} f_k(t_{m+1})],
/// exact for f piecewise linear in time. f fixes the time grid; its final time must equal T.
inline SpaceTimeField solve(const BernsteinSpec& spec, double alpha, const GridFunction& u0, const SpaceTimeField& f,
                            double T, const SolverOptions& opts = {}) {
    FracOrder{alpha, alpha}.validate();
    f.validate();
    u0.require_same_grid(f.slices.front());
    if (std::abs(f.final_time() - T) > 1e-12 * T) throw ConfigError("forcing time grid does not end at T");
    const GridSpec& g = u0.grid;
    const std::size_t steps = f.steps();
    const double dt = f.dt;
    const bool forced = !f.is_zero();

    auto u0_hat = u0.data;
    CubeFft::forward(u0_hat, g.dim, g.N);
    bool aliased = u0.aliased || GridFunction::tail_ratio_of(g, u0_hat) > alias_tolerance;

    std::vector<std::vector<cplx>> f_hat;
    if (forced) {
        f_hat.resize(steps + 1);
        for (std::size_t n = 0; n <= steps; ++n) {
            f_hat[n] = f.slices[n].data;
            CubeFft::forward(f_hat[n], g.dim, g.N);
            aliased = aliased || f.slices[n].aliased || GridFunction::tail_ratio_of(g, f_hat[n]) > alias_tolerance;
        }
    }

    std::vector<std::vector<std::size_t>> groups(static_cast<std::size_t>(g.max_k2()) + 1);
    for (std::size_t j = 0; j < g.size(); ++j) groups[g.k2(j)].push_back(j);
    std::vector<int> keys;
    for (std::size_t k = 0; k < groups.size(); ++k)
        if (!groups[k].empty()) keys.push_back(static_cast<int>(k));

    std::vector<std::vector<cplx>> u_hat(steps + 1, std::vector<cplx>(g.size()));
    const detail::DuhamelFunctions ml(alpha);
    std::vector<char> degraded(keys.size(), 0);
    detail::run_parallel(keys.size(), opts.workers, [&](std::size_t i) {
        const int k2 = keys[i];
        const double lambda = k2 == 0 ? 0.0 : eval(spec, g.xi2_of_k2(k2));
        const auto w = detail::mode_weights(ml, alpha, lambda, dt, steps, forced);
        degraded[i] = w.degraded;
        for (std::size_t j : groups[k2]) {
            for (std::size_t n = 0; n <= steps; ++n) {
                cplx v = w.E[n] * u0_hat[j];
                if (forced)
                    for (std::size_t m = 0; m < n; ++m) v += w.A[n - m] * f_hat[m][j] + w.B[n - m] * f_hat[m + 1][j];
                u_hat[n][j] = v;
            }
        }
    });

    SpaceTimeField u;
    u.dt = dt;
    u.slices.reserve(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n) {
        CubeFft::inverse(u_hat[n], g.dim, g.N);
        GridFunction s(g);
        s.data = std::move(u_hat[n]);
        s.aliased = aliased;
        u.slices.push_back(std::move(s));
    }
    u.aliased = aliased;
    u.ml_degraded = std::any_of(degraded.begin(), degraded.end(), [](char c) { return c != 0; });
    return u;
}

/// Homogeneous problem on Nt steps.
inline SpaceTimeField solve(const BernsteinSpec& spec, double alpha, const GridFunction& u0, double T,
                            std::size_t steps, const SolverOptions& opts = {}) {
    return solve(spec, alpha, u0, SpaceTimeField::zeros(u0.grid, T, steps), T, opts);
}

/// Pointwise residual caputo_l1(u) - phi(Delta) u - f; slice 0 holds the equation evaluated at t = 0.
inline SpaceTimeField residual(const BernsteinSpec& spec, double alpha, const SpaceTimeField& u,
                               const SpaceTimeField& f) {
    FracOrder{alpha, alpha}.validate();
    u.validate();
    if (!u.matches(f)) throw ConfigError("u and f live on different space-time grids");
    const std::size_t steps = u.steps();
    const auto b = l1_weights(alpha, steps);
    const double scale = std::pow(u.dt, -alpha) * rgamma(2.0 - alpha);
    const std::size_t size = u.grid().size();
    SpaceTimeField r;
    r.dt = u.dt;
    r.slices.reserve(steps + 1);
    for (std::size_t n = 0; n <= steps; ++n) {
        GridFunction s = apply_phi_delta(spec, u.slices[n]);
        s *= -1.0;
        s -= f.slices[n];
        for (std::size_t x = 0; x < size; ++x) {
            cplx acc{};
            for (std::size_t j = 0; j < n; ++j) acc += b[j] * (u.slices[n - j].data[x] - u.slices[n - j - 1].data[x]);
            s.data[x] += scale * acc;
        }
        r.aliased = r.aliased || s.aliased;
        r.slices.push_back(std::move(s));
    }
    return r;
}

/// Real band-limited random field: complex Gaussian coefficients with |xi|^{-(d+1)/2} decay on |k_a| <= kmax,
/// conjugate-symmetrized, zero mean, scaled to unit sup norm.
inline GridFunction random_field(const GridSpec& g, std::uint64_t seed, int kmax = 0) {
    g.validate();
    if (kmax <= 0) kmax = g.N / 8;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<cplx> c(g.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
        const auto k = g.wave(j);
        bool kept = true;
        for (int a = 0; a < g.dim; ++a) kept = kept && std::abs(k[a]) <= kmax && std::abs(k[a]) < g.N / 2;
        const int k2 = g.k2(j);
        const double re = normal(rng), im = normal(rng);
        if (!kept || k2 == 0) continue;
        const double amp = std::pow(g.xi2_of_k2(k2), -0.25 * (g.dim + 1));
        c[j] = amp * cplx{re, im};
    }
    std::vector<cplx> sym(c.size());
    for (std::size_t j = 0; j < c.size(); ++j) sym[j] = 0.5 * (c[j] + std::conj(c[g.mirror(j)]));
    auto u = GridFunction::from_spectrum(g, std::move(sym));
    for (auto& v : u.data) v = v.real();
    const double m = u.max_abs();
    if (m > 0.0) u *= 1.0 / m;
    return u;
}

/// exp(-|x|^2 / (2 w^2))
inline GridFunction gaussian_field(const GridSpec& g, double width = 1.0) {
    return GridFunction::sample(g, [&](const Point& x) {
        double r2 = 0.0;
        for (int a = 0; a < g.dim; ++a) r2 += x[a] * x[a];
        return cplx{std::exp(-0.5 * r2 / (width * width)), 0.0};
    });
}

/// Manufactured problem with u(t, x) = (t^2 + t^3) g(x), smooth in time and vanishing at t = 0:
/// f = d_t^alpha u - phi(Delta) u in closed form.
struct ManufacturedProblem {
    SpaceTimeField u, f;
};

inline ManufacturedProblem manufactured_polynomial(const BernsteinSpec& spec, double alpha, const GridFunction& g,
                                                   double T, std::size_t steps) {
    const auto lap = apply_phi_delta(spec, g);
    auto a = [](double t) { return cplx{t * t + t * t * t, 0.0}; };
    auto da = [&](double t) {
        return cplx{2.0 * std::pow(t, 2.0 - alpha) * rgamma(3.0 - alpha) + 6.0 * std::pow(t, 3.0 - alpha) * rgamma(4.0 - alpha),
                    0.0};
    };
    ManufacturedProblem p;
    p.u = SpaceTimeField::separable(g, T, steps, a);
    p.f = SpaceTimeField::zeros(g.grid, T, steps);
    for (std::size_t n = 0; n <= steps; ++n) {
        const double t = p.f.time(n);
        p.f.slices[n] = da(t) * g - a(t) * lap;
    }
    return p;
}

/// Exact single-mode solution of the homogeneous problem: E_alpha(-t^alpha phi(|xi_k|^2)) e^{i xi_k . x}.
inline SpaceTimeField single_mode_solution(const BernsteinSpec& spec, double alpha, const GridSpec& g,
                                           const WaveVector& k, double T, std::size_t steps) {
    int k2 = 0;
    for (int a = 0; a < g.dim; ++a) k2 += k[a] * k[a];
    const double lambda = k2 == 0 ? 0.0 : eval(spec, g.xi2_of_k2(k2));
    const MittagLeffler e(alpha, 1.0);
    return SpaceTimeField::separable(GridFunction::plane_wave(g, k), T, steps,
                                     [&](double t) { return cplx{e(-lambda * std::pow(t, alpha)), 0.0}; });
}

}  // namespace fraclab
