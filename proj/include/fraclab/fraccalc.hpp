#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "errors.hpp"
#include "numerics.hpp"

namespace fraclab {

/// Samples u_n = u(n dt), n = 0..Nt, on a uniform grid starting at t = 0.
struct TimeSeries {
    double dt = 0.0;
    std::vector<double> values;

    TimeSeries() = default;
    TimeSeries(double step, std::vector<double> v) : dt(step), values(std::move(v)) { validate(); }

    static TimeSeries sample(const std::function<double(double)>& f, double T, std::size_t steps) {
        if (steps < 2) throw ConfigError("a time series needs at least 2 steps");
        const double step = T / static_cast<double>(steps);
        std::vector<double> v(steps + 1);
        for (std::size_t n = 0; n <= steps; ++n) v[n] = f(static_cast<double>(n) * step);
        return TimeSeries(step, std::move(v));
    }

    void validate() const {
        if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("time step dt must be positive");
        if (values.size() < 3) throw ConfigError("a time series needs at least 2 steps (Nt >= 2)");
    }

    [[nodiscard]] std::size_t steps() const { return values.size() - 1; }
    [[nodiscard]] double time(std::size_t n) const { return static_cast<double>(n) * dt; }
    [[nodiscard]] double final_time() const { return time(steps()); }
    [[nodiscard]] double operator[](std::size_t n) const { return values[n]; }

    /// Max |u_n - f(t_n)| over n >= first.
    [[nodiscard]] double max_error(const std::function<double(double)>& f, std::size_t first = 0) const {
        double e = 0.0;
        for (std::size_t n = first; n < values.size(); ++n) e = std::max(e, std::abs(values[n] - f(time(n))));
        return e;
    }
};

inline double max_difference(const TimeSeries& a, const TimeSeries& b, std::size_t first = 0) {
    if (a.values.size() != b.values.size()) throw ConfigError("time series lengths differ");
    double e = 0.0;
    for (std::size_t n = first; n < a.values.size(); ++n) e = std::max(e, std::abs(a[n] - b[n]));
    return e;
}

namespace detail {

// (k+1)^p - 2 k^p + (k-1)^p for k >= 1 without the cancellation of the naive form.
inline double second_difference_power(double p, double k) {
    if (k < 8.0) return std::pow(k + 1.0, p) - 2.0 * std::pow(k, p) + std::pow(k - 1.0, p);
    const double x = 1.0 / k;
    return std::pow(k, p) * (std::expm1(p * std::log1p(x)) + std::expm1(p * std::log1p(-x)));
}

// (j+1)^p - j^p
inline double forward_difference_power(double p, double j) {
    if (j == 0.0) return 1.0;
    return std::pow(j, p) * std::expm1(p * std::log1p(1.0 / j));
}

}  // namespace detail

/// Product-integration weights of I^alpha for the piecewise-linear interpolant:
///   (I^alpha u)(t_n) = dt^alpha / Gamma(alpha+2) * [A0(n) u_0 + sum_{j=1}^{n} c_{n-j} u_j],
/// with c_0 = 1 and c_k the second difference of k^{alpha+1}.
class RLWeights {
public:
    RLWeights(double alpha, std::size_t steps) : alpha_(alpha), c_(steps + 1), a0_(steps + 1) {
        const double p = alpha + 1.0;
        c_[0] = 1.0;
        for (std::size_t k = 1; k <= steps; ++k) c_[k] = detail::second_difference_power(p, static_cast<double>(k));
        a0_[0] = 0.0;
        for (std::size_t n = 1; n <= steps; ++n) {
            const double nn = static_cast<double>(n);
            a0_[n] = std::pow(nn - 1.0, p) - (nn - alpha - 1.0) * std::pow(nn, alpha);
        }
    }
    [[nodiscard]] double c(std::size_t k) const { return c_[k]; }
    [[nodiscard]] double a0(std::size_t n) const { return a0_[n]; }
    [[nodiscard]] double alpha() const { return alpha_; }

private:
    double alpha_;
    std::vector<double> c_, a0_;
};

/// Riemann-Liouville integral I^alpha u by product integration (exact for piecewise-linear u).
inline TimeSeries rl_integral(double alpha, const TimeSeries& u) {
    if (!(alpha > 0.0)) throw DomainError("rl_integral requires alpha > 0");
    u.validate();
    const std::size_t N = u.steps();
    const RLWeights w(alpha, N);
    const double scale = std::pow(u.dt, alpha) * rgamma(alpha + 2.0);
    std::vector<double> out(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        CompensatedSum s;
        s += w.a0(n) * u[0];
        for (std::size_t j = 1; j <= n; ++j) s += w.c(n - j) * u[j];
        out[n] = scale * s.value();
    }
    return TimeSeries(u.dt, std::move(out));
}

/// Second-order differentiation of samples: central inside, one-sided three-point at both ends.
inline TimeSeries differentiate(const TimeSeries& v) {
    v.validate();
    const std::size_t N = v.steps();
    const double h2 = 2.0 * v.dt;
    std::vector<double> out(N + 1);
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / h2;
    for (std::size_t n = 1; n < N; ++n) out[n] = (v[n + 1] - v[n - 1]) / h2;
    out[N] = (3.0 * v[N] - 4.0 * v[N - 1] + v[N - 2]) / h2;
    return TimeSeries(v.dt, std::move(out));
}

/// Riemann-Liouville derivative D^alpha u = d/dt I^{1-alpha} u for alpha in (0,1).
inline TimeSeries rl_derivative(double alpha, const TimeSeries& u) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("rl_derivative requires alpha in (0,1)");
    return differentiate(rl_integral(1.0 - alpha, u));
}

/// L1 weights b_j = (j+1)^{1-alpha} - j^{1-alpha}.
inline std::vector<double> l1_weights(double alpha, std::size_t steps) {
    std::vector<double> b(steps);
    for (std::size_t j = 0; j < steps; ++j) b[j] = detail::forward_difference_power(1.0 - alpha, static_cast<double>(j));
    return b;
}

/// Caputo derivative by the L1 scheme:
///   dt^{-alpha}/Gamma(2-alpha) sum_{j=0}^{n-1} b_j (u_{n-j} - u_{n-j-1});  zero at n = 0.
inline TimeSeries caputo_l1(double alpha, const TimeSeries& u) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("caputo_l1 requires alpha in (0,1)");
    u.validate();
    const std::size_t N = u.steps();
    const auto b = l1_weights(alpha, N);
    const double scale = std::pow(u.dt, -alpha) * rgamma(2.0 - alpha);
    std::vector<double> out(N + 1, 0.0);
    for (std::size_t n = 1; n <= N; ++n) {
        CompensatedSum s;
        for (std::size_t j = 0; j < n; ++j) s += b[j] * (u[n - j] - u[n - j - 1]);
        out[n] = scale * s.value();
    }
    return TimeSeries(u.dt, std::move(out));
}

/// Observed convergence orders log2(e_k / e_{k+1}) of a dyadic error sequence.
inline std::vector<double> observed_orders(const std::vector<double>& errors) {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k) out.push_back(std::log2(errors[k] / errors[k + 1]));
    return out;
}

}  // namespace fraclab
