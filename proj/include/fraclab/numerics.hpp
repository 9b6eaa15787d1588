#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include "errors.hpp"

namespace fraclab {

inline constexpr double pi = std::numbers::pi;

/// Reciprocal gamma function; poles of Gamma (0, -1, -2, ...) map to exactly zero.
inline double rgamma(double x) {
    if (x <= 0.0 && x == std::floor(x)) return 0.0;
    if (x > 171.0) return 0.0;
    if (x > 0.0) return 1.0 / std::tgamma(x);
    // reflection: 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
    const double s = boost::math::sin_pi(x);
    if (s == 0.0) return 0.0;
    const double one_minus = 1.0 - x;
    if (one_minus < 170.0) return s * std::tgamma(one_minus) / pi;
    const double mag = std::lgamma(one_minus) + std::log(std::abs(s) / pi);
    if (mag > 709.0) return std::copysign(std::numeric_limits<double>::infinity(), s);
    return std::copysign(std::exp(mag), s);
}

/// Neumaier compensated summation.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double v) {
        add(v);
        return *this;
    }
    [[nodiscard]] double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Truncated Taylor expansion f(x0 + h) = sum_k c[k] h^k up to order N.
/// Used for exact derivatives of closed-form Bernstein functions.
template <int N>
struct Jet {
    std::array<double, N + 1> c{};

    static Jet constant(double v) {
        Jet j;
        j.c[0] = v;
        return j;
    }
    static Jet variable(double x0) {
        Jet j;
        j.c[0] = x0;
        if constexpr (N >= 1) j.c[1] = 1.0;
        return j;
    }
    /// n-th derivative at the expansion point.
    [[nodiscard]] double derivative(int n) const {
        double f = 1.0;
        for (int k = 2; k <= n; ++k) f *= k;
        return c[static_cast<std::size_t>(n)] * f;
    }

    friend Jet operator+(Jet a, const Jet& b) {
        for (int k = 0; k <= N; ++k) a.c[k] += b.c[k];
        return a;
    }
    friend Jet operator-(Jet a, const Jet& b) {
        for (int k = 0; k <= N; ++k) a.c[k] -= b.c[k];
        return a;
    }
    friend Jet operator+(Jet a, double b) {
        a.c[0] += b;
        return a;
    }
    friend Jet operator-(Jet a, double b) {
        a.c[0] -= b;
        return a;
    }
    friend Jet operator*(Jet a, double s) {
        for (auto& v : a.c) v *= s;
        return a;
    }
    friend Jet operator*(double s, Jet a) { return a * s; }
    friend Jet operator*(const Jet& a, const Jet& b) {
        Jet r;
        for (int k = 0; k <= N; ++k)
            for (int j = 0; j <= k; ++j) r.c[k] += a.c[j] * b.c[k - j];
        return r;
    }
    friend Jet operator/(const Jet& a, const Jet& b) {
        Jet r;
        for (int k = 0; k <= N; ++k) {
            double s = a.c[k];
            for (int j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
            r.c[k] = s / b.c[0];
        }
        return r;
    }
};

template <int N>
Jet<N> pow(const Jet<N>& u, double a) {
    Jet<N> w;
    w.c[0] = std::pow(u.c[0], a);
    for (int k = 1; k <= N; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += (a * j - (k - j)) * u.c[j] * w.c[k - j];
        w.c[k] = s / (k * u.c[0]);
    }
    return w;
}

namespace detail {
// log of v where v.c[0] is supplied separately (for log1p accuracy)
template <int N>
Jet<N> log_series(const Jet<N>& v, double value0) {
    Jet<N> l;
    l.c[0] = value0;
    for (int k = 1; k <= N; ++k) {
        double s = v.c[k];
        for (int j = 1; j < k; ++j) s -= (static_cast<double>(j) / k) * l.c[j] * v.c[k - j];
        l.c[k] = s / v.c[0];
    }
    return l;
}
}  // namespace detail

template <int N>
Jet<N> log(const Jet<N>& u) {
    return detail::log_series(u, std::log(u.c[0]));
}

template <int N>
Jet<N> log1p(const Jet<N>& u) {
    return detail::log_series(u + 1.0, std::log1p(u.c[0]));
}

template <int N>
Jet<N> exp(const Jet<N>& u) {
    Jet<N> e;
    e.c[0] = std::exp(u.c[0]);
    for (int k = 1; k <= N; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * u.c[j] * e.c[k - j];
        e.c[k] = s / k;
    }
    return e;
}

template <int N>
Jet<N> expm1(const Jet<N>& u) {
    Jet<N> e = exp(u);
    e.c[0] = std::expm1(u.c[0]);
    return e;
}

/// Gauss-Legendre rule on [a, b] with `Points` nodes.
template <int Points = 20, class F>
double gauss_legendre(F&& f, double a, double b) {
    using rule = boost::math::quadrature::gauss<double, Points>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            s += w[i] * f(mid);
        } else {
            s += w[i] * (f(mid - half * x[i]) + f(mid + half * x[i]));
        }
    }
    return s * half;
}

/// Nodes and weights of a composite Gauss-Legendre rule over the given breakpoints.
struct QuadratureNodes {
    std::vector<double> x;
    std::vector<double> w;
};

template <int Points = 16>
QuadratureNodes composite_gauss_legendre(const std::vector<double>& breaks) {
    using rule = boost::math::quadrature::gauss<double, Points>;
    const auto& ax = rule::abscissa();
    const auto& aw = rule::weights();
    QuadratureNodes q;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (std::size_t i = 0; i < ax.size(); ++i) {
            if (ax[i] == 0.0) {
                q.x.push_back(mid);
                q.w.push_back(aw[i] * half);
            } else {
                q.x.push_back(mid - half * ax[i]);
                q.w.push_back(aw[i] * half);
                q.x.push_back(mid + half * ax[i]);
                q.w.push_back(aw[i] * half);
            }
        }
    }
    return q;
}

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the even-column
/// estimate whose change from the previous even column is smallest.
struct Extrapolated {
    double value;
    double error;
};

inline Extrapolated wynn_epsilon(const std::vector<double>& partial) {
    const std::size_t n = partial.size();
    if (n == 0) return {0.0, std::numeric_limits<double>::infinity()};
    if (n < 3) return {partial.back(), n > 1 ? std::abs(partial[1] - partial[0]) : std::abs(partial[0])};
    Extrapolated best{partial.back(), std::abs(partial[n - 1] - partial[n - 2])};
    std::vector<double> prev(n + 1, 0.0);  // column k-2
    std::vector<double> cur(partial);       // column k-1
    double last_even = partial.back();
    for (std::size_t k = 1; k < n; ++k) {
        std::vector<double> next(n - k);
        for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
            const double diff = cur[i + 1] - cur[i];
            if (std::abs(diff) <= 1e-15 * std::abs(cur[i + 1]) + 1e-300) {
                // column k-1 has converged; only even columns approximate the limit
                if ((k - 1) % 2 == 0) return {cur[i + 1], std::abs(diff)};
                return best;
            }
            next[i] = prev[i + 1] + 1.0 / diff;
        }
        if (k % 2 == 0) {
            const double cand = next.back();
            const double err = std::abs(cand - last_even);
            if (std::isfinite(cand) && err < best.error) best = {cand, err};
            last_even = cand;
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return best;
}

/// Parsed "log:a:b:n" or "lin:a:b:n" range.
struct Range {
    bool logarithmic = true;
    double lo = 1.0;
    double hi = 1.0;
    std::size_t n = 1;

    [[nodiscard]] std::vector<double> points() const {
        std::vector<double> v(n);
        if (n == 1) {
            v[0] = lo;
            return v;
        }
        for (std::size_t i = 0; i < n; ++i) {
            const double f = static_cast<double>(i) / static_cast<double>(n - 1);
            v[i] = logarithmic ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
        }
        return v;
    }
    /// Same endpoints, midpoints inserted (2n-1 points).
    [[nodiscard]] Range refined() const { return Range{logarithmic, lo, hi, n > 1 ? 2 * n - 1 : 1}; }

    [[nodiscard]] std::string str() const {
        return std::string(logarithmic ? "log:" : "lin:") + std::to_string(lo) + ":" + std::to_string(hi) + ":" +
               std::to_string(n);
    }

    static Range log(double lo, double hi, std::size_t n) { return Range{true, lo, hi, n}; }
    static Range lin(double lo, double hi, std::size_t n) { return Range{false, lo, hi, n}; }

    static Range parse(const std::string& text) {
        auto fail = [&] { throw ConfigError("bad range '" + text + "', expected log:a:b:n or lin:a:b:n"); };
        std::vector<std::string> parts;
        std::size_t start = 0;
        for (std::size_t i = 0; i <= text.size(); ++i) {
            if (i == text.size() || text[i] == ':') {
                parts.push_back(text.substr(start, i - start));
                start = i + 1;
            }
        }
        if (parts.size() != 4) fail();
        Range r;
        if (parts[0] == "log")
            r.logarithmic = true;
        else if (parts[0] == "lin")
            r.logarithmic = false;
        else
            fail();
        try {
            r.lo = std::stod(parts[1]);
            r.hi = std::stod(parts[2]);
            r.n = static_cast<std::size_t>(std::stoul(parts[3]));
        } catch (const std::exception&) {
            fail();
        }
        if (r.n == 0 || (r.logarithmic && (r.lo <= 0.0 || r.hi <= 0.0)) || r.hi < r.lo) fail();
        return r;
    }
};

inline std::vector<double> logspace(double lo, double hi, std::size_t n) { return Range::log(lo, hi, n).points(); }
inline std::vector<double> linspace(double lo, double hi, std::size_t n) { return Range::lin(lo, hi, n).points(); }

/// Surface area of the unit sphere in R^d.
inline double sphere_area(int d) { return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d); }

}  // namespace fraclab
