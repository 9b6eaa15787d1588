#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "errors.hpp"
#include "numerics.hpp"

namespace fraclab {

/// Time-fractional order alpha in (0,1) and generalized derivative order beta.
struct FracOrder {
    double alpha = 0.5;
    double beta = 0.5;

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0,1)");
        if (!std::isfinite(beta)) throw ConfigError("beta must be finite");
    }
};

/// Value with a flag raised when the requested accuracy could not be certified.
struct SpecValue {
    double value = 0.0;
    bool degraded = false;
};

namespace detail {

using cplx = std::complex<double>;

inline void require_ml_args(double a, double x) {
    if (!(a > 0.0 && a <= 1.0)) throw DomainError("Mittag-Leffler alpha must lie in (0,1]");
    if (!(x <= 0.0)) throw DomainError("Mittag-Leffler argument must be <= 0");
}

// E_{1,b}(x) for b > 1 from the Beta-type integral (1/Gamma(b-1)) int_0^1 e^{x s}(1-s)^{b-2} ds.
inline double ml_alpha_one(double b, double x) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    if (b >= 2.0) {
        auto f = [&](double u) { return std::exp(x * (1.0 - u)) * std::pow(u, b - 2.0); };
        return gauss_kronrod<double, 31>::integrate(f, 0.0, 1.0, 15, 1e-15, &err) * rgamma(b - 1.0);
    }
    // endpoint singularity u^{b-2}: substitute u = w^{1/(b-1)}
    const double p = 1.0 / (b - 1.0);
    auto g = [&](double w) { return std::exp(x * (1.0 - std::pow(w, p))) * p; };
    return gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, 15, 1e-15, &err) * rgamma(b - 1.0);
}

}  // namespace detail

/// E_{alpha,beta} and its first derivative on the negative real axis for fixed (alpha, beta).
/// Coefficients and contour nodes are precomputed, so repeated evaluation is cheap.
///
/// Regions: Taylor series for |x| <= 1/2, the algebraic asymptotic series once its
/// (monotone envelope of the) smallest term is below 1e-17 of the sum, and otherwise a
/// Hankel-contour integral on a Talbot-shaped path,
///   E^{(m)}(x) / m! = (1/2 pi i) int e^s s^{alpha-beta} / (s^alpha - x)^{m+1} ds.
class MittagLeffler {
public:
    MittagLeffler(double alpha, double beta) : a_(alpha), b_(beta) {
        if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("Mittag-Leffler alpha must lie in (0,1]");
        series_.resize(kSeries);
        for (int k = 0; k < kSeries; ++k) series_[k] = rgamma(a_ * k + b_);
        if (a_ < 1.0) {
            asym_.resize(kAsym);
            asym_env_.resize(kAsym);
            for (int k = 1; k < kAsym; ++k) {
                asym_[k] = rgamma(b_ - a_ * k);
                const double g = 1.0 - b_ + a_ * k;
                asym_env_[k] = g > 0.5 ? std::lgamma(g) - std::log(pi) : 0.0;
            }
            const double c = std::max(1.0, 0.5 * (b_ - a_));
            for (int level = 0; level < kLevels; ++level) {
                const int n = kBaseNodes << level;
                auto& nodes = contour_[level];
                nodes.reserve(n);
                for (int k = 0; k < n; ++k) {
                    const double th = (k + 0.5) * pi / n;
                    const double sn = std::sin(th), cs = std::cos(th);
                    const double cot = cs / sn;
                    const detail::cplx s{c * th * cot, c * th};
                    const detail::cplx ds{c * (cot - th / (sn * sn)), c};
                    const detail::cplx ls = std::log(s);
                    nodes.push_back({std::exp(a_ * ls), std::exp(s + (a_ - b_) * ls) * ds / static_cast<double>(n)});
                }
            }
        }
    }

    [[nodiscard]] double alpha() const { return a_; }
    [[nodiscard]] double beta() const { return b_; }

    [[nodiscard]] SpecValue value(double x) const { return eval(x, 0); }
    [[nodiscard]] SpecValue derivative(double x) const { return eval(x, 1); }
    double operator()(double x) const { return eval(x, 0).value; }

private:
    static constexpr int kSeries = 160;
    static constexpr int kAsym = 400;
    static constexpr int kLevels = 6;
    static constexpr int kBaseNodes = 32;

    struct Node {
        detail::cplx sa;   // s^alpha
        detail::cplx num;  // e^s s^{alpha-beta} ds / n
    };

    double a_, b_;
    std::vector<double> series_;
    std::vector<double> asym_;
    std::vector<double> asym_env_;
    std::array<std::vector<Node>, kLevels> contour_;

    [[nodiscard]] SpecValue eval(double x, int m) const {
        detail::require_ml_args(a_, x);
        if (std::isinf(x)) return {0.0, false};
        if (m == 0 && x == 0.0) return {series_[0], false};
        if (a_ == 1.0) return alpha_one(x, m);
        if (x >= -0.5) return series(x, m);
        double v = 0.0;
        if (asymptotic(x, m, v)) return {v, false};
        return contour(x, m);
    }

    [[nodiscard]] double coef(int k) const { return k < kSeries ? series_[k] : rgamma(a_ * k + b_); }

    [[nodiscard]] SpecValue series(double x, int m) const {
        CompensatedSum sum;
        double max_term = 0.0;
        double xpow = 1.0;  // x^(k-m)
        int quiet = 0;
        for (int k = m; k < 4000; ++k) {
            const double term = coef(k) * (m == 1 ? k : 1) * xpow;
            sum += term;
            max_term = std::max(max_term, std::abs(term));
            xpow *= x;
            if (a_ * k + b_ > 2.0 && std::abs(term) <= 1e-17 * std::abs(sum.value())) {
                if (++quiet >= 3) break;
            } else {
                quiet = 0;
            }
            if (xpow == 0.0) break;
        }
        const double v = sum.value();
        return {v, max_term * 1e-16 > 1e-13 * std::max(std::abs(v), 1e-300)};
    }

    // E_{a,b}(-y) ~ sum_{k>=1} (-1)^{k+1} y^{-k} / Gamma(b - a k); accepted only when the
    // envelope Gamma(1 - b + a k) y^{-k} / pi of the omitted terms is below 1e-17 of the sum
    // (the coefficients themselves dip near poles and cannot be trusted as a stopping test).
    bool asymptotic(double x, int m, double& out) const {
        const double y = -x;
        if (y <= 1.0) return false;
        const double ly = std::log(y);
        CompensatedSum sum;
        double prev_env = std::numeric_limits<double>::infinity();
        for (int k = 1; k < kAsym; ++k) {
            const double log_env = asym_env_[k] - (k + m) * ly + (m ? std::log(k) : 0.0);
            const double s = std::abs(sum.value());
            if (s > 0.0 && log_env <= std::log(1e-17 * s)) {
                out = sum.value();
                return true;
            }
            if (log_env > prev_env && 1.0 - b_ + a_ * k > 1.0) return false;
            prev_env = log_env;
            // d/dx of -x^{-k} c = k x^{-k-1} c, and x^{-k} = (-1)^k y^{-k}
            const double mag = asym_[k] * std::exp(-(k + m) * ly) * (m ? k : 1);
            sum += (k % 2 ? 1.0 : -1.0) * mag;
        }
        return false;
    }

    [[nodiscard]] double contour_rule(int level, double x, int m) const {
        CompensatedSum sum;
        for (const auto& nd : contour_[level]) {
            detail::cplx den = nd.sa - x;
            if (m == 1) den *= den;
            sum += (nd.num / den).imag();
        }
        return sum.value();
    }

    [[nodiscard]] SpecValue contour(double x, int m) const {
        double prev = contour_rule(1, x, m);
        for (int level = 2; level < kLevels; ++level) {
            const double cur = contour_rule(level, x, m);
            const double change = std::abs(cur - prev);
            if (change <= 2e-15 * std::max(std::abs(cur), 1e-300)) return {cur, false};
            // convergence in the node count is geometric, so the last change bounds the error generously
            if (level == kLevels - 1) return {cur, change > 1e-10 * std::abs(cur)};
            prev = cur;
        }
        return {prev, true};
    }

    [[nodiscard]] SpecValue alpha_one(double x, int m) const {
        if (m == 1) {
            if (x >= -0.5) return series(x, 1);
            // x E'_{1,b} = E_{1,b-1} - (b-1) E_{1,b}
            return {(MittagLeffler(1.0, b_ - 1.0)(x) - (b_ - 1.0) * alpha_one(x, 0).value) / x, false};
        }
        if (b_ == 1.0) return {std::exp(x), false};
        if (x >= -1.0) return series(x, 0);
        if (b_ > 1.0) return {detail::ml_alpha_one(b_, x), false};
        // lift b above 1 with E_{1,b} = 1/Gamma(b) + x E_{1,b+1}
        CompensatedSum acc;
        acc += rgamma(b_);
        double factor = x;
        double b = b_ + 1.0;
        while (b < 1.0) {
            acc += factor * rgamma(b);
            factor *= x;
            b += 1.0;
        }
        acc += factor * (b == 1.0 ? std::exp(x) : detail::ml_alpha_one(b, x));
        return {acc.value(), false};
    }
};

namespace detail {

// Per-thread cache of evaluators for the free-function interface.
inline const MittagLeffler& cached_ml(double alpha, double beta) {
    thread_local std::map<std::pair<double, double>, std::unique_ptr<MittagLeffler>> cache;
    const auto key = std::make_pair(alpha, beta);
    auto it = cache.find(key);
    if (it != cache.end()) return *it->second;
    if (cache.size() >= 256) cache.clear();
    auto [pos, inserted] = cache.emplace(key, std::make_unique<MittagLeffler>(alpha, beta));
    return *pos->second;
}

}  // namespace detail

/// Two-parameter Mittag-Leffler function E_{alpha,beta}(x) on the negative real axis.
inline SpecValue mittag_leffler(double alpha, double beta, double x) {
    detail::require_ml_args(alpha, x);
    if (x == 0.0) return {rgamma(beta), false};
    return detail::cached_ml(alpha, beta).value(x);
}

/// d/dx E_{alpha,beta}(x) for x <= 0.
inline SpecValue mittag_leffler_deriv(double alpha, double beta, double x) {
    detail::require_ml_args(alpha, x);
    return detail::cached_ml(alpha, beta).derivative(x);
}

/// E_{alpha,beta}(x) reached through E_{alpha,beta} = 1/Gamma(beta) + x E_{alpha,beta+alpha}.
inline SpecValue ml_shift(double alpha, double beta, double x) {
    const auto up = mittag_leffler(alpha, beta + alpha, x);
    return {rgamma(beta) + x * up.value, up.degraded};
}

namespace detail {

// W(z) = sum_k (-z)^k / (k! Gamma(1 - beta - alpha k)); phi_{alpha,beta}(t,r) = t^{-beta} W(r t^{-alpha}).
inline SpecValue wright_series(double a, double b, double z) {
    CompensatedSum sum;
    double max_term = 0.0;
    double pw = 1.0;  // (-z)^k / k!
    int quiet = 0;
    for (int k = 0; k < 400; ++k) {
        const double term = pw * rgamma(1.0 - b - a * k);
        sum += term;
        max_term = std::max(max_term, std::abs(term));
        pw *= -z / (k + 1);
        if (k > 2 && std::abs(term) <= 1e-17 * std::abs(sum.value()) && std::abs(pw) < 1e-300 + std::abs(term)) {
            if (++quiet >= 3) break;
        } else {
            quiet = 0;
        }
        if (pw == 0.0) break;
    }
    const double v = sum.value();
    return {v, max_term * 1e-16 > 1e-12 * std::max(std::abs(v), 1e-300)};
}

// Hankel contour: W(z) = (1/2 pi i) int e^{s - z s^a} s^{b-1} ds, Talbot path through the saddle.
inline SpecValue wright_contour(double a, double b, double z) {
    const double saddle = std::pow(a * z, 1.0 / (1.0 - a));
    const double c = std::max(saddle, 1.0);
    auto integrand = [&](double th) {
        const double cot = std::cos(th) / std::sin(th);
        const cplx s{c * th * cot, c * th};
        const cplx ds{c * (cot - th / (std::sin(th) * std::sin(th))), c};
        const cplx ls = std::log(s);
        const cplx e = s - z * std::exp(a * ls) + (b - 1.0) * ls;
        return (std::exp(e) * ds).imag();
    };
    auto rule = [&](int n) {
        CompensatedSum sum;
        for (int k = 0; k < n; ++k) sum += integrand((k + 0.5) * pi / n);
        return sum.value() / n;
    };
    double prev = rule(32);
    for (int n = 64; n <= 8192; n *= 2) {
        const double cur = rule(n);
        if (std::abs(cur - prev) <= 1e-14 * std::abs(cur) || (cur == 0.0 && prev == 0.0)) return {cur, false};
        prev = cur;
    }
    return {prev, true};
}

}  // namespace detail

/// phi_{alpha,beta}(t, r) = t^{-beta} sum_k (-r t^{-alpha})^k / (k! Gamma(1 - beta - alpha k)).
inline SpecValue wright_phi(const FracOrder& ord, double t, double r) {
    ord.validate();
    if (!(t > 0.0)) throw DomainError("wright_phi requires t > 0");
    if (!(r >= 0.0)) throw DomainError("wright_phi requires r >= 0");
    const double z = r * std::pow(t, -ord.alpha);
    const double scale = std::pow(t, -ord.beta);
    SpecValue w;
    if (z <= 1.5) {
        w = detail::wright_series(ord.alpha, ord.beta, z);
    } else {
        w = detail::wright_contour(ord.alpha, ord.beta, z);
    }
    return {scale * w.value, w.degraded};
}

/// Density of the inverse alpha-stable subordinator R_t, phi_{alpha,alpha}(t, r).
inline double inv_subordinator_density(double alpha, double t, double r) {
    const auto v = wright_phi(FracOrder{alpha, alpha}, t, r);
    if (v.value < -1e-12 * std::pow(t, -alpha)) throw NumericError("negative inverse-subordinator density");
    return std::max(v.value, 0.0);
}

/// Constant c of the large-argument envelope |phi_{alpha,beta}| <= N t^{-beta} exp(-c z^{1/(1-alpha)}).
inline double wright_envelope_rate(double alpha) {
    return (1.0 - alpha) * std::pow(alpha, alpha / (1.0 - alpha));
}

/// Argument z = r t^{-alpha} beyond which the exponential envelope is below exp(-budget).
inline double wright_cutoff(double alpha, double budget = 40.0) {
    return std::pow(budget / wright_envelope_rate(alpha), 1.0 - alpha);
}

/// Empirical constants of the two Wright envelopes (t = 1):
///   |W(z)| <= n_large exp(-c z^{1/(1-alpha)})  for z >= 1,
///   |W(z)| <= n_small z (beta integer) or n_small (otherwise)  for z <= 1.
struct WrightEnvelopeFit {
    double n_large = 0.0;
    double n_small = 0.0;
    double z_lo = 1e-4;
    double z_hi = 50.0;
    std::size_t samples = 0;
};

inline WrightEnvelopeFit fit_wright_envelope(const FracOrder& ord, double z_lo = 1e-4, double z_hi = 50.0,
                                             std::size_t n = 200) {
    ord.validate();
    WrightEnvelopeFit fit{0.0, 0.0, z_lo, z_hi, 0};
    const double c = wright_envelope_rate(ord.alpha);
    const bool integer_beta = ord.beta == std::round(ord.beta);
    for (std::size_t i = 0; i < n; ++i) {
        const double z = z_lo * std::pow(z_hi / z_lo, static_cast<double>(i) / static_cast<double>(n - 1));
        const double w = std::abs(wright_phi(ord, 1.0, z).value);
        if (z >= 1.0) {
            const double log_env = -c * std::pow(z, 1.0 / (1.0 - ord.alpha));
            if (w == 0.0 || log_env < -700.0) continue;
            fit.n_large = std::max(fit.n_large, std::exp(std::log(w) - log_env));
        }
        if (z <= 1.0) fit.n_small = std::max(fit.n_small, integer_beta ? w / z : w);
        ++fit.samples;
    }
    return fit;
}

/// Relative residual of  int_0^inf e^{-s r} phi_{alpha,beta}(t,r) dr = t^{alpha-beta} E_{alpha,1-beta+alpha}(-s t^alpha).
inline double laplace_residual(const FracOrder& ord, double t, double s) {
    ord.validate();
    if (!(t > 0.0 && s > 0.0)) throw DomainError("laplace_residual requires t, s > 0");
    const double a = ord.alpha, b = ord.beta;
    const double sigma = s * std::pow(t, a);
    // substitute r = t^alpha z: LHS = t^{alpha-beta} int_0^inf e^{-sigma z} W(z) dz
    auto f = [&](double z) {
        const auto w = wright_phi(FracOrder{a, b}, 1.0, z);
        return std::exp(-sigma * z) * w.value;
    };
    // beyond zmax either the Wright envelope or e^{-sigma z} is below e^{-36} relative to the transform
    const double zmax = std::min(wright_cutoff(a, 36.0), (40.0 + std::max(0.0, std::log(sigma))) / sigma);
    double err = 0.0;
    const double knee = std::min(zmax, 1.0 / std::max(sigma, 1e-300));
    double lhs = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, knee, 12, 1e-12, &err);
    double err2 = 0.0;
    if (zmax > knee)
        lhs += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, knee, zmax, 12, 1e-12, &err2);
    if (!std::isfinite(lhs)) throw NumericError("laplace_residual quadrature failed");
    const double rhs = mittag_leffler(a, 1.0 - b + a, -sigma).value;
    return std::abs(lhs - rhs) / (std::abs(rhs) + 1e-300);
}

}  // namespace fraclab
