#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "errors.hpp"
#include "numerics.hpp"
#include "report.hpp"

namespace fraclab {

enum class BernsteinKind { stable, sum_of_stable, log_corrected, relativistic, conjugate_geometric, user };

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

/// A Bernstein function phi(lambda) = b*lambda + (catalog or user part).
struct BernsteinSpec {
    BernsteinKind kind = BernsteinKind::stable;
    double p1 = 1.0;  // beta (all catalog kinds), beta1 for sum_of_stable
    double p2 = 0.0;  // beta2 | gamma | m, unused otherwise
    double drift = 0.0;
    std::function<double(double)> user;  // only for BernsteinKind::user
    std::string user_label = "user";

    static BernsteinSpec stable(double beta, double drift = 0.0) {
        return checked({BernsteinKind::stable, beta, 0.0, drift, {}, {}});
    }
    static BernsteinSpec sum_of_stable(double beta1, double beta2, double drift = 0.0) {
        return checked({BernsteinKind::sum_of_stable, beta1, beta2, drift, {}, {}});
    }
    static BernsteinSpec log_corrected(double beta, double gamma, double drift = 0.0) {
        return checked({BernsteinKind::log_corrected, beta, gamma, drift, {}, {}});
    }
    static BernsteinSpec relativistic(double beta, double m, double drift = 0.0) {
        return checked({BernsteinKind::relativistic, beta, m, drift, {}, {}});
    }
    static BernsteinSpec conjugate_geometric(double beta, double drift = 0.0) {
        return checked({BernsteinKind::conjugate_geometric, beta, 0.0, drift, {}, {}});
    }
    static BernsteinSpec from_callable(std::function<double(double)> f, std::string label = "user",
                                       double drift = 0.0) {
        if (!f) throw ConfigError("user Bernstein function is empty");
        return checked({BernsteinKind::user, 0.0, 0.0, drift, std::move(f), std::move(label)});
    }

    [[nodiscard]] std::string str() const {
        std::string s;
        switch (kind) {
            case BernsteinKind::stable: s = "stable:" + format_double(p1); break;
            case BernsteinKind::sum_of_stable: s = "sum:" + format_double(p1) + "," + format_double(p2); break;
            case BernsteinKind::log_corrected: s = "logcorr:" + format_double(p1) + "," + format_double(p2); break;
            case BernsteinKind::relativistic:
                s = "relativistic:" + format_double(p1) + "," + format_double(p2);
                break;
            case BernsteinKind::conjugate_geometric: s = "conjgeom:" + format_double(p1); break;
            case BernsteinKind::user: s = "user:" + user_label; break;
        }
        if (drift != 0.0) s += ",drift=" + format_double(drift);
        return s;
    }

    /// Pure power law (exactly homogeneous symbol).
    [[nodiscard]] bool is_stable() const { return kind == BernsteinKind::stable && drift == 0.0; }

private:
    static BernsteinSpec checked(BernsteinSpec s) {
        auto need = [](bool ok, const std::string& what) {
            if (!ok) throw ConfigError("Bernstein parameter out of range: " + what);
        };
        need(std::isfinite(s.drift) && s.drift >= 0.0, "drift must be >= 0");
        switch (s.kind) {
            case BernsteinKind::stable: need(s.p1 > 0.0 && s.p1 <= 1.0, "stable beta in (0,1]"); break;
            case BernsteinKind::sum_of_stable:
                need(s.p1 > 0.0 && s.p1 <= 1.0 && s.p2 > 0.0 && s.p2 <= 1.0, "sum beta1, beta2 in (0,1]");
                break;
            case BernsteinKind::log_corrected:
                need(s.p1 > 0.0 && s.p1 < 1.0, "logcorr beta in (0,1)");
                need(s.p2 > -s.p1 && s.p2 < 1.0 - s.p1, "logcorr gamma in (-beta, 1-beta)");
                break;
            case BernsteinKind::relativistic:
                need(s.p1 > 0.0 && s.p1 < 1.0, "relativistic beta in (0,1)");
                need(s.p2 > 0.0 && std::isfinite(s.p2), "relativistic m > 0");
                break;
            case BernsteinKind::conjugate_geometric:
                need(s.p1 > 0.0 && s.p1 < 2.0, "conjgeom beta in (0,2)");
                break;
            case BernsteinKind::user: break;
        }
        return s;
    }
};

/// Parses "stable:0.5", "sum:0.3,0.7", "logcorr:0.5,0.2", "relativistic:0.5,1",
/// "conjgeom:1", each optionally followed by ",drift=b".
inline BernsteinSpec parse_bernstein(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("bad phi '" + text + "', expected kind:params");
    const std::string kind = text.substr(0, colon);
    std::vector<double> params;
    double drift = 0.0;
    std::size_t start = colon + 1;
    while (start <= text.size()) {
        auto comma = text.find(',', start);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(start, comma - start);
        try {
            if (item.rfind("drift=", 0) == 0)
                drift = std::stod(item.substr(6));
            else
                params.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + item + "' in phi '" + text + "'");
        }
        start = comma + 1;
    }
    auto want = [&](std::size_t n) {
        if (params.size() != n)
            throw ConfigError("phi kind '" + kind + "' takes " + std::to_string(n) + " parameter(s): '" + text + "'");
    };
    if (kind == "stable") {
        want(1);
        return BernsteinSpec::stable(params[0], drift);
    }
    if (kind == "sum") {
        want(2);
        return BernsteinSpec::sum_of_stable(params[0], params[1], drift);
    }
    if (kind == "logcorr") {
        want(2);
        return BernsteinSpec::log_corrected(params[0], params[1], drift);
    }
    if (kind == "relativistic") {
        want(2);
        return BernsteinSpec::relativistic(params[0], params[1], drift);
    }
    if (kind == "conjgeom") {
        want(1);
        return BernsteinSpec::conjugate_geometric(params[0], drift);
    }
    throw ConfigError("unknown phi kind '" + kind + "'");
}

namespace detail {

template <class T>
T catalog_value(const BernsteinSpec& s, const T& lam) {
    using std::expm1;
    using std::log;
    using std::log1p;
    using std::pow;
    switch (s.kind) {
        case BernsteinKind::stable: return pow(lam, s.p1);
        case BernsteinKind::sum_of_stable: return pow(lam, s.p1) + pow(lam, s.p2);
        case BernsteinKind::log_corrected: return pow(lam, s.p1) * pow(log1p(lam), s.p2);
        case BernsteinKind::relativistic: {
            const double c = std::pow(s.p2, 1.0 / s.p1);
            return s.p2 * expm1(s.p1 * log1p(lam * (1.0 / c)));
        }
        case BernsteinKind::conjugate_geometric: return lam / log1p(pow(lam, 0.5 * s.p1));
        case BernsteinKind::user: break;
    }
    throw CapabilityError("closed form unavailable for user-defined Bernstein function");
}

inline void require_positive(double lambda) {
    if (!(lambda > 0.0)) throw DomainError("Bernstein function evaluated at non-positive lambda");
}

}  // namespace detail

inline double eval(const BernsteinSpec& s, double lambda) {
    detail::require_positive(lambda);
    if (std::isinf(lambda)) return lambda;
    const double base = s.kind == BernsteinKind::user ? s.user(lambda) : detail::catalog_value(s, lambda);
    return s.drift * lambda + base;
}

/// Highest derivative order supported for catalog kinds (exact Taylor jets)
/// and for user kinds (finite differences).
inline constexpr int max_catalog_deriv = 6;
inline constexpr int max_user_deriv = 3;

namespace detail {

// lambda^n phi^(n)(lambda) for a user spec from central differences of
// g(s) = phi(e^s); lambda^n D^n = theta(theta-1)...(theta-n+1), theta = d/ds.
inline double user_scaled_deriv(const BernsteinSpec& s, int n, double lambda) {
    const double h = 1e-3;
    const double s0 = std::log(lambda);
    double g[7];
    for (int k = -3; k <= 3; ++k) g[k + 3] = s.user(std::exp(s0 + k * h));
    auto G = [&](int k) { return g[k + 3]; };
    const double d1 = (-G(2) + 8 * G(1) - 8 * G(-1) + G(-2)) / (12 * h);
    const double d2 = (-G(2) + 16 * G(1) - 30 * G(0) + 16 * G(-1) - G(-2)) / (12 * h * h);
    const double d3 = (-G(3) + 8 * G(2) - 13 * G(1) + 13 * G(-1) - 8 * G(-2) + G(-3)) / (8 * h * h * h);
    switch (n) {
        case 1: return d1;
        case 2: return d2 - d1;
        case 3: return d3 - 3 * d2 + 2 * d1;
        default: break;
    }
    throw CapabilityError("finite-difference derivative of order " + std::to_string(n) +
                          " not supported for user-defined Bernstein functions (max " +
                          std::to_string(max_user_deriv) + ")");
}

}  // namespace detail

/// n-th derivative phi^(n)(lambda).
inline double eval_deriv(const BernsteinSpec& s, int n, double lambda) {
    if (n < 1) throw DomainError("derivative order must be >= 1");
    detail::require_positive(lambda);
    const double lin = n == 1 ? s.drift : 0.0;
    if (s.kind == BernsteinKind::user) {
        if (n > max_user_deriv)
            throw CapabilityError("finite-difference derivative of order " + std::to_string(n) +
                                  " not supported for user-defined Bernstein functions (max " +
                                  std::to_string(max_user_deriv) + ")");
        return lin + detail::user_scaled_deriv(s, n, lambda) / std::pow(lambda, n);
    }
    if (n > max_catalog_deriv)
        throw CapabilityError("derivative order " + std::to_string(n) + " exceeds supported maximum " +
                              std::to_string(max_catalog_deriv));
    if (n == 1) return lin + detail::catalog_value(s, Jet<1>::variable(lambda)).derivative(1);
    const auto jet = detail::catalog_value(s, Jet<max_catalog_deriv>::variable(lambda));
    return lin + jet.derivative(n);
}

/// phi(lambda) and phi'(lambda) in one pass.
inline std::pair<double, double> eval_with_deriv(const BernsteinSpec& s, double lambda) {
    detail::require_positive(lambda);
    if (s.kind == BernsteinKind::user) return {eval(s, lambda), eval_deriv(s, 1, lambda)};
    const auto jet = detail::catalog_value(s, Jet<1>::variable(lambda));
    return {jet.derivative(0) + s.drift * lambda, jet.derivative(1) + s.drift};
}

/// phi^{-1}(y) by bracketed root finding on log phi(e^s) = log y.
inline double inverse(const BernsteinSpec& s, double y, double rtol = 1e-12) {
    if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("inverse requires finite y > 0");
    const double ly = std::log(y);
    auto f = [&](double u) { return std::log(eval(s, std::exp(u))) - ly; };
    double lo = 0.0, hi = 0.0;
    double flo = f(0.0), fhi = flo;
    const double step = std::log(4.0);
    const double limit = 700.0;
    if (flo == 0.0) return 1.0;
    if (flo < 0.0) {
        while (fhi < 0.0) {
            lo = hi;
            flo = fhi;
            hi += step;
            if (hi > limit) throw NumericError("inverse: failed to bracket y=" + format_double(y));
            fhi = f(hi);
        }
    } else {
        while (flo > 0.0) {
            hi = lo;
            fhi = flo;
            lo -= step;
            if (lo < -limit) throw NumericError("inverse: failed to bracket y=" + format_double(y));
            flo = f(lo);
        }
    }
    if (fhi == 0.0) return std::exp(hi);
    if (flo == 0.0) return std::exp(lo);
    std::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); };
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
    const double lambda = std::exp(0.5 * (a + b));
    if (std::abs(eval(s, lambda) - y) > rtol * y) throw NumericError("inverse: tolerance not reached");
    return lambda;
}

struct ScalingReport {
    double delta0_hat = 0.0;
    double c_hat = 0.0;
    Range grid;
    double max_violation = 0.0;
    bool satisfies_assumption = false;  // false when the inf slope is <= 0
};

/// Empirical lower scaling exponent: c (R/r)^delta <= phi(R)/phi(r) <= R/r on all grid pairs.
inline ScalingReport estimate_scaling(const BernsteinSpec& s, const Range& grid = Range::log(1e-6, 1e6, 64)) {
    if (!(grid.logarithmic && grid.n >= 2 && std::log10(grid.hi / grid.lo) >= 8.0 - 1e-9))
        throw ConfigError("scaling grid must be logarithmic and span at least 8 decades");
    const auto x = grid.points();
    std::vector<double> lphi(x.size()), lx(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        lphi[i] = std::log(eval(s, x[i]));
        lx[i] = std::log(x[i]);
    }
    double slope_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            slope_min = std::min(slope_min, (lphi[j] - lphi[i]) / (lx[j] - lx[i]));
    ScalingReport rep;
    rep.grid = grid;
    rep.satisfies_assumption = slope_min > 0.0;
    rep.delta0_hat = std::min(slope_min, 1.0);
    if (!rep.satisfies_assumption) rep.delta0_hat = std::numeric_limits<double>::min();
    double log_c = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j)
            log_c = std::min(log_c, (lphi[j] - lphi[i]) - rep.delta0_hat * (lx[j] - lx[i]));
    rep.c_hat = std::exp(log_c);
    double viol = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double lr = lphi[j] - lphi[i];
            const double dx = lx[j] - lx[i];
            viol = std::max(viol, log_c + rep.delta0_hat * dx - lr);
            viol = std::max(viol, lr - dx);
        }
    }
    rep.max_violation = std::expm1(viol);
    return rep;
}

/// sup over a log grid of lambda^n |phi^(n)(lambda)| / phi(lambda); the refined sup is
/// taken on the grid extended to twice its logarithmic span.
inline BoundReport check_deriv_bound(const BernsteinSpec& s, int n, const Range& grid = Range::log(1e-6, 1e6, 64)) {
    if (n < 1) throw DomainError("derivative order must be >= 1");
    auto sweep = [&](const std::vector<double>& pts) {
        SupTracker sup;
        for (double lam : pts) sup.add(std::pow(lam, n) * std::abs(eval_deriv(s, n, lam)) / eval(s, lam), 0.0, lam);
        return sup;
    };
    const double centre = std::sqrt(grid.lo * grid.hi);
    const Range ext = Range::log(centre * (grid.lo / centre) * (grid.lo / centre),
                                 centre * (grid.hi / centre) * (grid.hi / centre), 2 * grid.n - 1);
    const auto base = sweep(grid.points());
    const auto wide = sweep(ext.points());
    BoundReport rep;
    rep.name = "bernstein_derivative_bound";
    rep.formula = "lambda^n |phi^(n)(lambda)| <= N(n) phi(lambda), n=" + std::to_string(n);
    rep.sup_ratio = base.result();
    rep.arg_r = base.at_r;
    rep.grid = grid.str();
    rep.refined_sup = wide.result();
    rep.drift_tolerance = 0.10;
    rep.set_drift();
    return rep;
}

/// int_{1/lambda}^inf r^{-1} phi(r^{-2}) dr / phi(lambda^2), via r = e^u / lambda.
inline double tail_integral_bound(const BernsteinSpec& s, double lambda) {
    detail::require_positive(lambda);
    const double l2 = lambda * lambda;
    const double denom = eval(s, l2);
    auto f = [&](double u) {
        const double arg = l2 * std::exp(-2.0 * u);
        if (!(arg > 1e-300)) return 0.0;
        return eval(s, arg) / denom;
    };
    thread_local boost::math::quadrature::exp_sinh<double> integrator;
    double err = 0.0;
    const double val = integrator.integrate(f, 1e-10, &err);
    if (!std::isfinite(val) || err > 1e-6 * std::abs(val)) throw NumericError("tail integral did not converge");
    return val;
}

/// sup over a lambda grid of tail_integral_bound, with the refined grid.
inline BoundReport check_tail_integral_bound(const BernsteinSpec& s, const Range& grid = Range::log(1e-2, 1e2, 64)) {
    auto sweep = [&](const Range& g) {
        SupTracker sup;
        for (double lam : g.points()) sup.add(tail_integral_bound(s, lam), 0.0, lam);
        return sup;
    };
    BoundReport rep;
    rep.name = "tail_integral_bound";
    rep.formula = "int_{1/lambda}^inf r^-1 phi(r^-2) dr <= N phi(lambda^2)";
    rep.grid = "lambda " + grid.str() + ", phi=" + s.str();
    const auto base = sweep(grid);
    rep.sup_ratio = base.result();
    rep.arg_r = base.at_r;
    rep.refined_sup = sweep(grid.refined()).result();
    rep.set_drift();
    return rep;
}

}  // namespace fraclab
