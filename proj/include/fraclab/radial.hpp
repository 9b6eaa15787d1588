#pragma once

#include <cmath>
#include <limits>
#include <memory>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "errors.hpp"
#include "numerics.hpp"

namespace fraclab {

/// Result of one radial Fourier inversion.
struct RadialValue {
    double value = 0.0;
    double rel_error = 0.0;  // a-posteriori estimate from the quadrature
};

/// Inverse Fourier transform of a radial symbol g(|xi|) in R^d, evaluated at radius r:
///   f(r) = (2 pi)^{-d/2} r^{1-d/2} int_0^inf g(rho) J_{d/2-1}(r rho) rho^{d/2} d rho.
///
/// Odd dimensions reduce to sine/cosine transforms handled by Ooura's double-exponential
/// rule; even dimensions integrate the symbol derivative against J_{d/2} between its zeros with
/// epsilon extrapolation.
/// An instance keeps quadrature node tables and is not meant to be shared across threads.
class RadialInverter {
public:
    explicit RadialInverter(int dim, double rtol = 1e-12) : dim_(dim), rtol_(rtol) {
        if (dim < 1 || dim > 5) throw CapabilityError("radial inversion supports dimensions 1..5");
        cos_ = std::make_unique<boost::math::quadrature::ooura_fourier_cos<double>>(rtol, 8);
        sin_ = std::make_unique<boost::math::quadrature::ooura_fourier_sin<double>>(rtol, 8);
    }

    [[nodiscard]] int dim() const { return dim_; }

    /// f(0) = (2 pi)^{-d} |S^{d-1}| int_0^inf g(rho) rho^{d-1} d rho; +inf if the integral diverges.
    template <class G>
    double at_origin(G&& g) const {
        auto f = [&](double rho) {
            const double v = g(rho);
            return v == 0.0 ? 0.0 : v * std::pow(rho, dim_ - 1);
        };
        boost::math::quadrature::exp_sinh<double> integrator;
        double err = 0.0, l1 = 0.0;
        double v;
        try {
            v = integrator.integrate(f, 1e-12, &err, &l1);
        } catch (const std::exception&) {
            return std::numeric_limits<double>::infinity();
        }
        if (!std::isfinite(v) || err > 1e-6 * std::abs(v)) return std::numeric_limits<double>::infinity();
        return v * sphere_area(dim_) / std::pow(2.0 * pi, dim_);
    }

    /// f(r) for r > 0 and odd d from the symbol alone.
    template <class G>
    RadialValue operator()(G&& g, double r) {
        if (!(r > 0.0)) throw DomainError("radial inversion requires r > 0; use at_origin");
        switch (dim_) {
            case 1: {
                const auto [v, e] = cos_->integrate(g, r);
                return {v / pi, e};
            }
            case 3: {
                auto h = [&](double rho) { return rho * g(rho); };
                const auto [v, e] = sin_->integrate(h, r);
                return {v / (2.0 * pi * pi * r), e};
            }
            case 5: {
                // J_{3/2}: (1/(4 pi^3 r^3)) int g (rho sin(r rho) - r rho^2 cos(r rho)) d rho
                auto hs = [&](double rho) { return rho * g(rho); };
                auto hc = [&](double rho) { return rho * rho * g(rho); };
                const auto [vs, es] = sin_->integrate(hs, r);
                const auto [vc, ec] = cos_->integrate(hc, r);
                const double v = (vs - r * vc) / (4.0 * pi * pi * pi * r * r * r);
                return {v, (es * std::abs(vs) + ec * std::abs(r * vc)) / std::max(std::abs(vs - r * vc), 1e-300)};
            }
            default: throw CapabilityError("even dimensions need the symbol derivative; use hankel_by_parts");
        }
    }

    /// d = 3 variant for slowly decaying symbols: integration by parts gives
    ///   f(r) = (1/(2 pi^2 r^2)) int cos(r rho) (g + rho g') d rho,
    /// whose integrand decays like g itself; `h` must return g + rho g'.
    template <class H>
    RadialValue dim3_by_parts(H&& h, double r) {
        if (dim_ != 3) throw CapabilityError("dim3_by_parts requires d = 3");
        if (!(r > 0.0)) throw DomainError("radial inversion requires r > 0; use at_origin");
        const auto [v, e] = cos_->integrate(h, r);
        return {v / (2.0 * pi * pi * r * r), e};
    }

    /// Even d: f(r) from the symbol derivative g'(rho) alone (one integration by parts against
    /// rho^{nu+1} J_nu); requires g(rho) rho^{nu+1/2} -> 0.
    template <class GP>
    RadialValue hankel_by_parts(GP&& gp, double r) {
        if (dim_ % 2 != 0) throw CapabilityError("hankel_by_parts requires an even dimension");
        if (!(r > 0.0)) throw DomainError("radial inversion requires r > 0; use at_origin");
        return bessel_panels(gp, r);
    }

private:
    int dim_;
    double rtol_;
    std::unique_ptr<boost::math::quadrature::ooura_fourier_cos<double>> cos_;
    std::unique_ptr<boost::math::quadrature::ooura_fourier_sin<double>> sin_;

    // Even dimensions, after one integration by parts:
    //   int g J_nu(r rho) rho^{nu+1} d rho = -(1/r) int g'(rho) J_{nu+1}(r rho) rho^{nu+1} d rho,
    // integrated between consecutive zeros of J_{nu+1} with 20-point Gauss-Legendre per panel and Wynn
    // epsilon on the partial sums; accepted once two successive extrapolations agree.
    template <class GP>
    RadialValue bessel_panels(GP&& gp, double r) {
        const double nu = 0.5 * dim_ - 1.0;
        const double mu = nu + 1.0;
        auto integrand = [&](double rho) {
            const double v = gp(rho);
            return v == 0.0 ? 0.0 : v * boost::math::cyl_bessel_j(mu, r * rho) * std::pow(rho, mu);
        };
        auto zero = [&](int k) {
            if (k <= 40) return boost::math::cyl_bessel_j_zero(mu, k) / r;
            // McMahon's expansion
            const double b = (k + 0.5 * mu - 0.25) * pi;
            return (b - (4.0 * mu * mu - 1.0) / (8.0 * b)) / r;
        };
        const double scale = -std::pow(2.0 * pi, -0.5 * dim_) * std::pow(r, -nu) / r;
        std::vector<double> partial;
        CompensatedSum sum;
        double biggest = 0.0;
        int quiet = 0;
        const int max_panels = 6000;
        double last = 0.0;
        double prev_estimate = std::numeric_limits<double>::quiet_NaN();
        // graded sub-panels on the first lobe capture variation of g' near the origin
        const double first = zero(1);
        std::vector<double> breaks{0.0};
        for (double f = 1e-8; f < 1.0; f *= 4.0) breaks.push_back(first * f);
        breaks.push_back(first);
        for (std::size_t i = 0; i + 1 < breaks.size(); ++i) sum += gauss_legendre<20>(integrand, breaks[i], breaks[i + 1]);
        double left = first;
        partial.push_back(sum.value());
        for (int k = 2; k <= max_panels; ++k) {
            const double right = zero(k);
            last = gauss_legendre<20>(integrand, left, right);
            sum += last;
            left = right;
            partial.push_back(sum.value());
            biggest = std::max(biggest, std::abs(sum.value()));
            if (std::abs(last) <= 1e-17 * std::abs(sum.value())) {
                if (++quiet >= 4) break;
            } else {
                quiet = 0;
            }
            if (partial.size() >= 10 && k % 2 == 0) {
                const std::size_t n = std::min<std::size_t>(partial.size(), 20);
                const auto ex = wynn_epsilon(std::vector<double>(partial.end() - n, partial.end()));
                const double floor = std::max(rtol_ * std::abs(ex.value), 1e-15 * biggest);
                if (std::abs(ex.value - prev_estimate) <= floor && ex.error <= floor)
                    return {ex.value * scale, std::max(ex.error, std::abs(ex.value - prev_estimate)) /
                                                  std::max(std::abs(ex.value), 1e-300)};
                prev_estimate = ex.value;
            }
        }
        const double v = sum.value();
        return {v * scale, std::abs(last) / std::max(std::abs(v), 1e-300)};
    }
};

}  // namespace fraclab
