#include <catch_amalgamated.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <fraclab/specfun.hpp>

using namespace fraclab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using mp = boost::multiprecision::mpfr_float;

mp mp_rgamma(const mp& x) {
    if (x <= 0 && x == floor(x)) return mp(0);
    return 1 / boost::multiprecision::tgamma(x);
}

// Power series of E_{a,b}(x) in enough digits to absorb the cancellation at x < 0.
double ml_oracle(double a, double b, double x) {
    const double y = std::max(-x, 1e-3);
    const unsigned digits = static_cast<unsigned>(std::pow(y, 1.0 / a) / 2.3) + 40;
    mp::default_precision(digits);
    const mp X = x, A = a, B = b;
    mp sum = 0, power = 1;
    for (int k = 0; k < 200000; ++k) {
        const mp arg = A * k + B;
        const mp term = power * mp_rgamma(arg);
        sum += term;
        if (k > 10 && arg > 2 && abs(term) < abs(sum) * mp(1e-40)) break;
        power *= X;
    }
    return sum.convert_to<double>();
}

// Series of W(z) = sum (-z)^k / (k! Gamma(1 - b - a k)), truncated far below the exponential envelope.
double wright_oracle(double a, double b, double z) {
    const double target = -wright_envelope_rate(a) * std::pow(z, 1.0 / (1.0 - a)) - 10.0;
    double lmax = 0.0;
    int terms = 0;
    for (int k = 1; k < 100000; ++k) {
        const double lt = k * std::log(z) - std::lgamma(k + 1.0) + std::lgamma(a * k + b + 1.0);
        lmax = std::max(lmax, lt);
        if (lt < target - 100.0 && k > 5) {
            terms = k;
            break;
        }
    }
    mp::default_precision(static_cast<unsigned>((lmax - target) / 2.3) + 40);
    const mp Z = z, A = a, B = b;
    mp sum = 0, pw = 1;
    for (int k = 0; k <= terms; ++k) {
        sum += pw * mp_rgamma(1 - B - A * k);
        pw *= -Z / (k + 1);
    }
    return sum.convert_to<double>();
}

}  // namespace

TEST_CASE("Mittag-Leffler closed forms", "[specfun]") {
    CHECK_THAT(mittag_leffler(1.0, 1.0, -1.0).value, WithinRel(std::exp(-1.0), 1e-15));
    CHECK(mittag_leffler(0.5, 1.0, 0.0).value == 1.0);
    const double erfc_identity = std::exp(1.0) * boost::math::erfc(1.0);
    CHECK_THAT(mittag_leffler(0.5, 1.0, -1.0).value, WithinRel(erfc_identity, 1e-14));
    CHECK_THAT(ml_oracle(0.5, 1.0, -1.0), WithinRel(erfc_identity, 1e-14));
    // E_{1/2,1}(-x) = e^{x^2} erfc(x) deep into the asymptotic region
    for (double x : {0.2, 2.0, 5.0, 12.0, 25.0}) {
        INFO("x=" << x);
        CHECK_THAT(mittag_leffler(0.5, 1.0, -x).value, WithinRel(boost::math::erfc(x) * std::exp(x * x), 1e-12));
    }
    // E_{1,2}(x) = (e^x - 1)/x
    CHECK_THAT(mittag_leffler(1.0, 2.0, -3.0).value, WithinRel(-std::expm1(-3.0) / 3.0, 1e-14));
}

TEST_CASE("exponential case on [0,10]", "[specfun]") {
    for (double x : linspace(0.0, 10.0, 201)) CHECK(std::abs(mittag_leffler(1.0, 1.0, -x).value - std::exp(-x)) < 1e-12);
}

TEST_CASE("Mittag-Leffler against extended-precision series", "[specfun]") {
    double worst = 0.0;
    for (double a : {0.2, 0.3, 0.5, 0.7, 0.8, 0.95})
        for (double b : {-0.5, 0.0, 0.5, 1.0, 1.5, 2.5})
            for (double y : {0.1, 0.7, 2.0, 5.0, 10.0, 30.0}) {
                if (std::pow(y, 1.0 / a) > 400.0) continue;
                const double o = ml_oracle(a, b, -y);
                const auto v = mittag_leffler(a, b, -y);
                INFO("a=" << a << " b=" << b << " y=" << y);
                CHECK_FALSE(v.degraded);
                const double e = std::abs(v.value - o) / std::max(std::abs(o), 1e-300);
                CHECK(e < 1e-10);
                worst = std::max(worst, e);
            }
    CHECK(worst < 1e-12);
}

TEST_CASE("recurrence residual on a 3-D grid", "[specfun]") {
    int count = 0;
    for (double a : linspace(0.1, 0.95, 10))
        for (double b : linspace(-0.5, 3.0, 10))
            for (double y : logspace(1e-3, 1e3, 12)) {
                const double x = -y;
                const double e = mittag_leffler(a, b, x).value;
                const double res = std::abs(e - rgamma(b) - x * mittag_leffler(a, b + a, x).value);
                INFO("a=" << a << " b=" << b << " x=" << x);
                CHECK(res < 1e-10 * (1.0 + std::abs(e)));
                ++count;
            }
    CHECK(count >= 1000);
}

TEST_CASE("ml_shift", "[specfun]") {
    CHECK(ml_shift(0.5, 1.0, 0.0).value == 1.0);
    CHECK_THAT(ml_shift(0.5, 0.0, -1.0).value, WithinRel(-mittag_leffler(0.5, 0.5, -1.0).value, 1e-14));
    CHECK_THAT(ml_shift(0.7, 1.7, -3.0).value, WithinRel(mittag_leffler(0.7, 1.7, -3.0).value, 1e-10));
    CHECK_THAT(ml_shift(0.7, 1.7, -3.0).value, WithinRel(ml_oracle(0.7, 1.7, -3.0), 1e-10));
    CHECK_THROWS_AS(ml_shift(0.5, 1.0, 1.0), DomainError);
}

TEST_CASE("derivative and monotone decay", "[specfun]") {
    for (double a : {0.3, 0.5, 0.8})
        for (double b : {0.5, 1.0, 1.5})
            for (double x : {-0.2, -1.0, -4.0, -40.0}) {
                const double h = 1e-5 * std::abs(x);
                const double fd =
                    (mittag_leffler(a, b, x + h).value - mittag_leffler(a, b, x - h).value) / (2.0 * h);
                INFO("a=" << a << " b=" << b << " x=" << x);
                CHECK_THAT(mittag_leffler_deriv(a, b, x).value, WithinRel(fd, 1e-6));
            }
    // d/dx E_{1,1} = exp
    CHECK_THAT(mittag_leffler_deriv(1.0, 1.0, -2.0).value, WithinRel(std::exp(-2.0), 1e-13));
    for (double a : {0.3, 0.5, 0.8}) {
        double prev = 1.0;
        for (double x : linspace(0.01, 200.0, 400)) {
            const double e = mittag_leffler(a, 1.0, -x).value;
            CHECK(e > 0.0);
            CHECK(e < prev);
            prev = e;
        }
    }
}

TEST_CASE("argument validation", "[specfun]") {
    CHECK_THROWS_AS(mittag_leffler(0.5, 1.0, 0.1), DomainError);
    CHECK_THROWS_AS(mittag_leffler(1.5, 1.0, -1.0), DomainError);
    CHECK_THROWS_AS(FracOrder({1.5, 0.5}).validate(), ConfigError);
    CHECK_THROWS_AS(wright_phi(FracOrder{0.5, 0.5}, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS(wright_phi(FracOrder{0.5, 0.5}, 1.0, -1.0), DomainError);
}

TEST_CASE("Wright function values", "[specfun]") {
    CHECK_THAT(wright_phi(FracOrder{0.5, 0.5}, 1.0, 0.0).value, WithinRel(1.0 / std::sqrt(pi), 1e-15));
    CHECK(wright_phi(FracOrder{0.5, 1.0}, 1.0, 0.0).value == 0.0);
    // phi_{1/2,1/2}(1, r) is the M-Wright density e^{-r^2/4}/sqrt(pi)
    CHECK_THAT(wright_phi(FracOrder{0.5, 0.5}, 1.0, 1.0).value, WithinRel(std::exp(-0.25) / std::sqrt(pi), 1e-14));
    CHECK_THAT(wright_oracle(0.5, 0.5, 1.0), WithinRel(std::exp(-0.25) / std::sqrt(pi), 1e-14));
    for (double r : {0.01, 0.5, 1.4, 1.6, 3.0, 7.0, 15.0, 30.0}) {
        INFO("r=" << r);
        CHECK_THAT(wright_phi(FracOrder{0.5, 0.5}, 1.0, r).value,
                   WithinRel(std::exp(-0.25 * r * r) / std::sqrt(pi), 1e-12));
    }
    double worst = 0.0;
    for (double a : {0.1, 0.3, 0.5, 0.8, 0.9})
        for (double b : {0.1, 0.5, 0.9, 1.0, 1.3, 1.8})
            for (double z : {0.3, 1.0, 1.6, 4.0, 12.0}) {
                if (wright_envelope_rate(a) * std::pow(z, 1.0 / (1.0 - a)) > 600.0) continue;
                const double o = wright_oracle(a, b, z);
                const auto v = wright_phi(FracOrder{a, b}, 1.0, z);
                INFO("a=" << a << " b=" << b << " z=" << z);
                CHECK_FALSE(v.degraded);
                const double e = std::abs(v.value - o) / std::max(std::abs(o), 1e-300);
                CHECK(e < 1e-10);
                worst = std::max(worst, e);
            }
    CHECK(worst < 1e-12);
}

TEST_CASE("inverse subordinator density", "[specfun]") {
    CHECK_THAT(inv_subordinator_density(0.5, 1.0, 0.0), WithinRel(0.5641895835477563, 1e-14));
    for (double a : {0.3, 0.5, 0.8}) {
        auto f = [&](double r) { return inv_subordinator_density(a, 1.0, r); };
        const double zmax = wright_cutoff(a, 40.0);
        const double mass = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, zmax, 15, 1e-13);
        INFO("alpha=" << a);
        CHECK_THAT(mass, WithinAbs(1.0, 1e-11));
    }
    // R_4 = 4^alpha R_1 in law
    for (double r : {0.1, 0.7, 2.0, 5.0}) {
        const double scaled = std::pow(4.0, -0.5) * inv_subordinator_density(0.5, 1.0, r * std::pow(4.0, -0.5));
        CHECK_THAT(inv_subordinator_density(0.5, 4.0, r), WithinRel(scaled, 1e-13));
    }
}

TEST_CASE("Laplace transform identity", "[specfun]") {
    CHECK(laplace_residual(FracOrder{0.5, 0.5}, 1.0, 1e-9) < 1e-8);
    CHECK(laplace_residual(FracOrder{0.5, 1.0}, 1.0, 1.0) < 1e-8);
    CHECK(laplace_residual(FracOrder{0.8, 1.8}, 2.0, 5.0) < 1e-6);
    for (double a : {0.3, 0.5, 0.8})
        for (double b : {a, 1.0, 1.0 + a})
            for (double sigma : logspace(1e-2, 1e2, 9)) {
                INFO("a=" << a << " b=" << b << " s t^a=" << sigma);
                CHECK(laplace_residual(FracOrder{a, b}, 1.0, sigma) < 1e-6);
            }
    CHECK_THROWS_AS(laplace_residual(FracOrder{0.5, 0.5}, 1.0, 0.0), DomainError);
}

TEST_CASE("Wright envelopes with one fitted constant", "[specfun]") {
    for (double a : {0.3, 0.5, 0.8})
        for (double b : {a, 1.0, 1.0 + a}) {
            const auto fit = fit_wright_envelope(FracOrder{a, b});
            INFO("a=" << a << " b=" << b);
            CHECK(std::isfinite(fit.n_large));
            CHECK(std::isfinite(fit.n_small));
            CHECK(fit.n_large > 0.0);
            CHECK(fit.n_small > 0.0);
            // the constant does not grow when the sweep is refined
            const auto fine = fit_wright_envelope(FracOrder{a, b}, 1e-4, 50.0, 399);
            CHECK(fine.n_large <= 1.05 * fit.n_large);
            CHECK(fine.n_small <= 1.05 * fit.n_small);
        }
}
