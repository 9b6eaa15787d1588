#include <catch_amalgamated.hpp>

#include <cmath>

#include "fraclab/montecarlo.hpp"

using namespace fraclab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

MCConfig config(double alpha, double beta, std::size_t n = 100000, int dim = 1) {
    MCConfig c;
    c.alpha = alpha;
    c.beta = beta;
    c.n = n;
    c.dim = dim;
    return c;
}

std::vector<double> xi_grid() {
    std::vector<double> xi;
    for (int k = 1; k <= 8; ++k) xi.push_back(0.25 * k);
    return xi;
}

}  // namespace

TEST_CASE("counter streams are reproducible and distinct", "[montecarlo]") {
    CounterRng a(5, 17), b(5, 17), c(5, 18), d(6, 17);
    for (int i = 0; i < 100; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
        CHECK(x != d());
    }
    CounterRng u(1, 0);
    double lo = 1.0, hi = 0.0, mean = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double v = u.uniform();
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        mean += v / 100000.0;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK_THAT(mean, WithinAbs(0.5, 3.0 * std::sqrt(1.0 / 12.0 / 100000.0)));
}

TEST_CASE("sampling does not depend on the worker count", "[montecarlo]") {
    auto c = config(0.6, 0.7, 20000, 2);
    const auto one = sample_y(c);
    c.workers = 3;
    const auto three = sample_y(c);
    CHECK(one.data == three.data);
    CHECK(sample_stable_subordinator(0.4, 10000, 9, 1) == sample_stable_subordinator(0.4, 10000, 9, 4));
    c.seed = 2;
    CHECK(sample_y(c).data != one.data);
}

TEST_CASE("stable subordinator Laplace transform", "[montecarlo]") {
    for (double index : {0.3, 0.5, 0.8}) {
        const auto q = sample_stable_subordinator(index, 100000, 11);
        for (double v : q) REQUIRE(v > 0.0);
        for (double lambda : {0.5, 1.0, 2.0})
            CHECK(laplace_statistic(q, lambda).z_score(std::exp(-std::pow(lambda, index))) < 3.0);
    }
}

TEST_CASE("index 1/2 subordinator is the Levy law 1/(4G)", "[montecarlo]") {
    // Q_1 = 1/(4 G), G ~ Gamma(1/2, 1): P(Q_1 <= x) = erfc(1/(2 sqrt(x)))
    auto q = sample_stable_subordinator(0.5, 100000, 4);
    std::sort(q.begin(), q.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
        const double F = std::erfc(0.5 / std::sqrt(q[i]));
        ks = std::max({ks, std::abs((i + 1.0) / q.size() - F), std::abs(static_cast<double>(i) / q.size() - F)});
    }
    CHECK(ks < 1.63 / std::sqrt(static_cast<double>(q.size())));  // 1% Kolmogorov quantile
}

TEST_CASE("inverse stable subordinator", "[montecarlo]") {
    for (double alpha : {0.3, 0.5, 0.8}) {
        const auto r = sample_inverse_stable(alpha, 1.0, 100000, 21);
        for (double s : {0.5, 1.0, 3.0})
            CHECK(laplace_statistic(r, s).z_score(mittag_leffler(alpha, 1.0, -s).value) < 3.0);
        const auto rep = compare_density(r, inverse_stable_table(alpha, 1.0));
        CHECK(rep.l1 < 0.05);
        CHECK(rep.l1 < 2.0 * rep.noise_floor);
    }
    // same stream at t = 4 is 4^alpha times the stream at t = 1
    const auto r1 = sample_inverse_stable(0.6, 1.0, 1000, 3);
    const auto r4 = sample_inverse_stable(0.6, 4.0, 1000, 3);
    for (std::size_t i = 0; i < r1.size(); ++i) CHECK_THAT(r4[i], WithinRel(std::pow(4.0, 0.6) * r1[i], 1e-14));
    CHECK_THROWS_AS(sample_inverse_stable(0.5, 0.0, 10, 1), DomainError);
    CHECK_THROWS_AS(sample_inverse_stable(1.0, 1.0, 10, 1), DomainError);
    CHECK_THROWS_AS(sample_stable_subordinator(0.0, 10, 1), DomainError);
}

TEST_CASE("characteristic function of Y_t is E_alpha(-t^alpha |xi|^{2 beta})", "[montecarlo]") {
    for (auto [alpha, beta] : {std::pair{0.5, 0.5}, std::pair{0.5, 1.0}, std::pair{0.8, 0.5}}) {
        const auto c = config(alpha, beta);
        const auto chk = check_characteristic(sample_y(c), c, xi_grid());
        CHECK(chk.passed());
        CHECK(chk.xi.size() == 8);
    }
    // t = 2 and d = 3 along every axis
    auto c = config(0.7, 0.6, 50000, 3);
    c.t = 2.0;
    const auto y = sample_y(c);
    for (int axis = 0; axis < 3; ++axis)
        for (double xi : {0.3, 1.0}) CHECK(characteristic_statistic(y, xi, axis).z_score(characteristic_exact(c, xi)) < 3.0);
}

TEST_CASE("Y_t is centred and Gaussian given R_t when beta = 1", "[montecarlo]") {
    const auto c = config(0.5, 1.0, 100000, 2);
    const auto y = sample_y(c);
    for (int a = 0; a < 2; ++a) {
        // heavy-tailed coordinates: test the mean of a bounded odd statistic
        const auto m = estimate_mean(y.size(), [&](std::size_t i) { return std::atan(y.coord(i, a)); });
        CHECK(m.z_score(0.0) < 3.0);
    }
    // E|Y|^2 = 2 d E R_t = 2 d t^alpha / Gamma(1 + alpha)
    const auto r2 = estimate_mean(y.size(), [&](std::size_t i) { return y.coord(i, 0) * y.coord(i, 0) + y.coord(i, 1) * y.coord(i, 1); });
    CHECK(r2.z_score(4.0 / std::tgamma(1.5)) < 3.0);
}

TEST_CASE("histogram of |Y_t| matches the kernel profile", "[montecarlo]") {
    for (auto [alpha, beta] : {std::pair{0.5, 0.5}, std::pair{0.5, 1.0}, std::pair{0.8, 0.5}}) {
        const auto c = config(alpha, beta);
        const auto prof = reference_profile(c);
        const auto rep = compare_density(sample_y(c), prof);
        CHECK(rep.l1 < 0.05);
        CHECK(rep.l1 < 1.5 * rep.noise_floor);
        CHECK(rep.ks < 1.63 / std::sqrt(static_cast<double>(c.n)));
        // negative control: samples with a different alpha
        auto wrong = c;
        wrong.alpha = control_alpha(alpha);
        const auto bad = compare_density(sample_y(wrong), prof);
        CHECK(bad.l1 > 3.0 * bad.noise_floor);
    }
}

TEST_CASE("inverse-CDF samples of the profile sit at the noise floor", "[montecarlo]") {
    const auto c = config(0.5, 0.5);
    const auto table = DensityTable::from_profile(reference_profile(c));
    CHECK_THAT(table.total_mass(), WithinAbs(1.0, 1e-4));
    for (std::uint64_t seed : {1, 2, 3}) {
        const auto rep = compare_density(sample_table(table, 100000, seed), table);
        CHECK(rep.l1 < 1.5 * rep.noise_floor);
        CHECK(rep.l1 > 0.5 * rep.noise_floor);
    }
}

TEST_CASE("density table", "[montecarlo]") {
    // exponential density on log nodes
    const auto x = logspace(1e-8, 60.0, 400);
    std::vector<double> f;
    for (double v : x) f.push_back(std::exp(-v));
    const DensityTable t(x, f);
    for (double v : {0.1, 1.0, 5.0}) {
        CHECK_THAT(t.cdf(v), WithinAbs(-std::expm1(-v), 2e-4));
        CHECK_THAT(t.cdf(t.quantile(-std::expm1(-v))), WithinAbs(-std::expm1(-v), 1e-12));
    }
    CHECK(t.cdf(0.0) == 0.0);
    CHECK_THROWS_AS(DensityTable({1.0, 2.0}, {1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(DensityTable({1.0, 0.5, 2.0}, {1.0, 1.0, 1.0}), ConfigError);
    CHECK_THROWS_AS(DensityTable({0.0, 1.0, 2.0}, {1.0, 1.0, 1.0}), ConfigError);
}

TEST_CASE("compare_density arguments", "[montecarlo]") {
    const auto x = logspace(1e-8, 60.0, 400);
    std::vector<double> f;
    for (double v : x) f.push_back(std::exp(-v));
    CHECK_THROWS_AS(compare_density(std::vector<double>{}, DensityTable(x, f)), ConfigError);
    // table covering only [0, 2]: misses e^{-2} of the mass
    const auto short_x = logspace(1e-8, 2.0, 200);
    std::vector<double> short_f;
    for (double v : short_x) short_f.push_back(std::exp(-v));
    CHECK_THROWS_AS(compare_density(std::vector<double>{0.5, 1.0, 1.5}, DensityTable(short_x, short_f)), ConfigError);
    // samples beyond the table
    std::vector<double> far(1000, 100.0);
    CHECK_THROWS_AS(compare_density(far, DensityTable(x, f)), ConfigError);
    CHECK_THROWS_AS(compare_density(Samples{1, {}}, reference_profile(config(0.5, 1.0))), ConfigError);
}

TEST_CASE("configuration validation", "[montecarlo]") {
    auto c = config(0.5, 0.5);
    c.n = 0;
    CHECK_THROWS_AS(sample_y(c), ConfigError);
    CHECK_THROWS_AS(sample_y(config(1.0, 0.5)), ConfigError);
    CHECK_THROWS_AS(sample_y(config(0.5, 1.2)), ConfigError);
    CHECK_THROWS_AS(sample_y(config(0.5, 0.5, 10, 4)), ConfigError);
    c = config(0.5, 0.5);
    c.t = -1.0;
    CHECK_THROWS_AS(sample_y(c), ConfigError);
}
