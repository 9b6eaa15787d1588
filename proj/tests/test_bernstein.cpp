#include <catch_amalgamated.hpp>

#include <boost/math/differentiation/finite_difference.hpp>

#include <fraclab/bernstein.hpp>

using namespace fraclab;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::vector<BernsteinSpec> catalog() {
    return {BernsteinSpec::stable(0.5), BernsteinSpec::sum_of_stable(0.3, 0.7), BernsteinSpec::log_corrected(0.5, 0.2),
            BernsteinSpec::relativistic(0.5, 1.0), BernsteinSpec::conjugate_geometric(1.0)};
}

}  // namespace

TEST_CASE("closed-form values", "[bernstein]") {
    CHECK_THAT(eval(BernsteinSpec::stable(0.5), 4.0), WithinRel(2.0, 1e-15));
    CHECK_THAT(eval(BernsteinSpec::stable(1.0), 7.0), WithinRel(7.0, 1e-15));
    CHECK_THAT(eval(BernsteinSpec::relativistic(0.5, 1.0), 3.0), WithinRel(1.0, 1e-14));
    CHECK_THAT(eval(BernsteinSpec::sum_of_stable(0.3, 0.7), 2.0),
               WithinRel(std::pow(2.0, 0.3) + std::pow(2.0, 0.7), 1e-15));
    CHECK_THAT(eval(BernsteinSpec::log_corrected(0.5, 0.2), 3.0),
               WithinRel(std::sqrt(3.0) * std::pow(std::log(4.0), 0.2), 1e-14));
    CHECK_THAT(eval(BernsteinSpec::conjugate_geometric(1.0), 4.0), WithinRel(4.0 / std::log(3.0), 1e-14));
    CHECK_THAT(eval(BernsteinSpec::stable(0.5, 2.0), 4.0), WithinRel(10.0, 1e-15));
    // relativistic (lambda + m^{1/beta})^beta - m keeps accuracy at tiny lambda
    const double lam = 1e-12;
    CHECK_THAT(eval(BernsteinSpec::relativistic(0.5, 1.0), lam), WithinRel(0.5 * lam, 1e-9));
}

TEST_CASE("domain and parameter validation", "[bernstein]") {
    CHECK_THROWS_AS(eval(BernsteinSpec::stable(0.5), 0.0), DomainError);
    CHECK_THROWS_AS(eval(BernsteinSpec::stable(0.5), -1.0), DomainError);
    CHECK_THROWS_AS(BernsteinSpec::stable(1.2), ConfigError);
    CHECK_THROWS_AS(BernsteinSpec::log_corrected(0.5, 0.6), ConfigError);
    CHECK_THROWS_AS(BernsteinSpec::log_corrected(0.5, -0.5), ConfigError);
    CHECK_THROWS_AS(BernsteinSpec::relativistic(0.5, 0.0), ConfigError);
    CHECK_THROWS_AS(BernsteinSpec::conjugate_geometric(2.0), ConfigError);
    CHECK_THROWS_AS(BernsteinSpec::stable(0.5, -1.0), ConfigError);
}

TEST_CASE("shorthand parsing round-trips", "[bernstein]") {
    for (const auto& s : catalog()) {
        const auto back = parse_bernstein(s.str());
        CHECK(back.kind == s.kind);
        CHECK(back.p1 == s.p1);
        CHECK(back.p2 == s.p2);
    }
    const auto d = parse_bernstein("stable:0.5,drift=0.25");
    CHECK(d.drift == 0.25);
    CHECK(parse_bernstein(d.str()).drift == 0.25);
    CHECK_THROWS_AS(parse_bernstein("stable"), ConfigError);
    CHECK_THROWS_AS(parse_bernstein("stable:0.5,0.2"), ConfigError);
    CHECK_THROWS_AS(parse_bernstein("gamma:1"), ConfigError);
    CHECK_THROWS_AS(parse_bernstein("stable:abc"), ConfigError);
}

TEST_CASE("derivatives of power laws", "[bernstein]") {
    CHECK_THAT(eval_deriv(BernsteinSpec::stable(0.5), 1, 1.0), WithinRel(0.5, 1e-15));
    CHECK_THAT(eval_deriv(BernsteinSpec::stable(0.5), 2, 1.0), WithinRel(-0.25, 1e-15));
    CHECK_THAT(eval_deriv(BernsteinSpec::sum_of_stable(0.3, 0.7), 1, 1.0), WithinRel(1.0, 1e-15));
    CHECK_THAT(eval_deriv(BernsteinSpec::stable(0.5), 3, 2.0), WithinRel(0.5 * -0.5 * -1.5 * std::pow(2.0, -2.5), 1e-14));
    CHECK_THAT(eval_deriv(BernsteinSpec::stable(0.5, 1.5), 1, 4.0), WithinRel(1.5 + 0.25, 1e-14));
}

TEST_CASE("relativistic derivatives match the shifted power law", "[bernstein]") {
    const auto s = BernsteinSpec::relativistic(0.4, 2.0);
    const double c = std::pow(2.0, 1.0 / 0.4);
    for (double lam : {1e-3, 0.7, 5.0, 1e4}) {
        double coeff = 1.0;
        for (int n = 1; n <= 4; ++n) {
            coeff *= 0.4 - (n - 1);
            CHECK_THAT(eval_deriv(s, n, lam), WithinRel(coeff * std::pow(lam + c, 0.4 - n), 1e-11));
        }
    }
}

TEST_CASE("jet derivatives agree with finite differences", "[bernstein]") {
    using boost::math::differentiation::finite_difference_derivative;
    // differentiate in the relative variable h, lambda -> lambda (1 + h)
    auto scaled_fd = [](auto&& g, double lam) {
        return finite_difference_derivative([&](double h) { return g(lam * (1.0 + h)); }, 0.0) / lam;
    };
    for (const auto& s : catalog()) {
        for (double lam : {1e-4, 0.3, 2.0, 50.0, 1e5}) {
            INFO(s.str() << " lambda=" << lam);
            const double fd1 = scaled_fd([&](double x) { return eval(s, x); }, lam);
            CHECK_THAT(eval_deriv(s, 1, lam), WithinRel(fd1, 1e-7));
            const double fd2 = scaled_fd([&](double x) { return eval_deriv(s, 1, x); }, lam);
            CHECK_THAT(eval_deriv(s, 2, lam), WithinRel(fd2, 1e-6));
            const double fd4 = scaled_fd([&](double x) { return eval_deriv(s, 3, x); }, lam);
            CHECK_THAT(eval_deriv(s, 4, lam), WithinRel(fd4, 1e-5));
        }
    }
}

TEST_CASE("monotonicity and sign alternation on a log grid", "[bernstein]") {
    const auto grid = logspace(1e-8, 1e8, 97);
    for (const auto& s : catalog()) {
        INFO(s.str());
        for (std::size_t i = 1; i < grid.size(); ++i) CHECK(eval(s, grid[i - 1]) < eval(s, grid[i]));
        for (double lam : grid)
            for (int n = 1; n <= 4; ++n) CHECK((n % 2 == 0 ? 1.0 : -1.0) * eval_deriv(s, n, lam) <= 0.0);
    }
}

TEST_CASE("user-defined specs use log-scale finite differences", "[bernstein]") {
    const auto u = BernsteinSpec::from_callable([](double x) { return std::pow(x, 0.6); }, "pow06");
    for (double lam : {1e-3, 1.0, 1e3}) {
        CHECK_THAT(eval(u, lam), WithinRel(std::pow(lam, 0.6), 1e-15));
        CHECK_THAT(eval_deriv(u, 1, lam), WithinRel(0.6 * std::pow(lam, -0.4), 1e-9));
        CHECK_THAT(eval_deriv(u, 2, lam), WithinRel(0.6 * -0.4 * std::pow(lam, -1.4), 1e-6));
        CHECK_THAT(eval_deriv(u, 3, lam), WithinRel(0.6 * -0.4 * -1.4 * std::pow(lam, -2.4), 1e-4));
    }
    CHECK_THROWS_AS(eval_deriv(u, 4, 1.0), CapabilityError);
    CHECK_THROWS_AS(eval_deriv(BernsteinSpec::stable(0.5), 7, 1.0), CapabilityError);
    CHECK_THROWS_AS(eval_deriv(BernsteinSpec::stable(0.5), 0, 1.0), DomainError);
}

TEST_CASE("inverse", "[bernstein]") {
    CHECK_THAT(inverse(BernsteinSpec::stable(0.5), 2.0), WithinRel(4.0, 1e-12));
    CHECK_THAT(inverse(BernsteinSpec::stable(1.0), 9.0), WithinRel(9.0, 1e-12));
    const auto cg = BernsteinSpec::conjugate_geometric(1.0);
    CHECK_THAT(inverse(cg, eval(cg, 5.0)), WithinRel(5.0, 1e-11));
    for (const auto& s : catalog()) {
        for (double lam : logspace(1e-4, 1e4, 17)) {
            const double back = inverse(s, eval(s, lam));
            CHECK_THAT(back, WithinRel(lam, 1e-10));
            CHECK(std::abs(eval(s, back) - eval(s, lam)) <= 1e-12 * eval(s, lam));
        }
    }
    CHECK_THROWS_AS(inverse(BernsteinSpec::stable(0.5), 0.0), DomainError);
}

TEST_CASE("scaling exponent estimates", "[bernstein]") {
    const auto st = estimate_scaling(BernsteinSpec::stable(0.5));
    CHECK_THAT(st.delta0_hat, WithinAbs(0.5, 1e-12));
    CHECK(st.satisfies_assumption);
    CHECK(st.max_violation <= 1e-12);

    const auto cg = estimate_scaling(BernsteinSpec::conjugate_geometric(1.0));
    CHECK_THAT(cg.delta0_hat, WithinAbs(0.5, 0.02));
    CHECK(cg.delta0_hat >= 0.5 - 1e-9);

    const auto sum = estimate_scaling(BernsteinSpec::sum_of_stable(0.3, 0.7));
    CHECK_THAT(sum.delta0_hat, WithinAbs(0.3, 0.02));

    for (const auto& s : catalog()) {
        const auto r = estimate_scaling(s);
        INFO(s.str());
        CHECK(r.delta0_hat > 0.0);
        CHECK(r.delta0_hat <= 1.0);
        CHECK(r.c_hat > 0.0);
        CHECK(r.max_violation <= 1e-12);
    }
    CHECK_THROWS_AS(estimate_scaling(BernsteinSpec::stable(0.5), Range::log(1.0, 1e4, 10)), ConfigError);
}

TEST_CASE("derivative bound reports", "[bernstein]") {
    const auto r1 = check_deriv_bound(BernsteinSpec::stable(0.3), 1);
    CHECK_THAT(r1.sup_ratio, WithinRel(0.3, 1e-12));
    CHECK(r1.passed());
    const auto r2 = check_deriv_bound(BernsteinSpec::stable(0.3), 2);
    CHECK_THAT(r2.sup_ratio, WithinRel(0.3 * 0.7, 1e-12));
    const auto rel = check_deriv_bound(BernsteinSpec::relativistic(0.5, 1.0), 1);
    CHECK(rel.passed());
    CHECK(rel.sup_ratio <= 1.0 + 1e-12);
    for (const auto& s : catalog())
        for (int n = 1; n <= 4; ++n) CHECK(check_deriv_bound(s, n).passed());
}

TEST_CASE("tail integral ratio", "[bernstein]") {
    CHECK_THAT(tail_integral_bound(BernsteinSpec::stable(0.5), 3.0), WithinRel(1.0, 1e-9));
    CHECK_THAT(tail_integral_bound(BernsteinSpec::stable(0.9), 0.01), WithinRel(1.0 / 1.8, 1e-9));
    const auto cg = BernsteinSpec::conjugate_geometric(1.0);
    double lo = 1e300, hi = 0.0;
    for (double lam : {1e-3, 1.0, 1e3}) {
        const double r = tail_integral_bound(cg, lam);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    CHECK(std::isfinite(hi));
    CHECK(hi / lo < 10.0);
    const auto rep = check_tail_integral_bound(BernsteinSpec::stable(0.5));
    CHECK_THAT(rep.sup_ratio, WithinRel(1.0, 1e-9));
    CHECK(rep.passed());
    for (const auto& s : catalog()) CHECK(check_tail_integral_bound(s).passed());
}
