#include <doctest.h>

#include <random>

#include "flatsing/series.hpp"

using namespace flatsing;

namespace {

LaurentSeries from_list(int val, std::initializer_list<cplx> coeffs, int order = 16) {
    return LaurentSeries(val, std::vector<cplx>(coeffs), order);
}

LaurentSeries random_series(std::mt19937_64& rng, int val_min, int val_max, int order = 16) {
    std::uniform_int_distribution<int> vd(val_min, val_max);
    std::uniform_real_distribution<double> cd(-1.0, 1.0);
    int val = vd(rng);
    std::vector<cplx> c;
    c.push_back(cplx(cd(rng) + 1.5, cd(rng)));  // leading coefficient away from 0
    for (int k = val + 1; k < order; ++k) c.push_back(cplx(cd(rng), cd(rng)) * 0.5);
    return LaurentSeries(val, std::move(c), order);
}

}  // namespace

TEST_CASE("polynomial identities") {
    auto one_plus = from_list(0, {1.0, 1.0});
    auto one_minus = from_list(0, {1.0, -1.0});
    auto prod = one_plus * one_minus;
    CHECK(prod.coeff(0) == cplx(1.0));
    CHECK(prod.coeff(1) == cplx(0.0));
    CHECK(prod.coeff(2) == cplx(-1.0));
    CHECK(prod.valuation() == 0);
}

TEST_CASE("geometric series from division") {
    auto one = LaurentSeries::constant(1.0, 16);
    auto denom = from_list(0, {1.0, -1.0});
    auto geo = one / denom;
    for (int k = 0; k < 16; ++k) CHECK(std::abs(geo.coeff(k) - 1.0) < 1e-14);
}

TEST_CASE("monomial shift") {
    auto s = from_list(-1, {1.0, 2.0});  // z^-1 + 2
    auto prod = s * LaurentSeries::monomial(1, 1.0, 16);
    CHECK(prod.valuation() == 0);
    CHECK(std::abs(prod.coeff(0) - 1.0) < 1e-15);
    CHECK(std::abs(prod.coeff(1) - 2.0) < 1e-15);
}

TEST_CASE("division by zero series") {
    CHECK_THROWS_WITH_AS(from_list(0, {1.0}) / LaurentSeries::zero(8), "zero divisor",
                         math_error);
}

TEST_CASE("derivative basics") {
    auto z2 = LaurentSeries::monomial(2, 1.0, 16);
    auto d = derivative(z2);
    CHECK(d.valuation() == 1);
    CHECK(std::abs(d.coeff(1) - 2.0) < 1e-15);

    auto pole = LaurentSeries::monomial(-1, 1.0, 16);
    auto dp = derivative(pole);
    CHECK(dp.valuation() == -2);
    CHECK(std::abs(dp.coeff(-2) + 1.0) < 1e-15);

    CHECK(derivative(LaurentSeries::constant(5.0, 16)).is_zero());
}

TEST_CASE("composition basics") {
    auto outer = from_list(0, {1.0, 1.0});
    auto inner = LaurentSeries::monomial(2, 1.0, 16);
    auto r = compose(outer, inner);
    CHECK(std::abs(r.coeff(0) - 1.0) < 1e-15);
    CHECK(std::abs(r.coeff(2) - 1.0) < 1e-15);

    auto sq = LaurentSeries::monomial(2, 1.0, 8);  // w^2
    auto zz = from_list(1, {1.0, 1.0});            // z + z^2
    auto binom = compose(sq, zz);
    CHECK(std::abs(binom.coeff(2) - 1.0) < 1e-15);
    CHECK(std::abs(binom.coeff(3) - 2.0) < 1e-15);
    CHECK(std::abs(binom.coeff(4) - 1.0) < 1e-15);

    CHECK_THROWS_AS(compose(outer, from_list(0, {1.0, 1.0})), math_error);
}

TEST_CASE("identity composition keeps the exp series") {
    auto e = exp(LaurentSeries::monomial(1, 1.0, 12));
    auto r = compose(e, LaurentSeries::identity(12));
    CHECK(max_coeff_diff(e, r) < 1e-14);
}

TEST_CASE("exp basics") {
    CHECK(std::abs(exp(LaurentSeries::zero(8)).coeff(0) - 1.0) < 1e-15);

    auto e = exp(LaurentSeries::monomial(1, 1.0, 8));
    CHECK(std::abs(e.coeff(0) - 1.0) < 1e-15);
    CHECK(std::abs(e.coeff(1) - 1.0) < 1e-15);
    CHECK(std::abs(e.coeff(2) - 0.5) < 1e-15);
    CHECK(std::abs(e.coeff(3) - 1.0 / 6.0) < 1e-15);

    constexpr double pi = 3.14159265358979323846;
    auto m = exp(LaurentSeries::constant(cplx(0.0, pi), 8));
    CHECK(std::abs(m.coeff(0) + 1.0) < 1e-15);

    CHECK_THROWS_WITH_AS(exp(LaurentSeries::monomial(-1, 1.0, 8)), "essential exponential",
                         math_error);
}

TEST_CASE("log basics") {
    auto l = log_unit(from_list(0, {1.0, 1.0}, 8));
    CHECK(std::abs(l.coeff(1) - 1.0) < 1e-15);
    CHECK(std::abs(l.coeff(2) + 0.5) < 1e-15);
    CHECK(std::abs(l.coeff(3) - 1.0 / 3.0) < 1e-15);

    CHECK(std::abs(log_unit(LaurentSeries::constant(std::exp(1.0), 8)).coeff(0) - 1.0) < 1e-15);

    constexpr double pi = 3.14159265358979323846;
    CHECK(std::abs(log_unit(LaurentSeries::constant(-1.0, 8), 0).coeff(0) - cplx(0, pi)) < 1e-15);

    CHECK_THROWS_WITH_AS(log_unit(LaurentSeries::monomial(1, 1.0, 8)), "log of non-unit",
                         math_error);
}

TEST_CASE("real powers") {
    auto sq = pow_real(from_list(0, {1.0, 1.0}, 8), 0.5);
    CHECK(std::abs(sq.coeff(0) - 1.0) < 1e-15);
    CHECK(std::abs(sq.coeff(1) - 0.5) < 1e-14);
    CHECK(std::abs(sq.coeff(2) + 0.125) < 1e-14);

    auto p2 = pow_real(from_list(0, {1.0, 2.0, 1.0}, 8), 2.0);
    CHECK(std::abs(p2.coeff(0) - 1.0) < 1e-13);
    CHECK(std::abs(p2.coeff(1) - 4.0) < 1e-13);
    CHECK(std::abs(p2.coeff(2) - 6.0) < 1e-13);

    CHECK(std::abs(pow_real(LaurentSeries::constant(4.0, 8), -0.5).coeff(0) - 0.5) < 1e-15);
}

TEST_CASE("order bookkeeping never fabricates precision") {
    auto a = from_list(0, {1.0, 1.0}, 8);
    auto b = from_list(2, {1.0}, 5);
    CHECK((a + b).order() == 5);
    CHECK((a * b).order() == std::min(0 + 5, 2 + 8));
    CHECK(derivative(a).order() == 7);
    auto inv = inverse(from_list(1, {1.0}, 8));  // 1/z known through z^{6-1}... order 8-2
    CHECK(inv.order() == 8 - 2);
    CHECK(inv.valuation() == -1);
}

TEST_CASE("ring axioms on random series") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        auto a = random_series(rng, -3, 3);
        auto b = random_series(rng, -3, 3);
        auto c = random_series(rng, -3, 3);
        CHECK(approx_equal((a * b) * c, a * (b * c), 1e-11));
        CHECK(approx_equal(a * (b + c), a * b + a * c, 1e-11));
        CHECK(approx_equal(a + b, b + a, 0.0, 0.0));
    }
}

TEST_CASE("exp and log are inverse on unit series") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        auto s = random_series(rng, 0, 0);
        auto back = exp(log_unit(s));
        CHECK(approx_equal(back, s, 1e-12));

        auto t = random_series(rng, 0, 0);
        std::uniform_int_distribution<int> kd(-2, 2);
        int k = kd(rng);
        auto shifted_log = log_unit(exp(t), k);
        constexpr double two_pi = 6.283185307179586476925286766559;
        auto expected = t + LaurentSeries::constant(cplx(0.0, two_pi * k), t.order());
        // exp drops the branch; log recovers t modulo 2*pi*i
        cplx diff = shifted_log.coeff(0) - expected.coeff(0);
        double frac = std::abs(std::remainder(diff.imag(), two_pi));
        CHECK(std::abs(diff.real()) < 1e-10);
        CHECK(frac < 1e-10);
        CHECK(max_coeff_diff(shifted_log - LaurentSeries::constant(shifted_log.coeff(0)),
                             t - LaurentSeries::constant(t.coeff(0))) < 1e-10);
    }
}

TEST_CASE("product rule for the derivative") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 50; ++trial) {
        auto a = random_series(rng, -2, 2);
        auto b = random_series(rng, -2, 2);
        auto lhs = derivative(a * b);
        auto rhs = derivative(a) * b + a * derivative(b);
        CHECK(approx_equal(lhs, rhs, 1e-10));
    }
}

TEST_CASE("composition is associative") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 30; ++trial) {
        auto a = random_series(rng, 0, 2, 12);
        auto b = random_series(rng, 1, 2, 12);
        auto c = random_series(rng, 1, 2, 12);
        auto lhs = compose(compose(a, b), c);
        auto rhs = compose(a, compose(b, c));
        CHECK(approx_equal(lhs, rhs, 1e-9));
    }
}

TEST_CASE("integer powers match iterated multiplication") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 30; ++trial) {
        auto s = random_series(rng, 0, 0, 12);
        std::uniform_int_distribution<int> md(-3, 4);
        int m = md(rng);
        auto p = pow_real(s, static_cast<double>(m));
        LaurentSeries iter = LaurentSeries::constant(1.0, 12);
        for (int i = 0; i < std::abs(m); ++i) iter = iter * s;
        if (m < 0) iter = inverse(truncated(iter, 12));
        CHECK(approx_equal(truncated(p, iter.order()), iter, 1e-11));
    }
}

TEST_CASE("horner evaluation agrees with termwise sums") {
    auto s = from_list(-1, {2.0, cplx(0.0, 1.0), 3.0}, 8);
    cplx w(0.3, 0.4);
    cplx expect = 2.0 / w + cplx(0.0, 1.0) + 3.0 * w;
    CHECK(std::abs(s.eval(w) - expect) < 1e-14);
}
