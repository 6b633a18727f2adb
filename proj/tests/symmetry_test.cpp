#include <doctest.h>

#include <random>

#include "flatsing/symmetry.hpp"

using namespace flatsing;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uniform_real_distribution<double> angle_dist(0.0, kTwoPi);
std::uniform_real_distribution<double> unit_dist(-1.0, 1.0);

SymmetryElement random_element(std::mt19937_64& rng, Family family, const NormalForm& form) {
    SymmetryElement g;
    g.family = family;
    switch (family) {
        case Family::M1Generic:
            g.lambda = std::polar(1.0, angle_dist(rng));
            break;
        case Family::M1Integer:
            g.lambda = std::polar(1.0, angle_dist(rng));
            g.zeta = cplx(unit_dist(rng), unit_dist(rng)) * 0.5;
            break;
        case Family::M2:
            g.p = std::polar(0.5 + std::abs(unit_dist(rng)), angle_dist(rng));
            break;
        case Family::M3:
            g.ek_index = static_cast<int>(rng() % static_cast<unsigned>(form.n));
            g.a = cplx(unit_dist(rng), unit_dist(rng)) * 0.5;
            break;
    }
    return g;
}

NormalForm form_for(Family family) {
    switch (family) {
        case Family::M1Generic: return NormalForm{FormTag::Conical, 0.5, 0, 0, 0};
        case Family::M1Integer: return NormalForm{FormTag::Conical, -3.0, 0, 0, 0};
        case Family::M2: return NormalForm{FormTag::Cylindrical, 0, 1.2, 0, 0};
        case Family::M3: return NormalForm{FormTag::LogPole, 0, 0, 0.9, 3};
    }
    return NormalForm{};
}

bool elements_close(const SymmetryElement& x, const SymmetryElement& y, double tol = 1e-12) {
    return x.family == y.family && std::abs(x.lambda - y.lambda) < tol &&
           std::abs(x.zeta - y.zeta) < tol && std::abs(x.p - y.p) < tol &&
           x.ek_index == y.ek_index && std::abs(x.a - y.a) < tol;
}

}  // namespace

TEST_CASE("rotation element is a constant series") {
    NormalForm f{FormTag::Conical, 0.5, 0, 0, 0};
    SymmetryElement g;
    g.family = Family::M1Generic;
    g.lambda = cplx(0.0, 1.0);
    CoordinateChange ch = element_to_change(g, f, 16);
    CHECK(max_coeff_abs(ch.h - LaurentSeries::constant(cplx(0.0, 1.0), 16)) < 1e-15);
    CHECK(verify_invariance(f, g, 16) < 1e-12);
}

TEST_CASE("integer-cone element matches the closed form h = (z + 1)^{-1}") {
    // beta = -2: h = (zeta0 z^{-(beta+1)} + lambda1)^{1/(beta+1)} with
    // lambda1 = 1, zeta0 = 1 gives (z + 1)^{-1} = 1 - z + z^2 - ...
    NormalForm f{FormTag::Conical, -2.0, 0, 0, 0};
    SymmetryElement g;
    g.family = Family::M1Integer;
    g.lambda = 1.0;
    g.zeta = 1.0;
    LaurentSeries h = element_to_change(g, f, 16).h;
    for (int k = 0; k < 16; ++k)
        CHECK(std::abs(h.coeff(k) - (k % 2 == 0 ? 1.0 : -1.0)) < 1e-12);
    CHECK(verify_invariance(f, g, 16) < 1e-9);
}

TEST_CASE("cylinder scalars act by any nonzero factor") {
    NormalForm f{FormTag::Cylindrical, 0, 2.0, 0, 0};
    SymmetryElement g;
    g.family = Family::M2;
    g.p = cplx(3.0, -4.0);
    CHECK(max_coeff_abs(element_to_change(g, f, 8).h -
                        LaurentSeries::constant(cplx(3.0, -4.0), 8)) < 1e-15);
    CHECK(verify_invariance(f, g, 8) < 1e-12);
}

TEST_CASE("trivial third-form element is the identity change") {
    NormalForm f{FormTag::LogPole, 0, 0, 1.0, 1};
    M3Change mc = m3_change(f, 0, 0.0, 16);
    CHECK(max_coeff_abs(mc.h - LaurentSeries::constant(1.0, 16)) < 1e-14);
    CHECK(std::abs(mc.zeta0) < 1e-14);
}

TEST_CASE("third-form element solves its defining equation") {
    std::mt19937_64 rng(67);
    for (int n : {1, 2, 3}) {
        NormalForm f{FormTag::LogPole, 0, 0, 0.4 + 0.6 * std::abs(unit_dist(rng)), n};
        for (int k = 0; k < n; ++k) {
            cplx a = cplx(unit_dist(rng), unit_dist(rng));
            M3Change mc = m3_change(f, k, a, 24);
            CHECK(m3_equation_residual(f, mc) < 1e-10);
            CHECK(std::abs(mc.h.coeff(0) - root_of_unity(k, n)) < 1e-14);
            CHECK(std::abs(mc.h.coeff(n) - a) < 1e-14);
            // no freedom below order n
            for (int m = 1; m < n; ++m) CHECK(std::abs(mc.h.coeff(m)) < 1e-14);
        }
    }
}

TEST_CASE("third-form additive constant tracks the free coefficient") {
    // n = 1, e_0 = 1: the constant coefficient of the defining equation
    // reads -a = zeta0 (log h has no constant term since h(0) = 1)
    NormalForm f{FormTag::LogPole, 0, 0, 2.5, 1};
    cplx a(0.3, -0.2);
    M3Change mc = m3_change(f, 0, a, 16);
    CHECK(std::abs(mc.zeta0 + a) < 1e-12);
}

TEST_CASE("third-form tails satisfy the associated ODE") {
    // z * htail' = F(z, htail) with F the rational right-hand side whose
    // linearization at 0 is n * htail.
    std::mt19937_64 rng(71);
    for (int n : {1, 2, 3}) {
        NormalForm f{FormTag::LogPole, 0, 0, 0.8, n};
        for (int k = 0; k < n; ++k) {
            cplx ek = root_of_unity(k, n);
            cplx a = cplx(unit_dist(rng), unit_dist(rng)) * 0.5;
            M3Change mc = m3_change(f, k, a, 20);
            LaurentSeries tail = mc.h - LaurentSeries::constant(ek, 20);
            LaurentSeries lhs = shifted(derivative(mc.h), 1);
            LaurentSeries rhs = m3_ode_rhs(f, k, tail);
            CHECK(max_coeff_diff(lhs, rhs, 18) < 1e-9);
        }
        // linear part of the right-hand side is n * htail
        LaurentSeries probe = LaurentSeries::monomial(5, 1.0, 12);
        LaurentSeries lin = m3_ode_rhs(f, 0, probe);
        CHECK(std::abs(lin.coeff(5) - static_cast<double>(n)) < 1e-12);
    }
}

TEST_CASE("group axioms hold in every family") {
    std::mt19937_64 rng(73);
    for (Family fam : {Family::M1Generic, Family::M1Integer, Family::M2, Family::M3}) {
        NormalForm form = form_for(fam);
        for (int trial = 0; trial < 25; ++trial) {
            SymmetryElement g1 = random_element(rng, fam, form);
            SymmetryElement g2 = random_element(rng, fam, form);
            SymmetryElement g3 = random_element(rng, fam, form);
            SymmetryElement left = compose_elements(compose_elements(g1, g2, form), g3, form);
            SymmetryElement right = compose_elements(g1, compose_elements(g2, g3, form), form);
            CHECK(elements_close(left, right));

            SymmetryElement e = identity_element(fam);
            CHECK(elements_close(compose_elements(g1, e, form), g1));
            CHECK(elements_close(compose_elements(e, g1, form), g1));

            SymmetryElement inv = inverse_element(g1, form);
            CHECK(elements_close(compose_elements(g1, inv, form), e));
            CHECK(elements_close(compose_elements(inv, g1, form), e));
        }
    }
}

TEST_CASE("explicit composition values") {
    // integer cone: (1, 1) x (1, 2) = (1, 3)
    NormalForm cone{FormTag::Conical, -2.0, 0, 0, 0};
    SymmetryElement g1, g2;
    g1.family = g2.family = Family::M1Integer;
    g1.zeta = 1.0;
    g2.zeta = 2.0;
    SymmetryElement g12 = compose_elements(g1, g2, cone);
    CHECK(std::abs(g12.lambda - 1.0) < 1e-15);
    CHECK(std::abs(g12.zeta - 3.0) < 1e-15);

    // third form, n = 2: (e_1, a) x (e_1, at) = (e_0, -a - at)
    NormalForm lp{FormTag::LogPole, 0, 0, 1.0, 2};
    SymmetryElement m1, m2;
    m1.family = m2.family = Family::M3;
    m1.ek_index = m2.ek_index = 1;
    m1.a = cplx(0.2, 0.1);
    m2.a = cplx(-0.4, 0.3);
    SymmetryElement m12 = compose_elements(m1, m2, lp);
    CHECK(m12.ek_index == 0);
    CHECK(std::abs(m12.a - (-m1.a - m2.a)) < 1e-15);
}

TEST_CASE("composition of changes matches the group law") {
    std::mt19937_64 rng(79);
    for (Family fam : {Family::M1Generic, Family::M1Integer, Family::M2, Family::M3}) {
        NormalForm form = form_for(fam);
        for (int trial = 0; trial < 10; ++trial) {
            SymmetryElement g1 = random_element(rng, fam, form);
            SymmetryElement g2 = random_element(rng, fam, form);
            CHECK(verify_composition(g1, g2, form, 20) < 1e-9);
        }
    }
}

TEST_CASE("every element leaves its normal form invariant") {
    std::mt19937_64 rng(83);
    for (Family fam : {Family::M1Generic, Family::M1Integer, Family::M2, Family::M3}) {
        NormalForm form = form_for(fam);
        for (int trial = 0; trial < 20; ++trial) {
            SymmetryElement g = random_element(rng, fam, form);
            CHECK(verify_invariance(form, g, 20) < 1e-9);
        }
    }
}

TEST_CASE("family and form mismatches are rejected") {
    NormalForm cone{FormTag::Conical, 0.5, 0, 0, 0};
    NormalForm cyl{FormTag::Cylindrical, 0, 1.0, 0, 0};
    NormalForm lp{FormTag::LogPole, 0, 0, 1.0, 2};

    SymmetryElement rot = identity_element(Family::M1Generic);
    CHECK_THROWS_AS(element_to_change(rot, cyl, 8), math_error);

    SymmetryElement withzeta = identity_element(Family::M1Integer);
    CHECK_THROWS_AS(element_to_change(withzeta, cone, 8), math_error);  // beta not integer < -1

    SymmetryElement scalar = identity_element(Family::M2);
    scalar.p = 0.0;
    CHECK_THROWS_AS(element_to_change(scalar, cyl, 8), math_error);

    SymmetryElement third = identity_element(Family::M3);
    third.ek_index = 5;
    CHECK_THROWS_AS(element_to_change(third, lp, 8), math_error);

    SymmetryElement bad_rot = identity_element(Family::M1Generic);
    bad_rot.lambda = 2.0;
    CHECK_THROWS_AS(element_to_change(bad_rot, cone, 8), math_error);
}
