#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include <kcomp/exact.hpp>
#include <kcomp/experiments.hpp>

#include "test_support.hpp"

using namespace kcomp;

namespace {

std::vector<double> coeffs_of(const bernstein_poly& p)
{
    return {p.coeffs().begin(), p.coeffs().end()};
}

} // namespace

TEST(to_exact, examples)
{
    EXPECT_EQ(to_exact(0.5), exact_scalar(1, 2));
    EXPECT_EQ(to_exact(-3.0), exact_scalar(-3));
    EXPECT_EQ(to_exact(0.1), exact_scalar(exact_int("3602879701896397"), exact_int(1) << 55));
    EXPECT_EQ(to_exact(std::numeric_limits<double>::denorm_min()), pow2(-1074));
    EXPECT_THROW((void)to_exact(NAN), std::domain_error);
    EXPECT_THROW((void)to_exact(-INFINITY), std::domain_error);
}

TEST(round_to_double, matches_hardware_rounding)
{
    fixtures::rng gen(31);
    for (int i = 0; i < 20000; ++i) {
        const double a = fixtures::random_magnitude(gen, -200, 200);
        const double b = fixtures::random_magnitude(gen, -200, 200);
        const exact_scalar xa = to_exact(a);
        const exact_scalar xb = to_exact(b);
        ASSERT_EQ(round_to_double(xa), a);
        ASSERT_EQ(round_to_double(xa + xb), a + b);
        ASSERT_EQ(round_to_double(xa * xb), a * b);
        ASSERT_EQ(round_to_double(xa / xb), a / b);
    }
}

TEST(round_to_double, ties_subnormals_and_overflow)
{
    const exact_scalar one = 1;
    // 1 + u is halfway between 1 and 1 + 2u: ties go to the even significand.
    EXPECT_EQ(round_to_double(one + pow2(-53)), 1.0);
    EXPECT_EQ(round_to_double(one + 3 * pow2(-53)), 1.0 + std::ldexp(1.0, -51));
    EXPECT_EQ(round_to_double(-(one + pow2(-53))), -1.0);
    EXPECT_EQ(round_to_double(exact_scalar(1, 3)), 1.0 / 3.0);

    EXPECT_EQ(round_to_double(pow2(-1074)), std::numeric_limits<double>::denorm_min());
    EXPECT_EQ(round_to_double(pow2(-1075)), 0.0);
    EXPECT_EQ(round_to_double(3 * pow2(-1076)), std::numeric_limits<double>::denorm_min());
    EXPECT_EQ(round_to_double(pow2(-1040) * 5), std::ldexp(5.0, -1040));

    EXPECT_EQ(round_to_double(pow2(1024)), HUGE_VAL);
    EXPECT_EQ(round_to_double(-pow2(1030)), -HUGE_VAL);
    EXPECT_EQ(round_to_double(to_exact(std::numeric_limits<double>::max())),
              std::numeric_limits<double>::max());
}

TEST(to_decimal, examples)
{
    EXPECT_EQ(to_decimal(0), "0");
    EXPECT_EQ(to_decimal(exact_scalar(-1, 8), 5), "-1.2500e-01");
    EXPECT_EQ(to_decimal(exact_scalar(2, 3), 4), "6.667e-01");
    EXPECT_EQ(to_decimal(exact_scalar(9995, 1000), 3), "1.00e+01");
    EXPECT_EQ(to_decimal(pow2(-53), 20), "1.1102230246251565404e-16");
    EXPECT_EQ(to_decimal(123), "1.230000000000000000000000000000000000000e+02");
    EXPECT_THROW((void)to_decimal(1, 0), std::invalid_argument);
}

TEST(exact_eval, examples)
{
    const auto cubic = experiments::cubic_bernstein();
    EXPECT_EQ(exact_eval(cubic, 0.5), 0);
    EXPECT_EQ(exact_eval(cubic, 0.0), -1);
    EXPECT_EQ(exact_eval(cubic, 1.0), 1);
    EXPECT_EQ(exact_eval(experiments::quartic_bernstein(), 1.0), 0);
    const double s = 0.5 + std::ldexp(1.0, -20);
    EXPECT_EQ(exact_eval(cubic, s), pow2(-19) * pow2(-19) * pow2(-19));
}

TEST(exact_eval, recurrence_agrees_with_basis_sum)
{
    fixtures::rng gen(32);
    for (int i = 0; i < 300; ++i) {
        const auto p = fixtures::random_poly(gen, static_cast<std::size_t>(i % 12));
        const auto b = to_exact(p.coeffs());
        const exact_scalar s = to_exact(fixtures::random_unit(gen) * 3.0 - 1.0);
        ASSERT_EQ(exact_eval(b, s), exact_eval_basis_sum(b, s));
    }
}

TEST(p_tilde, examples)
{
    // All coefficients have magnitude 1 and the basis is a partition of unity.
    const auto cubic = experiments::cubic_bernstein();
    for (double s : {0.0, 0.3, 0.5, 1.0})
        EXPECT_EQ(p_tilde(cubic, s), 1);
    EXPECT_EQ(p_tilde(experiments::quartic_bernstein(), 0.0), 1);
    EXPECT_THROW((void)p_tilde(cubic, 1.5), std::domain_error);
    EXPECT_THROW((void)p_tilde(cubic, -0.25), std::domain_error);
}

TEST(p_tilde, closed_form_on_sweep_points)
{
    // (s - 1)(s - 3/4)^7 has Bernstein coefficients of alternating sign
    // pattern that make p~(s) = (1 - s)(3/4 - s/2)^7 on [0, 1].
    const auto p = experiments::octic_bernstein();
    for (double s : experiments::condition_sweep_points(86)) {
        const exact_scalar xs = to_exact(s);
        exact_scalar f = exact_scalar(3, 4) - xs / 2;
        exact_scalar expected = 1 - xs;
        for (int i = 0; i < 7; ++i)
            expected *= f;
        ASSERT_EQ(p_tilde(p, s), expected) << s;
    }
}

TEST(condition_number, examples)
{
    const auto cubic = experiments::cubic_bernstein();
    const auto at_root = condition_number(cubic, 0.5);
    EXPECT_TRUE(at_root.infinite());
    EXPECT_EQ(at_root.rounded_cond, HUGE_VAL);

    const auto at_end = condition_number(cubic, 0.0);
    ASSERT_FALSE(at_end.infinite());
    EXPECT_EQ(*at_end.cond, 1);

    const double s = 0.5 + std::ldexp(1.0, -20);
    const auto near = condition_number(cubic, s);
    EXPECT_EQ(*near.cond, pow2(57));
    EXPECT_EQ(near.rounded_cond, std::ldexp(1.0, 57));
}

TEST(condition_number, at_least_one_and_bounds_the_value)
{
    fixtures::rng gen(33);
    for (int i = 0; i < 500; ++i) {
        const auto c = fixtures::random_case(gen, 1, 10);
        if (c.s < 0.0 || c.s > 1.0)
            continue;
        const auto rep = condition_number(c.p, c.s);
        ASSERT_GE(rep.p_tilde, abs_exact(rep.exact_value));
        if (rep.cond) {
            ASSERT_GE(*rep.cond, 1);
        }
    }
}

TEST(condition_number, equals_one_when_coefficients_share_a_sign)
{
    fixtures::rng gen(34);
    for (int i = 0; i < 200; ++i) {
        auto coeffs = coeffs_of(fixtures::random_poly(gen, 1 + static_cast<std::size_t>(i % 8)));
        bool any_nonzero = false;
        for (auto& c : coeffs) {
            c = -std::fabs(c);
            any_nonzero = any_nonzero || c != 0.0;
        }
        if (!any_nonzero)
            continue;
        const auto rep = condition_number(bernstein_poly(coeffs), fixtures::random_unit(gen));
        ASSERT_TRUE(rep.cond.has_value());
        ASSERT_EQ(*rep.cond, 1);
    }
}

TEST(relative_error, examples)
{
    EXPECT_EQ(relative_error(1.0, 1), 0.0);
    EXPECT_EQ(relative_error(1.5, 1), 0.5);
    EXPECT_EQ(relative_error(0.0, exact_scalar(-3)), 1.0);
    EXPECT_FALSE(relative_error(1e-30, 0).has_value());
    EXPECT_EQ(absolute_error(1e-30, 0), 1e-30);
    EXPECT_EQ(relative_error(0.1, exact_scalar(1, 10)),
              round_to_double(abs_exact(to_exact(0.1) - exact_scalar(1, 10)) * 10));
}

TEST(bernstein_from_monomial, examples)
{
    const std::vector<exact_scalar> a{-1, 6, -12, 8};
    EXPECT_EQ(coeffs_of(bernstein_from_monomial(a)), coeffs_of(experiments::cubic_bernstein()));

    const std::vector<exact_scalar> line{0, 1};
    EXPECT_EQ(coeffs_of(bernstein_from_monomial(line)), (std::vector<double>{0.0, 1.0}));

    // s as a degree-2 polynomial: 0, 1/2, 1.
    const std::vector<exact_scalar> s_only{0, 1, 0};
    EXPECT_EQ(coeffs_of(bernstein_from_monomial(s_only)), (std::vector<double>{0.0, 0.5, 1.0}));

    EXPECT_THROW((void)bernstein_from_monomial(std::vector<exact_scalar>{}), std::invalid_argument);
}

TEST(bernstein_from_monomial, rejects_inexact_coefficients)
{
    const std::vector<exact_scalar> third{exact_scalar(1, 3)};
    EXPECT_THROW((void)bernstein_from_monomial(third), std::domain_error);
    // s over degree 3: coefficients 0, 1/3, 2/3, 1.
    const std::vector<exact_scalar> s_cubic{0, 1, 0, 0};
    try {
        (void)bernstein_from_monomial(s_cubic);
        FAIL() << "expected domain_error";
    } catch (const std::domain_error& e) {
        EXPECT_NE(std::string(e.what()).find("coefficient 1"), std::string::npos) << e.what();
    }
}

TEST(bernstein_from_monomial, preserves_values)
{
    fixtures::rng gen(35);
    for (int i = 0; i < 200; ++i) {
        std::vector<exact_scalar> a;
        for (std::size_t j = 0; j <= static_cast<std::size_t>(i % 10); ++j)
            a.push_back(to_exact(fixtures::random_magnitude(gen, -5, 5)));
        const auto b = exact_bernstein_from_monomial(a);
        const exact_scalar s = to_exact(fixtures::random_unit(gen));
        ASSERT_EQ(exact_eval(b, s), exact_eval_monomial(a, s));
    }
}

TEST(bernstein_from_root_form, examples)
{
    const std::array<root_factor, 1> triple{root_factor{exact_scalar(1, 2), 3}};
    EXPECT_EQ(coeffs_of(bernstein_from_root_form(triple, 8)), coeffs_of(experiments::cubic_bernstein()));

    const std::array<root_factor, 2> quartic{root_factor{exact_scalar(1, 2), 3}, root_factor{1, 1}};
    // 8 (s - 1/2)^3 (s - 1) has Bernstein coefficients [1, -3/4, 1/2, -1/4, 0].
    EXPECT_EQ(coeffs_of(bernstein_from_root_form(quartic, 8)), coeffs_of(experiments::quartic_bernstein()));

    const auto octic = experiments::octic_bernstein();
    ASSERT_EQ(octic.degree(), 8u);
    EXPECT_EQ(exact_eval(octic, 0.75), 0);
    EXPECT_EQ(exact_eval(octic, 1.0), 0);
    EXPECT_EQ(exact_eval(octic, 0.0), exact_scalar(2187, 16384));
}

TEST(gamma_bound, examples)
{
    EXPECT_EQ(gamma_bound(0), 0);
    EXPECT_EQ(gamma_bound(1), pow2(-53) / (1 - pow2(-53)));
    EXPECT_GT(gamma_bound(3), 3 * unit_roundoff());
    EXPECT_EQ(binomial(8, 4), 70);
    EXPECT_EQ(binomial(3, 5), 0);
}
