#pragma once

// Exact rational ground truth for Bernstein-form evaluation.
//
// Every finite double is a dyadic rational, so inputs convert exactly and all
// arithmetic below is exact. Rounding back to double happens once, through
// round_to_double, which is correctly rounded (nearest, ties to even).

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "casteljau.hpp"

namespace kcomp {

using exact_int = boost::multiprecision::mpz_int;
using exact_scalar = boost::multiprecision::mpq_rational;

/// Exact value of a finite double.
[[nodiscard]] inline exact_scalar to_exact(double x)
{
    if (!std::isfinite(x))
        throw std::domain_error("to_exact: value is not finite");
    if (x == 0.0)
        return exact_scalar(0);
    int exp = 0;
    const double frac = std::frexp(x, &exp); // x = frac * 2^exp, 0.5 <= |frac| < 1
    const auto mant = static_cast<std::int64_t>(std::ldexp(frac, 53));
    const int shift = exp - 53;
    exact_int num(mant);
    if (shift >= 0)
        return exact_scalar(num << shift);
    return exact_scalar(num, exact_int(1) << -shift);
}

[[nodiscard]] inline exact_scalar pow2(int e)
{
    if (e >= 0)
        return exact_scalar(exact_int(1) << e);
    return exact_scalar(exact_int(1), exact_int(1) << -e);
}

/// Nearest double to q, ties to even. Overflows to infinity; handles the
/// subnormal range.
[[nodiscard]] inline double round_to_double(const exact_scalar& q)
{
    using boost::multiprecision::msb;
    if (q == 0)
        return 0.0;
    const bool negative = q < 0;
    exact_int num = boost::multiprecision::numerator(q);
    if (negative)
        num = -num;
    const exact_int den = boost::multiprecision::denominator(q);

    // 2^e <= |q| < 2^(e+1)
    long e = static_cast<long>(msb(num)) - static_cast<long>(msb(den));
    const bool below = e >= 0 ? num < (den << e) : (num << -e) < den;
    if (below)
        --e;
    if (e > 1023)
        return negative ? -HUGE_VAL : HUGE_VAL;

    // Quantum of the target binade: 2^(e-52), or 2^-1074 when subnormal.
    const long quantum = e < -1022 ? -1074 : e - 52;
    exact_int scaled_num = num;
    exact_int scaled_den = den;
    if (quantum < 0)
        scaled_num <<= -quantum;
    else
        scaled_den <<= quantum;
    exact_int m = scaled_num / scaled_den;
    const exact_int rem = scaled_num - m * scaled_den;
    const exact_int twice = rem << 1;
    if (twice > scaled_den || (twice == scaled_den && (m & 1) != 0))
        ++m;
    const double result = std::ldexp(m.convert_to<double>(), static_cast<int>(quantum));
    return negative ? -result : result;
}

/// Scientific decimal rendering with `digits` significant digits, rounded
/// to nearest (ties to even), e.g. "-1.2500000000e-05". Zero renders "0".
[[nodiscard]] inline std::string to_decimal(const exact_scalar& q, int digits = 40)
{
    using boost::multiprecision::msb;
    using boost::multiprecision::pow;
    if (digits < 1)
        throw std::invalid_argument("to_decimal: need at least one digit");
    if (q == 0)
        return "0";
    exact_scalar a = q < 0 ? exact_scalar(-q) : q;
    const exact_int num = boost::multiprecision::numerator(a);
    const exact_int den = boost::multiprecision::denominator(a);

    // Decimal exponent: 10^e <= a < 10^(e+1).
    const long bits = static_cast<long>(msb(num)) - static_cast<long>(msb(den));
    long e = static_cast<long>(std::floor(static_cast<double>(bits) * 0.30102999566398120));
    auto ten_pow = [](long k) {
        return k >= 0 ? exact_scalar(pow(exact_int(10), static_cast<unsigned>(k)))
                      : exact_scalar(exact_int(1), pow(exact_int(10), static_cast<unsigned>(-k)));
    };
    while (ten_pow(e) > a)
        --e;
    while (ten_pow(e + 1) <= a)
        ++e;

    const exact_scalar scaled = a * ten_pow(digits - 1 - e);
    const exact_int sn = boost::multiprecision::numerator(scaled);
    const exact_int sd = boost::multiprecision::denominator(scaled);
    exact_int m = sn / sd;
    const exact_int twice = (sn - m * sd) << 1;
    if (twice > sd || (twice == sd && (m & 1) != 0))
        ++m;
    if (m == pow(exact_int(10), static_cast<unsigned>(digits))) {
        m /= 10;
        ++e;
    }

    std::string mant = m.str();
    std::string out = q < 0 ? "-" : "";
    out += mant.substr(0, 1);
    if (mant.size() > 1) {
        out += '.';
        out += mant.substr(1);
    }
    const long ae = e < 0 ? -e : e;
    out += e < 0 ? "e-" : "e+";
    if (ae < 10)
        out += '0';
    out += std::to_string(ae);
    return out;
}

[[nodiscard]] inline exact_scalar abs_exact(const exact_scalar& q)
{
    return q < 0 ? exact_scalar(-q) : q;
}

[[nodiscard]] inline exact_int binomial(std::size_t n, std::size_t k)
{
    if (k > n)
        return 0;
    exact_int c = 1;
    for (std::size_t i = 1; i <= k; ++i)
        c = c * static_cast<unsigned long>(n - k + i) / static_cast<unsigned long>(i);
    return c;
}

/// gamma_m = m u / (1 - m u) with u = 2^-53.
[[nodiscard]] inline exact_scalar gamma_bound(std::size_t m)
{
    const exact_scalar mu = exact_scalar(static_cast<unsigned long>(m)) * pow2(-53);
    return mu / (1 - mu);
}

[[nodiscard]] inline exact_scalar unit_roundoff()
{
    return pow2(-53);
}

[[nodiscard]] inline std::vector<exact_scalar> to_exact(std::span<const double> xs)
{
    std::vector<exact_scalar> out;
    out.reserve(xs.size());
    for (double x : xs)
        out.push_back(to_exact(x));
    return out;
}

/// Exact de Casteljau triangle b_j^(k) on rational inputs.
[[nodiscard]] inline triangle<exact_scalar> exact_triangle(std::span<const exact_scalar> b,
                                                           const exact_scalar& s)
{
    if (b.empty())
        throw std::invalid_argument("exact_triangle: empty coefficient vector");
    const std::size_t n = b.size() - 1;
    const exact_scalar r = 1 - s;
    triangle<exact_scalar> tri(n);
    for (std::size_t j = 0; j <= n; ++j)
        tri(n, j) = b[j];
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = 0; j <= k; ++j)
            tri(k, j) = r * tri(k + 1, j) + s * tri(k + 1, j + 1);
    }
    return tri;
}

[[nodiscard]] inline triangle<exact_scalar> exact_triangle(const bernstein_poly& p, double s)
{
    return exact_triangle(to_exact(p.coeffs()), to_exact(s));
}

/// p(s) by the exact de Casteljau recurrence.
[[nodiscard]] inline exact_scalar exact_eval(std::span<const exact_scalar> b, const exact_scalar& s)
{
    return exact_triangle(b, s)(0, 0);
}

[[nodiscard]] inline exact_scalar exact_eval(const bernstein_poly& p, double s)
{
    return exact_eval(to_exact(p.coeffs()), to_exact(s));
}

/// p(s) by the explicit sum over the basis, independent of the recurrence.
[[nodiscard]] inline exact_scalar exact_eval_basis_sum(std::span<const exact_scalar> b,
                                                       const exact_scalar& s)
{
    if (b.empty())
        throw std::invalid_argument("exact_eval_basis_sum: empty coefficient vector");
    const std::size_t n = b.size() - 1;
    const exact_scalar r = 1 - s;
    exact_scalar total = 0;
    for (std::size_t j = 0; j <= n; ++j) {
        exact_scalar term = exact_scalar(binomial(n, j)) * b[j];
        for (std::size_t i = 0; i < n - j; ++i)
            term *= r;
        for (std::size_t i = 0; i < j; ++i)
            term *= s;
        total += term;
    }
    return total;
}

[[nodiscard]] inline exact_scalar exact_eval_monomial(std::span<const exact_scalar> a,
                                                      const exact_scalar& s)
{
    exact_scalar total = 0;
    for (std::size_t i = a.size(); i-- > 0;)
        total = total * s + a[i];
    return total;
}

namespace detail {

inline void require_unit_interval(const exact_scalar& s, const char* what)
{
    if (s < 0 || s > 1)
        throw std::domain_error(std::string(what) + ": s must lie in [0, 1]");
}

} // namespace detail

/// p~(s) = sum_j |b_j| B_{j,n}(s), for s in [0, 1].
[[nodiscard]] inline exact_scalar p_tilde(std::span<const exact_scalar> b, const exact_scalar& s)
{
    detail::require_unit_interval(s, "p_tilde");
    std::vector<exact_scalar> absolute;
    absolute.reserve(b.size());
    for (const auto& c : b)
        absolute.push_back(abs_exact(c));
    return exact_eval(absolute, s);
}

[[nodiscard]] inline exact_scalar p_tilde(const bernstein_poly& p, double s)
{
    return p_tilde(to_exact(p.coeffs()), to_exact(s));
}

struct condition_report {
    double s = 0.0;
    exact_scalar exact_value;
    exact_scalar p_tilde;
    std::optional<exact_scalar> cond; // empty when p(s) == 0
    double rounded_cond = 0.0;        // +inf when p(s) == 0

    [[nodiscard]] bool infinite() const noexcept { return !cond.has_value(); }
};

/// cond(p, s) = p~(s) / |p(s)|, for s in [0, 1].
[[nodiscard]] inline condition_report condition_number(const bernstein_poly& p, double s)
{
    const auto b = to_exact(p.coeffs());
    const auto xs = to_exact(s);
    condition_report report;
    report.s = s;
    report.exact_value = exact_eval(b, xs);
    report.p_tilde = p_tilde(b, xs);
    if (report.exact_value == 0) {
        report.rounded_cond = HUGE_VAL;
    } else {
        report.cond = report.p_tilde / abs_exact(report.exact_value);
        report.rounded_cond = round_to_double(*report.cond);
    }
    return report;
}

/// |computed - exact| / |exact| rounded once; empty when exact == 0, in which
/// case callers report absolute_error instead.
[[nodiscard]] inline std::optional<double> relative_error(double computed, const exact_scalar& exact)
{
    if (exact == 0)
        return std::nullopt;
    return round_to_double(abs_exact(to_exact(computed) - exact) / abs_exact(exact));
}

[[nodiscard]] inline double absolute_error(double computed, const exact_scalar& exact)
{
    return round_to_double(abs_exact(to_exact(computed) - exact));
}

namespace detail {

inline std::vector<double> to_representable(std::span<const exact_scalar> exact)
{
    std::vector<double> out;
    out.reserve(exact.size());
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double d = round_to_double(exact[i]);
        if (!std::isfinite(d) || to_exact(d) != exact[i])
            throw std::domain_error("Bernstein coefficient " + std::to_string(i) +
                                    " is not exactly representable as a double");
        out.push_back(d);
    }
    return out;
}

} // namespace detail

/// Exact Bernstein coefficients b_j = sum_{i <= j} C(j,i)/C(n,i) a_i.
[[nodiscard]] inline std::vector<exact_scalar>
exact_bernstein_from_monomial(std::span<const exact_scalar> a)
{
    if (a.empty())
        throw std::invalid_argument("bernstein_from_monomial: empty coefficient vector");
    const std::size_t n = a.size() - 1;
    std::vector<exact_scalar> b(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        exact_scalar sum = 0;
        for (std::size_t i = 0; i <= j; ++i)
            sum += exact_scalar(binomial(j, i), binomial(n, i)) * a[i];
        b[j] = sum;
    }
    return b;
}

/// Throws std::domain_error naming the index of the first coefficient that
/// does not round-trip through double.
[[nodiscard]] inline bernstein_poly bernstein_from_monomial(std::span<const exact_scalar> a)
{
    return bernstein_poly(detail::to_representable(exact_bernstein_from_monomial(a)));
}

struct root_factor {
    exact_scalar root;
    unsigned multiplicity = 1;
};

/// Monomial coefficients of scale * prod (s - root)^multiplicity.
[[nodiscard]] inline std::vector<exact_scalar>
monomial_from_root_form(std::span<const root_factor> factors, const exact_scalar& scale = 1)
{
    std::vector<exact_scalar> a{scale};
    for (const auto& f : factors) {
        for (unsigned m = 0; m < f.multiplicity; ++m) {
            std::vector<exact_scalar> next(a.size() + 1, exact_scalar(0));
            for (std::size_t i = 0; i < a.size(); ++i) {
                next[i + 1] += a[i];
                next[i] -= f.root * a[i];
            }
            a = std::move(next);
        }
    }
    return a;
}

[[nodiscard]] inline bernstein_poly bernstein_from_root_form(std::span<const root_factor> factors,
                                                             const exact_scalar& scale = 1)
{
    return bernstein_from_monomial(monomial_from_root_form(factors, scale));
}

} // namespace kcomp
