#pragma once

// Plain, compensated and K-compensated de Casteljau evaluation of
// polynomials in Bernstein form, plus plain Horner for the monomial basis.
//
// All evaluators are templates over the scalar type so the same kernels run
// on double and on the flop-counting wrapper in flop_counter.hpp.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eft.hpp"

namespace kcomp {

namespace detail {

template <typename T>
void validate_coefficients(std::span<const T> coeffs, const char* what)
{
    using std::isfinite;
    if (coeffs.empty())
        throw std::invalid_argument(std::string(what) + ": empty coefficient vector");
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (!isfinite(coeffs[i]))
            throw std::invalid_argument(std::string(what) + ": coefficient " +
                                        std::to_string(i) + " is not finite");
    }
}

} // namespace detail

/// p(s) = sum_j b_j B_{j,n}(s) with B_{j,n}(s) = C(n,j) (1-s)^{n-j} s^j.
template <typename T>
class basic_bernstein_poly {
public:
    explicit basic_bernstein_poly(std::vector<T> coeffs) : coeffs_(std::move(coeffs))
    {
        detail::validate_coefficients<T>(coeffs_, "bernstein_poly");
    }

    [[nodiscard]] std::span<const T> coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] std::size_t degree() const noexcept { return coeffs_.size() - 1; }

    friend bool operator==(const basic_bernstein_poly&, const basic_bernstein_poly&) = default;

private:
    std::vector<T> coeffs_;
};

/// p(s) = sum_i a_i s^i.
template <typename T>
class basic_monomial_poly {
public:
    explicit basic_monomial_poly(std::vector<T> coeffs) : coeffs_(std::move(coeffs))
    {
        detail::validate_coefficients<T>(coeffs_, "monomial_poly");
    }

    [[nodiscard]] std::span<const T> coeffs() const noexcept { return coeffs_; }
    [[nodiscard]] std::size_t degree() const noexcept { return coeffs_.size() - 1; }

private:
    std::vector<T> coeffs_;
};

using bernstein_poly = basic_bernstein_poly<double>;
using monomial_poly = basic_monomial_poly<double>;

/// Triangular array indexed (k, j) with 0 <= j <= k <= degree, one row per
/// level of the de Casteljau recurrence.
template <typename T>
class triangle {
public:
    triangle() = default;
    explicit triangle(std::size_t degree, T fill = T{})
        : degree_(degree), data_((degree + 1) * (degree + 2) / 2, fill)
    {
    }

    [[nodiscard]] std::size_t degree() const noexcept { return degree_; }

    [[nodiscard]] T& operator()(std::size_t k, std::size_t j) { return data_[offset(k) + j]; }
    [[nodiscard]] const T& operator()(std::size_t k, std::size_t j) const
    {
        return data_[offset(k) + j];
    }

    [[nodiscard]] std::span<const T> row(std::size_t k) const
    {
        return std::span<const T>(data_).subspan(offset(k), k + 1);
    }

private:
    static constexpr std::size_t offset(std::size_t k) noexcept { return k * (k + 1) / 2; }

    std::size_t degree_ = 0;
    std::vector<T> data_;
};

/// Everything CompDeCasteljauK computed, kept for inspection.
///
/// errors[F - 1] holds the stage-F global error estimates; row n of every
/// error triangle is zero. local_terms[F - 1](k, j) is the error vector
/// e_1..e_{5F-2} entering stage F at update site (k, j), k < n. The matching
/// rho * delta_b multiplicand is errors[F - 2](k + 1, j), or base(k + 1, j)
/// when F == 1.
template <typename T>
struct compensation_trace {
    triangle<T> base;
    std::vector<triangle<T>> errors;
    std::vector<triangle<std::vector<T>>> local_terms;
    T r_hat{};
    T rho{};
};

template <typename T>
struct traced_value {
    T value;
    compensation_trace<T> trace;
};

template <typename T>
struct local_error_result {
    std::vector<T> eta;
    T l_hat;
};

/// Algorithm "DeCasteljau": b_j <- (r * b_j) + (s * b_{j+1}), r = 1 - s
/// rounded once. Uses 3 T_n + 1 flops.
template <typename T>
[[nodiscard]] T de_casteljau(const basic_bernstein_poly<T>& p, T s)
{
    const std::size_t n = p.degree();
    const T r = T(1) - s;
    std::vector<T> b(p.coeffs().begin(), p.coeffs().end());
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = 0; j <= k; ++j)
            b[j] = (r * b[j]) + (s * b[j + 1]);
    }
    return b[0];
}

/// Compensated de Casteljau: one level of error filtration, final b + db.
template <product_policy P = product_policy::split, typename T>
[[nodiscard]] T comp_de_casteljau(const basic_bernstein_poly<T>& p, T s)
{
    const std::size_t n = p.degree();
    const auto [r, rho] = two_sum(T(1), -s);
    std::vector<T> b(p.coeffs().begin(), p.coeffs().end());
    std::vector<T> db(n + 1, T(0));
    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = 0; j <= k; ++j) {
            auto [p1, pi1] = product_eft<P>(r, b[j]);
            auto [p2, pi2] = product_eft<P>(s, b[j + 1]);
            auto [bj, sigma3] = two_sum(p1, p2);
            T l = ((pi1 + pi2) + sigma3) + (rho * b[j]);
            db[j] = (l + (s * db[j + 1])) + (r * db[j]);
            b[j] = bj;
        }
    }
    return b[0] + db[0];
}

/// In-place LocalErrorEFT. On entry terms[0..L-1] holds e (L >= 2) and
/// terms[L] is scratch; on exit terms[0..L] holds eta. Returns l_hat with
/// l_hat + sum(eta) == sum(e) + rho * delta_b exactly.
template <product_policy P = product_policy::split, typename T>
[[nodiscard]] T local_error_eft_inplace(std::span<T> terms, T rho, T delta_b)
{
    if (terms.size() < 3)
        throw std::invalid_argument("local_error_eft: need at least two error terms");
    const std::size_t len = terms.size() - 1;
    auto [l, eta1] = two_sum(terms[0], terms[1]);
    terms[0] = eta1;
    for (std::size_t j = 2; j < len; ++j) {
        auto [next, eta] = two_sum(l, terms[j]);
        l = next;
        terms[j - 1] = eta;
    }
    auto [prod, eta_prod] = product_eft<P>(rho, delta_b);
    terms[len - 1] = eta_prod;
    auto [total, eta_last] = two_sum(l, prod);
    terms[len] = eta_last;
    return total;
}

template <product_policy P = product_policy::split, typename T>
[[nodiscard]] local_error_result<T> local_error_eft(std::span<const T> e, T rho, T delta_b)
{
    if (e.size() < 2)
        throw std::invalid_argument("local_error_eft: need at least two error terms");
    std::vector<T> eta(e.begin(), e.end());
    eta.push_back(T(0));
    T l = local_error_eft_inplace<P>(std::span<T>(eta), rho, delta_b);
    return {std::move(eta), l};
}

template <product_policy P = product_policy::split, typename T>
[[nodiscard]] local_error_result<T> local_error_eft(const std::vector<T>& e, T rho, T delta_b)
{
    return local_error_eft<P>(std::span<const T>(e), rho, delta_b);
}

/// LocalError: same summation order as local_error_eft, residuals dropped.
template <typename T>
[[nodiscard]] T local_error(std::span<const T> e, T rho, T delta_b)
{
    if (e.size() < 2)
        throw std::invalid_argument("local_error: need at least two error terms");
    T l = e[0] + e[1];
    for (std::size_t j = 2; j < e.size(); ++j)
        l = l + e[j];
    return l + (rho * delta_b);
}

template <typename T>
[[nodiscard]] T local_error(const std::vector<T>& e, T rho, T delta_b)
{
    return local_error(std::span<const T>(e), rho, delta_b);
}

namespace detail {

template <product_policy P, bool Capture, typename T>
T comp_de_casteljau_k_impl(const basic_bernstein_poly<T>& p, T s, int k_fold,
                           compensation_trace<T>* trace)
{
    const std::size_t n = p.degree();
    const auto stages = static_cast<std::size_t>(k_fold - 1);

    const auto [r, rho] = two_sum(T(1), -s);
    std::vector<T> b(p.coeffs().begin(), p.coeffs().end());
    // errors[F - 1] is the working row of stage F.
    std::vector<std::vector<T>> errors(stages, std::vector<T>(n + 1, T(0)));
    // Largest error vector is the one entering the last stage: 5(K - 1) - 2.
    std::vector<T> terms(5 * stages - 2, T(0));

    if constexpr (Capture) {
        trace->base = triangle<T>(n);
        trace->errors.assign(stages, triangle<T>(n, T(0)));
        trace->local_terms.assign(stages, triangle<std::vector<T>>(n));
        trace->r_hat = r;
        trace->rho = rho;
        for (std::size_t j = 0; j <= n; ++j)
            trace->base(n, j) = b[j];
    }

    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = 0; j <= k; ++j) {
            auto [p1, pi1] = product_eft<P>(r, b[j]);
            auto [p2, pi2] = product_eft<P>(s, b[j + 1]);
            auto [bj, sigma3] = two_sum(p1, p2);
            terms[0] = pi1;
            terms[1] = pi2;
            terms[2] = sigma3;
            std::size_t len = 3;
            T delta_b = b[j];
            b[j] = bj;

            for (std::size_t f = 1; f + 1 < static_cast<std::size_t>(k_fold); ++f) {
                if constexpr (Capture)
                    trace->local_terms[f - 1](k, j).assign(terms.begin(), terms.begin() + len);
                std::vector<T>& err = errors[f - 1];
                T l = local_error_eft_inplace<P>(std::span<T>(terms.data(), len + 1), rho, delta_b);
                ++len;
                auto [q1, eta1] = product_eft<P>(s, err[j + 1]);
                auto [s2, eta2] = two_sum(l, q1);
                auto [q3, eta3] = product_eft<P>(r, err[j]);
                auto [dj, eta4] = two_sum(s2, q3);
                terms[len] = eta1;
                terms[len + 1] = eta2;
                terms[len + 2] = eta3;
                terms[len + 3] = eta4;
                len += 4;
                delta_b = err[j];
                err[j] = dj;
            }

            if constexpr (Capture)
                trace->local_terms[stages - 1](k, j).assign(terms.begin(), terms.begin() + len);
            std::vector<T>& last = errors[stages - 1];
            T l = local_error(std::span<const T>(terms.data(), len), rho, delta_b);
            last[j] = (l + (s * last[j + 1])) + (r * last[j]);
        }

        if constexpr (Capture) {
            for (std::size_t j = 0; j <= k; ++j) {
                trace->base(k, j) = b[j];
                for (std::size_t f = 0; f < stages; ++f)
                    trace->errors[f](k, j) = errors[f][j];
            }
        }
    }

    std::vector<T> leading;
    leading.reserve(static_cast<std::size_t>(k_fold));
    leading.push_back(b[0]);
    for (const auto& err : errors)
        leading.push_back(err[0]);
    return sum_k_inplace(std::span<T>(leading), k_fold);
}

inline void check_k(int k_fold)
{
    if (k_fold < 1)
        throw std::invalid_argument("comp_de_casteljau_k: K must be at least 1");
}

} // namespace detail

/// K-compensated de Casteljau: K - 2 error-free filtrations, one final
/// rounded stage, then SumK over the K leading terms. K == 1 is plain
/// de Casteljau.
template <product_policy P = product_policy::split, typename T>
[[nodiscard]] T comp_de_casteljau_k(const basic_bernstein_poly<T>& p, T s, int k_fold)
{
    detail::check_k(k_fold);
    if (k_fold == 1)
        return de_casteljau(p, s);
    return detail::comp_de_casteljau_k_impl<P, false>(p, s, k_fold, static_cast<compensation_trace<T>*>(nullptr));
}

/// As comp_de_casteljau_k, also returning every intermediate value.
template <product_policy P = product_policy::split, typename T>
[[nodiscard]] traced_value<T> comp_de_casteljau_k_traced(const basic_bernstein_poly<T>& p, T s,
                                                         int k_fold)
{
    detail::check_k(k_fold);
    traced_value<T> out{T(0), {}};
    if (k_fold == 1) {
        // Plain de Casteljau keeps no error triangles; record its levels.
        const std::size_t n = p.degree();
        const auto [r, rho] = two_sum(T(1), -s);
        out.trace.base = triangle<T>(n);
        out.trace.r_hat = r;
        out.trace.rho = rho;
        std::vector<T> b(p.coeffs().begin(), p.coeffs().end());
        for (std::size_t j = 0; j <= n; ++j)
            out.trace.base(n, j) = b[j];
        for (std::size_t k = n; k-- > 0;) {
            for (std::size_t j = 0; j <= k; ++j) {
                b[j] = (r * b[j]) + (s * b[j + 1]);
                out.trace.base(k, j) = b[j];
            }
        }
        out.value = b[0];
        return out;
    }
    out.value = detail::comp_de_casteljau_k_impl<P, true>(p, s, k_fold, &out.trace);
    return out;
}

/// Horner's rule in the monomial basis.
template <typename T>
[[nodiscard]] T horner(const basic_monomial_poly<T>& p, T s)
{
    const auto a = p.coeffs();
    T result = a.back();
    for (std::size_t i = a.size() - 1; i-- > 0;)
        result = (result * s) + a[i];
    return result;
}

[[nodiscard]] constexpr std::uint64_t triangular_number(std::uint64_t n) noexcept
{
    return n * (n + 1) / 2;
}

/// Flops CompDeCasteljauK performs for degree n with split-based TwoProd
/// and a SumK final combine: 3 T_n + 1 for K == 1, otherwise
/// (15K^2 + 11K - 34) T_n + 6K^2 - 11K + 11. With product_policy::fma each
/// of the (3K - 4) T_n products saves 15 flops.
[[nodiscard]] constexpr std::uint64_t flop_count(std::uint64_t n, std::uint64_t k_fold,
                                                 product_policy policy = product_policy::split)
{
    if (k_fold == 0)
        throw std::invalid_argument("flop_count: K must be at least 1");
    const std::uint64_t t = triangular_number(n);
    if (k_fold == 1)
        return 3 * t + 1;
    const std::uint64_t k2 = k_fold * k_fold;
    std::uint64_t count = (15 * k2 + 11 * k_fold - 34) * t + 6 * k2 - 11 * k_fold + 11;
    if (policy == product_policy::fma)
        count -= 15 * (3 * k_fold - 4) * t;
    return count;
}

/// Flops of SumK on `length` terms: (6K - 5)(length - 1).
[[nodiscard]] constexpr std::uint64_t sum_k_flop_count(std::uint64_t length, std::uint64_t k_fold)
{
    if (k_fold == 0 || length == 0)
        throw std::invalid_argument("sum_k_flop_count: K and length must be positive");
    return (6 * k_fold - 5) * (length - 1);
}

} // namespace kcomp
