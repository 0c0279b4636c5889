#pragma once

// Error-free transformations and K-fold compensated summation.
//
// Every routine here assumes IEEE-754 round-to-nearest, ties-to-even and
// must be compiled without FMA contraction or re-association
// (-ffp-contract=off, no -ffast-math). The kcomp CMake target sets this.
//
// Overflow and underflow are not checked. Outside the range where no
// intermediate overflows or underflows the exactness contracts are void.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace kcomp {

/// A floating-point result together with its exact rounding error:
/// result + error equals the exact real operation.
template <typename T>
struct eft_pair {
    T result;
    T error;

    friend constexpr bool operator==(const eft_pair&, const eft_pair&) = default;
};

/// high + low == input, each part holding at most half the significand.
template <typename T>
struct split_pair {
    T high;
    T low;

    friend constexpr bool operator==(const split_pair&, const split_pair&) = default;
};

/// How two_prod is computed inside the compensated kernels. The split-based
/// form is the default everywhere; the FMA form must be requested explicitly.
enum class product_policy { split, fma };

namespace detail {

// 2^r + 1 with r = ceil(digits / 2); 2^27 + 1 for binary64.
template <typename T>
constexpr double split_factor() noexcept
{
    constexpr int digits = std::numeric_limits<T>::digits;
    constexpr int r = (digits + 1) / 2;
    return static_cast<double>((std::uint64_t{1} << r) + 1);
}

} // namespace detail

/// Knuth's branch-free TwoSum (6 flops).
template <typename T>
[[nodiscard]] constexpr eft_pair<T> two_sum(T a, T b)
{
    T s = a + b;
    T z = s - a;
    T e = (a - (s - z)) + (b - z);
    return {s, e};
}

/// Veltkamp/Dekker splitting (4 flops). Requires |a| small enough that
/// a * (2^27 + 1) does not overflow.
template <typename T>
[[nodiscard]] constexpr split_pair<T> split(T a)
{
    T z = a * T(detail::split_factor<T>());
    T h = z - (z - a);
    T l = a - h;
    return {h, l};
}

/// Dekker's TwoProd (17 flops). Exact only when neither the product nor
/// the split parts underflow.
template <typename T>
[[nodiscard]] constexpr eft_pair<T> two_prod(T a, T b)
{
    T p = a * b;
    auto [ah, al] = split(a);
    auto [bh, bl] = split(b);
    T e = al * bl - (((p - ah * bh) - al * bh) - ah * bl);
    return {p, e};
}

/// TwoProd through a fused multiply-add (2 flops).
template <typename T>
[[nodiscard]] inline eft_pair<T> two_prod_fma(T a, T b)
{
    using std::fma;
    T p = a * b;
    T e = fma(a, b, -p);
    return {p, e};
}

template <product_policy P, typename T>
[[nodiscard]] inline eft_pair<T> product_eft(T a, T b)
{
    if constexpr (P == product_policy::fma)
        return two_prod_fma(a, b);
    else
        return two_prod(a, b);
}

/// Error-free vector transformation: cascades TwoSum from the front so the
/// last entry becomes the floating-point sum and the others hold the
/// residuals. The exact sum of the entries is unchanged.
template <typename T>
constexpr void vec_sum(std::span<T> p)
{
    for (std::size_t j = 1; j < p.size(); ++j) {
        auto [s, e] = two_sum(p[j], p[j - 1]);
        p[j] = s;
        p[j - 1] = e;
    }
}

template <typename T>
[[nodiscard]] std::vector<T> vec_sum(std::vector<T> p)
{
    vec_sum(std::span<T>(p));
    return p;
}

/// SumK over a scratch vector that is overwritten. K == 1 is the plain
/// left-to-right sum. Costs (6K - 5)(n - 1) flops.
template <typename T>
[[nodiscard]] T sum_k_inplace(std::span<T> p, int k)
{
    if (k < 1)
        throw std::invalid_argument("sum_k: K must be at least 1");
    if (p.empty())
        throw std::invalid_argument("sum_k: empty input");
    for (int pass = 1; pass < k; ++pass)
        vec_sum(p);
    T result = p[0];
    for (std::size_t j = 1; j < p.size(); ++j)
        result = result + p[j];
    return result;
}

/// Summation as accurate as if carried out in K times the working precision,
/// then rounded once.
template <typename T>
[[nodiscard]] T sum_k(std::span<const T> p, int k)
{
    std::vector<T> scratch(p.begin(), p.end());
    return sum_k_inplace(std::span<T>(scratch), k);
}

template <typename T>
[[nodiscard]] T sum_k(const std::vector<T>& p, int k)
{
    return sum_k(std::span<const T>(p), k);
}

} // namespace kcomp
