#pragma once

// A double that counts every arithmetic operation applied to it. The
// evaluators are templates, so instantiating them on counted_double gives an
// instrumented run while the double instantiations stay untouched.
//
// Negation is a sign flip and is not counted. Counts are per thread.

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <vector>

#include "casteljau.hpp"

namespace kcomp {

struct flop_ledger {
    std::uint64_t add = 0;
    std::uint64_t sub = 0;
    std::uint64_t mul = 0;
    std::uint64_t fma = 0;

    [[nodiscard]] constexpr std::uint64_t total() const noexcept { return add + sub + mul + fma; }

    friend std::ostream& operator<<(std::ostream& os, const flop_ledger& l)
    {
        return os << "add=" << l.add << " sub=" << l.sub << " mul=" << l.mul << " fma=" << l.fma
                  << " total=" << l.total();
    }
};

inline flop_ledger& flop_tally() noexcept
{
    thread_local flop_ledger ledger;
    return ledger;
}

class counted_double {
public:
    constexpr counted_double() noexcept = default;
    constexpr counted_double(double v) noexcept : v_(v) {} // NOLINT: implicit by intent

    [[nodiscard]] constexpr double value() const noexcept { return v_; }
    constexpr explicit operator double() const noexcept { return v_; }

    friend counted_double operator+(counted_double a, counted_double b) noexcept
    {
        ++flop_tally().add;
        return a.v_ + b.v_;
    }
    friend counted_double operator-(counted_double a, counted_double b) noexcept
    {
        ++flop_tally().sub;
        return a.v_ - b.v_;
    }
    friend counted_double operator*(counted_double a, counted_double b) noexcept
    {
        ++flop_tally().mul;
        return a.v_ * b.v_;
    }
    friend constexpr counted_double operator-(counted_double a) noexcept { return -a.v_; }

    friend counted_double fma(counted_double a, counted_double b, counted_double c) noexcept
    {
        ++flop_tally().fma;
        return std::fma(a.v_, b.v_, c.v_);
    }
    friend bool isfinite(counted_double a) noexcept { return std::isfinite(a.v_); }

    friend constexpr bool operator==(counted_double a, counted_double b) noexcept
    {
        return a.v_ == b.v_;
    }

private:
    double v_ = 0.0;
};

/// Counts the flops of one call. Resets the thread's tally first.
template <typename F>
[[nodiscard]] flop_ledger count_flops(F&& f)
{
    flop_tally() = {};
    f();
    return flop_tally();
}

[[nodiscard]] inline basic_bernstein_poly<counted_double> to_counted(const bernstein_poly& p)
{
    return basic_bernstein_poly<counted_double>(
        std::vector<counted_double>(p.coeffs().begin(), p.coeffs().end()));
}

} // namespace kcomp

template <>
class std::numeric_limits<kcomp::counted_double> : public std::numeric_limits<double> {
};
