#pragma once

// Deterministic reproductions of the accuracy experiments: evaluation near
// multiple roots, the condition-number sweep, the K = 2 trace at
// s = 1/2 + 1001u, and flop accounting. Sweeps produce sweep_records that
// serialize to a fixed CSV schema with hex-float columns for bit-exactness.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "casteljau.hpp"
#include "exact.hpp"
#include "flop_counter.hpp"

namespace kcomp::experiments {

enum class method { decasteljau, comp, comp_k, horner };

[[nodiscard]] constexpr std::string_view to_string(method m) noexcept
{
    switch (m) {
    case method::decasteljau:
        return "decasteljau";
    case method::comp:
        return "comp";
    case method::comp_k:
        return "compK";
    case method::horner:
        return "horner";
    }
    return "?";
}

/// K = 1 is plain de Casteljau, K = 2 the compensated algorithm, K >= 3 the
/// K-compensated one.
[[nodiscard]] constexpr method method_for_k(int k) noexcept
{
    return k == 1 ? method::decasteljau : k == 2 ? method::comp : method::comp_k;
}

[[nodiscard]] inline double evaluate(const bernstein_poly& p, double s, int k)
{
    switch (method_for_k(k)) {
    case method::decasteljau:
        return de_casteljau(p, s);
    case method::comp:
        return comp_de_casteljau(p, s);
    default:
        return comp_de_casteljau_k(p, s, k);
    }
}

struct sweep_record {
    double s = 0.0;
    method m = method::decasteljau;
    int k = 1;
    double value = 0.0;
    exact_scalar exact;
    std::optional<double> rel_err; // empty when the exact value is 0
    double abs_err = 0.0;
    std::optional<double> cond; // empty when infinite
};

struct experiment_config {
    std::vector<int> k_list;           // empty: experiment default
    std::optional<std::size_t> points; // empty: experiment default

    void validate() const
    {
        for (int k : k_list) {
            if (k < 1 || k > 8)
                throw std::invalid_argument("K values must lie in 1..8, got " + std::to_string(k));
        }
        if (points && *points < 2)
            throw std::invalid_argument("point count must be at least 2");
    }
};

// Test polynomials ---------------------------------------------------------

/// (2s - 1)^3 in Bernstein form.
[[nodiscard]] inline bernstein_poly cubic_bernstein()
{
    return bernstein_poly({-1.0, 1.0, -1.0, 1.0});
}

/// (2s - 1)^3 in the monomial basis.
[[nodiscard]] inline monomial_poly cubic_monomial()
{
    return monomial_poly({-1.0, 6.0, -12.0, 8.0});
}

/// (2s - 1)^3 (s - 1) in Bernstein form.
[[nodiscard]] inline bernstein_poly quartic_bernstein()
{
    return bernstein_poly({1.0, -0.75, 0.5, -0.25, 0.0});
}

/// (s - 1)(s - 3/4)^7 in Bernstein form.
[[nodiscard]] inline bernstein_poly octic_bernstein()
{
    const std::array<root_factor, 2> factors{root_factor{1, 1}, root_factor{exact_scalar(3, 4), 7}};
    return bernstein_from_root_form(factors);
}

/// 1/2 + 1001 u, the point where compensated evaluation of the quartic
/// collapses to exactly 0.
[[nodiscard]] inline double table1_point()
{
    return 0.5 + 1001.0 * std::ldexp(1.0, -53);
}

// Record assembly ----------------------------------------------------------

namespace detail {

struct point_truth {
    exact_scalar exact;
    std::optional<exact_scalar> cond;
};

inline point_truth truth_at(const bernstein_poly& p, double s)
{
    const auto b = to_exact(p.coeffs());
    const auto xs = to_exact(s);
    point_truth t{exact_eval(b, xs), std::nullopt};
    if (t.exact != 0)
        t.cond = p_tilde(b, xs) / abs_exact(t.exact);
    return t;
}

inline sweep_record make_record(double s, method m, int k, double value, const point_truth& t)
{
    sweep_record r;
    r.s = s;
    r.m = m;
    r.k = k;
    r.value = value;
    r.exact = t.exact;
    r.rel_err = relative_error(value, t.exact);
    r.abs_err = absolute_error(value, t.exact);
    if (t.cond)
        r.cond = round_to_double(*t.cond);
    return r;
}

inline void sort_records(std::vector<sweep_record>& rows)
{
    auto key = [](const sweep_record& r) { return std::tuple(r.s, static_cast<int>(r.m), r.k); };
    std::stable_sort(rows.begin(), rows.end(),
                     [&](const sweep_record& a, const sweep_record& b) { return key(a) < key(b); });
    rows.erase(std::unique(rows.begin(), rows.end(),
                           [&](const sweep_record& a, const sweep_record& b) {
                               return key(a) == key(b);
                           }),
               rows.end());
}

inline std::vector<int> k_list_or(const experiment_config& cfg, std::vector<int> fallback)
{
    return cfg.k_list.empty() ? fallback : cfg.k_list;
}

/// `count` points centre + fl(j * step), j = -(count-1)/2 .. (count-1)/2,
/// with step = half_width / ((count-1)/2) rounded once. half_width is exact.
inline std::vector<double> symmetric_points(double centre, const exact_scalar& half_width,
                                            std::size_t count)
{
    const exact_scalar h = exact_scalar(static_cast<long>(count - 1), 2);
    const double step = round_to_double(half_width / h);
    const double hd = round_to_double(h);
    std::vector<double> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double j = static_cast<double>(i) - hd;
        const double offset = j * step;
        pts.push_back(centre + offset);
    }
    return pts;
}

} // namespace detail

/// Evaluation near the 7-fold root 3/4 of (s - 1)(s - 3/4)^7 at the points
/// fl(3/4 + fl(j * 5e-8)), j = -200..200 by default. Default K list {1, 2, 3}.
[[nodiscard]] inline std::vector<sweep_record> run_root_neighborhood(const experiment_config& cfg)
{
    cfg.validate();
    const auto p = octic_bernstein();
    const auto ks = detail::k_list_or(cfg, {1, 2, 3});
    const std::size_t count = cfg.points.value_or(401);
    const auto pts = detail::symmetric_points(0.75, exact_scalar(1, 100000), count);

    std::vector<sweep_record> rows;
    rows.reserve(pts.size() * ks.size());
    for (double s : pts) {
        const auto truth = detail::truth_at(p, s);
        for (int k : ks)
            rows.push_back(detail::make_record(s, method_for_k(k), k, evaluate(p, s, k), truth));
    }
    detail::sort_records(rows);
    return rows;
}

/// Points 3/4 - (1.3)^j for j = -5, -6, ..., -(4 + count), where the power
/// of the double nearest 1.3 is formed exactly and rounded once.
[[nodiscard]] inline std::vector<double> condition_sweep_points(std::size_t count)
{
    const exact_scalar base = to_exact(1.3);
    std::vector<double> pts;
    pts.reserve(count);
    exact_scalar power = 1;
    for (int i = 0; i < 4; ++i)
        power /= base;
    for (std::size_t i = 0; i < count; ++i) {
        power /= base;
        pts.push_back(0.75 - round_to_double(power));
    }
    return pts;
}

/// Relative error against condition number for (s - 1)(s - 3/4)^7 along
/// the 86-point geometric approach to 3/4. Default K list {1, 2, 3, 4}.
/// Throws std::runtime_error if the condition number fails to increase
/// strictly along the sweep.
[[nodiscard]] inline std::vector<sweep_record> run_condition_sweep(const experiment_config& cfg)
{
    cfg.validate();
    const auto p = octic_bernstein();
    const auto ks = detail::k_list_or(cfg, {1, 2, 3, 4});
    const auto pts = condition_sweep_points(cfg.points.value_or(86));

    std::vector<sweep_record> rows;
    rows.reserve(pts.size() * ks.size());
    std::optional<exact_scalar> previous;
    for (double s : pts) {
        const auto truth = detail::truth_at(p, s);
        if (!truth.cond)
            throw std::runtime_error("condition sweep hit an exact root");
        if (previous && !(*truth.cond > *previous))
            throw std::runtime_error("condition number does not increase along the sweep");
        previous = truth.cond;
        for (int k : ks)
            rows.push_back(detail::make_record(s, method_for_k(k), k, evaluate(p, s, k), truth));
    }
    detail::sort_records(rows);
    return rows;
}

/// Horner against de Casteljau on (2s - 1)^3 for |s - 1/2| <= 2e-5, and the
/// compensated evaluators on (2s - 1)^3 (s - 1) for |s - 1/2| <= 1.5e-11,
/// plus the point 1/2 + 1001u evaluated with K = 2, 3, 4. The two groups
/// use disjoint method names. Default K list for the second group {2, 3}.
[[nodiscard]] inline std::vector<sweep_record> run_cubic_comparison(const experiment_config& cfg)
{
    cfg.validate();
    const std::size_t count = cfg.points.value_or(401);
    std::vector<sweep_record> rows;

    const auto cubic = cubic_bernstein();
    const auto mono = cubic_monomial();
    for (double s : detail::symmetric_points(0.5, exact_scalar(2, 100000), count)) {
        const auto truth = detail::truth_at(cubic, s);
        rows.push_back(detail::make_record(s, method::horner, 1, horner(mono, s), truth));
        rows.push_back(detail::make_record(s, method::decasteljau, 1, de_casteljau(cubic, s), truth));
    }

    const auto quartic = quartic_bernstein();
    auto ks = detail::k_list_or(cfg, {2, 3});
    ks.erase(std::remove(ks.begin(), ks.end(), 1), ks.end());
    for (double s : detail::symmetric_points(0.5, exact_scalar(15, 1000000000000), count)) {
        const auto truth = detail::truth_at(quartic, s);
        for (int k : ks)
            rows.push_back(
                detail::make_record(s, method_for_k(k), k, evaluate(quartic, s, k), truth));
    }

    std::set<int> special(ks.begin(), ks.end());
    special.insert({2, 3, 4});
    const double star = table1_point();
    const auto truth = detail::truth_at(quartic, star);
    for (int k : special)
        rows.push_back(
            detail::make_record(star, method_for_k(k), k, evaluate(quartic, star, k), truth));

    detail::sort_records(rows);
    return rows;
}

// A priori bounds ----------------------------------------------------------

/// Coefficient of cond in the relative error bound of the K-fold evaluator
/// on a degree-n polynomial, u^K included. Known for K = 1..4.
[[nodiscard]] inline exact_scalar bound_multiplier(std::size_t n, int k)
{
    const exact_scalar u = unit_roundoff();
    const exact_scalar x = static_cast<unsigned long>(n);
    switch (k) {
    case 1:
        return 3 * x * u;
    case 2:
        return 3 * x * (3 * x + 7) / 2 * u * u;
    case 3:
        return 3 * x * (3 * x * x + 36 * x + 61) / 2 * u * u * u;
    case 4: {
        const exact_scalar c = 81 * exact_scalar(binomial(n, 4)) + 810 * exact_scalar(binomial(n, 3)) +
                               2475 * exact_scalar(binomial(n, 2)) + 2250 * x;
        return c * u * u * u * u;
    }
    default:
        throw std::invalid_argument("bound_multiplier: K must lie in 1..4");
    }
}

/// multiplier_K(n) * cond + 2u. Left uncapped: past cond ~ 1/u^K the computed
/// value can carry the wrong sign, giving relative errors above 1.
[[nodiscard]] inline exact_scalar theoretical_curve(std::size_t n, int k, const exact_scalar& cond)
{
    return bound_multiplier(n, k) * cond + 2 * unit_roundoff();
}

// CSV ----------------------------------------------------------------------

inline constexpr std::string_view csv_header = "s_hex,s_dec,method,k,value_hex,exact_dec,rel_err,cond";

[[nodiscard]] inline std::string hex_float(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%a", x);
    return buf;
}

[[nodiscard]] inline std::string round_trip_decimal(double x)
{
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// One CSV line, no trailing newline. rel_err holds "abs:<absolute error>"
/// when the exact value is zero; cond holds "inf" there.
[[nodiscard]] inline std::string to_csv_row(const sweep_record& r)
{
    std::string line;
    line += hex_float(r.s);
    line += ',';
    line += round_trip_decimal(r.s);
    line += ',';
    line += to_string(r.m);
    line += ',';
    line += std::to_string(r.k);
    line += ',';
    line += hex_float(r.value);
    line += ',';
    line += to_decimal(r.exact, 40);
    line += ',';
    line += r.rel_err ? round_trip_decimal(*r.rel_err) : "abs:" + round_trip_decimal(r.abs_err);
    line += ',';
    line += r.cond ? round_trip_decimal(*r.cond) : "inf";
    return line;
}

inline void write_csv(std::ostream& os, const std::vector<sweep_record>& rows)
{
    os << csv_header << '\n';
    for (const auto& r : rows)
        os << to_csv_row(r) << '\n';
}

// K = 2 trace --------------------------------------------------------------

struct table1_entry {
    std::size_t k = 0;
    std::size_t j = 0;
    double b_hat = 0.0;
    exact_scalar b_hat_expected;
    double db_hat = 0.0;
    exact_scalar db_hat_expected;
    exact_scalar residual; // exact db - computed db
    exact_scalar residual_expected;

    [[nodiscard]] bool matches() const
    {
        return to_exact(b_hat) == b_hat_expected && to_exact(db_hat) == db_hat_expected &&
               residual == residual_expected;
    }
};

struct table1_report {
    double s = 0.0;
    std::vector<table1_entry> entries;
    double result = 0.0; // K = 2
    exact_scalar exact_value;
    exact_scalar exact_value_expected;

    [[nodiscard]] bool ok() const
    {
        const exact_scalar tiny = pow2(-57);
        bool good = result == 0.0 && exact_value == exact_value_expected;
        for (const auto& e : entries) {
            good = good && e.matches();
            if (e.k == 0 && e.j == 0)
                good = good && to_exact(e.b_hat) == tiny && to_exact(e.db_hat) == -tiny;
        }
        return good && entries.size() == 10;
    }
};

namespace detail {

// Closed forms of the trace for (2s - 1)^3 (s - 1) at s = 1/2 + w, w = 1001u,
// as (b_hat, db_hat, exact db - db_hat) per (k, j).
inline std::vector<std::tuple<std::size_t, std::size_t, exact_scalar, exact_scalar, exact_scalar>>
table1_closed_forms()
{
    const exact_scalar u = pow2(-53);
    const exact_scalar w = 1001 * u;
    const exact_scalar w2 = w * w;
    const exact_scalar w3 = w2 * w;
    const exact_scalar u2 = u * u;
    auto q = [](long n, long d) { return exact_scalar(n, d); };
    return {
        {3, 0, q(1, 8) - q(7, 4) * w - q(1, 4) * u, q(1, 4) * u, 0},
        {3, 1, q(-1, 8) + q(5, 4) * w + q(1, 4) * u, q(-1, 4) * u, 0},
        {3, 2, q(1, 8) - q(3, 4) * w, 0, 0},
        {3, 3, q(-1, 8) + q(1, 4) * w, 0, 0},
        {2, 0, q(-1, 2) * w, 3 * w2, 0},
        {2, 1, q(1, 2) * w + q(1, 8) * u, q(-1, 8) * u - 2 * w2, 0},
        {2, 2, q(-1, 2) * w, w2, 0},
        {1, 0, q(1, 16) * u + w2 + 239 * u2, q(-1, 16) * u + q(1, 2) * w2 - 239 * u2, -5 * w3},
        {1, 1, q(1, 16) * u - w2 - 239 * u2, q(-1, 16) * u - q(1, 2) * w2 + 239 * u2, 3 * w3},
        {0, 0, q(1, 16) * u, q(-1, 16) * u, -4 * w3 + 8 * w3 * w},
    };
}

} // namespace detail

/// Runs the K = 2 traced evaluation of the quartic at 1/2 + 1001u and lines
/// every computed term up against its closed form.
[[nodiscard]] inline table1_report run_table1()
{
    const auto p = quartic_bernstein();
    table1_report rep;
    rep.s = table1_point();
    const auto traced = comp_de_casteljau_k_traced(p, rep.s, 2);
    const auto exact = exact_triangle(p, rep.s);
    rep.result = traced.value;
    rep.exact_value = exact(0, 0);

    const exact_scalar w = 1001 * pow2(-53);
    rep.exact_value_expected = -4 * w * w * w + 8 * w * w * w * w;

    for (const auto& [k, j, b_exp, db_exp, res_exp] : detail::table1_closed_forms()) {
        table1_entry e;
        e.k = k;
        e.j = j;
        e.b_hat = traced.trace.base(k, j);
        e.db_hat = traced.trace.errors[0](k, j);
        e.b_hat_expected = b_exp;
        e.db_hat_expected = db_exp;
        e.residual = exact(k, j) - to_exact(e.b_hat) - to_exact(e.db_hat);
        e.residual_expected = res_exp;
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

inline void write_table1(std::ostream& os, const table1_report& rep)
{
    auto mark = [](bool ok) { return ok ? "ok" : "MISMATCH"; };
    os << "# s = " << hex_float(rep.s) << " (1/2 + 1001u), p(s) = (2s - 1)^3 (s - 1), K = 2\n";
    os << "k,j,b_hat_hex,b_hat_check,db_hat_hex,db_hat_check,residual_dec,residual_check\n";
    for (const auto& e : rep.entries) {
        os << e.k << ',' << e.j << ',' << hex_float(e.b_hat) << ','
           << mark(to_exact(e.b_hat) == e.b_hat_expected) << ',' << hex_float(e.db_hat) << ','
           << mark(to_exact(e.db_hat) == e.db_hat_expected) << ',' << to_decimal(e.residual, 40)
           << ',' << mark(e.residual == e.residual_expected) << '\n';
    }
    os << "# result (K = 2) = " << hex_float(rep.result) << '\n';
    os << "# exact p(s) = " << to_decimal(rep.exact_value, 40) << ' '
       << mark(rep.exact_value == rep.exact_value_expected) << '\n';
    os << "# " << (rep.ok() ? "PASS" : "FAIL") << '\n';
}

// Flop accounting ----------------------------------------------------------

struct flop_row {
    std::size_t n = 0;
    int k = 1;
    std::uint64_t formula = 0;
    flop_ledger instrumented;
    std::uint64_t formula_fma = 0;
    flop_ledger instrumented_fma;
    std::uint64_t sum_k_flops = 0; // SumK on the K leading terms
    std::uint64_t fma_savings = 0; // 15 (3K - 4) T_n

    [[nodiscard]] bool ok() const
    {
        return instrumented.total() == formula && instrumented_fma.total() == formula_fma;
    }
};

/// Instrumented flop counts of comp_de_casteljau_k against the closed form.
[[nodiscard]] inline flop_row measure_flops(std::size_t n, int k)
{
    std::vector<double> coeffs(n + 1);
    for (std::size_t j = 0; j <= n; ++j)
        coeffs[j] = (j % 2 == 0 ? 1.0 : -1.0) * static_cast<double>(j + 1) / 8.0;
    const auto p = to_counted(bernstein_poly(coeffs));
    const counted_double s = 0.375;

    flop_row row;
    row.n = n;
    row.k = k;
    row.formula = flop_count(n, static_cast<std::uint64_t>(k));
    row.formula_fma = flop_count(n, static_cast<std::uint64_t>(k), product_policy::fma);
    row.instrumented = count_flops([&] { (void)comp_de_casteljau_k(p, s, k); });
    row.instrumented_fma =
        count_flops([&] { (void)comp_de_casteljau_k<product_policy::fma>(p, s, k); });
    row.sum_k_flops = k == 1 ? 0 : sum_k_flop_count(static_cast<std::uint64_t>(k),
                                                    static_cast<std::uint64_t>(k));
    row.fma_savings = k == 1 ? 0 : 15 * (3 * static_cast<std::uint64_t>(k) - 4) * triangular_number(n);
    return row;
}

[[nodiscard]] inline std::vector<flop_row> run_flop_report(std::size_t n_min = 2, std::size_t n_max = 8,
                                                           int k_min = 1, int k_max = 5)
{
    std::vector<flop_row> rows;
    for (std::size_t n = n_min; n <= n_max; ++n) {
        for (int k = k_min; k <= k_max; ++k)
            rows.push_back(measure_flops(n, k));
    }
    return rows;
}

inline void write_flop_report(std::ostream& os, const std::vector<flop_row>& rows)
{
    os << "n,k,formula,instrumented,add,sub,mul,fma,sumk_flops,formula_fma,instrumented_fma,"
          "fma_savings,match\n";
    for (const auto& r : rows) {
        os << r.n << ',' << r.k << ',' << r.formula << ',' << r.instrumented.total() << ','
           << r.instrumented.add << ',' << r.instrumented.sub << ',' << r.instrumented.mul << ','
           << r.instrumented.fma << ',' << r.sum_k_flops << ',' << r.formula_fma << ','
           << r.instrumented_fma.total() << ',' << r.fma_savings << ','
           << (r.ok() ? "yes" : "NO") << '\n';
    }
}

} // namespace kcomp::experiments
