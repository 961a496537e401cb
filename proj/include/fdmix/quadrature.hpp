#pragma once

// Globally adaptive Gauss-Kronrod (10/21) integration over finite and
// semi-infinite intervals. Semi-infinite ranges [a, inf) are mapped onto
// [0, 1) with x = a + L t / (1 - t).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "fdmix/errors.hpp"

namespace fdmix {

struct QuadratureSpec {
    double rel_tol = 1e-6;
    double abs_tol = 1e-12;
    std::size_t max_subdivisions = 1000;
    double tail_mass_cutoff = 1e-9;

    /// Spec for integrals nested inside another integrand.
    QuadratureSpec inner() const {
        QuadratureSpec s = *this;
        s.rel_tol = rel_tol / 10.0;
        return s;
    }
};

void validate(const QuadratureSpec& spec);

/// Radius beyond which a nearest-distance law with (density, nu) keeps at
/// most spec.tail_mass_cutoff of its mass.
double truncation_radius(double density, double nu, const QuadratureSpec& spec);

namespace detail {

struct GkSegment {
    double a;
    double b;
    double value;
    double error;
};

inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208059443820, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Gauss weights for the odd-indexed Kronrod nodes.
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

[[noreturn]] inline void throw_non_finite(std::string_view label, double x, double value) {
    std::ostringstream msg;
    msg << "integral '" << label << "': integrand is " << value << " at x = " << x;
    throw NonFiniteIntegrand(msg.str());
}

template <class G>
GkSegment gauss_kronrod_21(const G& g, double a, double b, std::string_view label) {
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    auto eval = [&](double x) {
        const double v = g(x);
        if (!std::isfinite(v)) throw_non_finite(label, x, v);
        return v;
    };
    std::array<double, 21> values{};
    values[20] = eval(center);
    for (std::size_t i = 0; i < 10; ++i) {
        const double dx = half * kKronrodNodes[i];
        values[2 * i] = eval(center - dx);
        values[2 * i + 1] = eval(center + dx);
    }
    double kronrod = kKronrodWeights[10] * values[20];
    double abs_sum = kKronrodWeights[10] * std::abs(values[20]);
    double gauss = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
        const double pair = values[2 * i] + values[2 * i + 1];
        kronrod += kKronrodWeights[i] * pair;
        abs_sum += kKronrodWeights[i] * (std::abs(values[2 * i]) + std::abs(values[2 * i + 1]));
        if (i % 2 == 1) gauss += kGaussWeights[i / 2] * pair;
    }
    // QUADPACK error heuristic.
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[10] * std::abs(values[20] - mean);
    for (std::size_t i = 0; i < 10; ++i)
        asc += kKronrodWeights[i] *
               (std::abs(values[2 * i] - mean) + std::abs(values[2 * i + 1] - mean));
    const double abs_half = std::abs(half);
    asc *= abs_half;
    abs_sum *= abs_half;
    double err = std::abs((kronrod - gauss) * half);
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    if (abs_sum > std::numeric_limits<double>::min() / (50.0 * eps))
        err = std::max(50.0 * eps * abs_sum, err);
    return GkSegment{a, b, kronrod * half, err};
}

template <class G>
double adaptive_gk(const G& g, double a, double b, const QuadratureSpec& spec,
                   std::string_view label) {
    auto by_error = [](const GkSegment& l, const GkSegment& r) { return l.error < r.error; };
    std::vector<GkSegment> heap;
    heap.reserve(std::min<std::size_t>(spec.max_subdivisions, 64));
    heap.push_back(gauss_kronrod_21(g, a, b, label));
    double total = heap.front().value;
    double error = heap.front().error;

    while (error > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (heap.size() >= spec.max_subdivisions) {
            std::ostringstream msg;
            msg << "integral '" << label << "' did not converge within " << spec.max_subdivisions
                << " subdivisions (estimate " << total << ", error " << error << ")";
            throw NonConvergence(msg.str());
        }
        std::pop_heap(heap.begin(), heap.end(), by_error);
        const GkSegment worst = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() *
                                       std::max(std::abs(worst.a), std::abs(worst.b))) {
            std::ostringstream msg;
            msg << "integral '" << label << "' hit round-off limit near x = " << mid
                << " (error " << error << ")";
            throw NonConvergence(msg.str());
        }
        const GkSegment left = gauss_kronrod_21(g, worst.a, mid, label);
        const GkSegment right = gauss_kronrod_21(g, mid, worst.b, label);
        heap.push_back(left);
        std::push_heap(heap.begin(), heap.end(), by_error);
        heap.push_back(right);
        std::push_heap(heap.begin(), heap.end(), by_error);

        total = 0.0;
        error = 0.0;
        for (const auto& s : heap) {
            total += s.value;
            error += s.error;
        }
    }
    return total;
}

}  // namespace detail

/// Integrates f over [a, b]; b may be +infinity, in which case `scale` sets
/// the length L of the map x = a + L t / (1 - t). Throws NonConvergence when
/// the subdivision budget is spent and NonFiniteIntegrand on NaN/inf samples.
template <class F>
double integrate(const F& f, double a, double b, const QuadratureSpec& spec,
                 std::string_view label = "integral", double scale = 1.0) {
    if (std::isnan(a) || std::isnan(b) || std::isinf(a))
        throw InvalidParameter("integrate: bad interval for '" + std::string(label) + "'");
    if (a == b) return 0.0;
    if (b < a) return -integrate(f, b, a, spec, label, scale);
    if (std::isinf(b)) {
        if (!(scale > 0.0)) throw InvalidParameter("integrate: scale must be positive");
        auto mapped = [&](double t) {
            const double one_minus = 1.0 - t;
            const double x = a + scale * t / one_minus;
            const double fx = f(x);
            if (fx == 0.0) return 0.0;
            return fx * scale / (one_minus * one_minus);
        };
        return detail::adaptive_gk(mapped, 0.0, 1.0, spec, label);
    }
    return detail::adaptive_gk(f, a, b, spec, label);
}

}  // namespace fdmix
