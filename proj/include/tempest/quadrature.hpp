#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

#include "tempest/errors.hpp"

namespace tempest::quad {

struct Options {
    double abs_tol = 0.0;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    long evaluations = 0;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double a;
    double b;
    double value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

// One 15-point panel with the QUADPACK error heuristic.
template <class F>
Panel gk15(F& f, double a, double b) {
    const double centre = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const double f_centre = f(centre);

    double kronrod = f_centre * kKronrodWeights[7];
    double gauss = f_centre * kGaussWeights[3];
    double abs_sum = std::abs(kronrod);
    std::array<double, 7> lo{};
    std::array<double, 7> hi{};
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kKronrodNodes[j];
        lo[j] = f(centre - dx);
        hi[j] = f(centre + dx);
        kronrod += kKronrodWeights[j] * (lo[j] + hi[j]);
        abs_sum += kKronrodWeights[j] * (std::abs(lo[j]) + std::abs(hi[j]));
        if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (lo[j] + hi[j]);
    }
    const double mean = 0.5 * kronrod;
    double asc = kKronrodWeights[7] * std::abs(f_centre - mean);
    for (int j = 0; j < 7; ++j) {
        asc += kKronrodWeights[j] * (std::abs(lo[j] - mean) + std::abs(hi[j] - mean));
    }

    const double scale = std::abs(half);
    double err = std::abs((kronrod - gauss) * half);
    asc *= scale;
    abs_sum *= scale;
    if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
    constexpr double eps = std::numeric_limits<double>::epsilon();
    constexpr double tiny = std::numeric_limits<double>::min();
    if (abs_sum > tiny / (50.0 * eps)) err = std::max(50.0 * eps * abs_sum, err);
    return {a, b, kronrod * half, err};
}

}  // namespace detail

/// Integrates f over [a, b]. Throws QuadratureError (carrying the best estimate)
/// when the interval budget runs out before the tolerance is met.
template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
    Result out;
    if (a == b) return out;
    auto counted = [&](double x) {
        ++out.evaluations;
        return f(x);
    };

    std::priority_queue<detail::Panel> heap;
    heap.push(detail::gk15(counted, a, b));
    double value = heap.top().value;
    double error = heap.top().error;

    constexpr double eps = std::numeric_limits<double>::epsilon();
    int panels = 1;
    while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) {
        if (panels >= opt.max_intervals) {
            throw QuadratureError("adaptive quadrature did not converge", value, error);
        }
        const detail::Panel worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        // Interval can no longer be split in floating point.
        if (std::abs(worst.b - worst.a) <= 4.0 * eps * std::max(std::abs(worst.a), std::abs(worst.b))) {
            if (error <= 1e3 * std::max(opt.abs_tol, opt.rel_tol * std::abs(value))) break;
            throw QuadratureError("adaptive quadrature hit roundoff limit", value, error);
        }
        heap.pop();
        const detail::Panel left = detail::gk15(counted, worst.a, mid);
        const detail::Panel right = detail::gk15(counted, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++panels;
        // Drift from incremental updates; recompute occasionally.
        if (panels % 64 == 0) {
            auto copy = heap;
            value = 0.0;
            error = 0.0;
            while (!copy.empty()) {
                value += copy.top().value;
                error += copy.top().error;
                copy.pop();
            }
        }
    }

    auto copy = heap;
    value = 0.0;
    error = 0.0;
    while (!copy.empty()) {
        value += copy.top().value;
        error += copy.top().error;
        copy.pop();
    }
    out.value = value;
    out.error = error;
    return out;
}

/// Integrates over [a, b] after splitting at the midpoint and substituting
/// t = a + s^2 on the left half (when `left_singular`) and t = b - s^2 on the
/// right half (when `right_singular`). Tames integrable derivative blowup at
/// the endpoints.
template <class F>
Result integrate_with_endpoint_substitution(F&& f, double a, double b, bool left_singular,
                                            bool right_singular, const Options& opt = {}) {
    if (!left_singular && !right_singular) return integrate(f, a, b, opt);
    const double mid = 0.5 * (a + b);
    Options half = opt;
    half.abs_tol = 0.5 * opt.abs_tol;

    Result total;
    auto add = [&total](const Result& r) {
        total.value += r.value;
        total.error += r.error;
        total.evaluations += r.evaluations;
    };
    if (left_singular) {
        add(integrate([&](double s) { return 2.0 * s * f(a + s * s); }, 0.0, std::sqrt(mid - a), half));
    } else {
        add(integrate(f, a, mid, half));
    }
    if (right_singular) {
        add(integrate([&](double s) { return 2.0 * s * f(b - s * s); }, 0.0, std::sqrt(b - mid), half));
    } else {
        add(integrate(f, mid, b, half));
    }
    return total;
}

}  // namespace tempest::quad
