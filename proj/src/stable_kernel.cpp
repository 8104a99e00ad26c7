#include "tempest/stable_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tempest/errors.hpp"
#include "tempest/quadrature.hpp"

namespace tempest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Integrand mass below exp(-kCut) relative to the peak is dropped.
constexpr double kCut = 60.0;

double log_v_open(const AlphaBranch& br, const AngleOffsets& at) {
    const double a = br.alpha();
    if (at.delta <= 0.0) return br.log_v_right_end();
    if (at.u == 0.0) return kInf;
    if (at.w <= 0.0) return -kInf;

    const double inv_am1 = 1.0 / (a - 1.0);
    const double sin_delta = std::sin(std::min(at.delta, at.w));
    const double sin_am1 = std::sin((a - 1.0) * at.delta);
    const double au = a * at.u;
    const double sin_a = au > kHalfPi ? std::sin(a * at.delta) : std::abs(std::sin(au));
    return (std::log(br.abs_cos_half_pi_alpha()) + std::log(sin_delta)) * inv_am1 + std::log(sin_am1) -
           a * inv_am1 * std::log(sin_a);
}

double log_v_one(const AngleOffsets& at) {
    if (at.delta <= 0.0) return std::log(2.0 / kPi) - 1.0;
    if (at.w <= 0.0) return kInf;
    const double sin_delta = std::sin(std::min(at.delta, at.w));
    const double cos_delta = at.delta <= kHalfPi ? std::cos(at.delta) : -std::cos(at.w);
    return std::log(2.0 * at.delta / kPi) - std::log(sin_delta) - at.delta * cos_delta / sin_delta;
}

// Parametrisation of the integration range by distance from one special angle:
// pi/2 (t = delta), -pi/2 (t = w), or -theta0 from above or below (t = |u|).
struct Chart {
    enum class From { RightEnd, LeftEnd, PoleAbove, PoleBelow };
    From from;
    double pole_delta;  // delta at theta = -theta0: pi/alpha, or pi when alpha = 1

    AngleOffsets at(double t) const {
        switch (from) {
            case From::RightEnd: return {t, kPi - t, pole_delta - t};
            case From::LeftEnd: return {kPi - t, t, t - (kPi - pole_delta)};
            case From::PoleAbove: return {pole_delta - t, kPi - pole_delta + t, t};
            case From::PoleBelow: return {pole_delta + t, kPi - pole_delta - t, -t};
        }
        return {};
    }
};

}  // namespace

AlphaBranch::AlphaBranch(double alpha) : alpha_(alpha) {
    if (!(alpha >= 1.0 && alpha < 2.0)) throw DomainError("alpha must lie in [1, 2)");
    kind_ = alpha == 1.0 ? Kind::ExactlyOne : Kind::OpenInterval;
    if (is_one()) {
        theta0_ = kHalfPi;
        abs_cos_ = 0.0;
        log_v_right_end_ = std::log(2.0 / kPi) - 1.0;
    } else {
        theta0_ = kPi / alpha - kHalfPi;
        abs_cos_ = std::sin(kHalfPi * (alpha - 1.0));
        log_v_right_end_ = std::log(alpha - 1.0) + (std::log(abs_cos_) - alpha * std::log(alpha)) / (alpha - 1.0);
    }
}

bool AlphaBranch::ill_conditioned() const noexcept { return !is_one() && alpha_ < 1.0 + 1e-6; }

double theta0(const AlphaBranch& branch) { return branch.theta0(); }

AngleOffsets angle_offsets(const AlphaBranch& branch, double theta) {
    if (!(theta >= -kHalfPi && theta <= kHalfPi)) throw DomainError("theta must lie in (-pi/2, pi/2)");
    return {kHalfPi - theta, theta + kHalfPi, theta + branch.theta0()};
}

double log_v(const AlphaBranch& branch, const AngleOffsets& at) {
    return branch.is_one() ? log_v_one(at) : log_v_open(branch, at);
}

double log_v(const AlphaBranch& branch, double theta) { return log_v(branch, angle_offsets(branch, theta)); }

double log_f_star_from_log_v(const AlphaBranch& br, double x, double u, double lv) {
    if (std::isnan(x)) throw DomainError("x is NaN");
    if (br.is_one()) {
        if (!std::isfinite(lv) || std::isinf(x)) return -kInf;
        const double s = kHalfPi * x;
        return std::log(0.5) + s + lv - std::exp(s + lv);
    }
    if (x == 0.0 || std::isinf(x)) return -kInf;
    if ((x > 0.0) != (u > 0.0) || u == 0.0) return -kInf;
    if (!std::isfinite(lv)) return -kInf;
    const double a = br.alpha();
    const double inv_am1 = 1.0 / (a - 1.0);
    const double lx = std::log(std::abs(x));
    return std::log(a * inv_am1 / kPi) + lx * inv_am1 + lv - std::exp(a * inv_am1 * lx + lv);
}

double log_f_star(const AlphaBranch& branch, double x, const AngleOffsets& at) {
    return log_f_star_from_log_v(branch, x, at.u, log_v(branch, at));
}

double log_f_star(const AlphaBranch& branch, double x, double theta) {
    return log_f_star(branch, x, angle_offsets(branch, theta));
}

double log_stable_density(const AlphaBranch& br, double x, double tol) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    if (std::isnan(x)) throw DomainError("x is NaN");
    if (std::isinf(x)) return -kInf;

    const double a = br.alpha();
    double log_c = 0.0;
    double log_scale = 0.0;  // log prefactor minus log c
    using From = Chart::From;
    Chart chart{x >= 0.0 ? From::RightEnd : From::LeftEnd, br.is_one() ? kPi : kPi / a};
    double span = 0.0;
    if (br.is_one()) {
        log_c = kHalfPi * x;
        log_scale = std::log(0.5);
        span = kPi;
    } else {
        if (x == 0.0) return -kInf;
        const double lx = std::log(std::abs(x));
        log_c = a / (a - 1.0) * lx;
        log_scale = std::log(a / ((a - 1.0) * kPi)) - lx;
        span = x > 0.0 ? kPi / a : kPi - kPi / a;
        // Small |x| puts the mass against -theta0, so measure from there.
        if (std::abs(x) < 1.0) chart.from = x > 0.0 ? From::PoleAbove : From::PoleBelow;
    }
    const bool one_left = br.is_one() && x < 0.0;

    auto lv = [&](double t) { return log_v(br, chart.at(t)); };
    // alpha = 1 near theta = -pi/2: log V ~ pi/w cancels pi x/2, so combine them
    // exactly via lin = 1 + x w/2 and expand (pi - w) cot w - pi/w.
    auto phi_one_left = [&](double w, double lin) {
        if (w <= 0.0) return kInf;
        const double w2 = w * w;
        const double cot_gap =
            w < 0.1 ? -w * (1.0 / 3.0 + w2 * (1.0 / 45.0 + w2 * (2.0 / 945.0 + w2 * (1.0 / 4725.0 + w2 * 2.0 / 93555.0))))
                    : 1.0 / std::tan(w) - 1.0 / w;
        return std::log(2.0 * (kPi - w) / kPi) - std::log(std::sin(w)) + kPi * cot_gap - w / std::tan(w) +
               kPi * lin / w;
    };
    // phi = log(c V); the integrand is c V e^{-cV} = exp(phi - e^phi).
    auto phi = [&](double t) {
        if (!one_left || t >= 1.0) return lv(t) + log_c;
        return phi_one_left(t, std::fma(0.5 * x, t, 1.0));
    };
    auto log_integrand = [&](double t) {
        const double p = phi(t);
        if (!std::isfinite(p)) return -kInf;
        return p - std::exp(p);
    };

    if (one_left && x < -1e4) {
        // The peak sits near w = 2/|x| and is only about w^2/pi wide, finer than the
        // spacing of doubles near w. Integrate in lin = 1 + x w/2 instead, where
        // phi = slow(w) + pi lin/w and w = 2 (1 - lin)/|x| needs only relative accuracy.
        auto w_of = [&](double lin) { return 2.0 * (1.0 - lin) / -x; };
        auto phi_lin = [&](double lin) { return phi_one_left(w_of(lin), lin); };
        double lin0 = 0.0;
        for (int i = 0; i < 20; ++i) {
            const double w = w_of(lin0);
            const double next = lin0 - phi_lin(lin0) * w / kPi;
            if (next == lin0) break;
            lin0 = next;
        }
        const double w0 = w_of(lin0);
        // phi rises at unit rate in q; exp(phi - e^phi) is spent within q in [-70, 8].
        auto g = [&](double q) {
            const double p = phi_lin(lin0 + q * (w0 / kPi));
            return std::isfinite(p) ? std::exp(p - std::exp(p)) : 0.0;
        };
        quad::Options opt;
        opt.rel_tol = tol;
        const double mass = quad::integrate(g, -70.0, 0.0, opt).value + quad::integrate(g, 0.0, 8.0, opt).value;
        if (!(mass > 0.0)) return -kInf;
        return log_scale + std::log(2.0 / -x) + std::log(w0 / kPi) + std::log(mass);
    }

    auto bisect = [](auto&& pred_low, double lo, double hi) {
        // pred_low(t) true on [lo, root), false on (root, hi].
        // Enough halvings to reach subnormal distances from a chart origin.
        for (int i = 0; i < 1100; ++i) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) break;
            if (pred_low(mid)) lo = mid;
            else hi = mid;
        }
        return 0.5 * (lo + hi);
    };

    const double p_start = phi(0.0);
    const double p_end = phi(span);
    const bool increasing = p_start < p_end;

    // Peak of the integrand where phi = 0.
    double peak = 0.0;
    const double p_lo = std::min(p_start, p_end);
    const double p_hi = std::max(p_start, p_end);
    if (0.0 <= p_lo) {
        peak = increasing ? 0.0 : span;
    } else if (0.0 >= p_hi) {
        peak = increasing ? span : 0.0;
    } else {
        peak = bisect([&](double t) { return increasing ? phi(t) < 0.0 : phi(t) > 0.0; }, 0.0, span);
    }

    const double l_max = log_integrand(peak);
    if (!std::isfinite(l_max)) return -kInf;
    const double floor = l_max - kCut;

    double lo = 0.0;
    if (peak > 0.0 && log_integrand(0.0) < floor) {
        lo = bisect([&](double t) { return log_integrand(t) < floor; }, 0.0, peak);
    }
    double hi = span;
    if (peak < span && log_integrand(span) < floor) {
        hi = bisect([&](double t) { return log_integrand(t) >= floor; }, peak, span);
    }

    auto integrand = [&](double t) { return std::exp(log_integrand(t) - l_max); };
    quad::Options opt;
    // phi carries roundoff of about eps |log V|, and the exponent multiplies it by
    // 1 + e^phi. Far in either tail that noise floor exceeds the requested tolerance.
    const double p_peak = phi(peak);
    const double v_peak = one_left ? std::log(std::max(peak, 1e-300)) : lv(peak);
    const double noise = 8.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(v_peak)) *
                         (1.0 + std::exp(p_peak));
    opt.rel_tol = std::max(tol, noise);
    double total = 0.0;
    if (peak > lo) {
        total += quad::integrate_with_endpoint_substitution(integrand, lo, peak, lo == 0.0, false, opt).value;
    }
    if (hi > peak) {
        total += quad::integrate_with_endpoint_substitution(integrand, peak, hi, false, hi == span, opt).value;
    }
    if (!(total > 0.0)) return -kInf;
    return log_scale + l_max + std::log(total);
}

double stable_density(const AlphaBranch& branch, double x, double tol) {
    return std::exp(log_stable_density(branch, x, tol));
}

}  // namespace tempest
