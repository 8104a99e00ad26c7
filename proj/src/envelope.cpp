#include "tempest/envelope.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "tempest/errors.hpp"
#include "tempest/first_error.hpp"
#include "tempest/reference_data.hpp"

namespace tempest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoOverPi = 2.0 / kPi;

double log_sum_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

void require_unit_sigma(const TsParameters& p) {
    if (p.sigma() != 1.0) throw DomainError("envelope is defined for sigma = 1");
}

}  // namespace

TuningParameters::TuningParameters(double epsilon, double p1) : epsilon_(epsilon), p1_(p1) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
    if (!(p1 > 0.0 && p1 < 1.0)) throw DomainError("p1 must lie in (0, 1)");
}

double EnvelopeBounds::k() const { return std::exp(log_k); }

EnvelopeBounds bounds(const TsParameters& p, const TuningParameters& t) {
    require_unit_sigma(p);
    const double a = p.alpha();
    const double l = p.ell();
    const double eps = t.epsilon();
    EnvelopeBounds b{};
    if (p.branch().is_one()) {
        b.m_sharp = kTwoOverPi * (1.0 - std::log(l * eps));
        b.log_c1 = kTwoOverPi / l * (1.0 - std::log(eps));
        b.log_c2 = std::log(kPi * std::sqrt(l) / (2.0 * std::numbers::e * (1.0 - eps))) - kTwoOverPi / l * std::log(eps);
    } else {
        const double abs_cos = p.branch().abs_cos_half_pi_alpha();
        const double log_c = norm_const_log(p);
        const double m_star = std::pow(l * eps, -(a - 1.0)) * a / abs_cos;
        b.m_star = m_star;
        b.m_sharp = std::max(m_star, 1.0);
        b.log_c1 = log_c + b.m_sharp / l;
        const double half_3ma = 0.5 * (3.0 - a);
        b.log_c2 = (1.0 - std::pow(eps, 1.0 - a)) * log_c + 0.5 * std::log(kPi) +
                   0.5 * (1.0 - a) * std::log(eps * a) - (1.0 - 0.5 * a) * std::log(a - 1.0) +
                   half_3ma * (std::log(3.0 - a) - 1.0 - std::log1p(-eps)) + (1.0 - 0.5 * a) * std::log(l) -
                   0.5 * (4.0 - a) * std::log(2.0);
    }
    b.log_k = std::max(b.log_c1 - std::log(t.p1()), b.log_c2 - std::log(t.p2()));
    return b;
}

Envelope::Envelope(const TsParameters& params, const TuningParameters& tuning)
    : Envelope(params, tuning, tempest::bounds(params, tuning)) {}

Envelope::Envelope(const TsParameters& params, const TuningParameters& tuning, const EnvelopeBounds& b)
    : params_(params), tuning_(tuning), bounds_(b) {
    require_unit_sigma(params);
    precompute();
}

void Envelope::precompute() {
    const double a = params_.alpha();
    const double l = params_.ell();
    const double eps = tuning_.epsilon();
    log_c_ = norm_const_log(params_);
    log_p1_ = std::log(tuning_.p1());
    log_p2_ = std::log1p(-tuning_.p1());
    log_h2_angle_ = std::log(a / kPi);
    if (branch().is_one()) {
        log_m_const_ = std::log(2.0 / (eps * l * kPi));
        log_xi_const_ = std::log(kHalfPi / l);
    } else {
        log_m_const_ = std::log(a - 1.0) - std::log(l * eps * a);
        log_xi_const_ = (a - 1.0) * std::log(eps * a) - a * std::log(a - 1.0) - (2.0 - a) * std::log(l);
    }
}

bool Envelope::in_h2_range(const AngleOffsets& at) const noexcept { return branch().is_one() || at.u > 0.0; }

ThetaFunctions Envelope::theta_funcs_from_log_v(double lv) const {
    if (branch().is_one()) {
        return {kTwoOverPi * (log_m_const_ - lv), std::exp(log_xi_const_)};
    }
    const double am1 = params_.alpha() - 1.0;
    return {std::exp(am1 * (log_m_const_ - lv)), std::exp(am1 * lv + log_xi_const_)};
}

Envelope::Terms Envelope::evaluate(double x, const AngleOffsets& at, double lv) const {
    Terms out{};
    const double lf = log_f_star_from_log_v(branch(), x, at.u, lv);
    out.log_f_star = lf;
    out.log_h2 = -kInf;
    if (in_h2_range(at) && lv < kInf) {
        const ThetaFunctions tf = theta_funcs_from_log_v(lv);
        if (x >= tf.m_eps && tf.xi_eps > 0.0 && std::isfinite(tf.xi_eps)) {
            const double d = x - tf.m_eps;
            out.log_h2 = log_h2_angle_ + 0.5 * std::log(2.0 * tf.xi_eps / kPi) - 0.5 * tf.xi_eps * d * d;
        }
    }
    out.log_h = log_sum_exp(log_p1_ + lf, log_p2_ + out.log_h2);
    out.log_g_star = lf == -kInf ? -kInf : log_c_ + x / params_.ell() + lf;
    // g*/(K h) = C e^{x/ell} / (K (p1 + p2 h2/f*)): never subtract two huge logs.
    out.log_ratio = lf == -kInf ? -kInf
                                : log_c_ + x / params_.ell() - bounds_.log_k -
                                      log_sum_exp(log_p1_, log_p2_ + out.log_h2 - lf);
    return out;
}

Envelope::Terms Envelope::evaluate(double x, double theta) const {
    const AngleOffsets at = angle_offsets(branch(), theta);
    return evaluate(x, at, log_v(branch(), at));
}

ThetaFunctions theta_funcs(const TsParameters& params, const TuningParameters& tuning, double theta) {
    const Envelope env(params, tuning);
    const AngleOffsets at = angle_offsets(params.branch(), theta);
    if (!env.in_h2_range(at)) throw DomainError("theta must exceed -theta0 for the half-normal component");
    return env.theta_funcs_from_log_v(log_v(params.branch(), at));
}

double log_h(const TsParameters& params, const TuningParameters& tuning, double x, double theta) {
    return Envelope(params, tuning).evaluate(x, theta).log_h;
}

double log_acceptance_ratio(const TsParameters& params, const TuningParameters& tuning,
                            const EnvelopeBounds& b, double x, double theta) {
    const Envelope env(params, tuning, b);
    const double r = env.evaluate(x, theta).log_ratio;
    if (r > std::log1p(kAcceptanceSlack)) {
        throw ConsistencyError("acceptance ratio exceeds one", x, theta, r);
    }
    return r;
}

double default_epsilon(double alpha, double ell) { return reference::table1_epsilon(alpha, ell).value_or(0.5); }

TuneResult tune(const TsParameters& params, TuneStrategy strategy, std::optional<double> fixed_epsilon) {
    require_unit_sigma(params);
    if (strategy == TuneStrategy::FixedHalf) {
        const TuningParameters t(fixed_epsilon.value_or(default_epsilon(params.alpha(), params.ell())), 0.5);
        return {t, bounds(params, t)};
    }

    constexpr int kGrid = 99;
    std::vector<double> log_k(kGrid);
    std::vector<double> p1(kGrid);
    FirstError err;
#pragma omp parallel for
    for (int i = 0; i < kGrid; ++i) err.capture([&] {
        const double eps = (i + 1) / 100.0;
        if (strategy == TuneStrategy::GridEps) {
            p1[i] = 0.5;
        } else {
            // Equalises C1/p1 and C2/p2, which gives K = C1 + C2.
            const EnvelopeBounds at_half = bounds(params, TuningParameters(eps, 0.5));
            const double share = 1.0 / (1.0 + std::exp(at_half.log_c2 - at_half.log_c1));
            p1[i] = std::clamp(share, 1e-12, 1.0 - 1e-12);
        }
        log_k[i] = bounds(params, TuningParameters(eps, p1[i])).log_k;
    });
    err.rethrow();

    int best = 0;
    for (int i = 1; i < kGrid; ++i) {
        if (log_k[i] < log_k[best]) best = i;
    }
    const TuningParameters t((best + 1) / 100.0, p1[best]);
    return {t, bounds(params, t)};
}

}  // namespace tempest
