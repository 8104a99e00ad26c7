#pragma once

// Rejection envelope for g*(x, theta): the mixture h = p1 f* + p2 h2, where h2
// is a uniform-angle mixture of half-normal laws, and the constant K with
// g* <= K h everywhere.

#include <optional>

#include "tempest/ts_model.hpp"

namespace tempest {

/// (epsilon, p1, p2) with epsilon in (0, 1), p1 in (0, 1) and p2 = 1 - p1.
class TuningParameters {
public:
    explicit TuningParameters(double epsilon, double p1 = 0.5);

    double epsilon() const noexcept { return epsilon_; }
    double p1() const noexcept { return p1_; }
    double p2() const noexcept { return 1.0 - p1_; }

private:
    double epsilon_;
    double p1_;
};

struct EnvelopeBounds {
    std::optional<double> m_star;  // alpha in (1, 2) only
    double m_sharp;
    double log_c1;
    double log_c2;
    double log_k;

    double k() const;
};

struct ThetaFunctions {
    double m_eps;
    double xi_eps;
};

/// Allowed excess of g*/(K h) over one, absorbing log-space roundoff.
inline constexpr double kAcceptanceSlack = 1e-9;

/// All envelope constants for a sigma = 1 target.
EnvelopeBounds bounds(const TsParameters& params, const TuningParameters& tuning);

/// m_eps(theta) and xi_eps(theta); theta in (-theta0, pi/2] (alpha > 1) or (-pi/2, pi/2].
ThetaFunctions theta_funcs(const TsParameters& params, const TuningParameters& tuning, double theta);

double log_h(const TsParameters& params, const TuningParameters& tuning, double x, double theta);

/// log g* - log K - log h. Throws ConsistencyError above the slack.
double log_acceptance_ratio(const TsParameters& params, const TuningParameters& tuning,
                            const EnvelopeBounds& bounds, double x, double theta);

/// Precomputed evaluator used on the sampling hot path (sigma = 1).
class Envelope {
public:
    Envelope(const TsParameters& params, const TuningParameters& tuning);
    Envelope(const TsParameters& params, const TuningParameters& tuning, const EnvelopeBounds& bounds);

    const TsParameters& params() const noexcept { return params_; }
    const TuningParameters& tuning() const noexcept { return tuning_; }
    const EnvelopeBounds& bounds() const noexcept { return bounds_; }
    const AlphaBranch& branch() const noexcept { return params_.branch(); }

    struct Terms {
        double log_f_star;
        double log_h2;
        double log_h;
        double log_g_star;
        /// log g* - log K - log h, unchecked; -inf when g* vanishes.
        double log_ratio;
    };

    /// Every density at one point, sharing a single evaluation of log V.
    Terms evaluate(double x, const AngleOffsets& at, double log_v_value) const;
    Terms evaluate(double x, double theta) const;

    /// True when the angle admits the half-normal component (u > 0, or alpha = 1).
    bool in_h2_range(const AngleOffsets& at) const noexcept;
    ThetaFunctions theta_funcs_from_log_v(double log_v_value) const;

    double log_norm_const() const noexcept { return log_c_; }

private:
    void precompute();

    TsParameters params_;
    TuningParameters tuning_;
    EnvelopeBounds bounds_;
    double log_c_ = 0.0;
    double log_p1_ = 0.0;
    double log_p2_ = 0.0;
    double log_h2_angle_ = 0.0;  // log of the angular density alpha/pi
    double log_m_const_ = 0.0;
    double log_xi_const_ = 0.0;
};

enum class TuneStrategy { FixedHalf, GridEps, GridEpsOptP };

struct TuneResult {
    TuningParameters tuning;
    EnvelopeBounds bounds;
};

/// Epsilon for FixedHalf: the tabulated value when (alpha, ell) matches a
/// reference row, 0.5 otherwise.
double default_epsilon(double alpha, double ell);

/// Search for a small K. FixedHalf uses `fixed_epsilon` (or default_epsilon
/// when absent); the grid strategies scan epsilon = 0.01, ..., 0.99 and break
/// ties toward the smaller epsilon.
TuneResult tune(const TsParameters& params, TuneStrategy strategy,
                std::optional<double> fixed_epsilon = std::nullopt);

}  // namespace tempest
