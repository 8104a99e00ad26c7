#pragma once

// Integral representation of the fully left-skewed alpha-stable law for
// alpha in [1, 2): the angular kernel V, the joint density f*(x, theta) and
// the marginal density f(x) by quadrature.

#include <numbers>

namespace tempest {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = std::numbers::pi / 2.0;

/// Stability index alpha in [1, 2), branched on exact equality with 1.
class AlphaBranch {
public:
    enum class Kind { ExactlyOne, OpenInterval };

    /// Throws DomainError unless 1 <= alpha < 2.
    explicit AlphaBranch(double alpha);

    double alpha() const noexcept { return alpha_; }
    Kind kind() const noexcept { return kind_; }
    bool is_one() const noexcept { return kind_ == Kind::ExactlyOne; }

    /// alpha in (1, 1 + 1e-6): accepted, but 1/(alpha - 1) exponents are huge.
    bool ill_conditioned() const noexcept;

    /// theta0 = pi/alpha - pi/2, or pi/2 when alpha = 1.
    double theta0() const noexcept { return theta0_; }
    /// |cos(pi alpha / 2)|, computed as sin(pi (alpha - 1) / 2).
    double abs_cos_half_pi_alpha() const noexcept { return abs_cos_; }
    /// log V(pi/2), the closed-form endpoint value.
    double log_v_right_end() const noexcept { return log_v_right_end_; }

private:
    double alpha_;
    Kind kind_;
    double theta0_;
    double abs_cos_;
    double log_v_right_end_;
};

/// A joint draw (x, theta) with theta in (-pi/2, pi/2).
struct AngleSample {
    double x = 0.0;
    double theta = 0.0;
};

/// An angle expressed by its distances to the three special points:
/// delta = pi/2 - theta, w = theta + pi/2, u = theta + theta0.
/// Carrying all three keeps full relative precision near each endpoint.
struct AngleOffsets {
    double delta;
    double w;
    double u;
};

/// Validates theta (|theta| <= pi/2 in double precision, i.e. strictly inside the
/// open interval) and computes its offsets. Throws DomainError otherwise.
AngleOffsets angle_offsets(const AlphaBranch& branch, double theta);

double theta0(const AlphaBranch& branch);

/// log V(theta); +inf at theta = -theta0 (alpha > 1) and at the left end for alpha = 1.
double log_v(const AlphaBranch& branch, double theta);
double log_v(const AlphaBranch& branch, const AngleOffsets& at);

/// log f*(x, theta); -inf off the support.
double log_f_star(const AlphaBranch& branch, double x, double theta);
double log_f_star(const AlphaBranch& branch, double x, const AngleOffsets& at);
/// Same, reusing an already computed log V at the same angle.
double log_f_star_from_log_v(const AlphaBranch& branch, double x, double u, double log_v_value);

inline constexpr double kDefaultQuadratureTol = 1e-10;

/// log f(x) by adaptive quadrature of f* over theta. Validation use only.
/// Throws QuadratureError on nonconvergence.
double log_stable_density(const AlphaBranch& branch, double x, double tol = kDefaultQuadratureTol);
double stable_density(const AlphaBranch& branch, double x, double tol = kDefaultQuadratureTol);

}  // namespace tempest
