#pragma once

// The fully left-skewed tempered stable law TS-(alpha, ell, sigma):
// g(x) = C e^{x/ell} f(x), its mgf, moments, CDF and the scaling identity.

#include <vector>

#include "tempest/stable_kernel.hpp"

namespace tempest {

/// (alpha, ell, sigma) with alpha in [1, 2), ell > 0, sigma > 0.
class TsParameters {
public:
    /// Throws DomainError on any violation.
    TsParameters(double alpha, double ell, double sigma = 1.0);

    double alpha() const noexcept { return branch_.alpha(); }
    double ell() const noexcept { return ell_; }
    double sigma() const noexcept { return sigma_; }
    const AlphaBranch& branch() const noexcept { return branch_; }

    /// TS-(alpha, ell/sigma, 1): the unit-scale law that scale_transform maps back.
    TsParameters unit_scale() const { return TsParameters(alpha(), ell_ / sigma_, 1.0); }

private:
    AlphaBranch branch_;
    double ell_;
    double sigma_;
};

/// CTS(alpha, ell+, sigma+, ell-, sigma-, b): X+ - X- + b with X+- ~ TS+.
class CtsParameters {
public:
    CtsParameters(double alpha, double ell_plus, double sigma_plus, double ell_minus, double sigma_minus,
                  double b = 0.0);

    double alpha() const noexcept { return plus_.alpha(); }
    const TsParameters& plus() const noexcept { return plus_; }
    const TsParameters& minus() const noexcept { return minus_; }
    double b() const noexcept { return b_; }

private:
    TsParameters plus_;
    TsParameters minus_;
    double b_;
};

struct Moments {
    double mean;
    double variance;
};

/// log C, so that g integrates to one.
double norm_const_log(const TsParameters& params);

/// log of the mgf, z >= -1/ell; DomainError below.
double log_mgf(const TsParameters& params, double z);
double mgf(const TsParameters& params, double z);

/// Closed-form mean and variance (first two cumulants of the mgf).
Moments moments(const TsParameters& params);

/// log g(x) for sigma = 1 via the quadrature stable density.
double log_g(const TsParameters& params, double x, double tol = kDefaultQuadratureTol);

/// log g*(x, theta) = log C + x/ell + log f*(x, theta); closed form, sigma = 1.
double log_g_star(const TsParameters& params, double x, double theta);

/// Density of TS-(alpha, ell, sigma) for any sigma, through the scaling identity.
double log_ts_density(const TsParameters& params, double x, double tol = kDefaultQuadratureTol);

/// sigma * x (alpha != 1) or sigma * x - (2/pi) sigma log sigma (alpha = 1).
double scale_transform(const AlphaBranch& branch, double sigma, double x_unit);

/// Chernoff-bound truncation points from the mgf: P(X < lo) <= mass and
/// P(X > hi) <= mass, each.
struct TailTruncation {
    double lo;
    double hi;
};
TailTruncation tail_truncation(const TsParameters& params, double mass);

/// P(X <= x) for X ~ TS-(alpha, ell, 1), computed directly by quadrature.
double ts_cdf(const TsParameters& params, double x, double tol = kDefaultQuadratureTol);

/// Tabulated CDF for repeated evaluation: cumulative masses on a node grid,
/// plus one Gauss panel from the nearest node. Handles any sigma.
class TsCdf {
public:
    explicit TsCdf(const TsParameters& params, double tol = kDefaultQuadratureTol);

    double operator()(double x) const;
    double lower() const noexcept { return nodes_.front(); }
    double upper() const noexcept { return nodes_.back(); }
    /// Total mass captured between the truncation points before renormalisation.
    double captured_mass() const noexcept { return captured_; }

private:
    double unit_cdf(double x_unit) const;

    TsParameters unit_;
    double sigma_;
    double shift_;
    double tol_;
    std::vector<double> nodes_;
    std::vector<double> cumulative_;
    double captured_ = 1.0;
};

}  // namespace tempest
