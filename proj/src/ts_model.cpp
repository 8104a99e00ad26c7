#include "tempest/ts_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tempest/errors.hpp"
#include "tempest/first_error.hpp"
#include "tempest/quadrature.hpp"

namespace tempest {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTwoOverPi = 2.0 / kPi;

void require_unit_sigma(const TsParameters& p) {
    if (p.sigma() != 1.0) throw DomainError("operation defined for sigma = 1; use the scaling identity");
}

// Seven-point Gauss-Legendre panel (the Gauss half of the 7/15 pair).
template <class F>
double gauss7(F&& f, double a, double b) {
    const auto& nodes = quad::detail::kKronrodNodes;
    const auto& weights = quad::detail::kGaussWeights;
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double sum = weights[3] * f(c);
    for (int j = 1; j < 7; j += 2) {
        const double dx = h * nodes[j];
        sum += weights[j / 2] * (f(c - dx) + f(c + dx));
    }
    return sum * h;
}

// mean + sd * {0, +-1/2, +-1, +-2, +-4, ...} clipped to [lo, hi].
std::vector<double> breakpoints(double lo, double hi, double mean, double sd) {
    std::vector<double> pts{lo};
    std::vector<double> inner{mean};
    for (double k = 0.5; k < 1e6; k *= 2.0) {
        if (mean - k * sd > lo) inner.push_back(mean - k * sd);
        if (mean + k * sd < hi) inner.push_back(mean + k * sd);
        if (mean - k * sd <= lo && mean + k * sd >= hi) break;
    }
    std::sort(inner.begin(), inner.end());
    for (double p : inner) {
        if (p > lo && p < hi) pts.push_back(p);
    }
    pts.push_back(hi);
    return pts;
}

}  // namespace

TsParameters::TsParameters(double alpha, double ell, double sigma) : branch_(alpha), ell_(ell), sigma_(sigma) {
    if (!(ell > 0.0) || !std::isfinite(ell)) throw DomainError("ell must be positive and finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("sigma must be positive and finite");
}

CtsParameters::CtsParameters(double alpha, double ell_plus, double sigma_plus, double ell_minus,
                             double sigma_minus, double b)
    : plus_(alpha, ell_plus, sigma_plus), minus_(alpha, ell_minus, sigma_minus), b_(b) {
    if (!std::isfinite(b)) throw DomainError("shift b must be finite");
}

double norm_const_log(const TsParameters& p) {
    const double a = p.alpha();
    if (p.branch().is_one()) return p.sigma() * kTwoOverPi / p.ell() * std::log(p.ell());
    // cos(pi alpha / 2) < 0 on (1, 2)
    return -std::pow(p.sigma() / p.ell(), a) / p.branch().abs_cos_half_pi_alpha();
}

double log_mgf(const TsParameters& p, double z) {
    const double shifted = z + 1.0 / p.ell();
    if (std::isnan(z) || shifted < 0.0) throw DomainError("mgf requires z >= -1/ell");
    const double a = p.alpha();
    if (p.branch().is_one()) {
        const double tail = shifted == 0.0 ? 0.0 : shifted * std::log(shifted);
        return p.sigma() * kTwoOverPi * (std::log(p.ell()) / p.ell() + tail);
    }
    const double s = std::pow(p.sigma(), a);
    return -s / p.branch().abs_cos_half_pi_alpha() * (std::pow(p.ell(), -a) - std::pow(shifted, a));
}

double mgf(const TsParameters& p, double z) { return std::exp(log_mgf(p, z)); }

Moments moments(const TsParameters& p) {
    const double a = p.alpha();
    const double l = p.ell();
    if (p.branch().is_one()) {
        return {p.sigma() * kTwoOverPi * (1.0 - std::log(l)), p.sigma() * kTwoOverPi * l};
    }
    const double s = std::pow(p.sigma(), a);
    const double c = p.branch().abs_cos_half_pi_alpha();
    return {a * s * std::pow(l, 1.0 - a) / c, a * (a - 1.0) * s * std::pow(l, 2.0 - a) / c};
}

double log_g(const TsParameters& p, double x, double tol) {
    require_unit_sigma(p);
    const double lf = log_stable_density(p.branch(), x, tol);
    if (lf == -kInf) return -kInf;
    return norm_const_log(p) + x / p.ell() + lf;
}

double log_g_star(const TsParameters& p, double x, double theta) {
    require_unit_sigma(p);
    const double lf = log_f_star(p.branch(), x, theta);
    if (lf == -kInf) return -kInf;
    return norm_const_log(p) + x / p.ell() + lf;
}

double scale_transform(const AlphaBranch& branch, double sigma, double x_unit) {
    if (branch.is_one()) return sigma * x_unit - kTwoOverPi * sigma * std::log(sigma);
    return sigma * x_unit;
}

double log_ts_density(const TsParameters& p, double x, double tol) {
    if (p.sigma() == 1.0) return log_g(p, x, tol);
    const double shift = scale_transform(p.branch(), p.sigma(), 0.0);
    return log_g(p.unit_scale(), (x - shift) / p.sigma(), tol) - std::log(p.sigma());
}

TailTruncation tail_truncation(const TsParameters& p, double mass) {
    if (!(mass > 0.0 && mass < 1.0)) throw DomainError("tail mass must lie in (0, 1)");
    const double log_mass = std::log(mass);
    double hi = kInf;
    for (int i = 0; i <= 400; ++i) {
        const double z = std::pow(10.0, -4.0 + 7.0 * i / 400.0);
        hi = std::min(hi, (log_mgf(p, z) - log_mass) / z);
    }
    double lo = -kInf;
    const double z_max = 1.0 / p.ell();
    for (int i = 1; i <= 400; ++i) {
        const double z = z_max * (i / 400.0);
        lo = std::max(lo, (log_mass - log_mgf(p, -z)) / z);
    }
    return {lo, hi};
}

double ts_cdf(const TsParameters& p, double x, double tol) {
    require_unit_sigma(p);
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    if (std::isnan(x)) throw DomainError("x is NaN");
    const auto [lo, hi] = tail_truncation(p, 0.1 * tol);
    if (x <= lo) return 0.0;
    const double top = std::min(x, hi);
    const Moments m = moments(p);
    const auto pts = breakpoints(lo, top, m.mean, std::sqrt(m.variance));

    quad::Options opt;
    opt.rel_tol = tol;
    opt.abs_tol = 0.1 * tol / static_cast<double>(pts.size());
    auto g = [&](double t) { return std::exp(log_g(p, t, tol)); };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        total += quad::integrate(g, pts[i], pts[i + 1], opt).value;
    }
    return std::min(total, 1.0);
}

TsCdf::TsCdf(const TsParameters& params, double tol)
    : unit_(params.unit_scale()),
      sigma_(params.sigma()),
      shift_(scale_transform(params.branch(), params.sigma(), 0.0)),
      tol_(tol) {
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    const auto [lo, hi] = tail_truncation(unit_, 0.1 * tol);
    const Moments m = moments(unit_);
    const double sd = std::sqrt(m.variance);
    constexpr std::size_t kMaxNodes = 6000;
    const double step = std::max(sd / 16.0, (hi - lo) / static_cast<double>(kMaxNodes));
    const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / step));

    nodes_.resize(count + 1);
    for (std::size_t i = 0; i <= count; ++i) nodes_[i] = lo + (hi - lo) * static_cast<double>(i) / count;
    nodes_.back() = hi;

    std::vector<double> pieces(count, 0.0);
    quad::Options opt;
    opt.rel_tol = tol;
    opt.abs_tol = 0.1 * tol / static_cast<double>(count);
    const TsParameters unit = unit_;
    auto g = [&unit, tol](double t) { return std::exp(log_g(unit, t, tol)); };
    FirstError err;
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(count); ++i) {
        err.capture([&] { pieces[i] = quad::integrate(g, nodes_[i], nodes_[i + 1], opt).value; });
    }
    err.rethrow();
    cumulative_.resize(count + 1);
    cumulative_[0] = 0.0;
    for (std::size_t i = 0; i < count; ++i) cumulative_[i + 1] = cumulative_[i] + pieces[i];
    captured_ = cumulative_.back();
    for (double& c : cumulative_) c /= captured_;
    cumulative_.back() = 1.0;
}

double TsCdf::unit_cdf(double x) const {
    if (std::isnan(x)) throw DomainError("x is NaN");
    if (x <= nodes_.front()) return 0.0;
    if (x >= nodes_.back()) return 1.0;
    const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
    const auto j = static_cast<std::size_t>(it - nodes_.begin()) - 1;
    const double partial = gauss7([&](double t) { return std::exp(log_g(unit_, t, tol_)); }, nodes_[j], x) / captured_;
    return std::clamp(cumulative_[j] + partial, cumulative_[j], cumulative_[j + 1]);
}

double TsCdf::operator()(double x) const { return std::min(1.0, unit_cdf((x - shift_) / sigma_)); }

}  // namespace tempest
