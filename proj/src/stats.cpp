#include "tempest/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tempest::stats {

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;  // series alternates badly; Q is 1 to double precision here
    double sum = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double corrected_lambda(double d, double n_eff) {
    const double root = std::sqrt(n_eff);
    return d * (root + 0.12 + 0.11 / root);
}

}  // namespace

KsResult ks_from_cdf_values(const std::vector<double>& sorted_sample, const std::vector<double>& cdf_values) {
    if (sorted_sample.size() != cdf_values.size() || sorted_sample.empty()) {
        throw std::invalid_argument("KS needs matching, non-empty sample and CDF vectors");
    }
    const double n = static_cast<double>(sorted_sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < cdf_values.size(); ++i) {
        const double f = cdf_values[i];
        d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
    }
    return {d, kolmogorov_survival(corrected_lambda(d, n)), n};
}

KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf) {
    std::sort(sample.begin(), sample.end());
    std::vector<double> values(sample.size());
    std::transform(sample.begin(), sample.end(), values.begin(), cdf);
    return ks_from_cdf_values(sample, values);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("two-sample KS needs non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double n_eff = na * nb / (na + nb);
    return {d, kolmogorov_survival(corrected_lambda(d, n_eff)), n_eff};
}

SampleMoments summarize(const std::vector<double>& sample) {
    SampleMoments s;
    s.n = sample.size();
    if (s.n < 2) throw std::invalid_argument("moments need at least two observations");
    const double n = static_cast<double>(s.n);
    double mean = 0.0;
    for (double x : sample) mean += x;
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0, m6 = 0.0;
    for (double x : sample) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
        m6 += d2 * d2 * d2;
    }
    s.mean = mean;
    s.m2 = m2 / n;
    s.m3 = m3 / n;
    s.m4 = m4 / n;
    s.m6 = m6 / n;
    s.variance = m2 / (n - 1.0);
    return s;
}

double mean_z_score(const SampleMoments& s, double mean) {
    return (s.mean - mean) / std::sqrt(s.variance / static_cast<double>(s.n));
}

double variance_z_score(const SampleMoments& s, double variance) {
    return (s.variance - variance) / std::sqrt((s.m4 - s.m2 * s.m2) / static_cast<double>(s.n));
}

double third_moment_z_score(const SampleMoments& s) {
    const double var_m3 = s.m6 - s.m3 * s.m3 - 6.0 * s.m4 * s.m2 + 9.0 * s.m2 * s.m2 * s.m2;
    return s.m3 / std::sqrt(var_m3 / static_cast<double>(s.n));
}

double binomial_z_score(std::uint64_t accepted, std::uint64_t n, double p) {
    const double nn = static_cast<double>(n);
    return (static_cast<double>(accepted) - nn * p) / std::sqrt(nn * p * (1.0 - p));
}

Histogram histogram(const std::vector<double>& sample, double lo, double hi, std::size_t bins) {
    if (!(hi > lo) || bins == 0) throw std::invalid_argument("histogram needs hi > lo and bins > 0");
    Histogram h;
    h.width = (hi - lo) / static_cast<double>(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (double x : sample) {
        if (x < lo || x >= hi) continue;
        const auto k = std::min(bins - 1, static_cast<std::size_t>((x - lo) / h.width));
        ++counts[k];
    }
    const double scale = 1.0 / (static_cast<double>(sample.size()) * h.width);
    for (std::size_t k = 0; k < bins; ++k) {
        h.centers.push_back(lo + (static_cast<double>(k) + 0.5) * h.width);
        h.density.push_back(static_cast<double>(counts[k]) * scale);
    }
    return h;
}

}  // namespace tempest::stats
