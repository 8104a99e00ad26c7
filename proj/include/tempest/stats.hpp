#pragma once

// Goodness-of-fit and moment statistics used by the validation harness.

#include <cstdint>
#include <functional>
#include <vector>

namespace tempest::stats {

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    double effective_n = 0.0;

    bool passes(double level) const noexcept { return p_value >= level; }
};

/// Asymptotic Kolmogorov survival function Q(lambda) = 2 sum (-1)^{k-1} e^{-2 k^2 lambda^2}.
double kolmogorov_survival(double lambda);

/// One-sample KS from the sorted sample and F evaluated at each point.
/// p-value via the asymptotic law with the usual small-sample correction.
KsResult ks_from_cdf_values(const std::vector<double>& sorted_sample, const std::vector<double>& cdf_values);

/// One-sample KS against a CDF (sorts a copy of the sample).
KsResult ks_one_sample(std::vector<double> sample, const std::function<double(double)>& cdf);

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct SampleMoments {
    std::size_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double m2 = 0.0;        // central moments, 1/n normalisation
    double m3 = 0.0;
    double m4 = 0.0;
    double m6 = 0.0;
};

SampleMoments summarize(const std::vector<double>& sample);

/// (sample mean - mean) / (s / sqrt(n)).
double mean_z_score(const SampleMoments& s, double mean);
/// (sample variance - variance) / sqrt((m4 - m2^2) / n).
double variance_z_score(const SampleMoments& s, double variance);
/// m3 / se(m3), testing a zero third central moment.
double third_moment_z_score(const SampleMoments& s);

/// (accepted - n p) / sqrt(n p (1 - p)).
double binomial_z_score(std::uint64_t accepted, std::uint64_t n, double p);

struct Histogram {
    std::vector<double> centers;
    std::vector<double> density;  // normalised so the bars integrate to the in-range fraction
    double width = 0.0;
};

Histogram histogram(const std::vector<double>& sample, double lo, double hi, std::size_t bins);

}  // namespace tempest::stats
