#pragma once

// Verification harness: reference-table reproduction, the aggregation
// comparison, envelope-domination scans, lemma inequality checks and
// goodness-of-fit reports.

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "tempest/envelope.hpp"
#include "tempest/stats.hpp"

namespace tempest::validation {

/// Binomial bands and KS levels used throughout.
inline constexpr double kZLimit = 4.0;
inline constexpr double kKsLevel = 0.01;

struct DominationResult {
    double max_log_ratio = -std::numeric_limits<double>::infinity();
    double argmax_x = 0.0;
    double argmax_theta = 0.0;
    std::uint64_t points = 0;
    std::uint64_t nan_points = 0;

    double max_ratio() const;
    bool passes() const;
};

struct DominationSpec {
    std::size_t grid_x = 1000;
    std::size_t grid_theta = 1000;
    std::size_t quasi_points = 1'000'000;
    /// Scan range in x; derived from the tail bounds and m# when absent.
    std::optional<double> x_lo;
    std::optional<double> x_hi;
};

/// Points in the Halton (2, 3) sequence, index starting at 1.
double radical_inverse(std::uint64_t index, unsigned base);

/// Max of g*/(K h) over a tensor grid, extra rows near -theta0 and +-pi/2,
/// both sides of the seams x = m# and x = m_eps(theta), and Halton points.
/// `override_bounds` substitutes the constants (used to plant a bad K).
DominationResult domination_scan(const TsParameters& params, const TuningParameters& tuning,
                                 const DominationSpec& spec = {},
                                 const std::optional<EnvelopeBounds>& override_bounds = std::nullopt,
                                 int threads = 0);
DominationResult domination_scan_serial(const TsParameters& params, const TuningParameters& tuning,
                                        const DominationSpec& spec = {},
                                        const std::optional<EnvelopeBounds>& override_bounds = std::nullopt);

/// Empirical acceptance against 1/K: |z| <= kZLimit passes.
struct RateCheck {
    std::uint64_t proposals = 0;
    std::uint64_t accepted = 0;
    double rate = 0.0;
    double z = 0.0;
    bool pass = false;
};

RateCheck rate_check(std::uint64_t proposals, std::uint64_t accepted, double k);

struct ValidationReport {
    ValidationReport(const TsParameters& p, const TuningParameters& t, std::uint64_t n_, std::uint64_t seed_)
        : params(p), tuning(t), n(n_), seed(seed_) {}

    TsParameters params;
    TuningParameters tuning;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;

    double k_analytic = 0.0;
    std::optional<double> k_printed;
    std::optional<double> retained_fraction_printed;

    std::optional<RateCheck> rate;
    std::optional<stats::KsResult> ks;
    std::optional<double> mean_z;
    std::optional<double> variance_z;
    std::optional<DominationResult> domination;

    bool ks_pass() const { return ks && ks->passes(kKsLevel); }
    bool moments_pass() const;
};

struct Table1Options {
    bool domination = true;
    DominationSpec domination_spec{};
    /// Exact samples per row for a KS check against the CDF; 0 skips it.
    std::size_t gof_samples = 0;
    int threads = 0;
};

/// One report per reference row (sigma = 1, p1 = p2 = 1/2): analytic K and
/// the acceptance rate over n_proposals trials.
std::vector<ValidationReport> reproduce_table1(std::uint64_t n_proposals, std::uint64_t seed,
                                               const Table1Options& options = {});

struct RefinementComparison {
    unsigned m = 0;
    double ell = 0.0;
    double ell_aggregated = 0.0;
    double k_direct = 0.0;
    double k_aggregated = 0.0;
    bool improvement = false;  // m K(m^{1/alpha} ell) < K(ell)

    std::uint64_t n = 0;
    std::uint64_t accepted_direct = 0;
    std::uint64_t accepted_aggregated = 0;
    std::uint64_t final_yield_aggregated = 0;  // accepted_aggregated / m
    double expected_direct = 0.0;              // n / K(ell)
    double expected_final_aggregated = 0.0;    // n / (m K(m^{1/alpha} ell))
    double z_direct = 0.0;
    double z_aggregated = 0.0;
    /// The published counts scaled from 1e7 proposals to n.
    double printed_direct_scaled = 0.0;
    double printed_final_scaled = 0.0;
};

RefinementComparison refinement_comparison(std::uint64_t n_proposals, std::uint64_t seed, int threads = 0);

struct LemmaCheck {
    std::string name;
    std::uint64_t trials = 0;
    std::uint64_t violations = 0;
    std::vector<std::string> counterexamples;  // first few only
};

struct LemmaSuiteResult {
    std::vector<LemmaCheck> checks;
    bool passed() const;
};

inline constexpr double kLemmaRelativeSlack = 1e-12;

/// Randomised checks of the inequalities behind the envelope: the two
/// Taylor-type bounds, t^a e^{-bt} <= (a/b)^a e^{-a}, monotonicity of V,
/// V(theta) >= V(pi/2) and m_eps(theta) <= m*_eps <= m#_eps.
LemmaSuiteResult lemma_property_suite(std::uint64_t trials, std::uint64_t seed);

struct HistogramRow {
    double center;
    double empirical;
    double model;  // g at the bin centre
};

struct GofReport {
    ValidationReport report;
    std::vector<HistogramRow> histogram;
};

/// n exact samples of TS-(alpha, ell, sigma): KS against the tabulated CDF,
/// moment z-scores against the closed forms and histogram rows for plotting.
GofReport gof_report(const TsParameters& params, const TuningParameters& tuning, std::size_t n, std::uint64_t seed,
                     std::size_t bins, int threads = 0);

}  // namespace tempest::validation
