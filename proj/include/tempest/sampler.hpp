#pragma once

// Exact samplers: the proposal components h1 = f* and h2, the mixture h, the
// rejection step for g*, the scaled TS-/TS+ laws, the aggregation route and CTS.

#include <cstdint>

#include "tempest/envelope.hpp"
#include "tempest/random_stream.hpp"

namespace tempest {

struct RejectionReport {
    std::uint64_t draws = 0;
    std::uint64_t accepted = 0;
    std::uint64_t slack_hits = 0;  // 0 < log phi <= log(1 + kAcceptanceSlack)
    std::uint64_t sign_zero = 0;   // theta landed exactly on -theta0

    double rate() const noexcept { return draws == 0 ? 0.0 : static_cast<double>(accepted) / draws; }
    RejectionReport& operator+=(const RejectionReport& other) noexcept;
};

enum class Skew { Minus, Plus };

/// max(1e6, 1000 * ceil(K)).
std::uint64_t default_max_iter(double k);

/// Map (Theta, W) to a draw from f*. W > 0.
AngleSample h1_from_angle(const AlphaBranch& branch, double theta, double w);
/// Map (Theta, Z) to a draw from h2: X = m(Theta) + |Z| / sqrt(xi(Theta)).
AngleSample h2_from_angle(const Envelope& envelope, double theta, double z);

AngleSample sample_h1(const AlphaBranch& branch, RandomStream& stream);
AngleSample sample_h2(const TsParameters& params, const TuningParameters& tuning, RandomStream& stream);
AngleSample sample_h(const TsParameters& params, const TuningParameters& tuning, RandomStream& stream);

struct GStarDraw {
    AngleSample sample;
    RejectionReport report;
};

/// Rejection sampling from g* (sigma = 1). Throws IterationLimitError after
/// max_iter proposals and ConsistencyError when phi exceeds the slack.
GStarDraw sample_g_star(const TsParameters& params, const TuningParameters& tuning, const EnvelopeBounds& bounds,
                        RandomStream& stream, std::uint64_t max_iter);

/// Sampler for TS-(alpha, ell, sigma) (or TS+ with Skew::Plus). The rejection
/// target is the unit law TS-(alpha, m^{1/alpha} ell / sigma, 1), where m is
/// the aggregation count; tuning applies to that target.
class TsSampler {
public:
    TsSampler(const TsParameters& params, const TuningParameters& tuning, Skew skew = Skew::Minus,
              unsigned aggregation = 1);

    const TsParameters& params() const noexcept { return params_; }
    const Envelope& envelope() const noexcept { return envelope_; }
    Skew skew() const noexcept { return skew_; }
    unsigned aggregation() const noexcept { return aggregation_; }
    std::uint64_t max_iter() const noexcept { return max_iter_; }
    void set_max_iter(std::uint64_t max_iter);

    /// One proposal from h together with its envelope terms.
    struct Proposal {
        AngleSample sample;
        Envelope::Terms terms;
        bool sign_zero;
    };
    Proposal propose(RandomStream& stream) const;

    /// One U ~ U(0,1) plus one proposal; returns whether it is accepted.
    bool trial(RandomStream& stream, RejectionReport& report, AngleSample* out = nullptr) const;

    /// (X, Theta) from g* of the unit rejection target.
    GStarDraw draw_joint(RandomStream& stream) const;

    /// A variate from the configured law.
    double operator()(RandomStream& stream, RejectionReport* report = nullptr) const;

private:
    TsParameters params_;
    Skew skew_;
    unsigned aggregation_;
    Envelope envelope_;
    std::uint64_t max_iter_;
    double log_ratio_cap_;
};

double sample_ts(const TsParameters& params, const TuningParameters& tuning, RandomStream& stream,
                 Skew skew = Skew::Minus);

/// m^{-1/alpha} (X_1 + ... + X_m) (+ (2/pi) log m when alpha = 1), with
/// X_i ~ TS-(alpha, m^{1/alpha} ell, 1). m = 1 is sample_ts itself.
double sample_ts_aggregated(const TsParameters& params, const TuningParameters& tuning, RandomStream& stream,
                            unsigned m);

/// Child streams of one parent: lane 1 drives X+, lane 2 drives X-.
struct CtsStreams {
    explicit CtsStreams(const RandomStream& parent) : plus(parent.lane(1)), minus(parent.lane(2)) {}
    RandomStream plus;
    RandomStream minus;
};

class CtsSampler {
public:
    CtsSampler(const CtsParameters& params, const TuningParameters& tuning_plus,
               const TuningParameters& tuning_minus);
    CtsSampler(const CtsParameters& params, const TuningParameters& tuning)
        : CtsSampler(params, tuning, tuning) {}

    const CtsParameters& params() const noexcept { return params_; }
    double operator()(CtsStreams& streams, RejectionReport* report = nullptr) const;

private:
    CtsParameters params_;
    TsSampler plus_;
    TsSampler minus_;
};

/// X+ - X- + b with X+ ~ TS+(alpha, ell+, sigma+), X- ~ TS+(alpha, ell-, sigma-).
double sample_cts(const CtsParameters& params, const TuningParameters& tuning, CtsStreams& streams);

}  // namespace tempest
