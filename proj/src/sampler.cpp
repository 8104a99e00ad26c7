#include "tempest/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "tempest/errors.hpp"

namespace tempest {

namespace {

constexpr double kTwoOverPi = 2.0 / kPi;

TsParameters rejection_target(const TsParameters& p, unsigned m) {
    if (m < 1) throw DomainError("aggregation count must be at least 1");
    const double inflate = std::pow(static_cast<double>(m), 1.0 / p.alpha());
    return TsParameters(p.alpha(), inflate * p.ell() / p.sigma(), 1.0);
}

}  // namespace

RejectionReport& RejectionReport::operator+=(const RejectionReport& other) noexcept {
    draws += other.draws;
    accepted += other.accepted;
    slack_hits += other.slack_hits;
    sign_zero += other.sign_zero;
    return *this;
}

std::uint64_t default_max_iter(double k) {
    const double scaled = 1000.0 * std::ceil(k);
    if (!(scaled < 1.8e19)) return std::numeric_limits<std::uint64_t>::max();
    return std::max<std::uint64_t>(1'000'000, static_cast<std::uint64_t>(scaled));
}

namespace {

// A proposal with the angle data needed to evaluate densities at it.
struct Drawn {
    AngleSample sample;
    AngleOffsets at;
    double lv;
};

double h1_x(const AlphaBranch& branch, const AngleOffsets& at, double lv, double w) {
    if (branch.is_one()) return kTwoOverPi * (std::log(w) - lv);
    if (at.u == 0.0) return 0.0;
    const double a = branch.alpha();
    const double magnitude = std::exp((1.0 - a) / a * (lv - std::log(w)));
    return at.u > 0.0 ? magnitude : -magnitude;
}

double h2_x(const Envelope& env, double lv, double z) {
    const ThetaFunctions tf = env.theta_funcs_from_log_v(lv);
    return tf.m_eps + std::abs(z) / std::sqrt(tf.xi_eps);
}

// theta ~ U(-pi/2, pi/2), W ~ Exp(1)
Drawn draw_h1(const AlphaBranch& branch, RandomStream& s) {
    const double theta = -kHalfPi + kPi * s.uniform_open();
    const double w = std::max(s.exponential(), std::numeric_limits<double>::min());
    const AngleOffsets at = angle_offsets(branch, theta);
    const double lv = log_v(branch, at);
    return {{h1_x(branch, at, lv, w), theta}, at, lv};
}

// theta ~ U(-theta0, pi/2), Z ~ N(0, 1)
Drawn draw_h2(const Envelope& env, RandomStream& s) {
    const double t0 = env.branch().theta0();
    const double theta = std::min(-t0 + (kHalfPi + t0) * s.uniform_open(), kHalfPi);
    const AngleOffsets at = angle_offsets(env.branch(), theta);
    const double lv = log_v(env.branch(), at);
    return {{h2_x(env, lv, s.normal()), theta}, at, lv};
}

}  // namespace

AngleSample h1_from_angle(const AlphaBranch& branch, double theta, double w) {
    if (!(w > 0.0)) throw DomainError("W must be positive");
    const AngleOffsets at = angle_offsets(branch, theta);
    return {h1_x(branch, at, log_v(branch, at), w), theta};
}

AngleSample h2_from_angle(const Envelope& env, double theta, double z) {
    const AngleOffsets at = angle_offsets(env.branch(), theta);
    if (!env.in_h2_range(at)) throw DomainError("theta must exceed -theta0 for the half-normal component");
    return {h2_x(env, log_v(env.branch(), at), z), theta};
}

AngleSample sample_h1(const AlphaBranch& branch, RandomStream& stream) { return draw_h1(branch, stream).sample; }

AngleSample sample_h2(const TsParameters& params, const TuningParameters& tuning, RandomStream& stream) {
    return draw_h2(Envelope(params, tuning), stream).sample;
}

AngleSample sample_h(const TsParameters& params, const TuningParameters& tuning, RandomStream& stream) {
    const Envelope env(params, tuning);
    if (stream.uniform() <= tuning.p1()) return draw_h1(env.branch(), stream).sample;
    return draw_h2(env, stream).sample;
}

TsSampler::TsSampler(const TsParameters& params, const TuningParameters& tuning, Skew skew, unsigned aggregation)
    : params_(params),
      skew_(skew),
      aggregation_(aggregation),
      envelope_(rejection_target(params, aggregation), tuning),
      max_iter_(default_max_iter(envelope_.bounds().k())),
      log_ratio_cap_(std::log1p(kAcceptanceSlack)) {}

void TsSampler::set_max_iter(std::uint64_t max_iter) {
    if (max_iter < 1) throw DomainError("max_iter must be at least 1");
    max_iter_ = max_iter;
}

TsSampler::Proposal TsSampler::propose(RandomStream& s) const {
    const AlphaBranch& br = envelope_.branch();
    const bool first = s.uniform() <= envelope_.tuning().p1();
    const Drawn d = first ? draw_h1(br, s) : draw_h2(envelope_, s);
    return {d.sample, envelope_.evaluate(d.sample.x, d.at, d.lv), first && !br.is_one() && d.sample.x == 0.0};
}

bool TsSampler::trial(RandomStream& s, RejectionReport& report, AngleSample* out) const {
    const double u = s.uniform_open();
    const Proposal p = propose(s);
    ++report.draws;
    if (p.sign_zero) ++report.sign_zero;
    const double r = p.terms.log_ratio;
    if (r > 0.0) {
        if (r > log_ratio_cap_) {
            throw ConsistencyError("acceptance ratio " + std::to_string(std::exp(r)) + " exceeds one",
                                   p.sample.x, p.sample.theta, r);
        }
        ++report.slack_hits;
    }
    if (std::log(u) <= r) {
        ++report.accepted;
        if (out != nullptr) *out = p.sample;
        return true;
    }
    return false;
}

GStarDraw TsSampler::draw_joint(RandomStream& s) const {
    GStarDraw out;
    while (out.report.draws < max_iter_) {
        if (trial(s, out.report, &out.sample)) return out;
    }
    throw IterationLimitError("rejection sampler exceeded max_iter proposals", out.report.draws);
}

double TsSampler::operator()(RandomStream& s, RejectionReport* report) const {
    const AlphaBranch& br = params_.branch();
    double unit = 0.0;
    if (aggregation_ == 1) {
        const GStarDraw d = draw_joint(s);
        if (report != nullptr) *report += d.report;
        unit = d.sample.x;
    } else {
        double sum = 0.0;
        for (unsigned i = 0; i < aggregation_; ++i) {
            const GStarDraw d = draw_joint(s);
            if (report != nullptr) *report += d.report;
            sum += d.sample.x;
        }
        const double m = static_cast<double>(aggregation_);
        unit = std::pow(m, -1.0 / br.alpha()) * sum;
        if (br.is_one()) unit += kTwoOverPi * std::log(m);
    }
    const double y = params_.sigma() == 1.0 ? unit : scale_transform(br, params_.sigma(), unit);
    return skew_ == Skew::Plus ? -y : y;
}

GStarDraw sample_g_star(const TsParameters& params, const TuningParameters& tuning, const EnvelopeBounds& bounds,
                        RandomStream& stream, std::uint64_t max_iter) {
    if (params.sigma() != 1.0) throw DomainError("g* is defined for sigma = 1");
    if (max_iter < 1) throw DomainError("max_iter must be at least 1");
    const Envelope env(params, tuning, bounds);
    const double cap = std::log1p(kAcceptanceSlack);
    GStarDraw out;
    while (out.report.draws < max_iter) {
        const double u = stream.uniform_open();
        const bool first = stream.uniform() <= tuning.p1();
        const Drawn d = first ? draw_h1(env.branch(), stream) : draw_h2(env, stream);
        const AngleSample proposal = d.sample;
        if (first && !env.branch().is_one() && proposal.x == 0.0) ++out.report.sign_zero;
        ++out.report.draws;
        const double r = env.evaluate(proposal.x, d.at, d.lv).log_ratio;
        if (r > 0.0) {
            if (r > cap) throw ConsistencyError("acceptance ratio exceeds one", proposal.x, proposal.theta, r);
            ++out.report.slack_hits;
        }
        if (std::log(u) <= r) {
            ++out.report.accepted;
            out.sample = proposal;
            return out;
        }
    }
    throw IterationLimitError("rejection sampler exceeded max_iter proposals", out.report.draws);
}

double sample_ts(const TsParameters& params, const TuningParameters& tuning, RandomStream& stream, Skew skew) {
    return TsSampler(params, tuning, skew)(stream);
}

double sample_ts_aggregated(const TsParameters& params, const TuningParameters& tuning, RandomStream& stream,
                            unsigned m) {
    if (m == 1) return sample_ts(params, tuning, stream);
    return TsSampler(params, tuning, Skew::Minus, m)(stream);
}

CtsSampler::CtsSampler(const CtsParameters& params, const TuningParameters& tuning_plus,
                       const TuningParameters& tuning_minus)
    : params_(params), plus_(params.plus(), tuning_plus, Skew::Plus), minus_(params.minus(), tuning_minus, Skew::Plus) {}

double CtsSampler::operator()(CtsStreams& streams, RejectionReport* report) const {
    const double x_plus = plus_(streams.plus, report);
    const double x_minus = minus_(streams.minus, report);
    return x_plus - x_minus + params_.b();
}

double sample_cts(const CtsParameters& params, const TuningParameters& tuning, CtsStreams& streams) {
    return CtsSampler(params, tuning)(streams);
}

}  // namespace tempest
