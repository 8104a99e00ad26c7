#include "tempest/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "tempest/batch.hpp"
#include "tempest/first_error.hpp"
#include "tempest/reference_data.hpp"
#include "tempest/sampler.hpp"

namespace tempest::validation {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Best {
    double log_ratio = -kInf;
    double x = 0.0;
    double theta = 0.0;
    std::uint64_t points = 0;
    std::uint64_t nan_points = 0;

    void offer(double r, double at_x, double at_theta) {
        ++points;
        if (std::isnan(r)) {
            ++nan_points;
            return;
        }
        if (r > log_ratio) {
            log_ratio = r;
            x = at_x;
            theta = at_theta;
        }
    }

    // Ties keep the earlier (left) operand, so the reduction order fixes the argmax.
    void merge(const Best& o) {
        points += o.points;
        nan_points += o.nan_points;
        if (o.log_ratio > log_ratio) {
            log_ratio = o.log_ratio;
            x = o.x;
            theta = o.theta;
        }
    }
};

std::vector<double> scan_angles(const AlphaBranch& br, std::size_t n) {
    std::vector<double> th;
    th.reserve(n + 64);
    for (std::size_t j = 0; j < n; ++j) th.push_back(-kHalfPi + kPi * (static_cast<double>(j) + 0.5) / n);
    th.push_back(-kHalfPi);
    th.push_back(kHalfPi);
    for (int k = 1; k <= 15; ++k) {
        const double d = std::pow(10.0, -k);
        th.push_back(kHalfPi - d);
        th.push_back(-kHalfPi + d);
        if (!br.is_one()) {
            th.push_back(-br.theta0() + d);
            th.push_back(-br.theta0() - d);
        }
    }
    return th;
}

std::pair<double, double> scan_range(const TsParameters& p, const EnvelopeBounds& b, const DominationSpec& spec) {
    const TailTruncation tt = tail_truncation(p, 1e-14);
    const double lo = spec.x_lo.value_or(std::min(tt.lo, -5.0));
    const double hi = spec.x_hi.value_or(std::max(tt.hi, 2.0 * b.m_sharp + 5.0));
    return {lo, hi};
}

Best scan_row(const Envelope& env, double theta, double lo, double hi, std::size_t nx) {
    Best best;
    const AngleOffsets at = angle_offsets(env.branch(), theta);
    const double lv = log_v(env.branch(), at);
    auto probe = [&](double x) { best.offer(env.evaluate(x, at, lv).log_ratio, x, theta); };
    for (std::size_t i = 0; i < nx; ++i) probe(lo + (hi - lo) * static_cast<double>(i) / (nx - 1));
    const double ms = env.bounds().m_sharp;
    probe(ms - 1e-6);
    probe(ms);
    probe(ms + 1e-6);
    if (env.in_h2_range(at) && lv < kInf) {
        const double m = env.theta_funcs_from_log_v(lv).m_eps;
        const double h = 1e-9 * std::max(1.0, std::abs(m));
        probe(m - h);
        probe(m);
        probe(m + h);
    }
    return best;
}

DominationResult scan(const TsParameters& p, const TuningParameters& t, const DominationSpec& spec,
                      const std::optional<EnvelopeBounds>& override_bounds, bool parallel, int threads) {
    const Envelope env = override_bounds ? Envelope(p, t, *override_bounds) : Envelope(p, t);
    const auto [lo, hi] = scan_range(p, env.bounds(), spec);
    const std::vector<double> angles = scan_angles(p.branch(), spec.grid_theta);
    const std::size_t nx = std::max<std::size_t>(spec.grid_x, 2);

    std::vector<Best> rows(angles.size());
    const int nt = batch::resolve_threads(threads);
    FirstError err;
#pragma omp parallel for schedule(dynamic, 8) num_threads(nt) if (parallel)
    for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(angles.size()); ++j) {
        err.capture([&] { rows[j] = scan_row(env, angles[j], lo, hi, nx); });
    }

    constexpr std::size_t kChunk = 4096;
    const std::size_t nq = spec.quasi_points;
    std::vector<Best> chunks((nq + kChunk - 1) / kChunk);
#pragma omp parallel for schedule(dynamic, 4) num_threads(nt) if (parallel)
    for (std::ptrdiff_t c = 0; c < static_cast<std::ptrdiff_t>(chunks.size()); ++c) err.capture([&] {
        Best local;
        const std::size_t end = std::min(nq, (c + 1) * kChunk);
        for (std::size_t i = c * kChunk; i < end; ++i) {
            const double x = lo + (hi - lo) * radical_inverse(i + 1, 2);
            const double theta = -kHalfPi + kPi * radical_inverse(i + 1, 3);
            local.offer(env.evaluate(x, theta).log_ratio, x, theta);
        }
        chunks[c] = local;
    });
    err.rethrow();

    Best total;
    for (const auto& r : rows) total.merge(r);
    for (const auto& c : chunks) total.merge(c);
    return {total.log_ratio, total.x, total.theta, total.points, total.nan_points};
}

template <class... Args>
std::string format_point(const char* fmt, Args... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

class LemmaTally {
public:
    explicit LemmaTally(std::string name) { check_.name = std::move(name); }

    void record(bool ok, const std::string& detail) {
        ++check_.trials;
        if (ok) return;
        ++check_.violations;
        if (check_.counterexamples.size() < 10) check_.counterexamples.push_back(detail);
    }

    LemmaCheck take() { return std::move(check_); }

private:
    LemmaCheck check_;
};

double log_uniform(RandomStream& s, double lo, double hi) {
    return std::exp(std::log(lo) + s.uniform() * (std::log(hi) - std::log(lo)));
}

// lhs <= rhs up to the relative slack measured against the magnitudes involved.
bool within(double lhs, double rhs, double scale) {
    return lhs <= rhs + kLemmaRelativeSlack * std::max(scale, 1e-300);
}

double random_alpha(RandomStream& s) { return s.uniform() < 0.2 ? 1.0 : 1.01 + 0.98 * s.uniform(); }

}  // namespace

double DominationResult::max_ratio() const { return std::exp(max_log_ratio); }

bool DominationResult::passes() const {
    return nan_points == 0 && max_log_ratio <= std::log1p(kAcceptanceSlack);
}

double radical_inverse(std::uint64_t index, unsigned base) {
    double inv = 1.0 / base;
    double f = inv;
    double r = 0.0;
    while (index > 0) {
        r += f * static_cast<double>(index % base);
        index /= base;
        f *= inv;
    }
    return r;
}

DominationResult domination_scan(const TsParameters& p, const TuningParameters& t, const DominationSpec& spec,
                                 const std::optional<EnvelopeBounds>& override_bounds, int threads) {
    return scan(p, t, spec, override_bounds, true, threads);
}

DominationResult domination_scan_serial(const TsParameters& p, const TuningParameters& t,
                                        const DominationSpec& spec,
                                        const std::optional<EnvelopeBounds>& override_bounds) {
    return scan(p, t, spec, override_bounds, false, 1);
}

RateCheck rate_check(std::uint64_t proposals, std::uint64_t accepted, double k) {
    RateCheck r;
    r.proposals = proposals;
    r.accepted = accepted;
    r.rate = proposals == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposals);
    r.z = stats::binomial_z_score(accepted, proposals, 1.0 / k);
    r.pass = std::abs(r.z) <= kZLimit;
    return r;
}

bool ValidationReport::moments_pass() const {
    return mean_z && variance_z && std::abs(*mean_z) <= kZLimit && std::abs(*variance_z) <= kZLimit;
}

std::vector<ValidationReport> reproduce_table1(std::uint64_t n, std::uint64_t seed, const Table1Options& opt) {
    std::vector<ValidationReport> out;
    for (const auto& row : reference::kTable1) {
        const TsParameters p(row.alpha, row.ell);
        const TuningParameters t(row.epsilon, 0.5);
        const TsSampler sampler(p, t);
        ValidationReport r{p, t, n, seed};
        r.k_analytic = sampler.envelope().bounds().k();
        r.k_printed = row.k_printed;
        r.retained_fraction_printed =
            static_cast<double>(row.retained) / static_cast<double>(reference::kTable1Proposals);
        const RejectionReport rep = batch::count_acceptances(sampler, seed, n, opt.threads);
        r.rate = rate_check(rep.draws, rep.accepted, r.k_analytic);
        if (opt.domination) r.domination = domination_scan(p, t, opt.domination_spec, std::nullopt, opt.threads);
        if (opt.gof_samples > 0) {
            // Streams past the acceptance trials keep the two experiments independent.
            std::vector<double> xs = batch::sample(sampler, seed, opt.gof_samples, opt.threads, n);
            const stats::SampleMoments sm = stats::summarize(xs);
            const Moments mo = moments(p);
            r.mean_z = stats::mean_z_score(sm, mo.mean);
            r.variance_z = stats::variance_z_score(sm, mo.variance);
            std::sort(xs.begin(), xs.end());
            const TsCdf cdf(p);
            r.ks = stats::ks_from_cdf_values(xs, batch::evaluate(cdf, xs, opt.threads));
        }
        out.push_back(std::move(r));
    }
    return out;
}

RefinementComparison refinement_comparison(std::uint64_t n, std::uint64_t seed, int threads) {
    namespace agg = reference::aggregation;
    const TsParameters p(agg::kAlpha, agg::kEll);
    const TuningParameters t(agg::kEpsilon, 0.5);
    const TsSampler direct(p, t);
    const TsSampler aggregated(p, t, Skew::Minus, agg::kM);

    RefinementComparison c;
    c.m = agg::kM;
    c.ell = agg::kEll;
    c.ell_aggregated = aggregated.envelope().params().ell();
    c.k_direct = direct.envelope().bounds().k();
    c.k_aggregated = aggregated.envelope().bounds().k();
    c.improvement = c.m * c.k_aggregated < c.k_direct;

    c.n = n;
    const RejectionReport rd = batch::count_acceptances(direct, seed, n, threads);
    const RejectionReport ra = batch::count_acceptances(aggregated, seed + 1, n, threads);
    c.accepted_direct = rd.accepted;
    c.accepted_aggregated = ra.accepted;
    c.final_yield_aggregated = ra.accepted / c.m;
    c.expected_direct = static_cast<double>(n) / c.k_direct;
    c.expected_final_aggregated = static_cast<double>(n) / (c.m * c.k_aggregated);
    c.z_direct = stats::binomial_z_score(rd.accepted, n, 1.0 / c.k_direct);
    c.z_aggregated = stats::binomial_z_score(ra.accepted, n, 1.0 / c.k_aggregated);
    const double scale = static_cast<double>(n) / static_cast<double>(reference::kTable1Proposals);
    c.printed_direct_scaled = static_cast<double>(agg::kRetainedDirect) * scale;
    c.printed_final_scaled = static_cast<double>(agg::kRetainedAggregatedFinal) * scale;
    return c;
}

bool LemmaSuiteResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const LemmaCheck& c) { return c.violations == 0; });
}

LemmaSuiteResult lemma_property_suite(std::uint64_t trials, std::uint64_t seed) {
    LemmaSuiteResult result;

    {
        // L(x) = a x - b x^p stays under its quadratic expansion at the maximiser m.
        LemmaTally tally("taylor_power");
        RandomStream s(seed, 0);
        for (std::uint64_t i = 0; i < trials; ++i) {
            const double p = 2.0 + log_uniform(s, 1e-3, 20.0);
            const double a = log_uniform(s, 1e-2, 1e2);
            const double b = log_uniform(s, 1e-2, 1e2);
            const double m = std::pow(a / (b * p), 1.0 / (p - 1.0));
            const double x = i == 0 ? m : m * (1.0 + log_uniform(s, 1e-8, 4.0));
            const double lx = a * x - b * std::pow(x, p);
            const double lm = a * m - b * std::pow(m, p);
            const double curv = b * p * (p - 1.0) * std::pow(m, p - 2.0);
            const double quad = 0.5 * curv * (x - m) * (x - m);
            const double scale = std::max({a * x, b * std::pow(x, p), std::abs(lm), quad});
            tally.record(within(lx, lm - quad, scale),
                         format_point("p=%.17g a=%.17g b=%.17g x=%.17g", p, a, b, x));
        }
        result.checks.push_back(tally.take());
    }
    {
        // t^a e^{-bt} <= (a/b)^a e^{-a}, compared in logs; t = a/b is the equality case.
        LemmaTally tally("power_exponential");
        RandomStream s(seed, 1);
        for (std::uint64_t i = 0; i < trials; ++i) {
            const double a = log_uniform(s, 1e-3, 1e3);
            const double b = log_uniform(s, 1e-3, 1e3);
            const double t = i % 100 == 0 ? a / b : log_uniform(s, 1e-6, 1e6);
            const double lhs = a * std::log(t) - b * t;
            const double rhs = a * std::log(a / b) - a;
            const double scale = std::max({std::abs(a * std::log(t)), b * t, std::abs(a * std::log(a / b)), a});
            tally.record(within(lhs, rhs, scale), format_point("a=%.17g b=%.17g t=%.17g", a, b, t));
        }
        result.checks.push_back(tally.take());
    }
    {
        // L(x) = a x - c e^{bx} against its quadratic bound and the closed form of L(m).
        LemmaTally tally("taylor_exponential");
        RandomStream s(seed, 2);
        for (std::uint64_t i = 0; i < trials; ++i) {
            const double a = log_uniform(s, 1e-2, 1e2);
            const double b = log_uniform(s, 1e-2, 1e2);
            const double c = log_uniform(s, 1e-2, 1e2);
            const double m = std::log(a / (b * c)) / b;
            const double x = i == 0 ? m : m + log_uniform(s, 1e-8, 10.0) / b;
            const double lx = a * x - c * std::exp(b * x);
            const double lm = a * m - c * std::exp(b * m);
            const double closed = a / b * (std::log(a / (b * c)) - 1.0);
            const double quad = 0.5 * a * b * (x - m) * (x - m);
            const double scale = std::max({std::abs(a * x), c * std::exp(b * x), std::abs(lm), quad});
            const bool ok = within(lx, lm - quad, scale) &&
                            std::abs(lm - closed) <= kLemmaRelativeSlack * std::max({std::abs(a * m), a / b, 1e-300});
            tally.record(ok, format_point("a=%.17g b=%.17g c=%.17g x=%.17g", a, b, c, x));
        }
        result.checks.push_back(tally.take());
    }
    {
        // V decreases on (-theta0, pi/2) (all of (-pi/2, pi/2) at alpha = 1) and increases below -theta0.
        LemmaTally tally("v_monotone");
        RandomStream s(seed, 3);
        for (std::uint64_t i = 0; i < trials; ++i) {
            const AlphaBranch br(random_alpha(s));
            const bool left = !br.is_one() && s.uniform() < 0.3;
            const double lo = br.is_one() ? -kHalfPi : (left ? -kHalfPi : -br.theta0());
            const double hi = left ? -br.theta0() : kHalfPi;
            double t1 = lo + (hi - lo) * s.uniform_open();
            double t2 = lo + (hi - lo) * s.uniform_open();
            if (t1 > t2) std::swap(t1, t2);
            const double v1 = log_v(br, t1);
            const double v2 = log_v(br, t2);
            const double scale = std::max({std::abs(v1), std::abs(v2), 1.0});
            const bool ok = left ? within(v1, v2, scale) : within(v2, v1, scale);
            tally.record(ok, format_point("alpha=%.17g theta1=%.17g theta2=%.17g", br.alpha(), t1, t2));
        }
        result.checks.push_back(tally.take());
    }
    {
        // V(theta) >= V(pi/2) to the right of -theta0.
        LemmaTally tally("v_above_right_end");
        RandomStream s(seed, 4);
        for (std::uint64_t i = 0; i < trials; ++i) {
            const AlphaBranch br(random_alpha(s));
            const double lo = br.is_one() ? -kHalfPi : -br.theta0();
            const double theta = lo + (kHalfPi - lo) * s.uniform_open();
            const double lv = log_v(br, theta);
            const double end = br.log_v_right_end();
            tally.record(within(end, lv, std::max({std::abs(lv), std::abs(end), 1.0})),
                         format_point("alpha=%.17g theta=%.17g", br.alpha(), theta));
        }
        result.checks.push_back(tally.take());
    }
    {
        // m_eps(theta) <= m*_eps <= m#_eps (alpha = 1: m_eps(theta) <= m#_eps).
        LemmaTally tally("m_eps_bound");
        RandomStream s(seed, 5);
        for (std::uint64_t i = 0; i < trials; ++i) {
            const TsParameters p(random_alpha(s), log_uniform(s, 0.1, 10.0));
            const TuningParameters t(0.01 + 0.98 * s.uniform());
            const Envelope env(p, t);
            const double lo = p.branch().is_one() ? -kHalfPi : -p.branch().theta0();
            const double theta = i == 0 ? kHalfPi : lo + (kHalfPi - lo) * s.uniform_open();
            const double m = env.theta_funcs_from_log_v(log_v(p.branch(), theta)).m_eps;
            const EnvelopeBounds& b = env.bounds();
            bool ok = within(m, b.m_sharp, std::max(std::abs(m), 1.0));
            if (b.m_star) ok = ok && within(m, *b.m_star, std::max(std::abs(m), 1.0)) && *b.m_star <= b.m_sharp;
            tally.record(ok, format_point("alpha=%.17g ell=%.17g eps=%.17g theta=%.17g", p.alpha(), p.ell(),
                                          t.epsilon(), theta));
        }
        result.checks.push_back(tally.take());
    }
    return result;
}

GofReport gof_report(const TsParameters& p, const TuningParameters& t, std::size_t n, std::uint64_t seed,
                     std::size_t bins, int threads) {
    const TsSampler sampler(p, t);
    GofReport g{ValidationReport{p, t, n, seed}, {}};
    ValidationReport& r = g.report;
    r.k_analytic = sampler.envelope().bounds().k();

    std::vector<double> xs = batch::sample(sampler, seed, n, threads);
    const stats::SampleMoments sm = stats::summarize(xs);
    const Moments mo = moments(p);
    r.mean_z = stats::mean_z_score(sm, mo.mean);
    r.variance_z = stats::variance_z_score(sm, mo.variance);

    std::sort(xs.begin(), xs.end());
    const TsCdf cdf(p);
    r.ks = stats::ks_from_cdf_values(xs, batch::evaluate(cdf, xs, threads));

    if (bins > 0) {
        const double lo = xs[static_cast<std::size_t>(0.001 * (xs.size() - 1))];
        const double hi = xs[static_cast<std::size_t>(0.999 * (xs.size() - 1))];
        const stats::Histogram h = stats::histogram(xs, lo, hi, bins);
        for (std::size_t k = 0; k < bins; ++k) {
            g.histogram.push_back({h.centers[k], h.density[k], std::exp(log_ts_density(p, h.centers[k]))});
        }
    }
    return g;
}

}  // namespace tempest::validation
