// Acceptance suite. One PASS/FAIL line per criterion, preceded by the
// individual checks. Tolerances are pinned below, not taken from flags.
//
//   acceptance [--criterion NAME]... [--tool PATH] [--expect-red CHECK]...
//
// Exit status is 0 when every check passes, or, with --expect-red, when the
// failing checks are exactly the listed ones. The FAIL lines are printed
// either way.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <unistd.h>

#include "tempest/batch.hpp"
#include "tempest/reference_data.hpp"
#include "tempest/stats.hpp"
#include "tempest/validation.hpp"

using namespace tempest;

namespace {

// Pinned tolerances.
constexpr double kKTableTol = 0.005;       // after rounding to two decimals
constexpr double kKDirectTol = 0.05;       // one printed decimal
constexpr double kKAggregatedTol = 0.005;  // two printed decimals
constexpr double kInstantSeconds = 1.0;
constexpr std::uint64_t kRateProposals = 100'000;
constexpr double kZ = 4.0;
constexpr double kDominationSlack = 1e-9;
constexpr std::size_t kGofSamples = 10'000;
constexpr std::size_t kGofMinRows = 11;
constexpr double kKsLevel = 0.01;
constexpr std::size_t kMomentSamples = 100'000;
constexpr std::size_t kStructSamples = 10'000;
constexpr std::size_t kStructMomentSamples = 100'000;
constexpr std::uint64_t kLemmaTrials = 10'000;
const std::vector<std::uint64_t> kGofSeeds = {1, 2, 3};

struct Check {
    std::string name;
    bool pass;
    std::string detail;
};

using Checks = std::vector<Check>;

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string row_name(double a, double l, double e) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "(%g,%g,%g)", a, l, e);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double round2(double k) { return std::round(k * 100.0) / 100.0; }

// ---------------------------------------------------------------------------

Checks k_table(const std::string&) {
    Checks out;
    const auto t0 = std::chrono::steady_clock::now();
    for (const auto& r : reference::kTable1) {
        const double k = bounds(TsParameters(r.alpha, r.ell), TuningParameters(r.epsilon, 0.5)).k();
        const double diff = std::abs(round2(k) - r.k_printed);
        out.push_back({"K" + row_name(r.alpha, r.ell, r.epsilon), diff <= kKTableTol + 1e-12,
                       "K=" + fmt("%.6f", k) + " rounded=" + fmt("%.2f", round2(k)) + " printed=" + fmt("%.2f", r.k_printed)});
    }
    const double dt = seconds_since(t0);
    out.push_back({"runtime", dt < kInstantSeconds, fmt("%.3f s", dt)});
    return out;
}

Checks refinement(const std::string&) {
    namespace agg = reference::aggregation;
    Checks out;
    const auto t0 = std::chrono::steady_clock::now();
    const TuningParameters t(agg::kEpsilon, 0.5);
    const double k_direct = bounds(TsParameters(agg::kAlpha, agg::kEll), t).k();
    const double ell_m = std::pow(static_cast<double>(agg::kM), 1.0 / agg::kAlpha) * agg::kEll;
    const double k_agg = bounds(TsParameters(agg::kAlpha, ell_m), t).k();
    const double dt = seconds_since(t0);
    out.push_back({"K_direct", std::abs(k_direct - agg::kKDirect) <= kKDirectTol,
                   "K=" + fmt("%.6f", k_direct) + " printed=" + fmt("%.1f", agg::kKDirect)});
    out.push_back({"K_aggregated", std::abs(k_agg - agg::kKAggregated) <= kKAggregatedTol,
                   "K=" + fmt("%.6f", k_agg) + " printed=" + fmt("%.2f", agg::kKAggregated) +
                       " (two-decimal truncation " + fmt("%.2f", std::floor(k_agg * 100.0) / 100.0) + ")"});
    out.push_back({"improvement", agg::kM * k_agg < k_direct,
                   "m*K_agg=" + fmt("%.4f", agg::kM * k_agg) + " < K_direct=" + fmt("%.4f", k_direct)});
    out.push_back({"runtime", dt < kInstantSeconds, fmt("%.3f s", dt)});
    return out;
}

Checks acceptance_rate(const std::string&) {
    Checks out;
    for (const auto& r : reference::kTable1) {
        const TsSampler s(TsParameters(r.alpha, r.ell), TuningParameters(r.epsilon, 0.5));
        const double k = s.envelope().bounds().k();
        const RejectionReport rep = batch::count_acceptances(s, 100, kRateProposals);
        const double z = stats::binomial_z_score(rep.accepted, rep.draws, 1.0 / k);
        // The published retained counts at 1e7 proposals, as an expectation-level comparison.
        const double z_printed = stats::binomial_z_score(static_cast<std::uint64_t>(r.retained),
                                                         static_cast<std::uint64_t>(reference::kTable1Proposals), 1.0 / k);
        out.push_back({"rate" + row_name(r.alpha, r.ell, r.epsilon), std::abs(z) <= kZ && rep.draws == kRateProposals,
                       "accepted=" + std::to_string(rep.accepted) + "/" + std::to_string(rep.draws) +
                           " expected=" + fmt("%.1f", kRateProposals / k) + " z=" + fmt("%.2f", z)});
        out.push_back({"printed_counts" + row_name(r.alpha, r.ell, r.epsilon), std::abs(z_printed) <= kZ,
                       "retained=" + std::to_string(r.retained) + " N/K=" + fmt("%.0f", reference::kTable1Proposals / k) +
                           " z=" + fmt("%.2f", z_printed)});
    }
    return out;
}

Checks domination(const std::string&) {
    Checks out;
    namespace agg = reference::aggregation;
    struct Config {
        double a, l, e;
    };
    std::vector<Config> configs;
    for (const auto& r : reference::kTable1) configs.push_back({r.alpha, r.ell, r.epsilon});
    configs.push_back({agg::kAlpha, agg::kEll, agg::kEpsilon});
    configs.push_back({agg::kAlpha, std::pow(static_cast<double>(agg::kM), 1.0 / agg::kAlpha) * agg::kEll, agg::kEpsilon});
    const validation::DominationSpec spec;  // 1000 x 1000 grid plus 1e6 Halton points
    for (const auto& c : configs) {
        const auto d = validation::domination_scan(TsParameters(c.a, c.l), TuningParameters(c.e, 0.5), spec);
        const bool ok = d.nan_points == 0 && d.max_log_ratio <= std::log1p(kDominationSlack);
        out.push_back({"domination" + row_name(c.a, c.l, c.e), ok,
                       "max g*/(Kh)=" + fmt("%.12f", d.max_ratio()) + " at x=" + fmt("%.6g", d.argmax_x) +
                           " theta=" + fmt("%.6g", d.argmax_theta) + " points=" + std::to_string(d.points) +
                           " nan=" + std::to_string(d.nan_points)});
    }
    return out;
}

Checks goodness_of_fit(const std::string&) {
    Checks out;
    std::vector<std::size_t> ks_pass(kGofSeeds.size(), 0);
    for (const auto& r : reference::kTable1) {
        const TsParameters p(r.alpha, r.ell);
        const TsSampler s(p, TuningParameters(r.epsilon, 0.5));
        const TsCdf cdf(p);
        std::string ps;
        for (std::size_t j = 0; j < kGofSeeds.size(); ++j) {
            std::vector<double> xs = batch::sample(s, kGofSeeds[j], kGofSamples);
            std::sort(xs.begin(), xs.end());
            const auto ks = stats::ks_from_cdf_values(xs, batch::evaluate(cdf, xs));
            ks_pass[j] += ks.passes(kKsLevel);
            ps += (j ? " " : "") + fmt("%.3f", ks.p_value);
        }
        const stats::SampleMoments m = stats::summarize(batch::sample(s, 1000, kMomentSamples));
        const Moments mo = moments(p);
        const double zm = stats::mean_z_score(m, mo.mean);
        const double zv = stats::variance_z_score(m, mo.variance);
        out.push_back({"moments" + row_name(r.alpha, r.ell, r.epsilon), std::abs(zm) <= kZ && std::abs(zv) <= kZ,
                       "KS p per seed=[" + ps + "] mean z=" + fmt("%.2f", zm) + " var z=" + fmt("%.2f", zv)});
    }
    for (std::size_t j = 0; j < kGofSeeds.size(); ++j) {
        out.push_back({"ks_seed" + std::to_string(kGofSeeds[j]), ks_pass[j] >= kGofMinRows,
                       std::to_string(ks_pass[j]) + " of 12 rows pass at level " + fmt("%g", kKsLevel)});
    }
    return out;
}

Checks structural(const std::string&) {
    Checks out;
    // Convolution: TS(a, l, s1) + TS(a, l, s2) ~ TS(a, l, (s1^a + s2^a)^{1/a}).
    for (const auto& [a, l, s1, s2] : {std::tuple{1.5, 2.0, 1.0, 0.5}, std::tuple{1.0, 1.0, 0.7, 1.8}}) {
        const double s12 = std::pow(std::pow(s1, a) + std::pow(s2, a), 1.0 / a);
        const TuningParameters t(0.5);
        const auto x1 = batch::sample(TsSampler(TsParameters(a, l, s1), t), 11, kStructSamples);
        const auto x2 = batch::sample(TsSampler(TsParameters(a, l, s2), t), 12, kStructSamples);
        std::vector<double> sum(kStructSamples);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = x1[i] + x2[i];
        const auto direct = batch::sample(TsSampler(TsParameters(a, l, s12), t), 13, kStructSamples);
        const auto ks = stats::ks_two_sample(sum, direct);
        out.push_back({"convolution(alpha=" + fmt("%g", a) + ")", ks.passes(kKsLevel),
                       "two-sample KS D=" + fmt("%.4f", ks.statistic) + " p=" + fmt("%.3f", ks.p_value)});
    }
    {
        namespace agg = reference::aggregation;
        const TsParameters p(agg::kAlpha, agg::kEll);
        const TuningParameters t(agg::kEpsilon, 0.5);
        const auto direct = batch::sample(TsSampler(p, t), 21, kStructSamples);
        const auto aggregated = batch::sample(TsSampler(p, t, Skew::Minus, agg::kM), 22, kStructSamples);
        const auto ks = stats::ks_two_sample(direct, aggregated);
        out.push_back({"aggregation_vs_direct", ks.passes(kKsLevel),
                       "m=2, two-sample KS D=" + fmt("%.4f", ks.statistic) + " p=" + fmt("%.3f", ks.p_value)});
    }
    {
        const TsParameters p(1.5, 2.0, 1.5);
        const TsSampler plus(p, TuningParameters(0.6), Skew::Plus);
        const stats::SampleMoments m = stats::summarize(batch::sample(plus, 31, kStructMomentSamples));
        const Moments mo = moments(p);
        const double zm = stats::mean_z_score(m, -mo.mean);
        const double zv = stats::variance_z_score(m, mo.variance);
        out.push_back({"ts_plus_negation", std::abs(zm) <= kZ && std::abs(zv) <= kZ && m.mean < 0.0,
                       "mean z=" + fmt("%.2f", zm) + " var z=" + fmt("%.2f", zv)});
    }
    {
        const CtsParameters cp(1.5, 1.0, 1.0, 2.0, 0.5, 0.25);
        const CtsSampler s(cp, TuningParameters(0.6));
        const stats::SampleMoments m = stats::summarize(batch::sample_cts(s, 41, kStructMomentSamples));
        // X+ ~ TS+ has mean -E[TS-]; so E = -mu(plus) + mu(minus) + b.
        const double mean = -moments(cp.plus()).mean + moments(cp.minus()).mean + cp.b();
        const double var = moments(cp.plus()).variance + moments(cp.minus()).variance;
        const double zm = stats::mean_z_score(m, mean);
        const double zv = stats::variance_z_score(m, var);
        out.push_back({"cts_mean", std::abs(zm) <= kZ && std::abs(zv) <= kZ,
                       "mean=" + fmt("%.4f", m.mean) + " expected=" + fmt("%.4f", mean) + " z=" + fmt("%.2f", zm) +
                           " var z=" + fmt("%.2f", zv)});
    }
    return out;
}

Checks lemmas(const std::string&) {
    Checks out;
    const auto res = validation::lemma_property_suite(kLemmaTrials, 2024);
    for (const auto& c : res.checks) {
        out.push_back({c.name, c.violations == 0 && c.trials >= kLemmaTrials,
                       std::to_string(c.violations) + " violations in " + std::to_string(c.trials) + " trials" +
                           (c.counterexamples.empty() ? "" : "; first: " + c.counterexamples.front())});
    }
    return out;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Checks reproducibility(const std::string& tool) {
    Checks out;
    if (tool.empty()) return {{"tool", false, "no --tool given"}};
    const std::vector<std::pair<std::string, std::string>> cmds = {
        {"sample_csv", "sample --alpha 1.5 --ell 2 --sigma 1 --epsilon 0.6 --n 1000 --seed 42"},
        {"sample_json", "sample --alpha 1 --ell 1 --n 1000 --seed 42 --format json"},
        {"sample_joint", "sample --alpha 1.9 --ell 1 --n 500 --seed 7 --joint"},
        {"sample_cts", "sample --cts --alpha 1.5 --ell-plus 1 --ell-minus 2 --n 500 --seed 9"},
        {"sample_aggregated", "sample --alpha 1.5 --ell 0.3 --epsilon 0.95 --m 2 --n 200 --seed 3"},
        {"ktable", "ktable --table1 --format json"},
        {"density", "density --alpha 1.1 --ell 2 --points 51"},
        {"validate_lemmas", "validate --lemmas --trials 1000 --seed 5"},
    };
    const auto dir = std::filesystem::temp_directory_path() / ("tempest_repro_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    for (const auto& [name, args] : cmds) {
        std::string runs[2];
        bool ran = true;
        for (int k = 0; k < 2; ++k) {
            const auto path = dir / (name + std::to_string(k));
            const std::string cmd = "\"" + tool + "\" " + args + " --out \"" + path.string() + "\"";
            ran = ran && std::system(cmd.c_str()) == 0;
            runs[k] = slurp(path);
        }
        const bool same = ran && !runs[0].empty() && runs[0] == runs[1];
        out.push_back({name, same, std::to_string(runs[0].size()) + " bytes, " + (same ? "identical" : "DIFFERENT")});
    }
    std::filesystem::remove_all(dir);
    return out;
}

struct Criterion {
    std::string name;
    std::string title;
    std::function<Checks(const std::string&)> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {"k_table", "reference K values to printed precision", k_table},
        {"refinement", "aggregation constants and improvement", refinement},
        {"acceptance_rate", "empirical acceptance within 4 SE of 1/K at N=1e5", acceptance_rate},
        {"domination", "g*/(K h) <= 1+1e-9 on grid + 1e6 quasi-random points", domination},
        {"goodness_of_fit", "KS at 1e4 (>=11/12 rows per seed) and moments at 1e5", goodness_of_fit},
        {"structural", "convolution, aggregation, TS+ negation, CTS mean", structural},
        {"lemmas", "randomised inequality suite, 1e4 trials each", lemmas},
        {"reproducibility", "byte-identical CLI output across two runs", reproducibility},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    std::vector<std::string> selected;
    std::vector<std::string> expect_red;
    std::string tool;
    app.add_option("--criterion", selected, "criterion to run (repeatable; default all)");
    app.add_option("--tool", tool, "path to the tempest executable");
    app.add_option("--expect-red", expect_red, "check known to fail (repeatable)");
    CLI11_PARSE(app, argc, argv);

    std::set<std::string> failing;
    bool unknown = false;
    for (const auto& s : selected) {
        if (std::none_of(criteria().begin(), criteria().end(), [&](const Criterion& c) { return c.name == s; })) {
            std::printf("unknown criterion '%s'\n", s.c_str());
            unknown = true;
        }
    }
    if (unknown) return 2;

    for (const auto& c : criteria()) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.name) == selected.end()) continue;
        const auto t0 = std::chrono::steady_clock::now();
        const Checks checks = c.run(tool);
        bool all = !checks.empty();
        for (const auto& k : checks) {
            std::printf("  %s %s: %s\n", k.pass ? "ok  " : "FAIL", k.name.c_str(), k.detail.c_str());
            if (!k.pass) failing.insert(c.name + "/" + k.name);
            all = all && k.pass;
        }
        std::printf("%s %s: %s (%.1f s)\n", all ? "PASS" : "FAIL", c.name.c_str(), c.title.c_str(), seconds_since(t0));
        std::fflush(stdout);
    }

    if (expect_red.empty()) return failing.empty() ? 0 : 1;
    const std::set<std::string> expected(expect_red.begin(), expect_red.end());
    if (failing == expected) {
        std::printf("failing checks match the expected red set\n");
        return 0;
    }
    std::printf("failing checks differ from the expected red set\n");
    return 1;
}
