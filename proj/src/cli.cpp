#include "tempest/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <regex>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "tempest/batch.hpp"
#include "tempest/errors.hpp"
#include "tempest/reference_data.hpp"
#include "tempest/validation.hpp"

namespace tempest::cli {

namespace {

using nlohmann::json;

constexpr std::uint64_t kLongRunThreshold = 10'000'000;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string quote(const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') q += '\\';
        if (c == '\n' || c == '\r') {
            q += ' ';
            continue;
        }
        q += c;
    }
    return q + "\"";
}

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Plain decimals only: no exponents, hex, inf or nan.
double parse_decimal(const std::string& flag, const std::string& text) {
    static const std::regex kDecimal(R"([+-]?(\d+(\.\d*)?|\.\d+))");
    if (!std::regex_match(text, kDecimal)) throw UsageError(flag + " expects a plain decimal number, got '" + text + "'");
    return std::strtod(text.c_str(), nullptr);
}

std::vector<double> parse_decimal_list(const std::string& flag, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_decimal(flag, item));
    if (out.empty()) throw UsageError(flag + " needs at least one value");
    return out;
}

std::uint64_t parse_count(const std::string& flag, const std::string& text) {
    static const std::regex kDigits(R"(\d+)");
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    if (!std::regex_match(text, kDigits) || std::from_chars(text.data(), end, v).ptr != end) {
        throw UsageError(flag + " expects a non-negative integer, got '" + text + "'");
    }
    return v;
}

struct Options {
    std::string alpha, ell, sigma = "1", epsilon, p1 = "0.5";
    std::string n, seed, m = "1", skew = "minus";
    bool cts = false;
    std::string ell_plus, sigma_plus = "1", ell_minus, sigma_minus = "1", b = "0";
    bool joint = false;
    std::string format = "csv";
    std::string out_path;
    std::string tol;
    std::string threads;
    bool allow_long = false;
    bool format_given = false;
    std::string tune_strategy;

    // ktable / validate
    bool table1 = false;
    // density
    std::string from, to, points = "201";
    // validate
    bool refinement = false, lemmas = false, gof = false, no_domination = false;
    std::string trials = "10000", bins = "50", gof_n = "0";
};

void add_model_flags(CLI::App* c, Options& o) {
    c->add_option("--alpha", o.alpha, "stability index in [1, 2)");
    c->add_option("--ell", o.ell, "tempering scale > 0");
    c->add_option("--sigma", o.sigma, "scale > 0 (default 1)");
}

void add_format_flags(CLI::App* c, Options& o) {
    c->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    c->add_option("--out", o.out_path, "write output to PATH instead of stdout");
    c->add_option("--threads", o.threads, "cap on worker threads (0 = default)");
}

void add_tuning_flags(CLI::App* c, Options& o) {
    c->add_option("--epsilon", o.epsilon, "tuning epsilon in (0, 1)");
    c->add_option("--p1", o.p1, "mixture weight of the stable component in (0, 1)");
    c->add_option("--tune", o.tune_strategy, "choose tuning by search: fixed, grid or grid-opt-p")
        ->check(CLI::IsMember({"fixed", "grid", "grid-opt-p"}));
}

double require_decimal(const std::string& flag, const std::string& text) {
    if (text.empty()) throw UsageError(flag + " is required");
    return parse_decimal(flag, text);
}

std::uint64_t resolve_seed(const Options& o) {
    if (!o.seed.empty()) return parse_count("--seed", o.seed);
    if (const char* env = std::getenv("TEMPEST_SEED"); env != nullptr && *env != '\0') {
        return parse_count("TEMPEST_SEED", env);
    }
    return 0;
}

int resolve_threads(const Options& o) {
    if (o.threads.empty()) return 0;
    const auto t = parse_count("--threads", o.threads);
    if (t > 4096) throw UsageError("--threads must not exceed 4096");
    return static_cast<int>(t);
}

void guard_long(std::uint64_t n, const Options& o) {
    if (n >= kLongRunThreshold && !o.allow_long) {
        throw UsageError("--n of 10000000 or more requires --allow-long");
    }
}

TsParameters model_params(const Options& o) {
    return TsParameters(require_decimal("--alpha", o.alpha), require_decimal("--ell", o.ell),
                        parse_decimal("--sigma", o.sigma));
}

std::optional<TuneStrategy> strategy_of(const std::string& s) {
    if (s.empty()) return std::nullopt;
    if (s == "fixed") return TuneStrategy::FixedHalf;
    if (s == "grid") return TuneStrategy::GridEps;
    return TuneStrategy::GridEpsOptP;
}

const char* strategy_name(TuneStrategy s) {
    switch (s) {
        case TuneStrategy::FixedHalf: return "fixed";
        case TuneStrategy::GridEps: return "grid";
        case TuneStrategy::GridEpsOptP: return "grid-opt-p";
    }
    return "?";
}

// Tuning of the unit-scale rejection target TS-(alpha, ell_unit, 1).
TuningParameters resolve_tuning(const Options& o, double alpha, double ell_unit) {
    std::optional<double> eps;
    if (!o.epsilon.empty()) eps = parse_decimal("--epsilon", o.epsilon);
    const double p1 = parse_decimal("--p1", o.p1);
    if (const auto strat = strategy_of(o.tune_strategy)) {
        return tune(TsParameters(alpha, ell_unit), *strat, eps).tuning;
    }
    return TuningParameters(eps.value_or(default_epsilon(alpha, ell_unit)), p1);
}

json tuning_json(const TuningParameters& t) { return {{"epsilon", t.epsilon()}, {"p1", t.p1()}}; }

void emit_samples(std::ostream& os, const Options& o, const json& config, const std::vector<double>& xs) {
    if (o.format == "json") {
        os << json{{"schema_version", kSchemaVersion}, {"command", "sample"}, {"config", config}, {"samples", xs}}.dump()
           << '\n';
        return;
    }
    os << "x\n";
    for (double x : xs) os << g17(x) << '\n';
}

void run_sample(const Options& o, std::ostream& os) {
    if (o.n.empty()) throw UsageError("--n is required");
    const std::uint64_t n = parse_count("--n", o.n);
    guard_long(n, o);
    const std::uint64_t seed = resolve_seed(o);
    const int threads = resolve_threads(o);
    const std::uint64_t m = parse_count("--m", o.m);
    if (m < 1 || m > 1'000'000) throw UsageError("--m must lie in [1, 1000000]");
    const Skew skew = o.skew == "plus" ? Skew::Plus : Skew::Minus;

    if (o.cts) {
        if (!o.ell.empty() || o.sigma != "1") throw UsageError("--cts takes --ell-plus/--ell-minus instead of --ell/--sigma");
        if (o.joint || m != 1 || o.skew != "minus") throw UsageError("--cts cannot be combined with --joint, --m or --skew");
        const CtsParameters cp(require_decimal("--alpha", o.alpha), require_decimal("--ell-plus", o.ell_plus),
                               parse_decimal("--sigma-plus", o.sigma_plus), require_decimal("--ell-minus", o.ell_minus),
                               parse_decimal("--sigma-minus", o.sigma_minus), parse_decimal("--b", o.b));
        const double a = cp.alpha();
        const TuningParameters tp = resolve_tuning(o, a, cp.plus().ell() / cp.plus().sigma());
        const TuningParameters tm = resolve_tuning(o, a, cp.minus().ell() / cp.minus().sigma());
        const CtsSampler sampler(cp, tp, tm);
        const json config{{"alpha", a},
                          {"ell_plus", cp.plus().ell()},
                          {"sigma_plus", cp.plus().sigma()},
                          {"ell_minus", cp.minus().ell()},
                          {"sigma_minus", cp.minus().sigma()},
                          {"b", cp.b()},
                          {"tuning_plus", tuning_json(tp)},
                          {"tuning_minus", tuning_json(tm)},
                          {"n", n},
                          {"seed", seed}};
        emit_samples(os, o, config, batch::sample_cts(sampler, seed, n, threads));
        return;
    }

    const TsParameters p = model_params(o);
    const double ell_unit = std::pow(static_cast<double>(m), 1.0 / p.alpha()) * p.ell() / p.sigma();
    const TuningParameters t = resolve_tuning(o, p.alpha(), ell_unit);
    const TsSampler sampler(p, t, skew, static_cast<unsigned>(m));
    json config{{"alpha", p.alpha()},
                {"ell", p.ell()},
                {"sigma", p.sigma()},
                {"skew", o.skew},
                {"m", m},
                {"tuning", tuning_json(t)},
                {"k", sampler.envelope().bounds().k()},
                {"n", n},
                {"seed", seed}};

    if (o.joint) {
        if (p.sigma() != 1.0 || m != 1 || skew != Skew::Minus) {
            throw UsageError("--joint needs --sigma 1, --m 1 and --skew minus");
        }
        const auto draws = batch::sample_joint(sampler, seed, n, threads);
        if (o.format == "json") {
            json xs = json::array();
            json ths = json::array();
            for (const auto& d : draws) {
                xs.push_back(d.x);
                ths.push_back(d.theta);
            }
            os << json{{"schema_version", kSchemaVersion},
                       {"command", "sample"},
                       {"config", config},
                       {"samples", xs},
                       {"theta", ths}}
                      .dump()
               << '\n';
        } else {
            os << "x,theta\n";
            for (const auto& d : draws) os << g17(d.x) << ',' << g17(d.theta) << '\n';
        }
        return;
    }
    emit_samples(os, o, config, batch::sample(sampler, seed, n, threads));
}

void run_ktable(const Options& o, std::ostream& os) {
    struct Row {
        double alpha, ell, eps, p1;
    };
    std::vector<Row> grid;
    if (o.table1) {
        for (const auto& r : reference::kTable1) grid.push_back({r.alpha, r.ell, r.epsilon, 0.5});
    } else {
        if (o.alpha.empty() || o.ell.empty() || o.epsilon.empty()) {
            throw UsageError("ktable needs --alpha, --ell and --epsilon (lists allowed) or --table1");
        }
        for (double a : parse_decimal_list("--alpha", o.alpha))
            for (double l : parse_decimal_list("--ell", o.ell))
                for (double e : parse_decimal_list("--epsilon", o.epsilon))
                    for (double p : parse_decimal_list("--p1", o.p1)) grid.push_back({a, l, e, p});
    }
    std::vector<std::pair<Row, EnvelopeBounds>> rows;
    for (const auto& r : grid) rows.emplace_back(r, bounds(TsParameters(r.alpha, r.ell), TuningParameters(r.eps, r.p1)));

    if (o.format == "json") {
        json arr = json::array();
        for (const auto& [r, b] : rows) {
            arr.push_back({{"alpha", r.alpha},
                           {"ell", r.ell},
                           {"epsilon", r.eps},
                           {"p1", r.p1},
                           {"C1", std::exp(b.log_c1)},
                           {"C2", std::exp(b.log_c2)},
                           {"K", b.k()}});
        }
        os << json{{"schema_version", kSchemaVersion}, {"command", "ktable"}, {"rows", arr}}.dump() << '\n';
        return;
    }
    os << "alpha,ell,epsilon,p1,C1,C2,K\n";
    for (const auto& [r, b] : rows) {
        os << g17(r.alpha) << ',' << g17(r.ell) << ',' << g17(r.eps) << ',' << g17(r.p1) << ','
           << g17(std::exp(b.log_c1)) << ',' << g17(std::exp(b.log_c2)) << ',' << g17(b.k()) << '\n';
    }
}

void run_tune(const Options& o, std::ostream& os) {
    const TsParameters p = model_params(o);
    const TsParameters unit = p.unit_scale();
    std::optional<double> eps;
    if (!o.epsilon.empty()) eps = parse_decimal("--epsilon", o.epsilon);
    std::vector<TuneStrategy> strategies;
    if (const auto s = strategy_of(o.tune_strategy)) {
        strategies.push_back(*s);
    } else {
        strategies = {TuneStrategy::FixedHalf, TuneStrategy::GridEps, TuneStrategy::GridEpsOptP};
    }
    std::vector<std::pair<TuneStrategy, TuneResult>> rows;
    for (auto s : strategies) rows.emplace_back(s, tune(unit, s, eps));

    if (o.format == "json") {
        json arr = json::array();
        for (const auto& [s, r] : rows) {
            arr.push_back({{"strategy", strategy_name(s)},
                           {"epsilon", r.tuning.epsilon()},
                           {"p1", r.tuning.p1()},
                           {"K", r.bounds.k()}});
        }
        os << json{{"schema_version", kSchemaVersion},
                   {"command", "tune"},
                   {"config", {{"alpha", p.alpha()}, {"ell", p.ell()}, {"sigma", p.sigma()}}},
                   {"rows", arr}}
                  .dump()
           << '\n';
        return;
    }
    os << "strategy,alpha,ell,sigma,epsilon,p1,K\n";
    for (const auto& [s, r] : rows) {
        os << strategy_name(s) << ',' << g17(p.alpha()) << ',' << g17(p.ell()) << ',' << g17(p.sigma()) << ','
           << g17(r.tuning.epsilon()) << ',' << g17(r.tuning.p1()) << ',' << g17(r.bounds.k()) << '\n';
    }
}

void run_density(const Options& o, std::ostream& os) {
    const TsParameters p = model_params(o);
    const double tol = o.tol.empty() ? kDefaultQuadratureTol : parse_decimal("--tol", o.tol);
    if (!(tol > 0.0 && tol < 1.0)) throw UsageError("--tol must lie in (0, 1)");
    const Moments mo = moments(p);
    const double sd = std::sqrt(mo.variance);
    const double from = o.from.empty() ? mo.mean - 6.0 * sd : parse_decimal("--from", o.from);
    const double to = o.to.empty() ? mo.mean + 6.0 * sd : parse_decimal("--to", o.to);
    const std::uint64_t pts = parse_count("--points", o.points);
    if (pts < 2 || pts > 1'000'000) throw UsageError("--points must lie in [2, 1000000]");
    if (!(to > from)) throw UsageError("--to must exceed --from");

    std::vector<double> xs(pts);
    for (std::uint64_t i = 0; i < pts; ++i) xs[i] = from + (to - from) * static_cast<double>(i) / (pts - 1);
    const auto g = batch::evaluate([&](double x) { return std::exp(log_ts_density(p, x, tol)); }, xs,
                                   resolve_threads(o));

    if (o.format == "json") {
        os << json{{"schema_version", kSchemaVersion},
                   {"command", "density"},
                   {"config", {{"alpha", p.alpha()}, {"ell", p.ell()}, {"sigma", p.sigma()}, {"tol", tol}}},
                   {"x", xs},
                   {"density", g}}
                  .dump()
           << '\n';
        return;
    }
    os << "x,density\n";
    for (std::size_t i = 0; i < xs.size(); ++i) os << g17(xs[i]) << ',' << g17(g[i]) << '\n';
}

json domination_json(const validation::DominationResult& d) {
    return {{"max_ratio", d.max_ratio()},
            {"max_log_ratio", d.max_log_ratio},
            {"argmax_x", d.argmax_x},
            {"argmax_theta", d.argmax_theta},
            {"points", d.points},
            {"nan_points", d.nan_points},
            {"pass", d.passes()}};
}

json report_json(const validation::ValidationReport& r) {
    json j{{"alpha", r.params.alpha()},   {"ell", r.params.ell()}, {"sigma", r.params.sigma()},
           {"epsilon", r.tuning.epsilon()}, {"p1", r.tuning.p1()},  {"n", r.n},
           {"seed", r.seed},                {"k_analytic", r.k_analytic}};
    j["k_printed"] = r.k_printed ? json(*r.k_printed) : json(nullptr);
    j["retained_fraction_printed"] = r.retained_fraction_printed ? json(*r.retained_fraction_printed) : json(nullptr);
    j["rate"] = r.rate ? json{{"proposals", r.rate->proposals},
                              {"accepted", r.rate->accepted},
                              {"rate_empirical", r.rate->rate},
                              {"rate_expected", 1.0 / r.k_analytic},
                              {"z", r.rate->z},
                              {"pass", r.rate->pass}}
                       : json(nullptr);
    j["ks"] = r.ks ? json{{"statistic", r.ks->statistic}, {"p_value", r.ks->p_value}, {"pass", r.ks_pass()}}
                   : json(nullptr);
    j["moments"] = r.mean_z ? json{{"mean_z", *r.mean_z}, {"variance_z", *r.variance_z}, {"pass", r.moments_pass()}}
                            : json(nullptr);
    j["domination"] = r.domination ? domination_json(*r.domination) : json(nullptr);
    return j;
}

void run_validate(const Options& o, std::ostream& os) {
    const int modes = int(o.table1) + int(o.refinement) + int(o.lemmas) + int(o.gof);
    if (modes != 1) throw UsageError("validate needs exactly one of --table1, --refinement, --lemmas, --gof");
    if (o.format == "csv" && !o.gof && o.format_given) {
        throw UsageError("--format csv is only available with validate --gof (histogram rows)");
    }
    const std::uint64_t seed = resolve_seed(o);
    const int threads = resolve_threads(o);
    json doc{{"schema_version", kSchemaVersion}, {"command", "validate"}, {"seed", seed}};

    if (o.table1 || o.refinement) {
        const std::uint64_t n = o.n.empty() ? 100'000 : parse_count("--n", o.n);
        guard_long(n, o);
        if (n < 10'000) throw UsageError("--n must be at least 10000");
        doc["n"] = n;
        if (o.table1) {
            validation::Table1Options opt;
            opt.domination = !o.no_domination;
            opt.gof_samples = parse_count("--gof-n", o.gof_n);
            opt.threads = threads;
            const auto reports = validation::reproduce_table1(n, seed, opt);
            doc["mode"] = "table1";
            json arr = json::array();
            std::size_t rate_ok = 0, dom_ok = 0, ks_ok = 0;
            for (const auto& r : reports) {
                arr.push_back(report_json(r));
                rate_ok += r.rate && r.rate->pass;
                dom_ok += r.domination && r.domination->passes();
                ks_ok += r.ks_pass();
            }
            doc["reports"] = arr;
            doc["summary"] = {{"rows", reports.size()}, {"rate_pass", rate_ok}, {"domination_pass", dom_ok},
                              {"ks_pass", ks_ok}};
        } else {
            const auto c = validation::refinement_comparison(n, seed, threads);
            doc["mode"] = "refinement";
            doc["refinement"] = {{"m", c.m},
                                 {"ell", c.ell},
                                 {"ell_aggregated", c.ell_aggregated},
                                 {"k_direct", c.k_direct},
                                 {"k_aggregated", c.k_aggregated},
                                 {"m_times_k_aggregated", c.m * c.k_aggregated},
                                 {"improvement", c.improvement},
                                 {"accepted_direct", c.accepted_direct},
                                 {"accepted_aggregated", c.accepted_aggregated},
                                 {"final_yield_aggregated", c.final_yield_aggregated},
                                 {"expected_direct", c.expected_direct},
                                 {"expected_final_aggregated", c.expected_final_aggregated},
                                 {"z_direct", c.z_direct},
                                 {"z_aggregated", c.z_aggregated},
                                 {"printed_direct_scaled", c.printed_direct_scaled},
                                 {"printed_final_scaled", c.printed_final_scaled}};
        }
    } else if (o.lemmas) {
        const std::uint64_t trials = parse_count("--trials", o.trials);
        if (trials < 1000) throw UsageError("--trials must be at least 1000");
        const auto res = validation::lemma_property_suite(trials, seed);
        doc["mode"] = "lemmas";
        json arr = json::array();
        for (const auto& c : res.checks) {
            arr.push_back({{"name", c.name},
                           {"trials", c.trials},
                           {"violations", c.violations},
                           {"counterexamples", c.counterexamples}});
        }
        doc["checks"] = arr;
        doc["pass"] = res.passed();
    } else {
        const TsParameters p = model_params(o);
        const TuningParameters t = resolve_tuning(o, p.alpha(), p.ell() / p.sigma());
        const std::uint64_t n = o.n.empty() ? 10'000 : parse_count("--n", o.n);
        guard_long(n, o);
        if (n < 1000) throw UsageError("--n must be at least 1000");
        const std::uint64_t bins = parse_count("--bins", o.bins);
        if (bins < 1 || bins > 100'000) throw UsageError("--bins must lie in [1, 100000]");
        const auto g = validation::gof_report(p, t, n, seed, bins, threads);
        if (o.format == "csv" && o.format_given) {
            os << "center,empirical,model\n";
            for (const auto& h : g.histogram) os << g17(h.center) << ',' << g17(h.empirical) << ',' << g17(h.model) << '\n';
            return;
        }
        doc["mode"] = "gof";
        doc["report"] = report_json(g.report);
        json hist = json::array();
        for (const auto& h : g.histogram) hist.push_back({{"center", h.center}, {"empirical", h.empirical}, {"model", h.model}});
        doc["histogram"] = hist;
    }
    os << doc.dump(2) << '\n';
}

void write_output(const Options& o, const std::string& text, std::ostream& out) {
    if (o.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(o.out_path, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot open --out path '" + o.out_path + "'");
    f << text;
    if (!f) throw UsageError("failed writing --out path '" + o.out_path + "'");
}

int fail(std::ostream& err, int code, const std::string& kind, const std::string& message,
         const std::string& extra = {}) {
    err << "error kind=" << kind << " code=" << code << extra << " message=" << quote(message) << '\n';
    return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Exact sampling of tempered stable laws", "tempest"};
    app.require_subcommand(1);

    auto* sample = app.add_subcommand("sample", "draw variates");
    add_model_flags(sample, o);
    add_tuning_flags(sample, o);
    add_format_flags(sample, o);
    sample->add_option("--n", o.n, "number of variates");
    sample->add_option("--seed", o.seed, "64-bit seed (default: TEMPEST_SEED, else 0)");
    sample->add_option("--m", o.m, "aggregation count");
    sample->add_option("--skew", o.skew, "minus or plus")->check(CLI::IsMember({"minus", "plus"}));
    sample->add_flag("--cts", o.cts, "sample X+ - X- + b");
    sample->add_option("--ell-plus", o.ell_plus, "tempering scale of X+ (with --cts)");
    sample->add_option("--sigma-plus", o.sigma_plus, "scale of X+ (default 1)");
    sample->add_option("--ell-minus", o.ell_minus, "tempering scale of X- (with --cts)");
    sample->add_option("--sigma-minus", o.sigma_minus, "scale of X- (default 1)");
    sample->add_option("--b", o.b, "shift added to X+ - X- (default 0)");
    sample->add_flag("--joint", o.joint, "emit (x, theta) pairs");
    sample->add_flag("--allow-long", o.allow_long, "permit --n >= 10000000");

    auto* ktable = app.add_subcommand("ktable", "envelope constants over a parameter grid");
    ktable->add_option("--alpha", o.alpha, "comma-separated list");
    ktable->add_option("--ell", o.ell, "comma-separated list");
    ktable->add_option("--epsilon", o.epsilon, "comma-separated list");
    ktable->add_option("--p1", o.p1, "comma-separated list");
    ktable->add_flag("--table1", o.table1, "the twelve reference configurations");
    add_format_flags(ktable, o);

    auto* tune_cmd = app.add_subcommand("tune", "search epsilon (and p1) for a small K");
    add_model_flags(tune_cmd, o);
    tune_cmd->add_option("--epsilon", o.epsilon, "epsilon for the fixed strategy");
    tune_cmd->add_option("--strategy", o.tune_strategy, "fixed, grid or grid-opt-p (default: all)")
        ->check(CLI::IsMember({"fixed", "grid", "grid-opt-p"}));
    add_format_flags(tune_cmd, o);

    auto* density = app.add_subcommand("density", "density on a uniform grid");
    add_model_flags(density, o);
    density->add_option("--from", o.from, "grid start (default mean - 6 sd)");
    density->add_option("--to", o.to, "grid end (default mean + 6 sd)");
    density->add_option("--points", o.points, "grid size");
    density->add_option("--tol", o.tol, "relative quadrature tolerance");
    add_format_flags(density, o);

    auto* validate = app.add_subcommand("validate", "verification reports (JSON)");
    add_model_flags(validate, o);
    add_tuning_flags(validate, o);
    add_format_flags(validate, o);
    validate->add_flag("--table1", o.table1, "reference table: K, acceptance rates, domination");
    validate->add_flag("--refinement", o.refinement, "direct versus aggregated sampling");
    validate->add_flag("--lemmas", o.lemmas, "randomised inequality checks");
    validate->add_flag("--gof", o.gof, "goodness of fit for one configuration");
    validate->add_flag("--no-domination", o.no_domination, "skip the domination scans in --table1");
    validate->add_option("--gof-n", o.gof_n, "exact samples per row for KS in --table1");
    validate->add_option("--n", o.n, "proposals (table1, refinement) or samples (gof)");
    validate->add_option("--seed", o.seed, "64-bit seed");
    validate->add_option("--trials", o.trials, "trials per lemma");
    validate->add_option("--bins", o.bins, "histogram bins for --gof");
    validate->add_flag("--allow-long", o.allow_long, "permit --n >= 10000000");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        return fail(err, kExitUsage, "usage", e.what());
    }
    for (auto* sub : {sample, ktable, tune_cmd, density, validate}) {
        if (sub->parsed() && sub->count("--format") > 0) o.format_given = true;
    }

    try {
        if (const int t = resolve_threads(o); t > 0) {
#ifdef _OPENMP
            omp_set_num_threads(t);
#endif
        }
        std::ostringstream buf;
        if (sample->parsed()) run_sample(o, buf);
        else if (ktable->parsed()) run_ktable(o, buf);
        else if (tune_cmd->parsed()) run_tune(o, buf);
        else if (density->parsed()) run_density(o, buf);
        else run_validate(o, buf);
        write_output(o, buf.str(), out);
        return kExitOk;
    } catch (const UsageError& e) {
        return fail(err, kExitUsage, "usage", e.what());
    } catch (const DomainError& e) {
        return fail(err, kExitUsage, "domain", e.what());
    } catch (const ConsistencyError& e) {
        return fail(err, kExitNumerical, "consistency", e.what(),
                    " x=" + g17(e.x()) + " theta=" + g17(e.theta()) + " log_ratio=" + g17(e.log_ratio()));
    } catch (const QuadratureError& e) {
        return fail(err, kExitNumerical, "quadrature", e.what(),
                    " estimate=" + g17(e.estimate()) + " error=" + g17(e.error()));
    } catch (const IterationLimitError& e) {
        return fail(err, kExitNumerical, "iteration_limit", e.what(), " draws=" + std::to_string(e.draws()));
    } catch (const std::exception& e) {
        return fail(err, kExitInternal, "internal", e.what());
    }
}

}  // namespace tempest::cli
