#include <doctest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <tuple>
#include <vector>

#include "tempest/batch.hpp"
#include "tempest/errors.hpp"
#include "tempest/quadrature.hpp"
#include "tempest/sampler.hpp"
#include "tempest/stats.hpp"

using namespace tempest;

namespace {

constexpr double kZ = 4.0;

std::vector<double> draw(const TsSampler& s, std::uint64_t seed, std::size_t n) {
    return batch::sample_serial(s, seed, n);
}

}  // namespace

TEST_CASE("h1 transform at known points") {
    CHECK(h1_from_angle(AlphaBranch(1.0), 0.0, 1.0).x == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
    // V(pi/2) = 2/27 at alpha = 1.5, so W = 2/27 gives |X| = 1.
    CHECK(h1_from_angle(AlphaBranch(1.5), kHalfPi, 2.0 / 27.0).x == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(h1_from_angle(AlphaBranch(1.5), kHalfPi - 1e-9, 2.0 / 27.0).x == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(h1_from_angle(AlphaBranch(1.5), -1.2, 1.0).x < 0.0);
    CHECK(h1_from_angle(AlphaBranch(1.5), -AlphaBranch(1.5).theta0(), 1.0).x == 0.0);
    CHECK_THROWS_AS((void)h1_from_angle(AlphaBranch(1.5), 0.0, 0.0), DomainError);
}

TEST_CASE("h2 transform") {
    const TsParameters p(1.5, 1.0);
    const TuningParameters t(0.6);
    const Envelope env(p, t);
    for (double th : {-0.4, 0.3, 1.5}) {
        CHECK(h2_from_angle(env, th, 0.0).x == theta_funcs(p, t, th).m_eps);
    }
    CHECK_THROWS_AS((void)h2_from_angle(env, -1.0, 0.5), DomainError);

    const TsParameters one(1.0, 2.0);
    const Envelope env1(one, t);
    for (double z : {-2.0, 0.7, 3.0}) {
        const double th = 0.2;
        const double m = theta_funcs(one, t, th).m_eps;
        CHECK(h2_from_angle(env1, th, z).x - m == doctest::Approx(std::abs(z) / std::sqrt(std::numbers::pi / 4)).epsilon(1e-14));
    }
}

TEST_CASE("h2 draws are half-normal around m_eps given theta") {
    const TsParameters p(1.5, 1.0);
    const TuningParameters t(0.6);
    constexpr int n = 100000;
    constexpr int bins = 10;
    std::vector<std::vector<double>> scaled(bins);
    RandomStream s(11);
    const double t0 = p.branch().theta0();
    for (int i = 0; i < n; ++i) {
        const AngleSample d = sample_h2(p, t, s);
        REQUIRE(d.theta > -t0);
        const ThetaFunctions tf = theta_funcs(p, t, d.theta);
        REQUIRE(d.x >= tf.m_eps);
        const int b = std::min(bins - 1, static_cast<int>((d.theta + t0) / (kHalfPi + t0) * bins));
        scaled[b].push_back((d.x - tf.m_eps) * std::sqrt(tf.xi_eps));
    }
    for (const auto& v : scaled) {
        const stats::SampleMoments m = stats::summarize(v);
        CHECK(std::abs(stats::mean_z_score(m, std::sqrt(2.0 / std::numbers::pi))) <= kZ);
    }
}

TEST_CASE("h1 sign split matches the stable mass on the positive axis") {
    const AlphaBranch br(1.5);
    boost::math::quadrature::tanh_sinh<double> ts;
    const double right = ts.integrate([&](double x) { return stable_density(br, x); }, 0.0, 40.0, 1e-11);
    constexpr std::uint64_t n = 100000;
    RandomStream s(5);
    std::uint64_t positive = 0;
    for (std::uint64_t i = 0; i < n; ++i) positive += sample_h1(br, s).x > 0.0;
    CHECK(std::abs(stats::binomial_z_score(positive, n, right)) <= kZ);
}

TEST_CASE("h1 marginal passes KS against the stable CDF") {
    const AlphaBranch br(1.5);
    constexpr std::size_t n = 10000;
    RandomStream s(6);
    std::vector<double> xs(n);
    for (double& x : xs) x = sample_h1(br, s).x;
    std::sort(xs.begin(), xs.end());

    // F at each order statistic: left tail by exp-sinh, then panel by panel.
    auto f = [&](double x) { return stable_density(br, x); };
    boost::math::quadrature::exp_sinh<double> es;
    std::vector<double> cdf(n);
    double acc = es.integrate([&](double t) { return f(xs[0] - t); }, 0.0, std::numeric_limits<double>::infinity(), 1e-10);
    cdf[0] = acc;
    quad::Options opt;
    opt.rel_tol = 1e-9;
    opt.abs_tol = 1e-13;
    for (std::size_t i = 1; i < n; ++i) {
        acc += quad::integrate(f, xs[i - 1], xs[i], opt).value;
        cdf[i] = std::min(acc, 1.0);
    }
    const stats::KsResult ks = stats::ks_from_cdf_values(xs, cdf);
    CAPTURE(ks.statistic);
    CHECK(ks.passes(0.01));
}

TEST_CASE("degenerate mixtures follow one component") {
    const TsParameters p(1.5, 1.0);
    for (std::uint64_t i = 0; i < 200; ++i) {
        RandomStream a(3, i);
        RandomStream b(3, i);
        b.next_u64();
        const AngleSample h = sample_h(p, TuningParameters(0.6, 1.0 - 1e-15), a);
        const AngleSample h1 = sample_h1(p.branch(), b);
        CHECK(h.x == h1.x);
        CHECK(h.theta == h1.theta);

        RandomStream c(3, i);
        RandomStream d(3, i);
        d.next_u64();
        const AngleSample g = sample_h(p, TuningParameters(0.6, 1e-15), c);
        const AngleSample h2 = sample_h2(p, TuningParameters(0.6, 1e-15), d);
        CHECK(g.x == h2.x);
        CHECK(g.theta == h2.theta);
    }
}

TEST_CASE("balanced mixture uses each component half the time") {
    const TsParameters p(1.5, 1.0);
    const TuningParameters t(0.6, 0.5);
    constexpr std::uint64_t n = 100000;
    std::uint64_t first = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
        RandomStream a(4, i);
        RandomStream b(4, i);
        b.next_u64();
        first += sample_h(p, t, a).x == sample_h1(p.branch(), b).x;
    }
    CHECK(std::abs(stats::binomial_z_score(first, n, 0.5)) <= kZ);
}

TEST_CASE("acceptance rate matches 1/K") {
    const TsParameters p(1.0, 1.0);
    const TuningParameters t(0.6);
    const TsSampler sampler(p, t);
    RejectionReport r;
    RandomStream s(7);
    for (int i = 0; i < 100000; ++i) sampler.trial(s, r);
    CHECK(r.draws == 100000);
    CHECK(r.accepted <= r.draws);
    CHECK(std::abs(stats::binomial_z_score(r.accepted, r.draws, 1.0 / 5.2329158428322797)) <= kZ);
}

TEST_CASE("g* sampler reports and the iteration cap") {
    const TsParameters p(1.5, 0.3);
    const TuningParameters t(0.95);
    const EnvelopeBounds b = bounds(p, t);
    RandomStream first(1);
    CHECK_THROWS_AS((void)sample_g_star(p, t, b, first, 0), DomainError);
    int capped = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        RandomStream s(seed);
        try {
            const GStarDraw d = sample_g_star(p, t, b, s, 1);
            CHECK(d.report.accepted == 1);
            CHECK(d.report.draws == 1);
        } catch (const IterationLimitError& e) {
            CHECK(e.draws() == 1);
            ++capped;
        }
    }
    CHECK(capped > 40);  // K is about 207, so nearly every single proposal is rejected

    RandomStream s(9);
    const GStarDraw d = sample_g_star(TsParameters(1.0, 1.0), TuningParameters(0.6), bounds(TsParameters(1.0, 1.0), TuningParameters(0.6)), s, 1000000);
    CHECK(d.report.accepted == 1);
    CHECK(d.report.draws >= 1);
}

TEST_CASE("default iteration cap") {
    CHECK(default_max_iter(5.23) == 1000000);
    CHECK(default_max_iter(2068.2) == 2069000);
}

TEST_CASE("exact samples pass KS against the CDF") {
    for (const auto& [a, l, e] : {std::tuple{1.0, 1.0, 0.6}, std::tuple{1.5, 1.0, 0.8}, std::tuple{1.9, 5.0, 0.8}}) {
        const TsParameters p(a, l);
        const TsSampler sampler(p, TuningParameters(e));
        const TsCdf cdf(p);
        const stats::KsResult ks = stats::ks_one_sample(draw(sampler, 21, 10000), [&cdf](double x) { return cdf(x); });
        CAPTURE(a);
        CAPTURE(ks.statistic);
        CHECK(ks.passes(0.01));
    }
}

TEST_CASE("median of exact samples") {
    const TsParameters p(1.5, 1.0);
    std::vector<double> xs = draw(TsSampler(p, TuningParameters(0.8)), 22, 100000);
    std::nth_element(xs.begin(), xs.begin() + xs.size() / 2, xs.end());
    CHECK(ts_cdf(p, xs[xs.size() / 2]) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("unit-sigma minus skew is the g* marginal") {
    const TsParameters p(1.5, 1.0);
    const TsSampler sampler(p, TuningParameters(0.8));
    for (std::uint64_t i = 0; i < 100; ++i) {
        RandomStream a(8, i);
        RandomStream b(8, i);
        CHECK(sampler(a) == sampler.draw_joint(b).sample.x);
    }
}

TEST_CASE("plus skew negates") {
    const TsParameters p(1.5, 2.0);
    const TuningParameters t(0.6);
    const TsSampler minus(p, t);
    const TsSampler plus(p, t, Skew::Plus);
    for (std::uint64_t i = 0; i < 100; ++i) {
        RandomStream a(12, i);
        RandomStream b(12, i);
        CHECK(plus(a) == -minus(b));
    }
    const stats::SampleMoments m = stats::summarize(draw(plus, 13, 100000));
    CHECK(std::abs(stats::mean_z_score(m, -moments(p).mean)) <= kZ);
}

TEST_CASE("scaled laws have the closed-form moments") {
    for (const auto& [a, l, s] : {std::tuple{1.0, 1.0, 2.0}, std::tuple{1.5, 2.0, 3.0}, std::tuple{1.9, 1.0, 0.5}}) {
        const TsParameters p(a, l, s);
        const TsSampler sampler(p, TuningParameters(default_epsilon(a, l / s)));
        const stats::SampleMoments m = stats::summarize(draw(sampler, 14, 100000));
        const Moments exact = moments(p);
        CAPTURE(a);
        CHECK(std::abs(stats::mean_z_score(m, exact.mean)) <= kZ);
        CHECK(std::abs(stats::variance_z_score(m, exact.variance)) <= kZ);
    }
}

TEST_CASE("aggregation") {
    const TsParameters p(1.5, 0.3);
    const TuningParameters t(0.95);
    // m = 1 is the direct sampler, bit for bit.
    for (std::uint64_t i = 0; i < 50; ++i) {
        RandomStream a(15, i);
        RandomStream b(15, i);
        CHECK(sample_ts_aggregated(p, t, a, 1) == sample_ts(p, t, b));
    }
    const TsSampler two(p, t, Skew::Minus, 2);
    CHECK(two.envelope().params().ell() == doctest::Approx(0.3 * std::pow(2.0, 1.0 / 1.5)).epsilon(1e-15));
    CHECK(two.envelope().bounds().k() == doctest::Approx(20.338062628869901).epsilon(1e-12));

    const std::vector<double> agg = draw(two, 16, 10000);
    const std::vector<double> direct = draw(TsSampler(p, t), 17, 10000);
    const stats::KsResult ks = stats::ks_two_sample(agg, direct);
    CAPTURE(ks.statistic);
    CHECK(ks.passes(0.01));

    // alpha = 1 needs the (2/pi) log m shift.
    const TsParameters one(1.0, 1.0);
    const stats::SampleMoments m = stats::summarize(draw(TsSampler(one, TuningParameters(0.6), Skew::Minus, 3), 18, 100000));
    CHECK(std::abs(stats::mean_z_score(m, moments(one).mean)) <= kZ);
    CHECK_THROWS_AS(TsSampler(one, TuningParameters(0.6), Skew::Minus, 0), DomainError);
}

TEST_CASE("CTS shift, mean and symmetry") {
    const TuningParameters t(0.5);
    const CtsParameters shifted(1.5, 1.0, 1.0, 2.0, 0.5, 0.75);
    const CtsParameters other(1.5, 1.0, 1.0, 2.0, 0.5, -0.5);
    const CtsSampler sa(shifted, t);
    const CtsSampler sb(other, t);
    for (std::uint64_t i = 0; i < 100; ++i) {
        CtsStreams a(RandomStream(19, i));
        CtsStreams b(RandomStream(19, i));
        const double ya = sa(a);
        const double yb = sb(b);
        CHECK(ya - yb == doctest::Approx(1.25).epsilon(1e-12 * (1.0 + std::abs(ya))));
    }

    const stats::SampleMoments m = stats::summarize(batch::sample_cts_serial(sa, 20, 100000));
    const double expected = -moments(shifted.plus()).mean + moments(shifted.minus()).mean + 0.75;
    CHECK(std::abs(stats::mean_z_score(m, expected)) <= kZ);

    const CtsSampler sym(CtsParameters(1.5, 1.0, 1.0, 1.0, 1.0, 0.0), t);
    const stats::SampleMoments ms = stats::summarize(batch::sample_cts_serial(sym, 23, 100000));
    CHECK(std::abs(stats::mean_z_score(ms, 0.0)) <= kZ);
    CHECK(std::abs(stats::third_moment_z_score(ms)) <= kZ);

    // The two sides use fixed lanes of the parent stream.
    const RandomStream parent(19, 7);
    CtsStreams st(parent);
    CHECK(st.plus.lane_id() == 1);
    CHECK(st.minus.lane_id() == 2);
}

TEST_CASE("equal seeds reproduce") {
    const TsSampler s(TsParameters(1.1, 2.0), TuningParameters(0.4));
    const std::vector<double> a = draw(s, 99, 1000);
    const std::vector<double> b = draw(s, 99, 1000);
    CHECK(a == b);
    CHECK(a != draw(s, 100, 1000));
}
