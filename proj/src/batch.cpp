#include "tempest/batch.hpp"

#include "tempest/first_error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace tempest::batch {

namespace {

template <class Body>
void parallel_for(std::ptrdiff_t n, int threads, Body&& body) {
    FirstError err;
#pragma omp parallel for schedule(static) num_threads(threads)
    for (std::ptrdiff_t i = 0; i < n; ++i) err.capture([&] { body(i); });
    err.rethrow();
}

}  // namespace

int resolve_threads(int threads) {
#ifdef _OPENMP
    return threads > 0 ? threads : omp_get_max_threads();
#else
    (void)threads;
    return 1;
#endif
}

std::vector<double> sample_serial(const TsSampler& sampler, std::uint64_t seed, std::size_t n,
                                  std::uint64_t first_stream) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream s(seed, first_stream + i);
        out[i] = sampler(s);
    }
    return out;
}

std::vector<double> sample(const TsSampler& sampler, std::uint64_t seed, std::size_t n, int threads,
                           std::uint64_t first_stream) {
    std::vector<double> out(n);
    parallel_for(static_cast<std::ptrdiff_t>(n), resolve_threads(threads), [&](std::ptrdiff_t i) {
        RandomStream s(seed, first_stream + static_cast<std::uint64_t>(i));
        out[i] = sampler(s);
    });
    return out;
}

std::vector<AngleSample> sample_joint_serial(const TsSampler& sampler, std::uint64_t seed, std::size_t n,
                                             std::uint64_t first_stream) {
    std::vector<AngleSample> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        RandomStream s(seed, first_stream + i);
        out[i] = sampler.draw_joint(s).sample;
    }
    return out;
}

std::vector<AngleSample> sample_joint(const TsSampler& sampler, std::uint64_t seed, std::size_t n, int threads,
                                      std::uint64_t first_stream) {
    std::vector<AngleSample> out(n);
    parallel_for(static_cast<std::ptrdiff_t>(n), resolve_threads(threads), [&](std::ptrdiff_t i) {
        RandomStream s(seed, first_stream + static_cast<std::uint64_t>(i));
        out[i] = sampler.draw_joint(s).sample;
    });
    return out;
}

std::vector<double> sample_cts_serial(const CtsSampler& sampler, std::uint64_t seed, std::size_t n,
                                      std::uint64_t first_stream) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        CtsStreams streams(RandomStream(seed, first_stream + i));
        out[i] = sampler(streams);
    }
    return out;
}

std::vector<double> sample_cts(const CtsSampler& sampler, std::uint64_t seed, std::size_t n, int threads,
                               std::uint64_t first_stream) {
    std::vector<double> out(n);
    parallel_for(static_cast<std::ptrdiff_t>(n), resolve_threads(threads), [&](std::ptrdiff_t i) {
        CtsStreams streams(RandomStream(seed, first_stream + static_cast<std::uint64_t>(i)));
        out[i] = sampler(streams);
    });
    return out;
}

RejectionReport count_acceptances_serial(const TsSampler& sampler, std::uint64_t seed, std::uint64_t n_proposals) {
    RejectionReport report;
    for (std::uint64_t i = 0; i < n_proposals; ++i) {
        RandomStream s(seed, i);
        sampler.trial(s, report);
    }
    return report;
}

RejectionReport count_acceptances(const TsSampler& sampler, std::uint64_t seed, std::uint64_t n_proposals,
                                  int threads) {
    const int nt = resolve_threads(threads);
    std::vector<RejectionReport> partial(static_cast<std::size_t>(nt));
    FirstError err;
#pragma omp parallel num_threads(nt)
    {
#ifdef _OPENMP
        const int tid = omp_get_thread_num();
#else
        const int tid = 0;
#endif
        RejectionReport local;
#pragma omp for schedule(static)
        for (std::int64_t i = 0; i < static_cast<std::int64_t>(n_proposals); ++i) {
            err.capture([&] {
                RandomStream s(seed, static_cast<std::uint64_t>(i));
                sampler.trial(s, local);
            });
        }
        partial[static_cast<std::size_t>(tid)] = local;
    }
    err.rethrow();
    RejectionReport total;
    for (const auto& p : partial) total += p;
    return total;
}

std::vector<AngleSample> accepted_draws(const TsSampler& sampler, std::uint64_t seed, std::uint64_t n_proposals,
                                        int threads) {
    std::vector<AngleSample> draws(n_proposals);
    std::vector<char> ok(n_proposals, 0);
    parallel_for(static_cast<std::ptrdiff_t>(n_proposals), resolve_threads(threads), [&](std::ptrdiff_t i) {
        RandomStream s(seed, static_cast<std::uint64_t>(i));
        RejectionReport local;
        ok[i] = sampler.trial(s, local, &draws[i]) ? 1 : 0;
    });
    std::vector<AngleSample> out;
    for (std::size_t i = 0; i < draws.size(); ++i) {
        if (ok[i]) out.push_back(draws[i]);
    }
    return out;
}

}  // namespace tempest::batch
