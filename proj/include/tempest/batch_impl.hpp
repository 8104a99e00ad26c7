#pragma once

#include <cstddef>
#include <vector>

#include "tempest/first_error.hpp"

namespace tempest::batch {

template <class Cdf>
std::vector<double> evaluate(const Cdf& cdf, const std::vector<double>& xs, int threads) {
    std::vector<double> out(xs.size());
    const int nt = resolve_threads(threads);
    FirstError err;
#pragma omp parallel for schedule(dynamic, 64) num_threads(nt)
    for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(xs.size()); ++i) {
        err.capture([&] { out[i] = cdf(xs[i]); });
    }
    err.rethrow();
    return out;
}

}  // namespace tempest::batch
