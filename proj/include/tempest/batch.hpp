#pragma once

// Batch kernels. Element i of every batch is driven by RandomStream(seed,
// first_stream + i), so the output is a pure function of the seed and index:
// the OpenMP kernels return exactly what their serial references return, for
// any thread count. The *_serial variants are the reference implementations
// kept for testing and benchmarking.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tempest/sampler.hpp"

namespace tempest::batch {

std::vector<double> sample_serial(const TsSampler& sampler, std::uint64_t seed, std::size_t n,
                                  std::uint64_t first_stream = 0);
/// threads <= 0 uses the OpenMP default.
std::vector<double> sample(const TsSampler& sampler, std::uint64_t seed, std::size_t n, int threads = 0,
                           std::uint64_t first_stream = 0);

std::vector<AngleSample> sample_joint_serial(const TsSampler& sampler, std::uint64_t seed, std::size_t n,
                                             std::uint64_t first_stream = 0);
std::vector<AngleSample> sample_joint(const TsSampler& sampler, std::uint64_t seed, std::size_t n,
                                      int threads = 0, std::uint64_t first_stream = 0);

std::vector<double> sample_cts_serial(const CtsSampler& sampler, std::uint64_t seed, std::size_t n,
                                      std::uint64_t first_stream = 0);
std::vector<double> sample_cts(const CtsSampler& sampler, std::uint64_t seed, std::size_t n, int threads = 0,
                               std::uint64_t first_stream = 0);

/// Runs n_proposals independent proposal-plus-test trials (one per stream)
/// and tallies acceptances; the empirical counterpart of 1/K.
RejectionReport count_acceptances_serial(const TsSampler& sampler, std::uint64_t seed, std::uint64_t n_proposals);
RejectionReport count_acceptances(const TsSampler& sampler, std::uint64_t seed, std::uint64_t n_proposals,
                                  int threads = 0);

/// Accepted draws from n_proposals trials, in trial order.
std::vector<AngleSample> accepted_draws(const TsSampler& sampler, std::uint64_t seed, std::uint64_t n_proposals,
                                        int threads = 0);

/// F(x_i) for every x_i; the callable must be thread-safe.
template <class Cdf>
std::vector<double> evaluate(const Cdf& cdf, const std::vector<double>& xs, int threads = 0);

int resolve_threads(int threads);

}  // namespace tempest::batch

#include "tempest/batch_impl.hpp"
