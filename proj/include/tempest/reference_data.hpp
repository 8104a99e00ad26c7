#pragma once

// Published reference configurations: the twelve-row simulation table
// (sigma = 1, p1 = p2 = 1/2, N = 1e7 proposals) and the aggregation example.

#include <array>
#include <cstdint>
#include <optional>

namespace tempest::reference {

struct Table1Row {
    double alpha;
    double ell;
    double epsilon;
    double k_printed;        // two decimals
    std::int64_t retained;   // accepted out of kTable1Proposals
};

inline constexpr std::int64_t kTable1Proposals = 10'000'000;

inline constexpr std::array<Table1Row, 12> kTable1 = {{
    {1.0, 1.0, 0.6, 5.23, 1'912'882},
    {1.0, 2.0, 0.5, 4.08, 2'455'458},
    {1.0, 5.0, 0.1, 3.85, 2'600'418},
    {1.1, 1.0, 0.4, 8.13, 1'230'945},
    {1.1, 2.0, 0.4, 8.01, 1'248'302},
    {1.1, 5.0, 0.2, 8.66, 1'155'766},
    {1.5, 1.0, 0.8, 5.21, 1'918'387},
    {1.5, 2.0, 0.6, 3.19, 3'130'498},
    {1.5, 5.0, 0.3, 3.00, 3'326'781},
    {1.9, 1.0, 0.9, 6.02, 1'659'758},
    {1.9, 2.0, 0.8, 2.86, 3'492'037},
    {1.9, 5.0, 0.8, 2.33, 4'294'523},
}};

/// Aggregation example: TS-(1.5, 0.3, 1), eps = 0.95, p1 = 1/2, m = 2.
namespace aggregation {
inline constexpr double kAlpha = 1.5;
inline constexpr double kEll = 0.3;
inline constexpr double kEpsilon = 0.95;
inline constexpr unsigned kM = 2;
inline constexpr double kKDirect = 206.8;        // one decimal
inline constexpr double kKAggregated = 20.33;    // two decimals
inline constexpr double kTwiceKAggregated = 40.67;
inline constexpr std::int64_t kRetainedDirect = 48'551;
inline constexpr std::int64_t kRetainedAggregatedRaw = 491'480;
inline constexpr std::int64_t kRetainedAggregatedFinal = 245'740;
}  // namespace aggregation

/// Epsilon used by the table row matching (alpha, ell) exactly, if any.
inline std::optional<double> table1_epsilon(double alpha, double ell) {
    for (const auto& row : kTable1) {
        if (row.alpha == alpha && row.ell == ell) return row.epsilon;
    }
    return std::nullopt;
}

}  // namespace tempest::reference
