// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <powlab/chain.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace powlab::analysis {

// Blocks per contiguous time bucket. Buckets are aligned to the first
// header's timestamp, not to calendar hours; interior empty buckets are kept.
struct ThroughputSeries {
    int bucket_seconds = 3600;
    double origin_time = 0.0;
    std::vector<std::int64_t> counts;
};

ThroughputSeries bucket_blocks(std::span<const ChainHeader> headers,
                               int bucket_seconds = 3600);

// Hour classification: desert <= 1 block, spike >= 12 blocks, normal
// otherwise. Exactly one class per bucket.
enum class PeriodClass { desert, normal, spike };

std::string to_string(PeriodClass period);

struct Classification {
    std::vector<PeriodClass> classes;
    std::int64_t desert_count = 0;
    std::int64_t normal_count = 0;
    std::int64_t spike_count = 0;
    double desert_frequency = 0.0;
    double normal_frequency = 0.0;
    double spike_frequency = 0.0;
};

Classification classify_periods(const ThroughputSeries& series,
                                std::int64_t desert_max = 1,
                                std::int64_t spike_min = 12);

// Poisson pmf/cdf via the stable multiplicative recurrence (no factorials).
double poisson_pmf(int k, double lambda);
double poisson_cdf(int k, double lambda);

// Biased sample autocorrelation (divide by n, global mean subtraction) of
// the bucket counts; coefficients[0] is exactly 1. confidence_band is the
// white-noise band 1.96/sqrt(n).
struct AcfSeries {
    std::vector<double> coefficients;
    double confidence_band = 0.0;
};

AcfSeries acf(const ThroughputSeries& series, int max_lag);

// Statistics of consecutive solve times. Negative solve times (possible in
// ingested real-chain data) are excluded and counted.
struct SolveTimeStats {
    double mean = 0.0;
    double median = 0.0;
    double p05 = 0.0;
    double p95 = 0.0;
    std::int64_t count = 0;
    std::int64_t excluded = 0;
};

SolveTimeStats solve_time_stats(std::span<const ChainHeader> headers);

// Moving-average hash-rate estimate: at header n, the last `window`
// difficulties divided by the time those blocks took. Points with
// non-positive elapsed time are skipped and counted. Note the ratio is a
// biased estimator: with exponential solve times its mean is
// window/(window-1) times the true rate, noticeable for small windows.
struct HashrateSeries {
    std::vector<std::pair<double, double>> points;  // (time, estimate)
    std::int64_t skipped = 0;
};

HashrateSeries estimate_hashrate_ma(std::span<const ChainHeader> headers,
                                    int window = 6);

// Difficulties filtered with a negative exponential: w_i = D_i *
// e^{(t_i - t_now)/S}. Their sum divided by S is the exponentially smoothed
// hash-rate estimate over the series.
struct ExpWeighted {
    std::vector<double> weights;
    double hashrate_estimate = 0.0;
};

ExpWeighted exp_weighted_difficulties(std::span<const ChainHeader> headers,
                                      double smoothing, double t_now);

// Difficulty-adjusted reward index: reward * price / difficulty.
struct DariPoint {
    double time = 0.0;
    double reward = 0.0;
    double price = 0.0;
    double difficulty = 0.0;
    double dari = 0.0;
};

std::vector<DariPoint> dari_series(std::span<const double> rewards,
                                   std::span<const double> prices,
                                   std::span<const double> difficulties,
                                   std::span<const double> timestamps);

// Ratio of two DARI series aligned to fixed buckets (default one minute)
// with last-observation-carried-forward sampling. Requires overlapping time
// ranges and time-sorted inputs.
struct DariRatioSeries {
    double start_time = 0.0;
    double bucket_seconds = 60.0;
    std::vector<double> values;
};

DariRatioSeries dari_ratio(std::span<const DariPoint> a,
                           std::span<const DariPoint> b,
                           double bucket_seconds = 60.0);

// Share of all blocks a miner found inside normal, spike and desert buckets.
// Percentages are of the full span, so each row's class columns sum to the
// miner's total share. Headers without a tag are grouped as "(untagged)".
struct MinerShareRow {
    std::string miner;
    double normal_pct = 0.0;
    double spike_pct = 0.0;
    double desert_pct = 0.0;
    double total_pct = 0.0;
};

std::vector<MinerShareRow> miner_shares(std::span<const ChainHeader> headers,
                                        const ThroughputSeries& series,
                                        std::span<const PeriodClass> classes);

// (D_n / D_m)^{1/(n-m)} computed in log space: the average per-block rate of
// change in difficulty.
double geometric_mean_ratio(std::span<const double> difficulties);

} // namespace powlab::analysis
