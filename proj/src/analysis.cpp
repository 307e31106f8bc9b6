// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <powlab/analysis.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace powlab::analysis {

namespace {

std::int64_t bucket_index(double t, double origin, int bucket_seconds) {
    return static_cast<std::int64_t>(
        std::floor((t - origin) / static_cast<double>(bucket_seconds)));
}

// Linear interpolation between order statistics of a sorted sample.
double percentile(const std::vector<double>& sorted, double q) {
    if (sorted.size() == 1) return sorted.front();
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

ThroughputSeries bucket_blocks(std::span<const ChainHeader> headers,
                               int bucket_seconds) {
    if (headers.empty())
        throw std::domain_error("bucket_blocks: empty header sequence");
    if (bucket_seconds <= 0)
        throw std::domain_error("bucket_blocks: bucket size must be positive");
    ThroughputSeries series{bucket_seconds, headers.front().timestamp, {}};
    for (const ChainHeader& h : headers) {
        // Out-of-order records before the first header land in bucket 0.
        const std::int64_t idx = std::max<std::int64_t>(
            bucket_index(h.timestamp, series.origin_time, bucket_seconds), 0);
        if (static_cast<std::size_t>(idx) >= series.counts.size())
            series.counts.resize(static_cast<std::size_t>(idx) + 1, 0);
        ++series.counts[static_cast<std::size_t>(idx)];
    }
    return series;
}

std::string to_string(PeriodClass period) {
    switch (period) {
    case PeriodClass::desert: return "desert";
    case PeriodClass::normal: return "normal";
    case PeriodClass::spike: return "spike";
    }
    throw std::domain_error("unknown period class");
}

Classification classify_periods(const ThroughputSeries& series,
                                std::int64_t desert_max, std::int64_t spike_min) {
    if (series.counts.empty())
        throw std::domain_error("classify_periods: empty series");
    if (desert_max >= spike_min)
        throw std::domain_error("classify_periods: thresholds must not overlap");
    Classification out;
    out.classes.reserve(series.counts.size());
    for (std::int64_t count : series.counts) {
        if (count <= desert_max) {
            out.classes.push_back(PeriodClass::desert);
            ++out.desert_count;
        } else if (count >= spike_min) {
            out.classes.push_back(PeriodClass::spike);
            ++out.spike_count;
        } else {
            out.classes.push_back(PeriodClass::normal);
            ++out.normal_count;
        }
    }
    const auto n = static_cast<double>(series.counts.size());
    out.desert_frequency = static_cast<double>(out.desert_count) / n;
    out.normal_frequency = static_cast<double>(out.normal_count) / n;
    out.spike_frequency = static_cast<double>(out.spike_count) / n;
    return out;
}

double poisson_pmf(int k, double lambda) {
    if (k < 0) throw std::domain_error("poisson_pmf: k must be non-negative");
    if (!(lambda > 0.0)) throw std::domain_error("poisson_pmf: lambda must be positive");
    double p = std::exp(-lambda);
    for (int i = 1; i <= k; ++i) p *= lambda / static_cast<double>(i);
    return p;
}

double poisson_cdf(int k, double lambda) {
    if (k < 0) throw std::domain_error("poisson_cdf: k must be non-negative");
    if (!(lambda > 0.0)) throw std::domain_error("poisson_cdf: lambda must be positive");
    double p = std::exp(-lambda);
    double sum = p;
    for (int i = 1; i <= k; ++i) {
        p *= lambda / static_cast<double>(i);
        sum += p;
    }
    return sum;
}

AcfSeries acf(const ThroughputSeries& series, int max_lag) {
    const auto n = series.counts.size();
    if (max_lag < 1 || static_cast<std::size_t>(max_lag) >= n)
        throw std::domain_error("acf: series length must exceed max_lag >= 1");
    double mean = 0.0;
    for (std::int64_t c : series.counts) mean += static_cast<double>(c);
    mean /= static_cast<double>(n);
    std::vector<double> centered(n);
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        centered[i] = static_cast<double>(series.counts[i]) - mean;
        denom += centered[i] * centered[i];
    }
    if (denom == 0.0)
        throw std::domain_error("acf: series has zero variance");
    AcfSeries out;
    out.coefficients.resize(static_cast<std::size_t>(max_lag) + 1);
    out.coefficients[0] = 1.0;
    for (int lag = 1; lag <= max_lag; ++lag) {
        double num = 0.0;
        for (std::size_t i = 0; i + static_cast<std::size_t>(lag) < n; ++i)
            num += centered[i] * centered[i + static_cast<std::size_t>(lag)];
        out.coefficients[static_cast<std::size_t>(lag)] = num / denom;
    }
    out.confidence_band = 1.96 / std::sqrt(static_cast<double>(n));
    return out;
}

SolveTimeStats solve_time_stats(std::span<const ChainHeader> headers) {
    if (headers.size() < 2)
        throw std::domain_error("solve_time_stats: need at least 2 headers");
    std::vector<double> kept;
    kept.reserve(headers.size() - 1);
    std::int64_t excluded = 0;
    for (std::size_t i = 1; i < headers.size(); ++i) {
        const double st = headers[i].timestamp - headers[i - 1].timestamp;
        if (st < 0.0)
            ++excluded;
        else
            kept.push_back(st);
    }
    if (kept.empty())
        throw std::domain_error("solve_time_stats: no non-negative solve times");
    double mean = 0.0;
    for (double st : kept) mean += st;
    mean /= static_cast<double>(kept.size());
    std::sort(kept.begin(), kept.end());
    SolveTimeStats stats;
    stats.mean = mean;
    stats.median = percentile(kept, 0.5);
    stats.p05 = percentile(kept, 0.05);
    stats.p95 = percentile(kept, 0.95);
    stats.count = static_cast<std::int64_t>(kept.size());
    stats.excluded = excluded;
    return stats;
}

HashrateSeries estimate_hashrate_ma(std::span<const ChainHeader> headers,
                                    int window) {
    if (window < 1)
        throw std::domain_error("estimate_hashrate_ma: window must be at least 1");
    const auto w = static_cast<std::size_t>(window);
    if (headers.size() <= w)
        throw std::domain_error("estimate_hashrate_ma: need more headers than the window");
    HashrateSeries out;
    out.points.reserve(headers.size() - w);
    double sum = 0.0;
    for (std::size_t i = 1; i <= w; ++i) sum += headers[i].difficulty;
    for (std::size_t n = w;; ++n) {
        const double elapsed = headers[n].timestamp - headers[n - w].timestamp;
        if (elapsed > 0.0)
            out.points.emplace_back(headers[n].timestamp, sum / elapsed);
        else
            ++out.skipped;
        if (n + 1 >= headers.size()) break;
        sum += headers[n + 1].difficulty - headers[n + 1 - w].difficulty;
    }
    return out;
}

ExpWeighted exp_weighted_difficulties(std::span<const ChainHeader> headers,
                                      double smoothing, double t_now) {
    if (!(smoothing > 0.0))
        throw std::domain_error("exp_weighted_difficulties: smoothing must be positive");
    ExpWeighted out;
    out.weights.reserve(headers.size());
    double sum = 0.0;
    for (const ChainHeader& h : headers) {
        // Underflow to zero is the correct limit for very old blocks.
        const double w = h.difficulty * std::exp((h.timestamp - t_now) / smoothing);
        out.weights.push_back(w);
        sum += w;
    }
    out.hashrate_estimate = sum / smoothing;
    return out;
}

std::vector<DariPoint> dari_series(std::span<const double> rewards,
                                   std::span<const double> prices,
                                   std::span<const double> difficulties,
                                   std::span<const double> timestamps) {
    const std::size_t n = timestamps.size();
    if (n == 0) throw std::domain_error("dari_series: empty input");
    if (rewards.size() != n || prices.size() != n || difficulties.size() != n)
        throw std::domain_error("dari_series: input series must have equal length");
    std::vector<DariPoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(difficulties[i] > 0.0))
            throw std::domain_error("dari_series: difficulty must be positive");
        out.push_back(DariPoint{timestamps[i], rewards[i], prices[i], difficulties[i],
                                rewards[i] * prices[i] / difficulties[i]});
    }
    return out;
}

DariRatioSeries dari_ratio(std::span<const DariPoint> a,
                           std::span<const DariPoint> b, double bucket_seconds) {
    if (a.empty() || b.empty())
        throw std::domain_error("dari_ratio: empty series");
    if (!(bucket_seconds > 0.0))
        throw std::domain_error("dari_ratio: bucket size must be positive");
    const double start = std::max(a.front().time, b.front().time);
    const double end = std::min(a.back().time, b.back().time);
    if (start > end)
        throw std::domain_error("dari_ratio: series do not overlap in time");
    DariRatioSeries out{start, bucket_seconds, {}};
    std::size_t ia = 0;
    std::size_t ib = 0;
    for (double t = start; t <= end; t += bucket_seconds) {
        while (ia + 1 < a.size() && a[ia + 1].time <= t) ++ia;
        while (ib + 1 < b.size() && b[ib + 1].time <= t) ++ib;
        if (!(b[ib].dari > 0.0))
            throw std::domain_error("dari_ratio: non-positive denominator");
        out.values.push_back(a[ia].dari / b[ib].dari);
    }
    return out;
}

std::vector<MinerShareRow> miner_shares(std::span<const ChainHeader> headers,
                                        const ThroughputSeries& series,
                                        std::span<const PeriodClass> classes) {
    if (headers.empty())
        throw std::domain_error("miner_shares: empty header sequence");
    if (classes.size() != series.counts.size())
        throw std::domain_error("miner_shares: classification does not match the series");
    struct Tally {
        std::int64_t normal = 0;
        std::int64_t spike = 0;
        std::int64_t desert = 0;
    };
    std::map<std::string, Tally> tallies;
    for (const ChainHeader& h : headers) {
        const std::int64_t idx = std::max<std::int64_t>(
            bucket_index(h.timestamp, series.origin_time, series.bucket_seconds), 0);
        if (static_cast<std::size_t>(idx) >= classes.size())
            throw std::domain_error("miner_shares: header falls outside the classified span");
        Tally& t = tallies[h.miner_id.value_or("(untagged)")];
        switch (classes[static_cast<std::size_t>(idx)]) {
        case PeriodClass::normal: ++t.normal; break;
        case PeriodClass::spike: ++t.spike; break;
        case PeriodClass::desert: ++t.desert; break;
        }
    }
    const double total = static_cast<double>(headers.size());
    std::vector<MinerShareRow> rows;
    rows.reserve(tallies.size());
    for (const auto& [miner, t] : tallies) {
        MinerShareRow row;
        row.miner = miner;
        row.normal_pct = 100.0 * static_cast<double>(t.normal) / total;
        row.spike_pct = 100.0 * static_cast<double>(t.spike) / total;
        row.desert_pct = 100.0 * static_cast<double>(t.desert) / total;
        row.total_pct = row.normal_pct + row.spike_pct + row.desert_pct;
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
        if (x.total_pct != y.total_pct) return x.total_pct > y.total_pct;
        return x.miner < y.miner;
    });
    return rows;
}

double geometric_mean_ratio(std::span<const double> difficulties) {
    if (difficulties.size() < 2)
        throw std::domain_error("geometric_mean_ratio: need at least 2 difficulties");
    if (!(difficulties.front() > 0.0) || !(difficulties.back() > 0.0))
        throw std::domain_error("geometric_mean_ratio: difficulties must be positive");
    return std::exp((std::log(difficulties.back()) - std::log(difficulties.front())) /
                    static_cast<double>(difficulties.size() - 1));
}

} // namespace powlab::analysis
