// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <powlab/analysis.hpp>
#include <powlab/rng.hpp>
#include <powlab/sim.hpp>

#include <cmath>
#include <vector>

using namespace powlab;
using namespace powlab::analysis;

namespace {

// Chain with exponential solve times of the given mean: a homogeneous
// Poisson block arrival process.
std::vector<ChainHeader> exponential_chain(std::int64_t blocks, double mean_solve,
                                           std::uint64_t seed,
                                           double difficulty = 1200.0) {
    Rng rng(seed);
    std::vector<ChainHeader> headers;
    headers.reserve(static_cast<std::size_t>(blocks));
    double t = 0.0;
    for (std::int64_t h = 0; h < blocks; ++h) {
        headers.push_back({h, t, difficulty, std::nullopt});
        t += mean_solve * rng.next_exponential();
    }
    return headers;
}

std::vector<ChainHeader> evenly_spaced_chain(std::int64_t blocks, double spacing,
                                             double difficulty) {
    std::vector<ChainHeader> headers;
    for (std::int64_t h = 0; h < blocks; ++h)
        headers.push_back({h, static_cast<double>(h) * spacing, difficulty,
                           std::nullopt});
    return headers;
}

sim::SimConfig small_scenario(da::Algorithm algorithm, std::int64_t blocks) {
    sim::SimConfig config;
    config.algorithm = algorithm;
    config.population = miners::MinerPopulation{1.0, 4.0, 4.0, 0.05, 40.0};
    config.initial_difficulty = sim::equilibrium_difficulty(config.population,
                                                            config.params);
    config.n_blocks = blocks;
    config.seed = 1;
    return config;
}

double series_variance(const ThroughputSeries& series) {
    double mean = 0.0;
    for (auto c : series.counts) mean += static_cast<double>(c);
    mean /= static_cast<double>(series.counts.size());
    double var = 0.0;
    for (auto c : series.counts) {
        const double d = static_cast<double>(c) - mean;
        var += d * d;
    }
    return var / static_cast<double>(series.counts.size());
}

} // namespace

TEST_CASE("bucket_blocks counts per hour from the first timestamp") {
    const auto six = evenly_spaced_chain(6, 600.0, 100.0);
    const auto series = bucket_blocks(six, 3600);
    REQUIRE(series.counts.size() == 1);
    CHECK(series.counts[0] == 6);

    std::vector<ChainHeader> sparse{{0, 100.0, 1.0, std::nullopt},
                                    {1, 7300.0, 1.0, std::nullopt}};
    const auto gaps = bucket_blocks(sparse, 3600);
    REQUIRE(gaps.counts.size() == 3);
    CHECK(gaps.counts == std::vector<std::int64_t>{1, 0, 1});
    CHECK(gaps.origin_time == 100.0);

    CHECK_THROWS_AS(bucket_blocks({}, 3600), std::domain_error);
    CHECK_THROWS_AS(bucket_blocks(six, 0), std::domain_error);
}

TEST_CASE("hourly counts under cw144 swing harder than under nefda") {
    const auto cw = sim::run_simulation(small_scenario(da::Algorithm::cw144, 20000));
    const auto nf = sim::run_simulation(small_scenario(da::Algorithm::nefda, 20000));
    const double var_cw = series_variance(bucket_blocks(cw.headers, 3600));
    const double var_nf = series_variance(bucket_blocks(nf.headers, 3600));
    CHECK(var_cw > var_nf);
}

TEST_CASE("classify_periods partitions with the documented thresholds") {
    ThroughputSeries series{3600, 0.0, {0, 1, 5, 12, 30}};
    const auto cls = classify_periods(series);
    REQUIRE(cls.classes.size() == 5);
    CHECK(cls.classes[0] == PeriodClass::desert);
    CHECK(cls.classes[1] == PeriodClass::desert);
    CHECK(cls.classes[2] == PeriodClass::normal);
    CHECK(cls.classes[3] == PeriodClass::spike);
    CHECK(cls.classes[4] == PeriodClass::spike);
    CHECK(cls.desert_count + cls.normal_count + cls.spike_count == 5);
    CHECK(cls.desert_frequency + cls.normal_frequency + cls.spike_frequency ==
          doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("homogeneous Poisson arrivals reproduce the expected class rates") {
    // 150000 blocks at 600 s is about 25000 hours
    const auto chain = exponential_chain(150000, 600.0, 31);
    const auto cls = classify_periods(bucket_blocks(chain, 3600));
    CHECK(std::abs(cls.desert_frequency - 0.0174) < 0.003);
    CHECK(std::abs(cls.spike_frequency - 0.0201) < 0.003);
    CHECK(std::abs(cls.normal_frequency - 0.9625) < 0.005);
}

TEST_CASE("poisson probabilities match the published constants") {
    // P(K <= 1) and P(K >= 12) at lambda = 6 blocks per hour
    CHECK(poisson_cdf(1, 6.0) == doctest::Approx(0.0174).epsilon(3e-3));
    CHECK(1.0 - poisson_cdf(11, 6.0) == doctest::Approx(0.0201).epsilon(1e-3));
    CHECK(poisson_pmf(0, 6.0) == doctest::Approx(std::exp(-6.0)).epsilon(1e-15));
}

TEST_CASE("poisson recurrence is stable against log-gamma evaluation") {
    double total = 0.0;
    for (int k = 0; k <= 200; ++k) {
        const double pmf = poisson_pmf(k, 6.0);
        const double direct = std::exp(-6.0 + k * std::log(6.0) - std::lgamma(k + 1.0));
        CHECK(pmf == doctest::Approx(direct).epsilon(1e-12));
        total += pmf;
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    double prev = 0.0;
    for (int k = 0; k <= 60; ++k) {
        const double cdf = poisson_cdf(k, 6.0);
        CHECK(cdf >= prev);
        prev = cdf;
    }
    CHECK(poisson_cdf(200, 6.0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(poisson_pmf(-1, 6.0), std::domain_error);
    CHECK_THROWS_AS(poisson_cdf(3, 0.0), std::domain_error);
}

TEST_CASE("acf of white noise stays inside the confidence band") {
    const auto chain = exponential_chain(24000, 600.0, 8);
    const auto series = bucket_blocks(chain, 3600);
    const auto a = acf(series, 50);
    REQUIRE(a.coefficients.size() == 51);
    CHECK(a.coefficients[0] == 1.0);
    int outside = 0;
    for (int lag = 1; lag <= 50; ++lag)
        if (std::abs(a.coefficients[static_cast<std::size_t>(lag)]) > a.confidence_band)
            ++outside;
    // 5% false-positive rate over 50 lags
    CHECK(outside <= 8);
}

TEST_CASE("acf of a periodic series peaks at the period") {
    // 100 repetitions of a 24-bucket pattern
    const int period = 24;
    const int repeats = 100;
    ThroughputSeries series{3600, 0.0, {}};
    for (int i = 0; i < period * repeats; ++i) {
        const double phase = 2.0 * 3.14159265358979323846 * (i % period) / period;
        series.counts.push_back(std::lround(6.0 + 5.0 * std::cos(phase)));
    }
    const auto a = acf(series, 48);
    // exact for any integer-period series under the biased estimator
    CHECK(a.coefficients[24] ==
          doctest::Approx((repeats - 1.0) / repeats).epsilon(1e-12));
    int argmin = 1;
    for (int lag = 2; lag <= 48; ++lag)
        if (a.coefficients[static_cast<std::size_t>(lag)] <
            a.coefficients[static_cast<std::size_t>(argmin)])
            argmin = lag;
    CHECK(argmin == 12);  // anti-phase half a period away
}

TEST_CASE("acf is invariant under series reversal") {
    const auto chain = exponential_chain(6000, 600.0, 12);
    auto series = bucket_blocks(chain, 3600);
    const auto forward = acf(series, 30);
    std::reverse(series.counts.begin(), series.counts.end());
    const auto backward = acf(series, 30);
    for (std::size_t lag = 0; lag <= 30; ++lag)
        CHECK(forward.coefficients[lag] ==
              doctest::Approx(backward.coefficients[lag]).epsilon(1e-12));
}

TEST_CASE("acf rejects degenerate input") {
    ThroughputSeries flat{3600, 0.0, {5, 5, 5, 5, 5}};
    CHECK_THROWS_AS(acf(flat, 2), std::domain_error);
    ThroughputSeries tiny{3600, 0.0, {1, 2}};
    CHECK_THROWS_AS(acf(tiny, 2), std::domain_error);
}

TEST_CASE("solve time stats summarize consecutive differences") {
    const auto chain = evenly_spaced_chain(3, 600.0, 100.0);
    const auto stats = solve_time_stats(chain);
    CHECK(stats.mean == doctest::Approx(600.0));
    CHECK(stats.median == doctest::Approx(600.0));
    CHECK(stats.count == 2);
    CHECK(stats.excluded == 0);
    CHECK_THROWS_AS(solve_time_stats({chain.data(), 1}), std::domain_error);
}

TEST_CASE("solve time stats on a large exponential chain") {
    const auto chain = exponential_chain(1000000, 600.0, 77);
    const auto stats = solve_time_stats(chain);
    CHECK(std::abs(stats.mean - 600.0) <= 1.8);  // 3 sigma
    CHECK(stats.median == doctest::Approx(600.0 * std::log(2.0)).epsilon(0.01));
    CHECK(stats.p05 < stats.median);
    CHECK(stats.median < stats.p95);
}

TEST_CASE("solve time stats exclude negative intervals but keep the count") {
    std::vector<ChainHeader> chain{{0, 0.0, 1.0, std::nullopt},
                                   {1, 600.0, 1.0, std::nullopt},
                                   {2, 500.0, 1.0, std::nullopt},
                                   {3, 1100.0, 1.0, std::nullopt}};
    const auto stats = solve_time_stats(chain);
    CHECK(stats.excluded == 1);
    CHECK(stats.count == 2);
    CHECK(stats.mean == doctest::Approx(600.0));
}

TEST_CASE("hash-rate estimate is exact on a perfectly spaced chain") {
    const auto chain = evenly_spaced_chain(50, 600.0, 1200.0);
    const auto hr = estimate_hashrate_ma(chain, 6);
    REQUIRE(hr.points.size() == 44);
    for (const auto& [t, h] : hr.points)
        CHECK(h == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(hr.skipped == 0);
}

TEST_CASE("hash-rate estimate carries the small-window ratio bias") {
    // ratio of a 6-difficulty sum to a gamma(6) span: mean is (6/5) * H
    const auto chain = exponential_chain(50000, 600.0, 5, 1200.0);
    const auto hr = estimate_hashrate_ma(chain, 6);
    double mean = 0.0;
    for (const auto& [t, h] : hr.points) mean += h;
    mean /= static_cast<double>(hr.points.size());
    CHECK(std::abs(mean / (1.2 * 2.0) - 1.0) < 0.02);
}

TEST_CASE("hash-rate estimate feeds back consistently at the cw window size") {
    sim::SimConfig config = small_scenario(da::Algorithm::cw144, 50000);
    config.population = miners::MinerPopulation{1.0, 0.0, 0.0, 0.05, 40.0};
    config.initial_difficulty = 600.0;
    const auto result = sim::run_simulation(config);
    const auto hr = estimate_hashrate_ma(result.headers, 144);
    double mean_feedback = 0.0;
    for (const auto& [t, h] : hr.points)
        mean_feedback += h * config.params.ideal_block_time;
    mean_feedback /= static_cast<double>(hr.points.size());
    double mean_difficulty = 0.0;
    for (const auto& header : result.headers) mean_difficulty += header.difficulty;
    mean_difficulty /= static_cast<double>(result.headers.size());
    CHECK(std::abs(mean_feedback / mean_difficulty - 1.0) < 0.02);
}

TEST_CASE("hash-rate estimate spans the hopper range in the stress scenario") {
    const auto result = sim::run_simulation(small_scenario(da::Algorithm::cw144, 30000));
    const auto hr = estimate_hashrate_ma(result.headers, 6);
    double lo = 1e18;
    double hi = 0.0;
    for (const auto& [t, h] : hr.points) {
        lo = std::min(lo, h);
        hi = std::max(hi, h);
    }
    // the trace reaches from near the loyal base up to the full population
    CHECK(lo < 2.5);
    CHECK(hi > 6.0);
    CHECK(hi / lo > 4.0);
}

TEST_CASE("hash-rate estimate skips zero-elapsed points") {
    std::vector<ChainHeader> chain;
    for (std::int64_t h = 0; h < 10; ++h)
        chain.push_back({h, h < 5 ? static_cast<double>(h) : 4.0, 100.0, std::nullopt});
    const auto hr = estimate_hashrate_ma(chain, 3);
    CHECK(hr.skipped > 0);
    CHECK_THROWS_AS(estimate_hashrate_ma({chain.data(), 3}, 3), std::domain_error);
}

TEST_CASE("exponentially weighted difficulties follow the filter") {
    std::vector<ChainHeader> chain{{0, 1000.0, 500.0, std::nullopt}};
    auto now = exp_weighted_difficulties(chain, 43200.0, 1000.0);
    CHECK(now.weights[0] == doctest::Approx(500.0).epsilon(1e-15));
    auto halved = exp_weighted_difficulties(chain, 43200.0,
                                            1000.0 + 43200.0 * std::log(2.0));
    CHECK(halved.weights[0] == doctest::Approx(250.0).epsilon(1e-12));
}

TEST_CASE("weighted sum over S matches the direct summation oracle") {
    const double difficulty = 1200.0;
    const double smoothing = 43200.0;
    const auto chain = evenly_spaced_chain(5000, 600.0, difficulty);
    const double t_now = chain.back().timestamp + 600.0;
    const auto filtered = exp_weighted_difficulties(chain, smoothing, t_now);
    double direct = 0.0;
    for (const auto& h : chain)
        direct += h.difficulty * std::exp((h.timestamp - t_now) / smoothing);
    CHECK(filtered.hashrate_estimate ==
          doctest::Approx(direct / smoothing).epsilon(1e-12));
    // geometric closed form: D / (S * (e^{T/S} - 1)), the discrete-sampling
    // estimate the correction constant compensates for
    const double closed = difficulty / (smoothing * (std::exp(600.0 / smoothing) - 1.0));
    CHECK(filtered.hashrate_estimate == doctest::Approx(closed).epsilon(1e-9));
}

TEST_CASE("dari series and ratio behave on constructed inputs") {
    const std::vector<double> rewards{6.25, 6.25, 6.25};
    const std::vector<double> prices{100.0, 100.0, 100.0};
    const std::vector<double> difficulties{1000.0, 1000.0, 1000.0};
    const std::vector<double> times{0.0, 60.0, 120.0};
    const auto a = dari_series(rewards, prices, difficulties, times);
    REQUIRE(a.size() == 3);
    CHECK(a[0].dari == doctest::Approx(0.625));

    const auto same = dari_ratio(a, a, 60.0);
    for (double v : same.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));

    std::vector<double> halved{500.0, 500.0, 500.0};
    const auto b = dari_series(rewards, prices, halved, times);
    const auto ratio = dari_ratio(b, a, 60.0);
    for (double v : ratio.values) CHECK(v == doctest::Approx(2.0).epsilon(1e-15));

    const std::vector<double> late{4000.0, 4060.0, 4120.0};
    const auto c = dari_series(rewards, prices, difficulties, late);
    CHECK_THROWS_AS(dari_ratio(a, c, 60.0), std::domain_error);
    const std::vector<double> bad{1000.0, 0.0, 1.0};
    CHECK_THROWS_AS(dari_series(rewards, prices, bad, times), std::domain_error);
}

TEST_CASE("miner shares partition blocks by bucket class") {
    std::vector<ChainHeader> chain;
    std::int64_t h = 0;
    auto block = [&](double t, const char* who) {
        chain.push_back({h++, t, 100.0, std::string(who)});
    };
    // hour 0: 6 steady blocks (normal)
    for (int i = 0; i < 6; ++i) block(i * 600.0, "steady");
    // hour 1: 2 steady + 12 hopper blocks (spike)
    for (int i = 0; i < 2; ++i) block(3600.0 + i * 100.0, "steady");
    for (int i = 0; i < 12; ++i) block(3900.0 + i * 100.0, "hopper");
    // hour 2: 1 steady block (desert)
    block(2.0 * 3600.0 + 5.0, "steady");

    const auto series = bucket_blocks(chain, 3600);
    const auto cls = classify_periods(series);
    const auto rows = miner_shares(chain, series, cls.classes);
    REQUIRE(rows.size() == 2);
    const auto& hopper = rows[0].miner == "hopper" ? rows[0] : rows[1];
    const auto& steady = rows[0].miner == "steady" ? rows[0] : rows[1];
    CHECK(hopper.desert_pct == 0.0);
    CHECK(hopper.normal_pct == 0.0);
    CHECK(hopper.spike_pct == doctest::Approx(100.0 * 12.0 / 21.0));
    CHECK(steady.total_pct == doctest::Approx(100.0 * 9.0 / 21.0));
    CHECK(hopper.total_pct + steady.total_pct == doctest::Approx(100.0));
}

TEST_CASE("miner shares split an alternating chain evenly") {
    std::vector<ChainHeader> chain;
    for (std::int64_t h = 0; h < 1200; ++h)
        chain.push_back({h, h * 600.0, 100.0,
                         std::string(h % 2 == 0 ? "alice" : "bob")});
    const auto series = bucket_blocks(chain, 3600);
    const auto cls = classify_periods(series);
    const auto rows = miner_shares(chain, series, cls.classes);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].total_pct == doctest::Approx(50.0));
    CHECK(rows[1].total_pct == doctest::Approx(50.0));
}

TEST_CASE("miner shares reject mismatched classifications") {
    const auto chain = evenly_spaced_chain(10, 600.0, 100.0);
    const auto series = bucket_blocks(chain, 3600);
    const std::vector<PeriodClass> wrong(series.counts.size() + 1,
                                         PeriodClass::normal);
    CHECK_THROWS_AS(miner_shares(chain, series, wrong), std::domain_error);
}

TEST_CASE("geometric mean ratio works in log space") {
    const std::vector<double> flat(100, 123.456);
    CHECK(geometric_mean_ratio(flat) == doctest::Approx(1.0).epsilon(1e-15));
    std::vector<double> doubling;
    for (int i = 0; i <= 10; ++i) doubling.push_back(100.0 * std::pow(2.0, i));
    CHECK(geometric_mean_ratio(doubling) == doctest::Approx(2.0).epsilon(1e-12));
    // huge magnitude spreads stay finite thanks to the log-space evaluation
    const std::vector<double> wide{1e-300, 1.0, 1e300};
    CHECK(geometric_mean_ratio(wide) == doctest::Approx(1e300).epsilon(1e-9));
    CHECK_THROWS_AS(geometric_mean_ratio({flat.data(), 1}), std::domain_error);
}
