// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.
//
// powlab CLI: simulate a mining scenario, analyze a chain, replay a
// difficulty algorithm over existing headers, or compare two algorithms
// side by side. Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <powlab/analysis.hpp>
#include <powlab/da.hpp>
#include <powlab/io.hpp>
#include <powlab/rng.hpp>
#include <powlab/sim.hpp>

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace {

using namespace powlab;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ScenarioOptions {
    std::optional<std::string> config_path;
    std::optional<std::string> da_name;
    std::optional<std::int64_t> blocks;
    std::optional<std::uint64_t> seed;
    std::optional<double> ideal_time;
    std::optional<double> smoothing;
    std::optional<int> window;
    std::optional<double> eda_span_threshold;
    std::optional<double> eda_drop;
    std::optional<std::string> timestamp_source;
    std::optional<int> mtp_window;
    std::optional<double> base_hashrate;
    std::optional<double> greedy_mult;
    std::optional<double> variable_mult;
    std::optional<double> greedy_threshold;
    std::optional<double> steepness;
    std::optional<double> d0;
    std::optional<double> tick;
};

void add_da_flags(CLI::App* cmd, ScenarioOptions& o) {
    cmd->add_option("--config", o.config_path, "Run configuration file");
    cmd->add_option("--da", o.da_name, "Difficulty algorithm (default nefda)")
        ->check(CLI::IsMember({"btc2016", "cw144", "eda", "eda-composite", "nefda"}));
    cmd->add_option("--ideal-time", o.ideal_time, "Ideal block time T in seconds (default 600)");
    cmd->add_option("--smoothing", o.smoothing, "Smoothing factor S in seconds (default 43200)");
    cmd->add_option("--window", o.window,
                    "Window N in blocks (default 2016 for btc2016/eda, 144 otherwise)");
    cmd->add_option("--eda-span-threshold", o.eda_span_threshold,
                    "Emergency-drop trigger span in seconds (default 43200)");
    cmd->add_option("--eda-drop", o.eda_drop, "Emergency drop fraction (default 0.2)");
    cmd->add_option("--timestamp-source", o.timestamp_source,
                    "Evaluation time source (default real-time)")
        ->check(CLI::IsMember({"real-time", "last-block", "median-time-past"}));
    cmd->add_option("--mtp-window", o.mtp_window,
                    "Median-time-past window in blocks, odd (default 11)");
}

void add_scenario_flags(CLI::App* cmd, ScenarioOptions& o) {
    add_da_flags(cmd, o);
    cmd->add_option("--blocks", o.blocks, "Blocks to simulate (default 100000)");
    cmd->add_option("--seed", o.seed, "64-bit RNG seed (default 1)");
    cmd->add_option("--base-hashrate", o.base_hashrate, "Loyal hash rate H_B (default 1)");
    cmd->add_option("--greedy-mult", o.greedy_mult,
                    "Greedy hopper hash rate as a multiple of H_B (default 4)");
    cmd->add_option("--variable-mult", o.variable_mult,
                    "Variable hopper hash rate as a multiple of H_B (default 4)");
    cmd->add_option("--greedy-threshold", o.greedy_threshold,
                    "Profitability change at which greedy miners join (default 0.05)");
    cmd->add_option("--steepness", o.steepness,
                    "Logistic allocation steepness (default 40)");
    cmd->add_option("--d0", o.d0,
                    "Initial difficulty D0 (default: equilibrium for the population)");
    cmd->add_option("--tick", o.tick, "Strategy re-evaluation tick in seconds (default 60)");
}

io::RunConfigFile build_run_config(const ScenarioOptions& o) {
    io::RunConfigFile file;
    if (o.config_path) {
        std::ifstream in(*o.config_path, std::ios::binary);
        if (!in) throw std::runtime_error(*o.config_path + ": cannot open for reading");
        std::ostringstream text;
        text << in.rdbuf();
        file = io::parse_config_text(text.str(), *o.config_path);
    }
    if (o.da_name) file.algorithm = da::algorithm_from_string(*o.da_name);
    if (o.ideal_time) file.ideal_block_time = *o.ideal_time;
    if (o.smoothing) file.smoothing = *o.smoothing;
    if (o.window) file.window = *o.window;
    if (o.eda_span_threshold) file.eda_span_threshold = *o.eda_span_threshold;
    if (o.eda_drop) file.eda_drop = *o.eda_drop;
    if (o.timestamp_source)
        file.timestamp_source = timestamp_source_from_string(*o.timestamp_source);
    if (o.mtp_window) file.mtp_window = *o.mtp_window;
    if (o.base_hashrate) file.base_hashrate = *o.base_hashrate;
    const double base = file.base_hashrate.value_or(1.0);
    if (o.greedy_mult) file.greedy_hashrate = *o.greedy_mult * base;
    if (o.variable_mult) file.variable_hashrate = *o.variable_mult * base;
    if (o.greedy_threshold) file.greedy_threshold = *o.greedy_threshold;
    if (o.steepness) file.logistic_steepness = *o.steepness;
    if (o.d0) file.initial_difficulty = *o.d0;
    if (o.blocks) {
        if (*o.blocks < 1) throw UsageError("--blocks must be at least 1");
        file.n_blocks = *o.blocks;
    }
    if (o.seed) file.seed = *o.seed;
    if (o.tick) {
        if (!(*o.tick > 0.0)) throw UsageError("--tick must be positive");
        file.strategy_tick = *o.tick;
    }
    return file;
}

// Flag and config-file mistakes surface as usage errors.
sim::SimConfig resolve_scenario(const ScenarioOptions& o) {
    try {
        return io::resolve_config(build_run_config(o));
    } catch (const std::domain_error& e) {
        throw UsageError(e.what());
    }
}

void write_sidecar(const sim::SimConfig& config, const sim::SimResult& result,
                   const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    out << io::serialize_config(config);
    out << "# rng: " << kRngId << '\n';
    out << "# blocks: " << result.headers.size() << '\n';
    if (result.headers.size() >= 2) {
        const auto stats = analysis::solve_time_stats(result.headers);
        out << "# mean_solve_s: " << io::format_value(stats.mean) << '\n';
        out << "# median_solve_s: " << io::format_value(stats.median) << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error(path + ": write failed");
}

int cmd_simulate(const ScenarioOptions& o, const std::string& out_path) {
    const sim::SimConfig config = resolve_scenario(o);
    const sim::SimResult result = sim::run_simulation(config);
    io::write_headers(result.headers, out_path);
    write_sidecar(config, result, out_path + ".meta");
    std::cout << "simulated " << result.headers.size() << " blocks with "
              << da::to_string(config.algorithm);
    if (result.headers.size() >= 2) {
        const auto stats = analysis::solve_time_stats(result.headers);
        std::cout << "; mean solve time " << io::format_value(stats.mean) << " s";
    }
    std::cout << "; wrote " << out_path << " and " << out_path << ".meta\n";
    return 0;
}

double locf_price(const std::vector<io::PricePoint>& prices, double t) {
    // callers guarantee prices sorted and non-empty; clamp before the start
    auto it = std::upper_bound(prices.begin(), prices.end(), t,
                               [](double v, const io::PricePoint& p) { return v < p.time; });
    if (it != prices.begin()) --it;
    return it->price;
}

int cmd_analyze(const std::string& input, const std::string& report, int bucket,
                int max_lag, int ma_window, double reward, double ideal_time,
                const std::optional<std::string>& prices_path,
                const std::string& out_path) {
    if (bucket < 1) throw UsageError("--bucket must be positive");
    const auto headers = io::read_headers(input);
    if (headers.empty()) throw std::runtime_error(input + ": no header records");

    if (report == "throughput" || report == "acf" || report == "classes") {
        const auto series = analysis::bucket_blocks(headers, bucket);
        if (report == "throughput") {
            std::vector<std::vector<std::string>> rows;
            for (std::size_t i = 0; i < series.counts.size(); ++i)
                rows.push_back({io::format_time(series.origin_time +
                                                static_cast<double>(i) * bucket),
                                std::to_string(series.counts[i])});
            io::write_series("throughput", {"time", "count"}, rows, out_path);
            std::cout << "wrote " << rows.size() << " buckets to " << out_path << '\n';
            return 0;
        }
        if (report == "acf") {
            const auto a = analysis::acf(series, max_lag);
            std::vector<std::vector<std::string>> rows;
            for (std::size_t lag = 0; lag < a.coefficients.size(); ++lag)
                rows.push_back({std::to_string(lag), io::format_value(a.coefficients[lag])});
            io::write_series("acf", {"lag", "acf"}, rows, out_path);
            std::cout << "wrote " << rows.size() << " lags to " << out_path
                      << "; confidence band +/-" << io::format_value(a.confidence_band)
                      << '\n';
            return 0;
        }
        const auto cls = analysis::classify_periods(series);
        std::vector<std::vector<std::string>> rows;
        for (std::size_t i = 0; i < series.counts.size(); ++i)
            rows.push_back({io::format_time(series.origin_time +
                                            static_cast<double>(i) * bucket),
                            std::to_string(series.counts[i]),
                            analysis::to_string(cls.classes[i])});
        io::write_series("classes", {"time", "count", "class"}, rows, out_path);
        const double lambda = static_cast<double>(bucket) / ideal_time;
        const double desert_exp = analysis::poisson_cdf(1, lambda);
        const double spike_exp = 1.0 - analysis::poisson_cdf(11, lambda);
        char line[256];
        std::snprintf(line, sizeof(line),
                      "desert %.2f%% (expected %.2f%%), spike %.2f%% (expected %.2f%%), "
                      "normal %.2f%% (expected %.2f%%) over %zu buckets\n",
                      100.0 * cls.desert_frequency, 100.0 * desert_exp,
                      100.0 * cls.spike_frequency, 100.0 * spike_exp,
                      100.0 * cls.normal_frequency, 100.0 * (1.0 - desert_exp - spike_exp),
                      series.counts.size());
        std::cout << line;
        return 0;
    }
    if (report == "hashrate") {
        const auto hr = analysis::estimate_hashrate_ma(headers, ma_window);
        if (hr.skipped > 0)
            std::cerr << "warning: skipped " << hr.skipped
                      << " points with non-positive elapsed time\n";
        std::vector<std::vector<std::string>> rows;
        for (const auto& [t, h] : hr.points)
            rows.push_back({io::format_time(t), io::format_value(h)});
        io::write_series("hashrate", {"time", "hashrate"}, rows, out_path);
        std::cout << "wrote " << rows.size() << " estimates to " << out_path << '\n';
        return 0;
    }
    if (report == "dari") {
        if (!prices_path) throw UsageError("--prices required for the dari report");
        auto prices = io::read_prices(*prices_path);
        if (prices.empty()) throw std::runtime_error(*prices_path + ": no price records");
        std::stable_sort(prices.begin(), prices.end(),
                         [](const auto& a, const auto& b) { return a.time < b.time; });
        std::vector<double> rewards(headers.size(), reward);
        std::vector<double> sampled, difficulties, times;
        for (const ChainHeader& h : headers) {
            sampled.push_back(locf_price(prices, h.timestamp));
            difficulties.push_back(h.difficulty);
            times.push_back(h.timestamp);
        }
        const auto points = analysis::dari_series(rewards, sampled, difficulties, times);
        std::vector<std::vector<std::string>> rows;
        for (const auto& p : points)
            rows.push_back({io::format_time(p.time), io::format_value(p.dari)});
        io::write_series("dari", {"time", "dari"}, rows, out_path);
        std::cout << "wrote " << rows.size() << " points to " << out_path << '\n';
        return 0;
    }
    if (report == "miners") {
        const bool any_tagged = std::any_of(headers.begin(), headers.end(),
                                            [](const ChainHeader& h) { return bool(h.miner_id); });
        if (!any_tagged)
            throw std::runtime_error(input + ": miner_id column is not populated");
        const auto series = analysis::bucket_blocks(headers, bucket);
        const auto cls = analysis::classify_periods(series);
        const auto rows_data = analysis::miner_shares(headers, series, cls.classes);
        std::vector<std::vector<std::string>> rows;
        for (const auto& r : rows_data)
            rows.push_back({r.miner, io::format_value(r.normal_pct),
                            io::format_value(r.spike_pct), io::format_value(r.desert_pct),
                            io::format_value(r.total_pct)});
        io::write_series("miners", {"miner", "normal_pct", "spike_pct", "desert_pct", "total_pct"},
                         rows, out_path);
        std::cout << "wrote " << rows.size() << " miners to " << out_path << '\n';
        return 0;
    }
    // solvetimes
    const auto stats = analysis::solve_time_stats(headers);
    io::write_series("solvetimes",
                     {"mean", "median", "p05", "p95", "count", "excluded"},
                     {{io::format_value(stats.mean), io::format_value(stats.median),
                       io::format_value(stats.p05), io::format_value(stats.p95),
                       std::to_string(stats.count), std::to_string(stats.excluded)}},
                     out_path);
    std::cout << "mean solve time " << io::format_value(stats.mean) << " s over "
              << stats.count << " intervals; wrote " << out_path << '\n';
    return 0;
}

int cmd_trace(const ScenarioOptions& o, const std::string& input,
              const std::string& out_path) {
    const sim::SimConfig config = resolve_scenario(o);
    const auto headers = io::read_headers(input);
    if (headers.empty()) throw std::runtime_error(input + ": no header records");
    da::DifficultyEngine engine(config.algorithm, config.params, headers.front());
    std::vector<std::vector<std::string>> rows;
    rows.reserve(headers.size());
    rows.push_back({std::to_string(headers.front().height),
                    io::format_value(headers.front().difficulty),
                    io::format_value(headers.front().difficulty), io::format_value(1.0)});
    double worst = 0.0;
    for (std::size_t i = 1; i < headers.size(); ++i) {
        const double recomputed = engine.required(headers[i].timestamp);
        const double ratio = headers[i].difficulty / recomputed;
        worst = std::max(worst, std::abs(ratio - 1.0));
        rows.push_back({std::to_string(headers[i].height),
                        io::format_value(headers[i].difficulty),
                        io::format_value(recomputed), io::format_value(ratio)});
        engine.append(headers[i]);
    }
    io::write_series("trace",
                     {"height", "actual_difficulty", "recomputed_difficulty", "ratio"},
                     rows, out_path);
    std::cout << "traced " << headers.size() << " headers with "
              << da::to_string(config.algorithm) << "; max |ratio - 1| = "
              << io::format_value(worst) << "; wrote " << out_path << '\n';
    return 0;
}

std::vector<std::string> summarize_run(const std::string& label,
                                       const sim::SimConfig& config,
                                       const sim::SimResult& result) {
    const auto stats = analysis::solve_time_stats(result.headers);
    const auto series = analysis::bucket_blocks(result.headers, 3600);
    const auto cls = analysis::classify_periods(series);
    const int max_lag = std::min<int>(50, static_cast<int>(series.counts.size()) - 1);
    const auto a = analysis::acf(series, max_lag);
    auto lag_or_nan = [&](int lag) {
        return lag <= max_lag ? a.coefficients[static_cast<std::size_t>(lag)]
                              : std::nan("");
    };
    double peak = 0.0;
    for (int lag = 2; lag <= max_lag; ++lag)
        if (std::abs(a.coefficients[static_cast<std::size_t>(lag)]) > std::abs(peak))
            peak = a.coefficients[static_cast<std::size_t>(lag)];
    return {label,
            da::to_string(config.algorithm),
            std::to_string(result.headers.size()),
            io::format_value(stats.mean),
            io::format_value(stats.median),
            io::format_value(100.0 * cls.desert_frequency),
            io::format_value(100.0 * cls.spike_frequency),
            io::format_value(lag_or_nan(1)),
            io::format_value(lag_or_nan(24)),
            io::format_value(lag_or_nan(48)),
            io::format_value(peak),
            io::format_value(a.confidence_band)};
}

int cmd_compare(const ScenarioOptions& shared, const std::string& da_a,
                const std::string& da_b, const std::string& prefix) {
    ScenarioOptions oa = shared;
    oa.da_name = da_a;
    ScenarioOptions ob = shared;
    ob.da_name = da_b;
    const sim::SimConfig ca = resolve_scenario(oa);
    const sim::SimConfig cb = resolve_scenario(ob);
    auto fa = std::async(std::launch::async, [&] { return sim::run_simulation(ca); });
    auto fb = std::async(std::launch::async, [&] { return sim::run_simulation(cb); });
    const sim::SimResult ra = fa.get();
    const sim::SimResult rb = fb.get();
    io::write_headers(ra.headers, prefix + "-a.csv");
    write_sidecar(ca, ra, prefix + "-a.csv.meta");
    io::write_headers(rb.headers, prefix + "-b.csv");
    write_sidecar(cb, rb, prefix + "-b.csv.meta");
    const std::vector<std::string> columns = {
        "side", "da", "blocks", "mean_solve", "median_solve", "desert_pct",
        "spike_pct", "acf_lag1", "acf_lag24", "acf_lag48", "max_acf_lag2_50",
        "conf_band"};
    const auto row_a = summarize_run("a", ca, ra);
    const auto row_b = summarize_run("b", cb, rb);
    io::write_series("compare", columns, {row_a, row_b}, prefix + "-summary.csv");
    for (const auto& row : {row_a, row_b})
        std::cout << row[0] << " (" << row[1] << "): mean solve " << row[3]
                  << " s, desert " << row[5] << "%, spike " << row[6]
                  << "%, acf[24] " << row[8] << " (band " << row[11] << ")\n";
    std::cout << "wrote " << prefix << "-a.csv, " << prefix << "-b.csv, " << prefix
              << "-summary.csv\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"powlab: proof-of-work difficulty algorithm laboratory"};
    app.require_subcommand(1);

    ScenarioOptions sim_opts;
    std::string sim_out;
    auto* simulate = app.add_subcommand("simulate", "Run a coin-hopping mining simulation");
    add_scenario_flags(simulate, sim_opts);
    simulate->add_option("--out", sim_out, "Output header CSV path")->required();

    std::string an_input, an_report, an_out;
    std::optional<std::string> an_prices;
    int an_bucket = 3600;
    int an_max_lag = 50;
    int an_ma_window = 6;
    double an_reward = 1.0;
    double an_ideal_time = 600.0;
    auto* analyze = app.add_subcommand("analyze", "Compute statistics over a header file");
    analyze->add_option("--input", an_input, "Header CSV to analyze")->required();
    analyze->add_option("--report", an_report, "Report to produce")
        ->check(CLI::IsMember({"throughput", "acf", "classes", "hashrate", "dari",
                               "miners", "solvetimes"}))
        ->required();
    analyze->add_option("--bucket", an_bucket, "Bucket size in seconds (default 3600)");
    analyze->add_option("--max-lag", an_max_lag, "Largest autocorrelation lag (default 50)");
    analyze->add_option("--ma-window", an_ma_window,
                        "Hash-rate moving-average window in blocks (default 6)");
    analyze->add_option("--reward", an_reward, "Block reward in coin units (default 1)");
    analyze->add_option("--ideal-time", an_ideal_time,
                        "Ideal block time for expected frequencies (default 600)");
    analyze->add_option("--prices", an_prices, "Price CSV (time,price) for the dari report");
    analyze->add_option("--out", an_out, "Output report CSV path")->required();

    ScenarioOptions trace_opts;
    std::string trace_input, trace_out;
    auto* trace = app.add_subcommand("trace", "Replay a difficulty algorithm over headers");
    trace->add_option("--input", trace_input, "Header CSV to replay")->required();
    add_da_flags(trace, trace_opts);
    trace->add_option("--out", trace_out, "Output trace CSV path")->required();
    // --da must be stated explicitly unless a config file provides it
    trace->callback([&] {
        if (!trace_opts.da_name && !trace_opts.config_path)
            throw CLI::RequiredError("--da (or --config)");
    });

    ScenarioOptions cmp_opts;
    std::string cmp_da_a, cmp_da_b, cmp_prefix;
    auto* compare = app.add_subcommand("compare", "Run two algorithms on one scenario");
    compare->add_option("--da-a", cmp_da_a, "First difficulty algorithm")
        ->check(CLI::IsMember({"btc2016", "cw144", "eda", "eda-composite", "nefda"}))
        ->required();
    compare->add_option("--da-b", cmp_da_b, "Second difficulty algorithm")
        ->check(CLI::IsMember({"btc2016", "cw144", "eda", "eda-composite", "nefda"}))
        ->required();
    add_scenario_flags(compare, cmp_opts);
    compare->add_option("--out", cmp_prefix, "Output path prefix")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(sim_opts, sim_out);
        if (analyze->parsed())
            return cmd_analyze(an_input, an_report, an_bucket, an_max_lag, an_ma_window,
                               an_reward, an_ideal_time, an_prices, an_out);
        if (trace->parsed()) return cmd_trace(trace_opts, trace_input, trace_out);
        if (compare->parsed()) return cmd_compare(cmp_opts, cmp_da_a, cmp_da_b, cmp_prefix);
        return 2;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
