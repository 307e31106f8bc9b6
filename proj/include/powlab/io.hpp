// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <powlab/chain.hpp>
#include <powlab/sim.hpp>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace powlab::io {

// All writers are deterministic: the same values always produce a
// byte-identical file. Times carry 3 decimals, difficulties and other reals
// up to 12 significant digits, newline is '\n'. A "# powlab-format: 1"
// comment precedes the header row; readers accept files without it.

std::string format_time(double t);    // "%.3f"
std::string format_value(double v);   // "%.12g"

// Header CSV: exact column line "height,time,difficulty,miner_id"; an empty
// miner_id field means no tag. Errors carry the file name and line number.
std::vector<ChainHeader> read_headers(const std::string& path);
void write_headers(std::span<const ChainHeader> headers, const std::string& path);

struct PricePoint {
    double time = 0.0;
    double price = 0.0;
};

// Price CSV with the column line "time,price".
std::vector<PricePoint> read_prices(const std::string& path);

// Generic report CSV: a named series with pre-rendered cells.
void write_series(const std::string& name,
                  const std::vector<std::string>& columns,
                  const std::vector<std::vector<std::string>>& rows,
                  const std::string& path);

// Flat key/value run configuration. Every key is optional in the file;
// unknown keys are rejected. The canonical serialization documents every
// default by writing all keys in a fixed order, so parse -> serialize ->
// parse is the identity.
struct RunConfigFile {
    std::optional<da::Algorithm> algorithm;
    std::optional<double> ideal_block_time;
    std::optional<double> smoothing;
    std::optional<int> window;
    std::optional<double> eda_span_threshold;
    std::optional<double> eda_drop;
    std::optional<TimestampSource> timestamp_source;
    std::optional<int> mtp_window;
    std::optional<double> base_hashrate;
    std::optional<double> greedy_hashrate;
    std::optional<double> variable_hashrate;
    std::optional<double> greedy_threshold;
    std::optional<double> logistic_steepness;
    std::optional<double> initial_difficulty;
    std::optional<std::int64_t> n_blocks;
    std::optional<std::uint64_t> seed;
    std::optional<double> strategy_tick;
};

RunConfigFile parse_config_text(const std::string& text,
                                const std::string& source_name = "config");

// Fill defaults: window falls back to 2016 for the BTC-style retarget
// algorithms and 144 otherwise; D0 falls back to the equilibrium value for
// the resolved population. The result is validated.
sim::SimConfig resolve_config(const RunConfigFile& file);

sim::SimConfig read_config(const std::string& path);
std::string serialize_config(const sim::SimConfig& config);
void write_config(const sim::SimConfig& config, const std::string& path);

} // namespace powlab::io
