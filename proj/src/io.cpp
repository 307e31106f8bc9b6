// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <powlab/io.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace powlab::io {

namespace {

constexpr const char* kFormatLine = "# powlab-format: 1";
constexpr const char* kHeaderColumns = "height,time,difficulty,miner_id";
constexpr const char* kPriceColumns = "time,price";

[[noreturn]] void fail(const std::string& path, int line, const std::string& what) {
    throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_double(const std::string& field, const std::string& path, int line,
                    const char* what) {
    double value = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        fail(path, line, std::string("malformed ") + what + " '" + field + "'");
    return value;
}

std::int64_t parse_int(const std::string& field, const std::string& path, int line,
                       const char* what) {
    std::int64_t value = 0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        fail(path, line, std::string("malformed ") + what + " '" + field + "'");
    return value;
}

std::ifstream open_for_read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open for reading");
    return in;
}

std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    return out;
}

// Skips comment and blank lines; returns false at end of file.
bool next_content_line(std::ifstream& in, std::string& line, int& lineno) {
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        return true;
    }
    return false;
}

std::string format_shortest(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

} // namespace

std::string format_time(double t) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", t);
    return buf;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::vector<ChainHeader> read_headers(const std::string& path) {
    std::ifstream in = open_for_read(path);
    std::string line;
    int lineno = 0;
    if (!next_content_line(in, line, lineno) || line != kHeaderColumns)
        fail(path, lineno, std::string("expected header line '") + kHeaderColumns + "'");
    std::vector<ChainHeader> headers;
    std::unordered_set<std::int64_t> seen;
    while (next_content_line(in, line, lineno)) {
        const auto fields = split_fields(line);
        if (fields.size() != 4)
            fail(path, lineno, "expected 4 fields, got " + std::to_string(fields.size()));
        ChainHeader h;
        h.height = parse_int(fields[0], path, lineno, "height");
        h.timestamp = parse_double(fields[1], path, lineno, "time");
        h.difficulty = parse_double(fields[2], path, lineno, "difficulty");
        if (!(h.difficulty > 0.0))
            fail(path, lineno, "difficulty must be positive");
        if (!fields[3].empty()) h.miner_id = fields[3];
        if (!seen.insert(h.height).second)
            fail(path, lineno, "duplicate height " + std::to_string(h.height));
        headers.push_back(std::move(h));
    }
    return headers;
}

void write_headers(std::span<const ChainHeader> headers, const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << kFormatLine << '\n' << kHeaderColumns << '\n';
    for (const ChainHeader& h : headers) {
        const std::string& id = h.miner_id ? *h.miner_id : std::string();
        if (id.find_first_of(",\n\r") != std::string::npos)
            throw std::runtime_error(path + ": miner_id '" + id +
                                     "' contains a field separator");
        out << h.height << ',' << format_time(h.timestamp) << ','
            << format_value(h.difficulty) << ',' << id << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error(path + ": write failed");
}

std::vector<PricePoint> read_prices(const std::string& path) {
    std::ifstream in = open_for_read(path);
    std::string line;
    int lineno = 0;
    if (!next_content_line(in, line, lineno) || line != kPriceColumns)
        fail(path, lineno, std::string("expected header line '") + kPriceColumns + "'");
    std::vector<PricePoint> prices;
    while (next_content_line(in, line, lineno)) {
        const auto fields = split_fields(line);
        if (fields.size() != 2)
            fail(path, lineno, "expected 2 fields, got " + std::to_string(fields.size()));
        PricePoint p;
        p.time = parse_double(fields[0], path, lineno, "time");
        p.price = parse_double(fields[1], path, lineno, "price");
        prices.push_back(p);
    }
    return prices;
}

void write_series(const std::string& name, const std::vector<std::string>& columns,
                  const std::vector<std::vector<std::string>>& rows,
                  const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << kFormatLine << '\n' << "# series: " << name << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << (i ? "," : "") << columns[i];
    out << '\n';
    for (const auto& row : rows) {
        if (row.size() != columns.size())
            throw std::runtime_error(path + ": row width does not match columns");
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << row[i];
        out << '\n';
    }
    out.flush();
    if (!out) throw std::runtime_error(path + ": write failed");
}

RunConfigFile parse_config_text(const std::string& text,
                                const std::string& source_name) {
    RunConfigFile file;
    std::map<std::string, std::function<void(const std::string&, int)>> setters;
    std::unordered_set<std::string> assigned;

    const auto set_double = [&source_name](std::optional<double>& slot) {
        return [p = &slot, &source_name](const std::string& value, int line) {
            *p = parse_double(value, source_name, line, "value");
        };
    };
    setters["da"] = [&](const std::string& value, int line) {
        try {
            file.algorithm = da::algorithm_from_string(value);
        } catch (const std::domain_error& e) {
            fail(source_name, line, e.what());
        }
    };
    setters["T"] = set_double(file.ideal_block_time);
    setters["S"] = set_double(file.smoothing);
    setters["N"] = [&](const std::string& value, int line) {
        file.window = static_cast<int>(parse_int(value, source_name, line, "value"));
    };
    setters["eda_span_threshold"] = set_double(file.eda_span_threshold);
    setters["eda_drop"] = set_double(file.eda_drop);
    setters["timestamp_source"] = [&](const std::string& value, int line) {
        try {
            file.timestamp_source = timestamp_source_from_string(value);
        } catch (const std::domain_error& e) {
            fail(source_name, line, e.what());
        }
    };
    setters["mtp_window"] = [&](const std::string& value, int line) {
        file.mtp_window = static_cast<int>(parse_int(value, source_name, line, "value"));
    };
    setters["H_B"] = set_double(file.base_hashrate);
    setters["H_G"] = set_double(file.greedy_hashrate);
    setters["H_V"] = set_double(file.variable_hashrate);
    setters["greedy_threshold"] = set_double(file.greedy_threshold);
    setters["logistic_steepness"] = set_double(file.logistic_steepness);
    setters["D0"] = set_double(file.initial_difficulty);
    setters["n_blocks"] = [&](const std::string& value, int line) {
        file.n_blocks = parse_int(value, source_name, line, "value");
    };
    setters["seed"] = [&](const std::string& value, int line) {
        std::uint64_t seed = 0;
        const char* begin = value.data();
        const char* end = begin + value.size();
        const auto [ptr, ec] = std::from_chars(begin, end, seed);
        if (ec != std::errc{} || ptr != end)
            fail(source_name, line, "malformed seed '" + value + "'");
        file.seed = seed;
    };
    setters["strategy_tick"] = set_double(file.strategy_tick);

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = strip_cr(line);
        if (line.empty() || line.front() == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            fail(source_name, lineno, "expected 'key = value'");
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t");
            const auto e = s.find_last_not_of(" \t");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            fail(source_name, lineno, "unknown key '" + key + "'");
        if (!assigned.insert(key).second)
            fail(source_name, lineno, "duplicate key '" + key + "'");
        it->second(value, lineno);
    }
    return file;
}

sim::SimConfig resolve_config(const RunConfigFile& file) {
    sim::SimConfig config;
    config.algorithm = file.algorithm.value_or(da::Algorithm::nefda);
    DifficultyParams& p = config.params;
    if (file.ideal_block_time) p.ideal_block_time = *file.ideal_block_time;
    if (file.smoothing) p.smoothing = *file.smoothing;
    const bool btc_style = config.algorithm == da::Algorithm::btc2016 ||
                           config.algorithm == da::Algorithm::eda_composite;
    p.window = file.window.value_or(btc_style ? 2016 : 144);
    if (file.eda_span_threshold) p.eda_span_threshold = *file.eda_span_threshold;
    if (file.eda_drop) p.eda_drop = *file.eda_drop;
    if (file.timestamp_source) p.timestamp_source = *file.timestamp_source;
    if (file.mtp_window) p.mtp_window = *file.mtp_window;
    miners::MinerPopulation& pop = config.population;
    if (file.base_hashrate) pop.base_hashrate = *file.base_hashrate;
    if (file.greedy_hashrate) pop.greedy_hashrate = *file.greedy_hashrate;
    if (file.variable_hashrate) pop.variable_hashrate = *file.variable_hashrate;
    if (file.greedy_threshold) pop.greedy_threshold = *file.greedy_threshold;
    if (file.logistic_steepness) pop.logistic_steepness = *file.logistic_steepness;
    if (file.n_blocks) config.n_blocks = *file.n_blocks;
    if (file.seed) config.seed = *file.seed;
    if (file.strategy_tick) config.strategy_tick = *file.strategy_tick;
    config.initial_difficulty =
        file.initial_difficulty.value_or(sim::equilibrium_difficulty(pop, p));
    config.validate();
    return config;
}

sim::SimConfig read_config(const std::string& path) {
    std::ifstream in = open_for_read(path);
    std::ostringstream text;
    text << in.rdbuf();
    return resolve_config(parse_config_text(text.str(), path));
}

std::string serialize_config(const sim::SimConfig& config) {
    std::ostringstream out;
    out << "# powlab-config: 1\n";
    out << "da = " << da::to_string(config.algorithm) << '\n';
    out << "T = " << format_shortest(config.params.ideal_block_time) << '\n';
    out << "S = " << format_shortest(config.params.smoothing) << '\n';
    out << "N = " << config.params.window << '\n';
    out << "eda_span_threshold = " << format_shortest(config.params.eda_span_threshold) << '\n';
    out << "eda_drop = " << format_shortest(config.params.eda_drop) << '\n';
    out << "timestamp_source = " << to_string(config.params.timestamp_source) << '\n';
    out << "mtp_window = " << config.params.mtp_window << '\n';
    out << "H_B = " << format_shortest(config.population.base_hashrate) << '\n';
    out << "H_G = " << format_shortest(config.population.greedy_hashrate) << '\n';
    out << "H_V = " << format_shortest(config.population.variable_hashrate) << '\n';
    out << "greedy_threshold = " << format_shortest(config.population.greedy_threshold) << '\n';
    out << "logistic_steepness = " << format_shortest(config.population.logistic_steepness) << '\n';
    out << "D0 = " << format_shortest(config.initial_difficulty) << '\n';
    out << "n_blocks = " << config.n_blocks << '\n';
    out << "seed = " << config.seed << '\n';
    out << "strategy_tick = " << format_shortest(config.strategy_tick) << '\n';
    return out.str();
}

void write_config(const sim::SimConfig& config, const std::string& path) {
    std::ofstream out = open_for_write(path);
    out << serialize_config(config);
    out.flush();
    if (!out) throw std::runtime_error(path + ": write failed");
}

} // namespace powlab::io
