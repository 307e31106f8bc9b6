// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <powlab/sim.hpp>

#include <powlab/rng.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace powlab::sim {

namespace {

// Headers carry millisecond times on disk; quantizing at acceptance keeps
// the emitted chain bit-identical through a CSV round trip.
double quantize_time(double t) { return std::round(t * 1000.0) / 1000.0; }

struct Allocation {
    double base = 0.0;
    double greedy = 0.0;
    double variable = 0.0;
    double total = 0.0;
};

Allocation allocate(double difficulty_now, double initial_difficulty,
                    const miners::MinerPopulation& pop) {
    const auto x = miners::profitability_change(difficulty_now, initial_difficulty);
    Allocation a;
    a.base = pop.base_hashrate;
    a.greedy = miners::greedy_allocation(x, pop);
    a.variable = miners::logistic_allocation(x, pop);
    a.total = a.base + a.greedy + a.variable;
    return a;
}

} // namespace

void SimConfig::validate() const {
    params.validate();
    population.validate();
    if (!(initial_difficulty > 0.0))
        throw std::domain_error("initial difficulty D0 must be positive");
    if (n_blocks < 1) throw std::domain_error("n_blocks must be at least 1");
    if (!(strategy_tick > 0.0)) throw std::domain_error("strategy_tick must be positive");
    if (!(max_solve_time > 0.0)) throw std::domain_error("max_solve_time must be positive");
}

double equilibrium_difficulty(const miners::MinerPopulation& population,
                              const DifficultyParams& params) {
    return miners::total_hashrate(miners::ProfitabilitySignal{0.0}, population) *
           params.ideal_block_time;
}

double sample_solve_time_fixed(double difficulty, double hashrate, double u) {
    if (!(difficulty > 0.0) || !(hashrate > 0.0))
        throw std::domain_error("sample_solve_time_fixed: difficulty and hash rate must be positive");
    if (!(u > 0.0 && u < 1.0))
        throw std::domain_error("sample_solve_time_fixed: u must lie in (0, 1)");
    return -(difficulty / hashrate) * std::log(u);
}

double sample_arrival_rtt(double prev_target, double hashrate, double smoothing,
                          double exp_budget) {
    if (!(prev_target > 0.0) || !(hashrate > 0.0) || !(smoothing > 0.0) ||
        !(exp_budget > 0.0))
        throw std::domain_error("sample_arrival_rtt: inputs must be positive");
    const double scaled = std::log1p(exp_budget * prev_target / (hashrate * smoothing));
    if (!(scaled <= 700.0))
        throw std::domain_error("sample_arrival_rtt: exponential argument out of range");
    return smoothing * scaled;
}

SimResult run_simulation(const SimConfig& config) {
    config.validate();
    Rng rng(config.seed);
    const double smoothing = config.params.smoothing;

    SimResult result;
    result.headers.reserve(static_cast<std::size_t>(config.n_blocks));
    result.difficulty_trace.reserve(static_cast<std::size_t>(config.n_blocks));

    const ChainHeader genesis{0, quantize_time(config.start_time),
                              config.initial_difficulty, std::nullopt};
    result.headers.push_back(genesis);
    result.difficulty_trace.push_back(genesis.difficulty);

    da::DifficultyEngine engine(config.algorithm, config.params, genesis);

    double last_arrival = genesis.timestamp;
    double last_traced = -1.0;
    auto trace_rate = [&](double t, double total) {
        if (total != last_traced) {
            result.hashrate_trace.emplace_back(t, total);
            last_traced = total;
        }
    };
    auto next_tick_after = [&](double t) {
        const double k = std::floor((t - config.start_time) / config.strategy_tick);
        double next = config.start_time + (k + 1.0) * config.strategy_tick;
        if (next <= t)  // guard against floor landing on t itself
            next = config.start_time + (k + 2.0) * config.strategy_tick;
        return next;
    };

    for (std::int64_t height = 1; height < config.n_blocks; ++height) {
        double budget = rng.next_exponential();
        double t_cur = last_arrival;
        Allocation alloc;
        double arrival = 0.0;

        // Walk tick segments until the exponential budget is exhausted. Hash
        // rate is re-evaluated at the top of every segment; the leftover
        // budget carries across segment boundaries (memorylessness).
        for (;;) {
            alloc = allocate(engine.required(t_cur), config.initial_difficulty,
                             config.population);
            trace_rate(t_cur, alloc.total);
            const double t_tick = next_tick_after(t_cur);
            const double segment = t_tick - t_cur;
            if (engine.real_time()) {
                const double target0 = engine.required(t_cur);
                const double capacity = alloc.total * smoothing / target0 *
                                        (da::guarded_exp(segment / smoothing) - 1.0);
                if (budget <= capacity) {
                    arrival = t_cur + sample_arrival_rtt(target0, alloc.total,
                                                         smoothing, budget);
                    break;
                }
                budget -= capacity;
            } else {
                const double fixed = engine.required(t_cur);
                const double capacity = alloc.total * segment / fixed;
                if (budget <= capacity) {
                    arrival = t_cur + budget * fixed / alloc.total;
                    break;
                }
                budget -= capacity;
            }
            t_cur = t_tick;
            if (t_cur - last_arrival > config.max_solve_time)
                throw std::runtime_error(
                    "solve time exceeded the sanity cap of " +
                    std::to_string(config.max_solve_time) +
                    " s at height " + std::to_string(height) +
                    " (runaway difficulty)");
        }

        double t_block = quantize_time(arrival);
        if (t_block <= last_arrival) t_block = quantize_time(last_arrival + 0.001);

        const double accepted = engine.required(t_block);

        // The winning class is drawn in proportion to its hash-rate share in
        // the segment the block landed in.
        const double pick = rng.next_open_unit() * alloc.total;
        const char* winner = pick < alloc.base
                                 ? "base"
                                 : (pick < alloc.base + alloc.greedy ? "greedy"
                                                                     : "variable");

        const ChainHeader header{height, t_block, accepted, std::string(winner)};
        result.headers.push_back(header);
        result.difficulty_trace.push_back(accepted);
        engine.append(header);
        last_arrival = t_block;
    }
    return result;
}

} // namespace powlab::sim
