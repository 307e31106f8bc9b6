// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <powlab/chain.hpp>
#include <powlab/da.hpp>
#include <powlab/miners.hpp>
#include <powlab/params.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace powlab::sim {

struct SimConfig {
    da::Algorithm algorithm = da::Algorithm::nefda;
    DifficultyParams params;
    miners::MinerPopulation population;
    double initial_difficulty = 0.0;   // D0; resolve via equilibrium_difficulty
    std::int64_t n_blocks = 100000;    // headers emitted, genesis included
    std::uint64_t seed = 1;
    double strategy_tick = 60.0;       // seconds between hash-rate re-evaluations
    double start_time = 0.0;           // t0
    double max_solve_time = 2592000.0; // 30 days; longer means runaway difficulty

    void validate() const;  // throws std::domain_error

    bool operator==(const SimConfig&) const = default;
};

// D0 that puts the scenario in equilibrium at launch: total_hashrate(x=0) * T.
double equilibrium_difficulty(const miners::MinerPopulation& population,
                              const DifficultyParams& params);

struct SimResult {
    std::vector<ChainHeader> headers;  // exactly n_blocks, genesis at height 0
    std::vector<std::pair<double, double>> hashrate_trace;  // (time, H) steps
    std::vector<double> difficulty_trace;  // per-block acceptance difficulty

    bool operator==(const SimResult&) const = default;
};

// Event-driven mining run. Solve times follow a Poisson process whose
// intensity is H(t)/D(t): hash rate is piecewise constant, re-evaluated from
// the profitability signal at every strategy tick and at every block
// arrival, and under real-time targeting the difficulty decays within a
// block. Deterministic for a fixed seed; one mt19937_64 stream consuming two
// draws per block (arrival budget, then winning miner class). Timestamps are
// honest (block time = arrival time) and quantized to the millisecond the
// header files carry, so an emitted chain replays bit-for-bit from disk.
SimResult run_simulation(const SimConfig& config);

// Fixed-difficulty arrival: -(D/H) * ln(u) for a uniform(0,1) draw. The unit
// exponential budget E = -ln(u) is memoryless, so the unconsumed part carries
// across hash-rate segment boundaries.
double sample_solve_time_fixed(double difficulty, double hashrate, double u);

// Real-time-targeting arrival within a segment that starts at target
// D_prev. The target decays as D_prev * e^{-delta/S}, so the intensity is
// lambda(delta) = (H/D_prev) * e^{delta/S} with integrated intensity
// Lambda(delta) = (H*S/D_prev) * (e^{delta/S} - 1); this returns the exact
// inverse delta = S * ln(1 + E*D_prev/(H*S)) for the exponential budget E.
double sample_arrival_rtt(double prev_target, double hashrate, double smoothing,
                          double exp_budget);

} // namespace powlab::sim
