// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

namespace powlab::miners {

// Hash-rate supply model: a loyal base, an all-or-nothing greedy hopper and
// a logistic variable hopper. Defaults are the stress scenario with both
// hopper classes at four times the base rate.
struct MinerPopulation {
    double base_hashrate = 1.0;       // H_B, hashes/second
    double greedy_hashrate = 4.0;     // H_G
    double variable_hashrate = 4.0;   // H_V
    double greedy_threshold = 0.05;   // join when profitability is 5% up
    double logistic_steepness = 40.0; // 6 / 0.15

    void validate() const;  // throws std::domain_error

    bool operator==(const MinerPopulation&) const = default;
};

// Change in profitability relative to the scenario's initial value,
// x = p/p0 - 1. Zero at simulation start, always above -1.
struct ProfitabilitySignal {
    double x = 0.0;
};

// Profitability is proportional to 1/difficulty with reward and price held
// constant, so x = D0 / current - 1.
ProfitabilitySignal profitability_change(double current_difficulty,
                                         double initial_difficulty);

// All of H_G when x >= greedy_threshold, nothing otherwise.
double greedy_allocation(ProfitabilitySignal signal, const MinerPopulation& pop);

// H_V / (1 + e^{-steepness * x}).
double logistic_allocation(ProfitabilitySignal signal, const MinerPopulation& pop);

// H_B + greedy + logistic; always within [H_B, H_B + H_G + H_V].
double total_hashrate(ProfitabilitySignal signal, const MinerPopulation& pop);

} // namespace powlab::miners
