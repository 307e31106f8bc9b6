// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <powlab/miners.hpp>

#include <cmath>
#include <stdexcept>

namespace powlab::miners {

void MinerPopulation::validate() const {
    if (!(base_hashrate > 0.0))
        throw std::domain_error("base hash rate H_B must be positive");
    if (greedy_hashrate < 0.0 || variable_hashrate < 0.0)
        throw std::domain_error("hopper hash rates must be non-negative");
    if (!(logistic_steepness > 0.0))
        throw std::domain_error("logistic steepness must be positive");
}

ProfitabilitySignal profitability_change(double current_difficulty,
                                         double initial_difficulty) {
    if (!(current_difficulty > 0.0) || !(initial_difficulty > 0.0))
        throw std::domain_error("profitability_change: difficulties must be positive");
    return ProfitabilitySignal{initial_difficulty / current_difficulty - 1.0};
}

double greedy_allocation(ProfitabilitySignal signal, const MinerPopulation& pop) {
    return signal.x >= pop.greedy_threshold ? pop.greedy_hashrate : 0.0;
}

double logistic_allocation(ProfitabilitySignal signal, const MinerPopulation& pop) {
    // exp overflow/underflow saturate to the correct limits 0 and H_V.
    return pop.variable_hashrate / (1.0 + std::exp(-pop.logistic_steepness * signal.x));
}

double total_hashrate(ProfitabilitySignal signal, const MinerPopulation& pop) {
    return pop.base_hashrate + greedy_allocation(signal, pop) +
           logistic_allocation(signal, pop);
}

} // namespace powlab::miners
