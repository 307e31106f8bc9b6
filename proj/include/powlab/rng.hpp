// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace powlab {

// Algorithm identifier recorded in run metadata so results can be tied to
// the exact stream that produced them.
inline constexpr const char* kRngId = "mt19937_64/open53";

// Seeded deterministic 64-bit stream. Raw mt19937_64 output is mapped to
// the open interval (0,1) as ((x >> 11) + 0.5) * 2^-53; distributions from
// <random> are deliberately avoided because their output is not pinned by
// the standard.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform draw, strictly inside (0,1).
    double next_open_unit() {
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1p-53;
    }

    // Unit-mean exponential draw.
    double next_exponential() { return -std::log(next_open_unit()); }

private:
    std::mt19937_64 engine_;
};

} // namespace powlab
