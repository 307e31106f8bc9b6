// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace powlab {

// One mined block as every difficulty algorithm and the analysis toolkit
// sees it. Timestamps are real-valued seconds; difficulty is the expected
// number of hash evaluations per block.
struct ChainHeader {
    std::int64_t height = 0;
    double timestamp = 0.0;
    double difficulty = 1.0;
    std::optional<std::string> miner_id;

    bool operator==(const ChainHeader&) const = default;
};

// Solve times st_i = t_i - t_{i-1} between consecutive headers. Ingested
// real-chain data may contain non-monotonic timestamps, so entries can be
// negative; simulator output never is.
std::vector<double> solve_times(std::span<const ChainHeader> headers);

} // namespace powlab
