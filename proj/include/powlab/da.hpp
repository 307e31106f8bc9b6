// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <powlab/chain.hpp>
#include <powlab/params.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace powlab::da {

enum class Algorithm { btc2016, cw144, eda_composite, nefda };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

// exp(x) with a hard gate at |x| > 700: an exponent that large means the
// scenario is broken, not that difficulty should saturate. Throws
// std::domain_error.
double guarded_exp(double x);

// BTC retarget: D' = D * clamp(N*T / T_A, 1/4, 4), applied every N = 2016
// blocks; between retarget heights callers reuse the previous difficulty.
double btc_retarget(double prev_difficulty, const DifficultyParams& params,
                    double actual_elapsed);

// Chain work and (clamped) elapsed time over a height-contiguous header
// window. Chain work sums the difficulties of the blocks whose solve times
// span the elapsed interval, i.e. every header after the first.
struct RetargetWindow {
    double chain_work = 0.0;
    double elapsed = 0.0;
    std::int64_t start_height = 0;
    std::int64_t end_height = 0;
};

RetargetWindow collect_window(std::span<const ChainHeader> window,
                              const DifficultyParams& params);

// cw-144: D = CW / T_A * T over the supplied window (N+1 headers give N
// solve-time intervals). T_A is clamped to [elapsed_min, elapsed_max].
double cw144_difficulty(std::span<const ChainHeader> window,
                        const DifficultyParams& params);

// Emergency difficulty adjustment: returns (1 - eda_drop) * current when the
// span of the last eda_window timestamps exceeds eda_span_threshold (strict),
// otherwise current unchanged. The BCH-era composite applies this per block
// on top of btc_retarget at 2016-block boundaries.
double eda_adjust(std::span<const ChainHeader> recent, double current_difficulty,
                  const DifficultyParams& params);

// Negative exponential filter, relative form: D_n = D_{n-1} * e^{(T - st)/S}.
double nefda_relative(double prev_difficulty, double solve_time,
                      const DifficultyParams& params);

// Anchor of the filter's absolute form. The correction constant is e^{T/S};
// substituting another value (e.g. the uncorrected 1 + T/S) reproduces the
// biased filter for experiments.
struct NefdaState {
    double anchor_difficulty = 1.0;  // D0
    double anchor_time = 0.0;        // t0
    std::int64_t anchor_height = 0;
    double correction = 1.0;         // c = e^{T/S}

    bool operator==(const NefdaState&) const = default;
};

NefdaState nefda_anchor(const ChainHeader& anchor, const DifficultyParams& params);

// Absolute form: D = D0 * c^n * e^{(t0 - t)/S}, which for c = e^{T/S} equals
// D0 * e^{(t0 + n*T - t)/S}. n is the height offset above the anchor. Only
// (n, t) matter; the distribution of blocks in between does not.
double nefda_absolute(const NefdaState& state, std::int64_t n, double t,
                      const DifficultyParams& params);

// Real-time target for the block currently being mined at height
// next_height: strictly decreasing and continuous in t.
double nefda_target_at(const NefdaState& state, std::int64_t next_height,
                       double t, const DifficultyParams& params);

// Median of the last k timestamps (all available when fewer than k exist).
// For an even count the upper middle element is returned.
double nefda_mtp_timestamp(std::span<const ChainHeader> recent, int k);

// Smoothing factor that makes the exponential filter track like an N-block
// simple moving average: S = (N+1)/2 * T.
double smoothing_from_window(int window, double ideal_block_time);

// Streams a chain block by block and yields the difficulty the configured
// algorithm demands from the next block. The simulator and the trace replay
// both drive this class, so an emitted chain always replays against itself.
class DifficultyEngine {
public:
    DifficultyEngine(Algorithm algorithm, DifficultyParams params,
                     const ChainHeader& anchor);

    // True when the next block's difficulty keeps moving while it is mined.
    bool real_time() const;

    std::int64_t next_height() const { return next_height_; }

    // Difficulty demanded from the next block. Real-time targeting evaluates
    // at eval_time; fixed algorithms ignore it.
    double required(double eval_time) const;

    // Advance past an accepted block. Heights must be contiguous.
    void append(const ChainHeader& accepted);

private:
    void update_btc_retarget();
    void update_eda();
    void update_cw144();
    void update_nefda_mtp();
    std::span<const ChainHeader> last(std::size_t count) const;

    Algorithm algorithm_;
    DifficultyParams params_;
    NefdaState nefda_;
    double current_;             // next block's difficulty on the fixed paths
    std::int64_t next_height_;
    std::vector<ChainHeader> tail_;  // bounded history, batch-trimmed
    std::size_t tail_cap_;
};

} // namespace powlab::da
