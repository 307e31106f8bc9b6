// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#pragma once

#include <string>

namespace powlab {

// Where a difficulty algorithm takes its notion of "now" from when it
// evaluates the next block's difficulty.
//   real_time        - the wall clock while the block is being mined (RTT)
//   last_block       - the accepted block's own timestamp
//   median_time_past - median of the last mtp_window block timestamps
enum class TimestampSource { real_time, last_block, median_time_past };

std::string to_string(TimestampSource source);
TimestampSource timestamp_source_from_string(const std::string& name);

// Every tunable a difficulty algorithm consumes. Clamp bounds and the
// emergency-drop trigger default to the BTC/BCH consensus constants.
struct DifficultyParams {
    double ideal_block_time = 600.0;      // T, seconds
    double smoothing = 43200.0;           // S, seconds (exponential filter)
    int window = 144;                     // N, blocks (cw-144: 144, BTC: 2016)
    double retarget_min = 0.25;           // per-retarget clamp on D'/D
    double retarget_max = 4.0;
    double elapsed_min = 43200.0;         // cw-144 elapsed clamp: half a day
    double elapsed_max = 172800.0;        // ... up to 2 days
    double eda_span_threshold = 43200.0;  // 12 h over eda_window timestamps
    double eda_drop = 0.20;               // emergency difficulty drop fraction
    int eda_window = 6;                   // timestamps in the emergency span check
    TimestampSource timestamp_source = TimestampSource::real_time;
    int mtp_window = 11;                  // k, odd

    // Throws std::domain_error naming the offending field.
    void validate() const;

    bool operator==(const DifficultyParams&) const = default;
};

} // namespace powlab
