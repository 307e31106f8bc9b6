// Copyright (c) 2026 The powlab developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <powlab/da.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace powlab {

std::vector<double> solve_times(std::span<const ChainHeader> headers) {
    std::vector<double> out;
    if (headers.size() < 2) return out;
    out.reserve(headers.size() - 1);
    for (std::size_t i = 1; i < headers.size(); ++i)
        out.push_back(headers[i].timestamp - headers[i - 1].timestamp);
    return out;
}

std::string to_string(TimestampSource source) {
    switch (source) {
    case TimestampSource::real_time: return "real-time";
    case TimestampSource::last_block: return "last-block";
    case TimestampSource::median_time_past: return "median-time-past";
    }
    throw std::domain_error("unknown timestamp source");
}

TimestampSource timestamp_source_from_string(const std::string& name) {
    if (name == "real-time") return TimestampSource::real_time;
    if (name == "last-block") return TimestampSource::last_block;
    if (name == "median-time-past") return TimestampSource::median_time_past;
    throw std::domain_error("unknown timestamp source '" + name + "'");
}

void DifficultyParams::validate() const {
    if (!(ideal_block_time > 0.0)) throw std::domain_error("ideal block time T must be positive");
    if (!(smoothing > 0.0)) throw std::domain_error("smoothing S must be positive");
    if (window < 1) throw std::domain_error("window N must be at least 1");
    if (!(retarget_min > 0.0 && retarget_min < 1.0 && retarget_max > 1.0))
        throw std::domain_error("retarget clamp must satisfy 0 < min < 1 < max");
    if (!(elapsed_min > 0.0 && elapsed_min < elapsed_max))
        throw std::domain_error("elapsed clamp must satisfy 0 < min < max");
    if (!(eda_span_threshold > 0.0)) throw std::domain_error("eda_span_threshold must be positive");
    if (!(eda_drop > 0.0 && eda_drop < 1.0)) throw std::domain_error("eda_drop must lie in (0, 1)");
    if (eda_window < 2) throw std::domain_error("eda_window must be at least 2");
    if (mtp_window < 1 || mtp_window % 2 == 0)
        throw std::domain_error("mtp_window must be a positive odd count");
}

} // namespace powlab

namespace powlab::da {

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
    case Algorithm::btc2016: return "btc2016";
    case Algorithm::cw144: return "cw144";
    case Algorithm::eda_composite: return "eda-composite";
    case Algorithm::nefda: return "nefda";
    }
    throw std::domain_error("unknown difficulty algorithm");
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "btc2016") return Algorithm::btc2016;
    if (name == "cw144") return Algorithm::cw144;
    if (name == "eda-composite" || name == "eda") return Algorithm::eda_composite;
    if (name == "nefda") return Algorithm::nefda;
    throw std::domain_error("unknown difficulty algorithm '" + name + "'");
}

double guarded_exp(double x) {
    if (!(std::abs(x) <= 700.0))
        throw std::domain_error("exponential argument out of range (|x| > 700)");
    return std::exp(x);
}

double btc_retarget(double prev_difficulty, const DifficultyParams& params,
                    double actual_elapsed) {
    if (!(prev_difficulty > 0.0))
        throw std::domain_error("btc_retarget: difficulty must be positive");
    if (!(actual_elapsed > 0.0))
        throw std::domain_error("btc_retarget: elapsed time must be positive");
    const double ratio =
        static_cast<double>(params.window) * params.ideal_block_time / actual_elapsed;
    return prev_difficulty * std::clamp(ratio, params.retarget_min, params.retarget_max);
}

RetargetWindow collect_window(std::span<const ChainHeader> window,
                              const DifficultyParams& params) {
    if (window.size() < 2)
        throw std::domain_error("retarget window needs at least 2 headers");
    double chain_work = 0.0;
    for (std::size_t i = 1; i < window.size(); ++i) {
        if (window[i].height != window[i - 1].height + 1)
            throw std::domain_error("retarget window must be height-contiguous");
        chain_work += window[i].difficulty;
    }
    const double elapsed =
        std::clamp(window.back().timestamp - window.front().timestamp,
                   params.elapsed_min, params.elapsed_max);
    return RetargetWindow{chain_work, elapsed, window.front().height,
                          window.back().height};
}

double cw144_difficulty(std::span<const ChainHeader> window,
                        const DifficultyParams& params) {
    const RetargetWindow w = collect_window(window, params);
    return w.chain_work / w.elapsed * params.ideal_block_time;
}

double eda_adjust(std::span<const ChainHeader> recent, double current_difficulty,
                  const DifficultyParams& params) {
    if (!(current_difficulty > 0.0))
        throw std::domain_error("eda_adjust: difficulty must be positive");
    const auto needed = static_cast<std::size_t>(params.eda_window);
    if (recent.size() < needed)
        throw std::domain_error("eda_adjust: need at least eda_window recent headers");
    const double span = recent.back().timestamp -
                        recent[recent.size() - needed].timestamp;
    if (span > params.eda_span_threshold)
        return (1.0 - params.eda_drop) * current_difficulty;
    return current_difficulty;
}

double nefda_relative(double prev_difficulty, double solve_time,
                      const DifficultyParams& params) {
    if (!(prev_difficulty > 0.0))
        throw std::domain_error("nefda_relative: difficulty must be positive");
    return prev_difficulty *
           guarded_exp((params.ideal_block_time - solve_time) / params.smoothing);
}

NefdaState nefda_anchor(const ChainHeader& anchor, const DifficultyParams& params) {
    if (!(anchor.difficulty > 0.0))
        throw std::domain_error("nefda_anchor: difficulty must be positive");
    return NefdaState{anchor.difficulty, anchor.timestamp, anchor.height,
                      std::exp(params.ideal_block_time / params.smoothing)};
}

double nefda_absolute(const NefdaState& state, std::int64_t n, double t,
                      const DifficultyParams& params) {
    const double exponent = static_cast<double>(n) * std::log(state.correction) +
                            (state.anchor_time - t) / params.smoothing;
    return state.anchor_difficulty * guarded_exp(exponent);
}

double nefda_target_at(const NefdaState& state, std::int64_t next_height,
                       double t, const DifficultyParams& params) {
    return nefda_absolute(state, next_height - state.anchor_height, t, params);
}

double nefda_mtp_timestamp(std::span<const ChainHeader> recent, int k) {
    if (recent.empty())
        throw std::domain_error("nefda_mtp_timestamp: no headers");
    if (k < 1)
        throw std::domain_error("nefda_mtp_timestamp: window must be positive");
    const std::size_t use = std::min<std::size_t>(static_cast<std::size_t>(k),
                                                  recent.size());
    std::vector<double> times;
    times.reserve(use);
    for (std::size_t i = recent.size() - use; i < recent.size(); ++i)
        times.push_back(recent[i].timestamp);
    std::sort(times.begin(), times.end());
    return times[use / 2];
}

double smoothing_from_window(int window, double ideal_block_time) {
    if (window < 1)
        throw std::domain_error("smoothing_from_window: window must be at least 1");
    return (static_cast<double>(window) + 1.0) / 2.0 * ideal_block_time;
}

DifficultyEngine::DifficultyEngine(Algorithm algorithm, DifficultyParams params,
                                   const ChainHeader& anchor)
    : algorithm_(algorithm),
      params_(std::move(params)),
      nefda_(nefda_anchor(anchor, params_)),
      current_(anchor.difficulty),
      next_height_(anchor.height + 1) {
    params_.validate();
    tail_cap_ = std::max({static_cast<std::size_t>(params_.window) + 1,
                          static_cast<std::size_t>(params_.eda_window),
                          static_cast<std::size_t>(params_.mtp_window)}) + 1;
    tail_.reserve(2 * tail_cap_ + 1);
    tail_.push_back(anchor);
}

bool DifficultyEngine::real_time() const {
    return algorithm_ == Algorithm::nefda &&
           params_.timestamp_source != TimestampSource::median_time_past;
}

double DifficultyEngine::required(double eval_time) const {
    if (real_time())
        return nefda_target_at(nefda_, next_height_, eval_time, params_);
    return current_;
}

std::span<const ChainHeader> DifficultyEngine::last(std::size_t count) const {
    return std::span<const ChainHeader>(tail_).last(count);
}

void DifficultyEngine::append(const ChainHeader& accepted) {
    if (accepted.height != next_height_)
        throw std::domain_error("chain heights must be contiguous");
    tail_.push_back(accepted);
    if (tail_.size() > 2 * tail_cap_)
        tail_.erase(tail_.begin(),
                    tail_.begin() + static_cast<std::ptrdiff_t>(tail_.size() - tail_cap_));
    ++next_height_;
    switch (algorithm_) {
    case Algorithm::btc2016:
        update_btc_retarget();
        break;
    case Algorithm::eda_composite:
        update_btc_retarget();
        update_eda();
        break;
    case Algorithm::cw144:
        update_cw144();
        break;
    case Algorithm::nefda:
        if (params_.timestamp_source == TimestampSource::median_time_past)
            update_nefda_mtp();
        break;
    }
}

void DifficultyEngine::update_btc_retarget() {
    const auto n = static_cast<std::size_t>(params_.window);
    // Until N headers exist the anchor difficulty holds. The elapsed time
    // spans the last N headers (N-1 solve times), the same convention the
    // original retarget uses; the resulting N/(N-1) equilibrium offset is a
    // fraction of a percent for N = 2016.
    if (next_height_ % params_.window != 0 || tail_.size() < n) return;
    const auto window = last(n);
    current_ = btc_retarget(current_, params_,
                            window.back().timestamp - window.front().timestamp);
}

void DifficultyEngine::update_eda() {
    const auto needed = static_cast<std::size_t>(params_.eda_window);
    if (tail_.size() < needed) return;
    current_ = eda_adjust(last(needed), current_, params_);
}

void DifficultyEngine::update_cw144() {
    const auto needed = static_cast<std::size_t>(params_.window) + 1;
    if (tail_.size() < needed) return;
    current_ = cw144_difficulty(last(needed), params_);
}

void DifficultyEngine::update_nefda_mtp() {
    const auto use = std::min<std::size_t>(
        static_cast<std::size_t>(params_.mtp_window), tail_.size());
    const double median = nefda_mtp_timestamp(last(use), params_.mtp_window);
    // The median of `use` timestamps lags (use+1)/2 blocks behind the next
    // height; pair it with the matching height offset so a steady chain
    // reproduces its own difficulty.
    const std::int64_t shift = (static_cast<std::int64_t>(use) + 1) / 2;
    const std::int64_t offset = next_height_ - nefda_.anchor_height - shift;
    current_ = nefda_absolute(nefda_, offset, median, params_);
}

} // namespace powlab::da
