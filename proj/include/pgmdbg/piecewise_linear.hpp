// Copyright 2026 The pgmdbg Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pgmdbg/errors.hpp"

namespace pgmdbg {

/// One linear model over a run of sorted keys. The rank of a key is
/// approximated by slope * (key - first_key) + intercept; intercept is the
/// exact rank of first_key in the indexed array, so predictions are anchored
/// at the segment's first point.
struct Segment {
    uint64_t first_key;
    double slope;
    double intercept;

    double raw_predict(uint64_t key) const noexcept {
        double dx = key >= first_key ? double(key - first_key) : -double(first_key - key);
        return slope * dx + intercept;
    }

    /// Rounded prediction clamped into [0, n - 1].
    uint64_t predict(uint64_t key, uint64_t n) const noexcept {
        double raw = raw_predict(key);
        if (!(raw > 0.0)) return 0;
        if (raw >= double(n - 1)) return n - 1;
        return uint64_t(std::llround(raw));
    }

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Single-pass bounded-error piecewise-linear fit of the rank function.
///
/// A segment grows while the interval of slopes keeping every seen rank
/// within +/-(epsilon - 0.5) of the line anchored at the segment's first
/// point stays non-empty; when a point empties the interval the segment is
/// emitted and a new one starts there. The half-unit reserve is what lets
/// the epsilon bound survive round-to-nearest prediction. Slopes are kept
/// non-negative (always feasible for strictly increasing keys) so that
/// predictions are monotone in the query.
class PlaBuilder {
  public:
    explicit PlaBuilder(uint32_t epsilon) {
        if (epsilon < 1) throw InvalidConfig("epsilon must be >= 1");
        corridor_ = double(epsilon) - 0.5;
    }

    /// Feeds the next (key, rank) point; keys must be strictly increasing.
    void add(uint64_t key, uint64_t rank) {
        if (any_ && key <= last_key_)
            throw UnsortedInput("keys must be strictly increasing");
        if (!open_) {
            anchor_key_ = key;
            anchor_rank_ = rank;
            slope_lo_ = -kInf;
            slope_hi_ = kInf;
            open_ = true;
        } else {
            double dx = double(key - anchor_key_);
            double dy = double(rank - anchor_rank_);
            double lo = std::max(slope_lo_, (dy - corridor_) / dx);
            double hi = std::min(slope_hi_, (dy + corridor_) / dx);
            if (lo > hi) {
                close();
                anchor_key_ = key;
                anchor_rank_ = rank;
                slope_lo_ = -kInf;
                slope_hi_ = kInf;
                open_ = true;
            } else {
                slope_lo_ = lo;
                slope_hi_ = hi;
            }
        }
        last_key_ = key;
        any_ = true;
    }

    /// Closed segments so far; the currently growing one is not included.
    size_t emitted() const noexcept { return segments_.size(); }

    /// Flushes the open segment and hands over the whole fit. The builder
    /// is reusable afterwards.
    std::vector<Segment> take() {
        if (open_) close();
        any_ = false;
        return std::exchange(segments_, {});
    }

  private:
    static constexpr double kInf = std::numeric_limits<double>::infinity();

    void close() {
        double slope = 0.0;
        if (std::isfinite(slope_lo_)) {  // at least two points constrained
            slope = 0.5 * (slope_lo_ + slope_hi_);
            if (slope < 0.0) slope = 0.5 * (std::max(slope_lo_, 0.0) + slope_hi_);
        }
        segments_.push_back(Segment{anchor_key_, slope, double(anchor_rank_)});
        open_ = false;
    }

    double corridor_ = 0.0;
    std::vector<Segment> segments_;
    bool open_ = false;
    bool any_ = false;
    uint64_t anchor_key_ = 0;
    uint64_t anchor_rank_ = 0;
    uint64_t last_key_ = 0;
    double slope_lo_ = -kInf;
    double slope_hi_ = kInf;
};

/// One-shot fit of a whole sorted key array (strictly increasing).
template <typename Keys>
std::vector<Segment> build_pla(const Keys& keys, uint32_t epsilon) {
    if (std::size(keys) == 0) throw EmptyInput("cannot fit an empty key array");
    PlaBuilder pla(epsilon);
    uint64_t rank = 0;
    for (uint64_t key : keys) pla.add(key, rank++);
    return pla.take();
}

}  // namespace pgmdbg
