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

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pgmdbg/errors.hpp"
#include "pgmdbg/piecewise_linear.hpp"

namespace pgmdbg {

/// Static learned index over a sorted array of distinct 64-bit keys.
///
/// Level 0 holds the piecewise-linear fit of the data's rank function; each
/// higher level fits the first_key array of the level below, until a single
/// segment remains. Every level guarantees a rank-prediction error of at
/// most epsilon after rounding, so a point lookup is a descent through the
/// levels followed by a binary search over a window of 2*epsilon + 1 slots.
///
/// The index stores no keys. Queries that need key access (lookup) take the
/// key array, or any random-access view of it, from the caller.
class PgmIndex {
  public:
    /// Inclusive rank window at the data level.
    struct RankRange {
        uint64_t lo;
        uint64_t hi;
    };

    template <typename KeyAt>
    static PgmIndex build(uint64_t n, KeyAt&& key_at, uint32_t epsilon) {
        if (n == 0) throw EmptyInput("cannot index an empty key array");
        PlaBuilder pla(epsilon);
        for (uint64_t i = 0; i < n; ++i) pla.add(key_at(i), i);
        return from_data_segments(pla.take(), n, epsilon);
    }

    static PgmIndex build(std::span<const uint64_t> keys, uint32_t epsilon) {
        return build(keys.size(), [keys](uint64_t i) { return keys[i]; }, epsilon);
    }

    /// Assembles an index from a data-level fit that was produced while the
    /// keys streamed by (see LeveledSet::from_sorted_stream); only the upper
    /// levels are built here.
    static PgmIndex from_data_segments(std::vector<Segment> data_segments, uint64_t n,
                                       uint32_t epsilon) {
        if (data_segments.empty()) throw EmptyInput("no segments for an empty key array");
        PgmIndex index;
        index.epsilon_ = epsilon;
        index.n_ = n;
        index.levels_.push_back(std::move(data_segments));
        while (index.levels_.back().size() > 1) {
            const auto& below = index.levels_.back();
            PlaBuilder pla(epsilon);
            for (uint64_t j = 0; j < below.size(); ++j) pla.add(below[j].first_key, j);
            index.levels_.push_back(pla.take());
        }
        return index;
    }

    /// Rank window certain to contain the rank of q if q is indexed:
    /// [max(0, predict(q) - eps), min(n - 1, predict(q) + eps)].
    RankRange approx_rank(uint64_t q) const {
        size_t lvl = levels_.size() - 1;
        size_t j = 0;
        while (lvl > 0) {
            const auto& child = levels_[lvl - 1];
            uint64_t pos = clamped_predict(lvl, j, q, child.size());
            // The child covering q sits within eps + 1 of the prediction.
            uint64_t w = uint64_t(epsilon_) + 1;
            uint64_t lo = pos > w ? pos - w : 0;
            uint64_t hi = std::min<uint64_t>(child.size() - 1, pos + w);
            auto first = child.begin() + ptrdiff_t(lo);
            auto last = child.begin() + ptrdiff_t(hi) + 1;
            auto it = std::upper_bound(first, last, q,
                                       [](uint64_t key, const Segment& s) { return key < s.first_key; });
            j = it == first ? (lo > 0 ? lo - 1 : 0) : size_t(it - child.begin()) - 1;
            --lvl;
        }
        uint64_t pos = clamped_predict(0, j, q, n_);
        uint64_t lo = pos > epsilon_ ? pos - epsilon_ : 0;
        uint64_t hi = std::min<uint64_t>(n_ - 1, pos + epsilon_);
        return {lo, hi};
    }

    /// Exact rank of q or nullopt, resolved by a binary search confined to
    /// the approx_rank window (O(log epsilon) key accesses).
    template <typename KeyAt>
    std::optional<uint64_t> lookup(uint64_t q, KeyAt&& key_at) const {
        auto [lo, hi] = approx_rank(q);
        uint64_t l = lo, r = hi + 1;
        while (l < r) {
            uint64_t m = l + (r - l) / 2;
            if (key_at(m) < q)
                l = m + 1;
            else
                r = m;
        }
        if (l <= hi && key_at(l) == q) return l;
        return std::nullopt;
    }

    std::optional<uint64_t> lookup(std::span<const uint64_t> keys, uint64_t q) const {
        return lookup(q, [keys](uint64_t i) { return keys[i]; });
    }

    uint32_t epsilon() const noexcept { return epsilon_; }
    uint64_t size() const noexcept { return n_; }

    /// levels()[0] covers the data keys; levels().back() has one segment.
    const std::vector<std::vector<Segment>>& levels() const noexcept { return levels_; }

    uint64_t segment_count() const noexcept {
        uint64_t c = 0;
        for (const auto& level : levels_) c += level.size();
        return c;
    }

    uint64_t segment_bytes() const noexcept { return segment_count() * sizeof(Segment); }

    friend bool operator==(const PgmIndex&, const PgmIndex&) = default;

  private:
    PgmIndex() = default;

    // Prediction of q's rank in the array indexed by levels_[lvl], clamped
    // into the anchor ranks of segment j and its successor. Anchoring plus
    // non-negative slopes keeps the estimate monotone across segment
    // boundaries, which bounds the child-locating window during descent.
    uint64_t clamped_predict(size_t lvl, size_t j, uint64_t q, uint64_t below_n) const {
        const auto& segs = levels_[lvl];
        uint64_t pos = segs[j].predict(q, below_n);
        uint64_t anchor = uint64_t(segs[j].intercept);
        uint64_t next_anchor = j + 1 < segs.size() ? uint64_t(segs[j + 1].intercept) : below_n;
        pos = std::max(pos, anchor);
        pos = std::min(pos, next_anchor);
        return std::min<uint64_t>(pos, below_n - 1);
    }

    uint32_t epsilon_ = 0;
    uint64_t n_ = 0;
    std::vector<std::vector<Segment>> levels_;
};

}  // namespace pgmdbg
