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
#include <bit>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "pgmdbg/errors.hpp"
#include "pgmdbg/pgm_index.hpp"

namespace pgmdbg {

/// One stored element: a 63-bit key plus a tombstone flag packed into the
/// top bit of the same word, so a logical deletion costs no extra memory.
/// Ordering and equality are on the key alone.
class Record {
  public:
    static constexpr uint64_t kTombstoneBit = uint64_t{1} << 63;
    static constexpr uint64_t kMaxKey = kTombstoneBit - 1;

    static Record live(uint64_t key) noexcept { return Record(key); }
    static Record tombstone(uint64_t key) noexcept { return Record(key | kTombstoneBit); }

    uint64_t key() const noexcept { return word_ & kMaxKey; }
    bool is_tombstone() const noexcept { return (word_ & kTombstoneBit) != 0; }

  private:
    explicit Record(uint64_t word) noexcept : word_(word) {}
    uint64_t word_;
};

/// One sorted run of records. Levels at or above the index threshold carry
/// a PgmIndex over their keys; smaller ones are binary-searched directly.
struct Level {
    std::vector<Record> records;
    std::optional<PgmIndex> index;
    uint64_t capacity = 0;
};

/// Dynamic set of 63-bit keys built from geometrically growing sorted
/// levels (level i holds up to base * 2^i records). New records land in
/// level 0; a full level 0 cascades into the first consolidation level with
/// room, merging sorted runs and keeping the newest record per key.
/// Deletions insert tombstones through the same path; only compact()
/// reclaims them. A key present in several levels is decided by the
/// lowest-numbered (newest) occurrence.
///
/// Cascades target every kCascadeStride-th level only, so consolidated runs
/// are spaced ~2^kCascadeStride apart in capacity. Keeping few populated
/// levels is what holds the post-modification search cost near the
/// freshly-built cost; one populated level per capacity doubling makes the
/// level scan dominate membership probes.
class LeveledSet {
  public:
    static constexpr uint32_t kDefaultEpsilon = 64;
    static constexpr uint32_t kDefaultBase = 8;
    static constexpr uint32_t kDefaultIndexThreshold = 128;
    static constexpr size_t kCascadeStride = 6;

    // Logical-footprint accounting: 8 bytes per stored record, the exact
    // segment bytes of every PgmIndex, and flat per-structure/per-level
    // charges standing in for headers and bookkeeping.
    static constexpr uint64_t kSetOverheadBytes = 64;
    static constexpr uint64_t kLevelOverheadBytes = 64;
    static constexpr uint64_t kRecordBytes = 8;

    explicit LeveledSet(uint32_t epsilon = kDefaultEpsilon, uint32_t base = kDefaultBase,
                        uint32_t index_threshold = kDefaultIndexThreshold)
        : epsilon_(epsilon), base_(base), index_threshold_(index_threshold) {
        if (epsilon < 1) throw InvalidConfig("epsilon must be >= 1");
        if (base < 2) throw InvalidConfig("base must be >= 2");
        if (index_threshold < 1) throw InvalidConfig("index_threshold must be >= 1");
        peak_ = memory_bytes();
    }

    /// Builds a set from keys arriving in non-decreasing order (consecutive
    /// duplicates are collapsed) without ever materializing the input twice:
    /// the growing record array *is* the final level, and the data-level
    /// piecewise-linear fit is grown from the same pass. `next` is invoked
    /// repeatedly and returns std::nullopt at end of stream.
    template <typename NextKey>
    static LeveledSet from_sorted_stream(NextKey&& next, uint32_t epsilon = kDefaultEpsilon,
                                         uint32_t base = kDefaultBase,
                                         uint32_t index_threshold = kDefaultIndexThreshold) {
        LeveledSet set(epsilon, base, index_threshold);
        std::vector<Record> records;
        PlaBuilder pla(epsilon);
        bool any = false;
        uint64_t prev = 0;
        while (auto key = next()) {
            if (*key > Record::kMaxKey) throw KeyOutOfRange("key uses the reserved top bit");
            if (any) {
                if (*key < prev) throw UnsortedStream("stream keys must be non-decreasing");
                if (*key == prev) continue;
            }
            pla.add(*key, records.size());
            records.push_back(Record::live(*key));
            prev = *key;
            any = true;
            uint64_t streaming_bytes = kSetOverheadBytes + kLevelOverheadBytes +
                                       kRecordBytes * records.size() +
                                       sizeof(Segment) * (pla.emitted() + 1);
            set.peak_ = std::max(set.peak_, streaming_bytes);
        }
        if (!records.empty()) {
            uint64_t n = records.size();
            size_t fit = set.level_index_fitting(n);
            set.ensure_levels(fit + 1);
            set.levels_[fit].records = std::move(records);
            if (n >= index_threshold)
                set.levels_[fit].index = PgmIndex::from_data_segments(pla.take(), n, epsilon);
            set.live_count_ = n;
            set.slot_count_ = n;
        }
        set.sample_peak();
        return set;
    }

    /// Makes key present. Exactly one contains() probe keeps live_count()
    /// exact.
    void insert(uint64_t key) {
        check_key(key);
        bool present = contains(key);
        put(Record::live(key));
        if (!present) ++live_count_;
    }

    /// Makes key absent by writing a tombstone through the insertion path;
    /// erasing an absent key still writes the tombstone.
    void erase(uint64_t key) {
        check_key(key);
        bool present = contains(key);
        put(Record::tombstone(key));
        if (present) --live_count_;
    }

    /// Level-by-level scan from the newest level; the first level holding
    /// the key decides (tombstone = absent).
    bool contains(uint64_t key) const {
        check_key(key);
        for (const Level& level : levels_) {
            if (level.records.empty()) continue;
            if (const Record* rec = find_in_level(level, key)) return !rec->is_tombstone();
        }
        return false;
    }

    /// Merges everything into a single level holding exactly the live keys
    /// (tombstones and shadowed duplicates dropped), sized to the first
    /// fitting capacity, with a fresh index when large enough.
    void compact() {
        if (levels_.empty()) return;
        std::vector<Record> merged = merge_runs(levels_.size() - 1, /*drop_tombstones=*/true);
        levels_.clear();
        slot_count_ = merged.size();
        if (!merged.empty()) {
            size_t fit = level_index_fitting(merged.size());
            ensure_levels(fit + 1);
            levels_[fit].records = std::move(merged);
            refresh_index(levels_[fit]);
        }
        sample_peak();
    }

    uint64_t live_count() const noexcept { return live_count_; }
    uint64_t slot_count() const noexcept { return slot_count_; }

    /// Logical footprint of the current structural state; deterministic.
    uint64_t memory_bytes() const noexcept {
        uint64_t bytes = kSetOverheadBytes + kLevelOverheadBytes * levels_.size() +
                         kRecordBytes * slot_count_;
        for (const Level& level : levels_)
            if (level.index) bytes += level.index->segment_bytes();
        return bytes;
    }

    /// High-water mark of memory_bytes() sampled after every mutation.
    uint64_t peak_memory_bytes() const noexcept { return peak_; }
    void reset_peak() noexcept { peak_ = memory_bytes(); }

    uint32_t epsilon() const noexcept { return epsilon_; }
    uint32_t base() const noexcept { return base_; }
    uint32_t index_threshold() const noexcept { return index_threshold_; }

    size_t level_count() const noexcept { return levels_.size(); }
    const Level& level(size_t i) const { return levels_.at(i); }

  private:
    static void check_key(uint64_t key) {
        if (key > Record::kMaxKey) throw KeyOutOfRange("key uses the reserved top bit");
    }

    uint64_t capacity_of(size_t level_index) const noexcept {
        if (level_index >= 62u - std::bit_width(base_)) return Record::kMaxKey;
        return uint64_t(base_) << level_index;
    }

    size_t level_index_fitting(uint64_t count) const noexcept {
        size_t i = 0;
        while (capacity_of(i) < count) ++i;
        return i;
    }

    void ensure_levels(size_t count) {
        while (levels_.size() < count)
            levels_.push_back(Level{{}, std::nullopt, capacity_of(levels_.size())});
    }

    const Record* find_in_level(const Level& level, uint64_t key) const {
        if (level.index) {
            auto rank = level.index->lookup(
                key, [&level](uint64_t i) { return level.records[size_t(i)].key(); });
            return rank ? &level.records[size_t(*rank)] : nullptr;
        }
        auto it = std::lower_bound(level.records.begin(), level.records.end(), key,
                                   [](const Record& r, uint64_t k) { return r.key() < k; });
        if (it != level.records.end() && it->key() == key) return &*it;
        return nullptr;
    }

    void refresh_index(Level& level) {
        if (level.records.size() >= index_threshold_) {
            level.index = PgmIndex::build(
                level.records.size(),
                [&level](uint64_t i) { return level.records[size_t(i)].key(); }, epsilon_);
        } else {
            level.index.reset();
        }
    }

    // Newest-wins merge of levels [0, top]; within a key, the record from
    // the lowest-numbered source survives.
    std::vector<Record> merge_runs(size_t top, bool drop_tombstones) const {
        struct Cursor {
            const std::vector<Record>* records;
            size_t pos = 0;
        };
        std::vector<Cursor> cursors;
        size_t total = 0;
        for (size_t i = 0; i <= top; ++i) {
            if (levels_[i].records.empty()) continue;
            cursors.push_back(Cursor{&levels_[i].records});
            total += levels_[i].records.size();
        }
        std::vector<Record> out;
        out.reserve(total);
        while (true) {
            uint64_t best = Record::kMaxKey;
            int src = -1;
            for (size_t c = 0; c < cursors.size(); ++c) {
                const Cursor& cur = cursors[c];
                if (cur.pos >= cur.records->size()) continue;
                uint64_t k = (*cur.records)[cur.pos].key();
                if (src < 0 || k < best) {
                    best = k;
                    src = int(c);
                }
            }
            if (src < 0) break;
            Record winner = (*cursors[size_t(src)].records)[cursors[size_t(src)].pos];
            for (Cursor& cur : cursors) {
                if (cur.pos < cur.records->size() && (*cur.records)[cur.pos].key() == best) ++cur.pos;
            }
            if (!(drop_tombstones && winner.is_tombstone())) out.push_back(winner);
        }
        return out;
    }

    // Routes a record into level 0, cascading a full level 0 into the first
    // deeper level whose free capacity fits everything above it.
    void put(Record rec) {
        ensure_levels(1);
        Level& l0 = levels_[0];
        auto it = std::lower_bound(l0.records.begin(), l0.records.end(), rec.key(),
                                   [](const Record& r, uint64_t k) { return r.key() < k; });
        if (it != l0.records.end() && it->key() == rec.key()) {
            *it = rec;  // same level, same key: newest state replaces
        } else {
            if (l0.records.size() >= l0.capacity) {
                cascade_merge();
                it = levels_[0].records.begin();
            }
            levels_[0].records.insert(it, rec);
            ++slot_count_;
            refresh_index(levels_[0]);
        }
        sample_peak();
    }

    void cascade_merge() {
        uint64_t below = 0;
        size_t scanned = 0;
        size_t target = kCascadeStride;
        for (size_t t = kCascadeStride;; t += kCascadeStride) {
            ensure_levels(t + 1);
            while (scanned < t) below += levels_[scanned++].records.size();
            if (levels_[t].records.size() + below <= capacity_of(t)) {
                target = t;
                break;
            }
        }
        uint64_t inputs = below + levels_[target].records.size();
        std::vector<Record> merged = merge_runs(target, /*drop_tombstones=*/false);
        slot_count_ = slot_count_ - inputs + merged.size();
        levels_[target].records = std::move(merged);
        refresh_index(levels_[target]);
        for (size_t i = 0; i < target; ++i) {
            levels_[i].records.clear();
            levels_[i].index.reset();
        }
    }

    void sample_peak() noexcept { peak_ = std::max(peak_, memory_bytes()); }

    uint32_t epsilon_;
    uint32_t base_;
    uint32_t index_threshold_;
    std::vector<Level> levels_;
    uint64_t live_count_ = 0;
    uint64_t slot_count_ = 0;
    uint64_t peak_ = 0;
};

}  // namespace pgmdbg
