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
#include <string_view>
#include <vector>

#include "pgmdbg/errors.hpp"
#include "pgmdbg/kmer.hpp"
#include "pgmdbg/leveled_set.hpp"

namespace pgmdbg {

/// De Bruijn graph over a dynamic k-mer set: nodes are the stored k-mers,
/// edges are (k-1)-overlaps answered by membership probes on the four
/// possible extensions. No adjacency is ever materialized.
///
/// In canonical mode every stored k-mer equals its canonical form, overlap
/// probes are made on the directed extension, and neighbors are reported in
/// their stored (canonical) form.
class DeBruijnGraph {
  public:
    explicit DeBruijnGraph(uint32_t k, bool canonical_mode = false,
                           uint32_t epsilon = LeveledSet::kDefaultEpsilon,
                           uint32_t base = LeveledSet::kDefaultBase)
        : k_(k), canonical_(canonical_mode), nodes_(epsilon, base) {
        if (k < 1 || k > kMaxK)
            throw InvalidK("k must be in [1, " + std::to_string(kMaxK) + "], got " + std::to_string(k));
    }

    /// Replaces the node set with the distinct codes of a stream sorted by
    /// bits, built through the online (single materialization) path. In
    /// canonical mode every incoming code must already be canonical.
    template <typename NextCode>
    void build_from_kmer_stream(NextCode&& next) {
        const uint32_t k = k_;
        const bool check_canonical = canonical_;
        auto keys = [&]() -> std::optional<uint64_t> {
            auto code = next();
            if (!code) return std::nullopt;
            if (code->k() != k) throw KMismatch("stream k-mer length differs from graph k");
            if (check_canonical && canonical(*code).bits() != code->bits())
                throw NonCanonicalInput("canonical-mode graph fed a non-canonical k-mer");
            return code->bits();
        };
        nodes_ = LeveledSet::from_sorted_stream(keys, nodes_.epsilon(), nodes_.base(),
                                                nodes_.index_threshold());
    }

    /// Inserts every k-mer of the read (invalid windows skipped); returns
    /// the number of insertions performed.
    size_t add_read(std::string_view seq) {
        size_t ops = 0;
        for (KmerCode code : kmers_of_read(seq, k_, canonical_)) {
            nodes_.insert(code.bits());
            ++ops;
        }
        return ops;
    }

    void add_kmer(KmerCode c) { nodes_.insert(stored_bits(c)); }
    void remove_kmer(KmerCode c) { nodes_.erase(stored_bits(c)); }
    bool contains_kmer(KmerCode c) const { return nodes_.contains(stored_bits(c)); }

    /// Stored successors of c: suffix(c, k-1) extended by each base, probed
    /// as directed k-mers, reported in stored form (at most four, deduped).
    std::vector<KmerCode> successors(KmerCode c) const {
        check_k(c);
        uint64_t suffix = (c.bits() << 2) & kmer_mask(k_);
        std::vector<KmerCode> out;
        for (uint32_t b = 0; b < 4; ++b) collect_neighbor(suffix | b, out);
        return out;
    }

    /// Mirror of successors: each base prepended to prefix(c, k-1).
    std::vector<KmerCode> predecessors(KmerCode c) const {
        check_k(c);
        uint64_t prefix = c.bits() >> 2;
        std::vector<KmerCode> out;
        for (uint32_t b = 0; b < 4; ++b)
            collect_neighbor(prefix | (uint64_t(b) << (2 * (k_ - 1))), out);
        return out;
    }

    uint64_t node_count() const noexcept { return nodes_.live_count(); }
    uint32_t k() const noexcept { return k_; }
    bool canonical_mode() const noexcept { return canonical_; }

    void compact() { nodes_.compact(); }

    const LeveledSet& nodes() const noexcept { return nodes_; }

  private:
    void check_k(KmerCode c) const {
        if (c.k() != k_) throw KMismatch("k-mer length differs from graph k");
    }

    uint64_t stored_bits(KmerCode c) const {
        check_k(c);
        return canonical_ ? canonical(c).bits() : c.bits();
    }

    void collect_neighbor(uint64_t directed_bits, std::vector<KmerCode>& out) const {
        KmerCode candidate(directed_bits, k_);
        KmerCode stored = canonical_ ? canonical(candidate) : candidate;
        if (!nodes_.contains(stored.bits())) return;
        for (const KmerCode& seen : out)
            if (seen.bits() == stored.bits()) return;
        out.push_back(stored);
    }

    uint32_t k_;
    bool canonical_;
    LeveledSet nodes_;
};

}  // namespace pgmdbg
