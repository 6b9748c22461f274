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
#include <string>
#include <string_view>
#include <vector>

#include "pgmdbg/errors.hpp"

namespace pgmdbg {

// Longest k-mer representable in a 64-bit word while leaving the top bit
// free for the set layer's tombstone flag: 31 bases * 2 bits = 62 bits.
inline constexpr uint32_t kMaxK = 31;

// A = 0, C = 1, G = 2, T = 3 (case-insensitive); anything else maps to -1.
// With this table complement(b) == 3 - b, and packing the first base into
// the most significant pair makes integer order equal lexicographic order.
constexpr int base_code(char c) noexcept {
    switch (c) {
        case 'A': case 'a': return 0;
        case 'C': case 'c': return 1;
        case 'G': case 'g': return 2;
        case 'T': case 't': return 3;
        default: return -1;
    }
}

constexpr char base_char(uint32_t code) noexcept { return "ACGT"[code & 3u]; }

constexpr uint32_t complement_code(uint32_t code) noexcept { return 3u - (code & 3u); }

// All-ones mask over the 2k occupied bits, valid for k in [1, 31].
constexpr uint64_t kmer_mask(uint32_t k) noexcept { return (uint64_t{1} << (2 * k)) - 1; }

// A k-mer packed 2 bits per base into a 64-bit word, first base in the most
// significant occupied pair.
class KmerCode {
  public:
    KmerCode(uint64_t bits, uint32_t k) : bits_(bits), k_(k) {
        if (k < 1 || k > kMaxK)
            throw InvalidK("k must be in [1, " + std::to_string(kMaxK) + "], got " + std::to_string(k));
        if (bits > kmer_mask(k))
            throw InvalidK("k-mer bits exceed 4^k for k = " + std::to_string(k));
    }

    uint64_t bits() const noexcept { return bits_; }
    uint32_t k() const noexcept { return k_; }

    friend bool operator==(const KmerCode&, const KmerCode&) = default;

  private:
    uint64_t bits_;
    uint32_t k_;
};

// Packs a base string of length k. Throws InvalidK on a length mismatch or
// k outside [1, 31], InvalidBase on any character outside {A,C,G,T}.
inline KmerCode encode_kmer(std::string_view s, uint32_t k) {
    if (k < 1 || k > kMaxK || s.size() != k)
        throw InvalidK("expected a base string of length k in [1, " + std::to_string(kMaxK) + "]");
    uint64_t bits = 0;
    for (char c : s) {
        int b = base_code(c);
        if (b < 0) throw InvalidBase(std::string("invalid base '") + c + "'");
        bits = (bits << 2) | uint64_t(b);
    }
    return KmerCode(bits, k);
}

// Inverse of encode_kmer; always yields uppercase bases.
inline std::string decode_kmer(KmerCode c) {
    std::string s(c.k(), 'A');
    uint64_t bits = c.bits();
    for (uint32_t i = c.k(); i-- > 0;) {
        s[i] = base_char(uint32_t(bits & 3u));
        bits >>= 2;
    }
    return s;
}

// Reverse complement with the same k.
inline KmerCode reverse_complement(KmerCode c) {
    uint64_t fwd = c.bits();
    uint64_t rc = 0;
    for (uint32_t i = 0; i < c.k(); ++i) {
        rc = (rc << 2) | complement_code(uint32_t(fwd & 3u));
        fwd >>= 2;
    }
    return KmerCode(rc, c.k());
}

// The smaller of a k-mer and its reverse complement, identifying both strands.
inline KmerCode canonical(KmerCode c) {
    KmerCode rc = reverse_complement(c);
    return rc.bits() < c.bits() ? rc : c;
}

// Extracts one code per window of k consecutive valid bases, left to right.
// Windows touching an invalid character (e.g. N) are skipped; reads shorter
// than k yield nothing. Rolls the forward and reverse-complement codes one
// base at a time so each window costs O(1).
inline std::vector<KmerCode> kmers_of_read(std::string_view seq, uint32_t k, bool canonicalize) {
    if (k < 1 || k > kMaxK)
        throw InvalidK("k must be in [1, " + std::to_string(kMaxK) + "], got " + std::to_string(k));
    std::vector<KmerCode> out;
    if (seq.size() < k) return out;
    out.reserve(seq.size() - k + 1);

    const uint64_t mask = kmer_mask(k);
    const uint32_t top_shift = 2 * (k - 1);
    uint64_t fwd = 0, rc = 0;
    uint32_t run = 0;  // consecutive valid bases ending at the current position
    for (char ch : seq) {
        int b = base_code(ch);
        if (b < 0) {
            run = 0;
            continue;
        }
        fwd = ((fwd << 2) | uint64_t(b)) & mask;
        rc = (rc >> 2) | (uint64_t(complement_code(uint32_t(b))) << top_shift);
        if (++run >= k) {
            run = k;
            uint64_t bits = canonicalize ? std::min(fwd, rc) : fwd;
            out.emplace_back(bits, k);
        }
    }
    return out;
}

}  // namespace pgmdbg
