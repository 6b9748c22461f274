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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>

#include "pgmdbg/kmer.hpp"

using namespace pgmdbg;

namespace {

std::string random_bases(std::mt19937_64& rng, size_t len) {
    std::string s(len, 'A');
    for (char& c : s) c = "ACGT"[rng() & 3];
    return s;
}

}  // namespace

TEST_CASE("encode packs first base most significant") {
    CHECK(encode_kmer("AAAA", 4).bits() == 0);
    // 0*64 + 1*16 + 2*4 + 3, recomputed by per-base table lookup and shift
    CHECK(encode_kmer("ACGT", 4).bits() == 27);
    CHECK(encode_kmer("acgt", 4).bits() == 27);
    CHECK(encode_kmer("T", 1).bits() == 3);
}

TEST_CASE("encode rejects bad input") {
    CHECK_THROWS_AS(encode_kmer("ACGN", 4), InvalidBase);
    CHECK_THROWS_AS(encode_kmer("ACG", 4), InvalidK);
    CHECK_THROWS_AS(encode_kmer("", 0), InvalidK);
    CHECK_THROWS_AS(encode_kmer(std::string(32, 'A'), 32), InvalidK);
    CHECK_THROWS_AS(KmerCode(4, 1), InvalidK);  // bits >= 4^k
}

TEST_CASE("decode inverts encode") {
    CHECK(decode_kmer(KmerCode(0, 4)) == "AAAA");
    CHECK(decode_kmer(KmerCode(27, 4)) == "ACGT");

    std::mt19937_64 rng(7);
    for (int i = 0; i < 1000; ++i) {
        uint32_t k = 1 + uint32_t(rng() % kMaxK);
        std::string s = random_bases(rng, k);
        CHECK(decode_kmer(encode_kmer(s, k)) == s);
    }
}

TEST_CASE("encoding is monotone in lexicographic order") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        uint32_t k = 1 + uint32_t(rng() % kMaxK);
        std::string a = random_bases(rng, k);
        std::string b = random_bases(rng, k);
        CHECK((a < b) == (encode_kmer(a, k).bits() < encode_kmer(b, k).bits()));
        CHECK((a == b) == (encode_kmer(a, k).bits() == encode_kmer(b, k).bits()));
    }
}

TEST_CASE("reverse complement") {
    CHECK(reverse_complement(encode_kmer("AAAA", 4)).bits() == 255);  // TTTT, done by hand
    CHECK(decode_kmer(reverse_complement(encode_kmer("AAAA", 4))) == "TTTT");
    CHECK(decode_kmer(reverse_complement(encode_kmer("ACGT", 4))) == "ACGT");

    std::mt19937_64 rng(13);
    for (int i = 0; i < 1000; ++i) {
        uint32_t k = 1 + uint32_t(rng() % kMaxK);
        KmerCode c = encode_kmer(random_bases(rng, k), k);
        CHECK(reverse_complement(reverse_complement(c)) == c);
    }
}

TEST_CASE("canonical picks the smaller strand") {
    CHECK(decode_kmer(canonical(encode_kmer("TTTT", 4))) == "AAAA");
    CHECK(decode_kmer(canonical(encode_kmer("ACGT", 4))) == "ACGT");

    std::mt19937_64 rng(17);
    for (int i = 0; i < 1000; ++i) {
        uint32_t k = 1 + uint32_t(rng() % kMaxK);
        KmerCode c = encode_kmer(random_bases(rng, k), k);
        CHECK(canonical(c) == canonical(reverse_complement(c)));
        CHECK(canonical(c).bits() <= c.bits());
    }
}

TEST_CASE("kmers_of_read enumerates windows") {
    auto codes = kmers_of_read("ACGTA", 3, false);
    REQUIRE(codes.size() == 3);
    CHECK(codes[0] == encode_kmer("ACG", 3));
    CHECK(codes[1] == encode_kmer("CGT", 3));
    CHECK(codes[2] == encode_kmer("GTA", 3));
}

TEST_CASE("kmers_of_read edge cases") {
    CHECK(kmers_of_read("AC", 3, false).empty());
    CHECK(kmers_of_read("", 5, false).empty());

    auto skipped = kmers_of_read("ACNGT", 2, false);
    REQUIRE(skipped.size() == 2);
    CHECK(skipped[0] == encode_kmer("AC", 2));
    CHECK(skipped[1] == encode_kmer("GT", 2));

    CHECK_THROWS_AS(kmers_of_read("ACGT", 0, false), InvalidK);
    CHECK_THROWS_AS(kmers_of_read("ACGT", 32, false), InvalidK);
}

TEST_CASE("kmers_of_read window count and canonical flag") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 200; ++i) {
        uint32_t k = 1 + uint32_t(rng() % kMaxK);
        size_t len = rng() % 120;
        std::string s = random_bases(rng, len);
        auto plain = kmers_of_read(s, k, false);
        size_t expected = len >= k ? len - k + 1 : 0;
        CHECK(plain.size() == expected);

        auto canon = kmers_of_read(s, k, true);
        REQUIRE(canon.size() == plain.size());
        for (size_t w = 0; w < plain.size(); ++w) CHECK(canon[w] == canonical(plain[w]));
        // each window equals a fresh encode of the same substring
        if (!plain.empty()) {
            size_t w = rng() % plain.size();
            CHECK(plain[w] == encode_kmer(s.substr(w, k), k));
        }
    }
}
