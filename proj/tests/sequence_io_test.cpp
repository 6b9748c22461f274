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

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pgmdbg/sequence_io.hpp"

using namespace pgmdbg;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::vector<ReadRecord> read_all(const std::string& path) {
    SequenceReader reader(path);
    std::vector<ReadRecord> out;
    while (auto rec = reader.next()) out.push_back(*rec);
    return out;
}

std::string random_bases(std::mt19937_64& rng, size_t len) {
    std::string s(len, 'A');
    for (char& c : s) c = "ACGT"[rng() & 3];
    return s;
}

}  // namespace

TEST_CASE("FASTA parsing") {
    TempDir dir("pgmdbg_io_fasta");
    write_file(dir.file("a.fa"), ">r1\nACGT\n");
    auto recs = read_all(dir.file("a.fa"));
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].id == "r1");
    CHECK(recs[0].seq == "ACGT");

    write_file(dir.file("b.fa"), ">r1 desc\nACGT\nTTAA\n>r2\nGG\n");
    recs = read_all(dir.file("b.fa"));
    REQUIRE(recs.size() == 2);
    CHECK(recs[0].id == "r1 desc");
    CHECK(recs[0].seq == "ACGTTTAA");  // wrapped sequence concatenated
    CHECK(recs[1].seq == "GG");

    write_file(dir.file("empty.fa"), "");
    CHECK(read_all(dir.file("empty.fa")).empty());

    write_file(dir.file("noseq.fa"), ">r1\n>r2\nAC\n");
    CHECK_THROWS_AS(read_all(dir.file("noseq.fa")), MalformedRecord);

    CHECK_THROWS_AS(SequenceReader(dir.file("missing.fa")), IoError);
}

TEST_CASE("FASTQ parsing") {
    TempDir dir("pgmdbg_io_fastq");
    write_file(dir.file("a.fq"), "@r1\nACGT\n+\nIIII\n");
    auto recs = read_all(dir.file("a.fq"));
    REQUIRE(recs.size() == 1);
    CHECK(recs[0].id == "r1");
    CHECK(recs[0].seq == "ACGT");

    write_file(dir.file("twice.fq"), "@r1\nACGT\n+\nIIII\n@r2\nNNGT\n+r2\nJJJJ\n");
    recs = read_all(dir.file("twice.fq"));
    REQUIRE(recs.size() == 2);
    CHECK(recs[1].seq == "NNGT");

    write_file(dir.file("badplus.fq"), "@r1\nACGT\nIIII\nIIII\n");
    CHECK_THROWS_AS(read_all(dir.file("badplus.fq")), MalformedRecord);

    write_file(dir.file("trunc.fq"), "@r1\nACGT\n+\n");
    CHECK_THROWS_AS(read_all(dir.file("trunc.fq")), MalformedRecord);

    write_file(dir.file("quals.fq"), "@r1\nACGT\n+\nII\n");
    try {
        read_all(dir.file("quals.fq"));
        FAIL("expected MalformedRecord");
    } catch (const MalformedRecord& e) {
        CHECK(e.line_number == 4);
    }
}

TEST_CASE("subset copies the first n records verbatim") {
    TempDir dir("pgmdbg_io_subset");
    std::string fasta;
    for (int i = 0; i < 5; ++i) fasta += ">r" + std::to_string(i) + "\nACGTACGT\n";
    write_file(dir.file("in.fa"), fasta);

    CHECK(subset_reads(dir.file("in.fa"), 0, dir.file("none.fa")) == 0);
    CHECK(slurp(dir.file("none.fa")).empty());

    CHECK(subset_reads(dir.file("in.fa"), 2, dir.file("two.fa")) == 2);
    auto two = read_all(dir.file("two.fa"));
    REQUIRE(two.size() == 2);
    CHECK(two[0].id == "r0");
    CHECK(two[1].id == "r1");

    CHECK(subset_reads(dir.file("in.fa"), 10, dir.file("all.fa")) == 5);
    CHECK(slurp(dir.file("all.fa")) == fasta);

    // FASTQ subsets stay valid FASTQ, qualities included
    std::string fastq = "@q1\nACGT\n+\nIIII\n@q2\nTTTT\n+\nJJJJ\n";
    write_file(dir.file("in.fq"), fastq);
    CHECK(subset_reads(dir.file("in.fq"), 1, dir.file("one.fq")) == 1);
    CHECK(slurp(dir.file("one.fq")) == "@q1\nACGT\n+\nIIII\n");
}

TEST_CASE("split_80_20 partitions with a ceiling build share") {
    TempDir dir("pgmdbg_io_split");
    auto make_input = [&](int n) {
        std::string fasta;
        for (int i = 0; i < n; ++i) fasta += ">r" + std::to_string(i) + "\nACGT\n";
        write_file(dir.file("in.fa"), fasta);
    };

    make_input(10);
    auto counts = split_80_20(dir.file("in.fa"), dir.file("b.fa"), dir.file("o.fa"));
    CHECK(counts == std::pair<size_t, size_t>{8, 2});

    make_input(5);
    counts = split_80_20(dir.file("in.fa"), dir.file("b.fa"), dir.file("o.fa"));
    CHECK(counts == std::pair<size_t, size_t>{4, 1});
    auto build = read_all(dir.file("b.fa"));
    auto ops = read_all(dir.file("o.fa"));
    REQUIRE(build.size() == 4);
    REQUIRE(ops.size() == 1);
    CHECK(build[0].id == "r0");
    CHECK(ops[0].id == "r4");  // order preserved, nothing dropped

    make_input(0);
    write_file(dir.file("in.fa"), "");
    counts = split_80_20(dir.file("in.fa"), dir.file("b.fa"), dir.file("o.fa"));
    CHECK(counts == std::pair<size_t, size_t>{0, 0});
}

TEST_CASE("kmer dump fixtures") {
    TempDir dir("pgmdbg_io_dump");
    write_file(dir.file("r.fa"), ">r1\nACGTA\n");
    CHECK(write_kmer_dump(dir.file("r.fa"), 3, false, dir.file("r.kmers")) == 3);
    CHECK(slurp(dir.file("r.kmers")) == "ACG\t1\nCGT\t1\nGTA\t1\n");

    write_file(dir.file("a.fa"), ">r1\nAAAA\n");
    CHECK(write_kmer_dump(dir.file("a.fa"), 3, false, dir.file("a.kmers")) == 1);
    CHECK(slurp(dir.file("a.kmers")) == "AAA\t2\n");

    write_file(dir.file("t.fa"), ">r1\nTTT\n");
    CHECK(write_kmer_dump(dir.file("t.fa"), 3, true, dir.file("t.kmers")) == 1);
    CHECK(slurp(dir.file("t.kmers")) == "AAA\t1\n");  // canonicalized

    write_file(dir.file("short.fa"), ">r1\nAC\n");
    CHECK(write_kmer_dump(dir.file("short.fa"), 3, false, dir.file("short.kmers")) == 0);
    CHECK(slurp(dir.file("short.kmers")).empty());
}

TEST_CASE("dump write agrees with an in-memory oracle, external sort included") {
    TempDir dir("pgmdbg_io_ext");
    std::mt19937_64 rng(109);
    std::string fasta;
    std::map<uint64_t, uint64_t> oracle;
    for (int i = 0; i < 80; ++i) {
        std::string read = random_bases(rng, 200);
        fasta += ">r" + std::to_string(i) + "\n" + read + "\n";
        for (KmerCode c : kmers_of_read(read, 9, false)) ++oracle[c.bits()];
    }
    write_file(dir.file("in.fa"), fasta);

    // big budget: everything in memory
    uint64_t n1 = write_kmer_dump(dir.file("in.fa"), 9, false, dir.file("big.kmers"));
    // tiny budget: forces several spilled runs and a merge
    uint64_t n2 = write_kmer_dump(dir.file("in.fa"), 9, false, dir.file("small.kmers"), 1024);
    CHECK(n1 == oracle.size());
    CHECK(n2 == oracle.size());
    CHECK(slurp(dir.file("big.kmers")) == slurp(dir.file("small.kmers")));

    // no run files left behind
    size_t leftovers = 0;
    for (const auto& entry : fs::directory_iterator(dir.path))
        if (entry.path().string().find(".run") != std::string::npos) ++leftovers;
    CHECK(leftovers == 0);

    // independent line-level check against the oracle
    KmerDumpReader reader(dir.file("small.kmers"), 9);
    auto it = oracle.begin();
    while (auto code = reader.next()) {
        REQUIRE(it != oracle.end());
        REQUIRE(code->bits() == it->first);
        ++it;
    }
    CHECK(it == oracle.end());
}

TEST_CASE("dump reader validates on the fly") {
    TempDir dir("pgmdbg_io_read");

    write_file(dir.file("ok.kmers"), "AAA\t2\nACG\nTTT\t1\n");  // count column optional
    KmerDumpReader ok(dir.file("ok.kmers"), 3);
    CHECK(ok.next()->bits() == encode_kmer("AAA", 3).bits());
    CHECK(ok.next()->bits() == encode_kmer("ACG", 3).bits());
    CHECK(ok.next()->bits() == encode_kmer("TTT", 3).bits());
    CHECK_FALSE(ok.next().has_value());
    CHECK(ok.count() == 3);

    write_file(dir.file("bad_order.kmers"), "CCC\t1\nAAA\t1\n");
    KmerDumpReader order(dir.file("bad_order.kmers"), 3);
    order.next();
    CHECK_THROWS_AS(order.next(), UnsortedDump);

    write_file(dir.file("dup.kmers"), "AAA\t1\nAAA\t1\n");
    KmerDumpReader dup(dir.file("dup.kmers"), 3);
    dup.next();
    CHECK_THROWS_AS(dup.next(), UnsortedDump);

    write_file(dir.file("wrong_k.kmers"), "AAAA\t1\n");
    KmerDumpReader wrongk(dir.file("wrong_k.kmers"), 3);
    CHECK_THROWS_AS(wrongk.next(), KMismatch);

    write_file(dir.file("junk.kmers"), "AXA\t1\n");
    KmerDumpReader junk(dir.file("junk.kmers"), 3);
    CHECK_THROWS_AS(junk.next(), MalformedRecord);

    write_file(dir.file("badcount.kmers"), "AAA\tx\n");
    KmerDumpReader badcount(dir.file("badcount.kmers"), 3);
    CHECK_THROWS_AS(badcount.next(), MalformedRecord);
}

TEST_CASE("dump roundtrip reproduces the code sequence") {
    TempDir dir("pgmdbg_io_round");
    std::mt19937_64 rng(113);
    std::string fasta;
    std::map<uint64_t, uint64_t> oracle;
    for (int i = 0; i < 40; ++i) {
        std::string read = random_bases(rng, 120);
        if (i % 7 == 0) read[rng() % read.size()] = 'N';  // invalid windows skipped
        fasta += ">r" + std::to_string(i) + "\n" + read + "\n";
        for (KmerCode c : kmers_of_read(read, 13, false)) ++oracle[c.bits()];
    }
    write_file(dir.file("in.fa"), fasta);
    uint64_t distinct = write_kmer_dump(dir.file("in.fa"), 13, false, dir.file("out.kmers"));
    CHECK(distinct == oracle.size());

    KmerDumpReader reader(dir.file("out.kmers"), 13);
    auto it = oracle.begin();
    uint64_t prev = 0;
    bool any = false;
    while (auto code = reader.next()) {
        REQUIRE(it != oracle.end());
        REQUIRE(code->bits() == it->first);
        if (any) REQUIRE(code->bits() > prev);  // ascending == lexicographic
        prev = code->bits();
        any = true;
        ++it;
    }
    CHECK(it == oracle.end());
}
