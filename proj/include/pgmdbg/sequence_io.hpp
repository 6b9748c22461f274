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
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pgmdbg/errors.hpp"
#include "pgmdbg/kmer.hpp"

namespace pgmdbg {

struct ReadRecord {
    std::string id;
    std::string seq;
};

/// Streaming FASTA/FASTQ reader. The format is sniffed from the first
/// non-empty line: '>' starts FASTA (multi-line sequences allowed), '@'
/// starts FASTQ (strict 4-line records). Records are never buffered beyond
/// the current one.
class SequenceReader {
  public:
    explicit SequenceReader(const std::string& path) : in_(path), path_(path) {
        if (!in_) throw IoError("cannot open " + path);
    }

    /// Next record, or nullopt at end of input. When `raw` is non-null it
    /// receives the record's text (LF endings) exactly as subset/split
    /// re-emit it.
    std::optional<ReadRecord> next(std::string* raw = nullptr) {
        if (format_ == Format::unknown && !sniff_format()) return std::nullopt;
        return format_ == Format::fasta ? next_fasta(raw) : next_fastq(raw);
    }

  private:
    enum class Format { unknown, fasta, fastq };

    bool read_line(std::string& line) {
        if (!std::getline(in_, line)) return false;
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
    }

    bool sniff_format() {
        std::string line;
        while (read_line(line)) {
            if (line.empty()) continue;
            if (line[0] == '>') {
                format_ = Format::fasta;
                pending_ = line;
                have_pending_ = true;
                return true;
            }
            if (line[0] == '@') {
                format_ = Format::fastq;
                pending_ = line;
                have_pending_ = true;
                return true;
            }
            throw MalformedRecord(path_ + ": not FASTA or FASTQ", line_no_);
        }
        return false;  // empty input: zero records
    }

    bool take_line(std::string& line) {
        if (have_pending_) {
            line = std::move(pending_);
            have_pending_ = false;
            return true;
        }
        return read_line(line);
    }

    std::optional<ReadRecord> next_fasta(std::string* raw) {
        std::string line;
        if (!take_line(line)) return std::nullopt;
        if (line.empty() || line[0] != '>')
            throw MalformedRecord(path_ + ": expected '>' header", line_no_);
        uint64_t header_line = line_no_;
        ReadRecord rec;
        rec.id = line.substr(1);
        if (raw) *raw = line + '\n';
        while (read_line(line)) {
            if (!line.empty() && line[0] == '>') {
                pending_ = std::move(line);
                have_pending_ = true;
                break;
            }
            if (line.empty()) continue;
            rec.seq += line;
            if (raw) *raw += line + '\n';
        }
        if (rec.seq.empty())
            throw MalformedRecord(path_ + ": record '" + rec.id + "' has no sequence", header_line);
        return rec;
    }

    std::optional<ReadRecord> next_fastq(std::string* raw) {
        std::string header;
        do {
            if (!take_line(header)) return std::nullopt;
        } while (header.empty());
        if (header[0] != '@')
            throw MalformedRecord(path_ + ": expected '@' header", line_no_);
        std::string seq, plus, qual;
        if (!read_line(seq) || !read_line(plus) || !read_line(qual))
            throw MalformedRecord(path_ + ": truncated FASTQ record", line_no_);
        if (plus.empty() || plus[0] != '+')
            throw MalformedRecord(path_ + ": expected '+' separator", line_no_);
        if (seq.empty()) throw MalformedRecord(path_ + ": empty sequence", line_no_);
        if (qual.size() != seq.size())
            throw MalformedRecord(path_ + ": quality length differs from sequence", line_no_);
        if (raw) *raw = header + '\n' + seq + '\n' + plus + '\n' + qual + '\n';
        return ReadRecord{header.substr(1), std::move(seq)};
    }

    std::ifstream in_;
    std::string path_;
    Format format_ = Format::unknown;
    uint64_t line_no_ = 0;
    std::string pending_;
    bool have_pending_ = false;
};

namespace detail {

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path + " for writing");
    return out;
}

inline void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) throw IoError("write failed on " + path);
}

}  // namespace detail

/// Copies the first n records of input to output; returns the number
/// actually written (fewer when the input is shorter).
inline size_t subset_reads(const std::string& input, size_t n, const std::string& output) {
    SequenceReader reader(input);
    std::ofstream out = detail::open_output(output);
    std::string raw;
    size_t written = 0;
    while (written < n && reader.next(&raw)) {
        out << raw;
        ++written;
    }
    detail::finish_output(out, output);
    return written;
}

/// Sends the first ceil(0.8 * N) records to out_build and the rest to
/// out_ops, preserving order; N comes from a first counting pass.
inline std::pair<size_t, size_t> split_80_20(const std::string& input, const std::string& out_build,
                                             const std::string& out_ops) {
    size_t total = 0;
    {
        SequenceReader counter(input);
        while (counter.next()) ++total;
    }
    size_t build_share = (total * 4 + 4) / 5;  // ceil(0.8 * N)
    SequenceReader reader(input);
    std::ofstream build_out = detail::open_output(out_build);
    std::ofstream ops_out = detail::open_output(out_ops);
    std::string raw;
    size_t i = 0;
    while (reader.next(&raw)) {
        (i < build_share ? build_out : ops_out) << raw;
        ++i;
    }
    detail::finish_output(build_out, out_build);
    detail::finish_output(ops_out, out_ops);
    return {build_share, total - build_share};
}

inline constexpr uint64_t kDefaultDumpMemoryBudget = 256ull << 20;

namespace detail {

// A spilled sorted run of (code, count) pairs; the file is removed with the
// handle.
class RunFile {
  public:
    explicit RunFile(std::filesystem::path path) : path_(std::move(path)) {}
    RunFile(RunFile&& other) noexcept : path_(std::move(other.path_)) { other.path_.clear(); }
    RunFile& operator=(RunFile&&) = delete;
    ~RunFile() {
        if (!path_.empty()) {
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }
    const std::filesystem::path& path() const noexcept { return path_; }

  private:
    std::filesystem::path path_;
};

inline void spill_run(std::vector<uint64_t>& buffer, const std::filesystem::path& path) {
    std::sort(buffer.begin(), buffer.end());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open run file " + path.string());
    for (size_t i = 0; i < buffer.size();) {
        uint64_t code = buffer[i];
        uint64_t count = 0;
        while (i < buffer.size() && buffer[i] == code) {
            ++count;
            ++i;
        }
        out.write(reinterpret_cast<const char*>(&code), sizeof(code));
        out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    }
    out.flush();
    if (!out) throw IoError("write failed on run file " + path.string());
    buffer.clear();
}

struct RunCursor {
    std::ifstream in;
    uint64_t code = 0;
    uint64_t count = 0;
    bool live = false;

    explicit RunCursor(const std::filesystem::path& path) : in(path, std::ios::binary) {
        if (!in) throw IoError("cannot reopen run file " + path.string());
        advance();
    }

    void advance() {
        live = bool(in.read(reinterpret_cast<char*>(&code), sizeof(code)) &&
                    in.read(reinterpret_cast<char*>(&count), sizeof(count)));
    }
};

}  // namespace detail

/// Extracts every k-mer of every read, then writes the distinct codes in
/// ascending order as text lines `<KMER>\t<COUNT>`, where COUNT is the
/// total multiplicity. Inputs whose code volume exceeds the memory budget
/// are spilled to sorted runs next to the output and merged back. Returns
/// the number of distinct k-mers.
inline uint64_t write_kmer_dump(const std::string& reads_path, uint32_t k, bool canonicalize,
                                const std::string& out_path,
                                uint64_t memory_budget_bytes = kDefaultDumpMemoryBudget) {
    if (k < 1 || k > kMaxK)
        throw InvalidK("k must be in [1, " + std::to_string(kMaxK) + "], got " + std::to_string(k));
    const uint64_t max_entries = std::max<uint64_t>(64, memory_budget_bytes / 8);

    SequenceReader reader(reads_path);
    std::vector<uint64_t> buffer;
    buffer.reserve(size_t(std::min<uint64_t>(max_entries, 1u << 20)));
    std::vector<detail::RunFile> runs;
    auto spill = [&] {
        std::filesystem::path run_path = out_path + ".run" + std::to_string(runs.size());
        detail::spill_run(buffer, run_path);
        runs.emplace_back(std::move(run_path));
    };

    while (auto rec = reader.next()) {
        for (KmerCode code : kmers_of_read(rec->seq, k, canonicalize)) {
            buffer.push_back(code.bits());
            if (buffer.size() >= max_entries) spill();
        }
    }

    std::ofstream out = detail::open_output(out_path);
    uint64_t distinct = 0;
    auto emit = [&](uint64_t code, uint64_t count) {
        out << decode_kmer(KmerCode(code, k)) << '\t' << count << '\n';
        ++distinct;
    };

    if (runs.empty()) {
        std::sort(buffer.begin(), buffer.end());
        for (size_t i = 0; i < buffer.size();) {
            uint64_t code = buffer[i];
            uint64_t count = 0;
            while (i < buffer.size() && buffer[i] == code) {
                ++count;
                ++i;
            }
            emit(code, count);
        }
    } else {
        if (!buffer.empty()) spill();
        std::vector<detail::RunCursor> cursors;
        cursors.reserve(runs.size());
        for (const auto& run : runs) cursors.emplace_back(run.path());
        while (true) {
            uint64_t best = 0;
            bool found = false;
            for (const auto& cur : cursors) {
                if (cur.live && (!found || cur.code < best)) {
                    best = cur.code;
                    found = true;
                }
            }
            if (!found) break;
            uint64_t count = 0;
            for (auto& cur : cursors) {
                while (cur.live && cur.code == best) {
                    count += cur.count;
                    cur.advance();
                }
            }
            emit(best, count);
        }
    }
    detail::finish_output(out, out_path);
    return distinct;
}

/// Streams a sorted k-mer dump back as codes, verifying the expected k,
/// the line format, and strict ascending order on the fly. Count columns
/// are accepted and ignored.
class KmerDumpReader {
  public:
    KmerDumpReader(const std::string& path, uint32_t k) : in_(path), path_(path), k_(k) {
        if (k < 1 || k > kMaxK)
            throw InvalidK("k must be in [1, " + std::to_string(kMaxK) + "], got " + std::to_string(k));
        if (!in_) throw IoError("cannot open " + path);
    }

    std::optional<KmerCode> next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) {
                if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;
                throw MalformedRecord(path_ + ": blank line in dump", line_no_);
            }
            size_t tab = line.find('\t');
            std::string_view kmer =
                tab == std::string::npos ? std::string_view(line) : std::string_view(line).substr(0, tab);
            if (tab != std::string::npos) {
                std::string_view count = std::string_view(line).substr(tab + 1);
                if (count.empty() ||
                    count.find_first_not_of("0123456789") != std::string_view::npos)
                    throw MalformedRecord(path_ + ": count is not an integer", line_no_);
            }
            if (kmer.size() != k_)
                throw KMismatch(path_ + ": line " + std::to_string(line_no_) + " has a " +
                                std::to_string(kmer.size()) + "-mer, expected k = " +
                                std::to_string(k_));
            uint64_t bits = 0;
            for (char c : kmer) {
                int b = base_code(c);
                if (b < 0) throw MalformedRecord(path_ + ": invalid base in k-mer", line_no_);
                bits = (bits << 2) | uint64_t(b);
            }
            if (any_ && bits <= prev_)
                throw UnsortedDump(path_ + ": dump not in ascending order at line " +
                                   std::to_string(line_no_));
            prev_ = bits;
            any_ = true;
            ++count_;
            return KmerCode(bits, k_);
        }
        return std::nullopt;
    }

    /// Codes yielded so far.
    uint64_t count() const noexcept { return count_; }

  private:
    std::ifstream in_;
    std::string path_;
    uint32_t k_;
    uint64_t line_no_ = 0;
    uint64_t count_ = 0;
    bool any_ = false;
    uint64_t prev_ = 0;
};

}  // namespace pgmdbg
