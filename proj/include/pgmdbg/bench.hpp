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

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>

#include "pgmdbg/errors.hpp"

namespace pgmdbg {

inline constexpr std::string_view kBenchCsvHeader =
    "operation,n_reads,n_ops,elapsed_seconds,peak_logical_bytes,final_logical_bytes,live_count";

/// One benchmark measurement; peak_logical_bytes >= final_logical_bytes.
struct BenchRow {
    std::string operation;
    uint64_t n_reads = 0;
    uint64_t n_ops = 0;
    double elapsed_seconds = 0.0;
    uint64_t peak_logical_bytes = 0;
    uint64_t final_logical_bytes = 0;
    uint64_t live_count = 0;
};

inline std::string to_csv(const BenchRow& row) {
    std::ostringstream out;
    out << row.operation << ',' << row.n_reads << ',' << row.n_ops << ',';
    out.setf(std::ios::fixed);
    out.precision(9);
    out << row.elapsed_seconds << ',' << row.peak_logical_bytes << ',' << row.final_logical_bytes
        << ',' << row.live_count;
    return out.str();
}

/// Appends one row, writing the header first when the file is new or empty.
inline void append_bench_row(const std::string& csv_path, const BenchRow& row) {
    std::error_code ec;
    bool fresh = !std::filesystem::exists(csv_path, ec) ||
                 std::filesystem::file_size(csv_path, ec) == 0;
    std::ofstream out(csv_path, std::ios::app);
    if (!out) throw IoError("cannot open " + csv_path + " for appending");
    if (fresh) out << kBenchCsvHeader << '\n';
    out << to_csv(row) << '\n';
    out.flush();
    if (!out) throw IoError("write failed on " + csv_path);
}

class StopWatch {
  public:
    StopWatch() : start_(std::chrono::steady_clock::now()) {}

    double seconds() const {
        auto dt = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration<double>(dt).count();
    }

  private:
    std::chrono::steady_clock::time_point start_;
};

}  // namespace pgmdbg
