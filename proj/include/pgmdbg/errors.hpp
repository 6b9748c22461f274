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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pgmdbg {

// Argument-domain violations: the caller handed us something malformed.
struct InvalidBase : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidK : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct InvalidConfig : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct KeyOutOfRange : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct KMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct EmptyInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct UnsortedInput : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Data violations discovered while consuming an external source.
struct UnsortedStream : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonCanonicalInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsortedDump : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedRecord : std::runtime_error {
    MalformedRecord(const std::string& what, uint64_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}

    uint64_t line_number;
};

}  // namespace pgmdbg
