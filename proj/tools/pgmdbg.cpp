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

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <sys/resource.h>

#include "pgmdbg/bench.hpp"
#include "pgmdbg/debruijn_graph.hpp"
#include "pgmdbg/kmer.hpp"
#include "pgmdbg/sequence_io.hpp"

namespace {

using namespace pgmdbg;

// Exit codes: 0 success, 1 runtime/IO error, 2 usage error, 3 verification
// failure.
struct VerificationFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BenchConfig {
    uint32_t k = 0;
    uint32_t epsilon = LeveledSet::kDefaultEpsilon;
    uint32_t base = LeveledSet::kDefaultBase;
    bool canonical = false;
    double hit_rate = 0.5;
    uint64_t seed = 42;
    std::string output;
    bool os_peak = false;
};

void add_structure_flags(CLI::App* cmd, BenchConfig& cfg) {
    cmd->add_option("--k", cfg.k, "k-mer length in [1,31]")->required();
    cmd->add_option("--epsilon", cfg.epsilon, "learned-index error bound")->check(CLI::PositiveNumber);
    cmd->add_option("--base", cfg.base, "level-0 capacity (level i holds base*2^i)")
        ->check(CLI::Range(uint32_t(2), uint32_t(1) << 30));
    cmd->add_flag("--canonical", cfg.canonical, "canonicalize k-mers (strand-insensitive)");
}

void add_report_flags(CLI::App* cmd, BenchConfig& cfg) {
    cmd->add_option("--output", cfg.output, "CSV file to append the result row to");
    cmd->add_flag("--os-peak", cfg.os_peak, "also print the OS-reported peak RSS");
}

void report(const BenchConfig& cfg, const BenchRow& row) {
    std::cout << "operation=" << row.operation << " n_reads=" << row.n_reads
              << " n_ops=" << row.n_ops << " elapsed_seconds=" << row.elapsed_seconds
              << " peak_logical_bytes=" << row.peak_logical_bytes
              << " final_logical_bytes=" << row.final_logical_bytes
              << " live_count=" << row.live_count << "\n";
    if (cfg.os_peak) {
        struct rusage usage{};
        getrusage(RUSAGE_SELF, &usage);
        std::cout << "os_peak_rss_bytes=" << uint64_t(usage.ru_maxrss) * 1024
                  << " (resident-set high-water, OS-reported; not the logical figure above)\n";
    }
    if (!cfg.output.empty()) append_bench_row(cfg.output, row);
}

std::vector<ReadRecord> load_reads(const std::string& path) {
    SequenceReader reader(path);
    std::vector<ReadRecord> reads;
    while (auto rec = reader.next()) reads.push_back(std::move(*rec));
    return reads;
}

// The paper-style experiment input: either pre-split build/ops files, or a
// single file split 80/20 in read order.
struct BenchInput {
    std::vector<ReadRecord> build;
    std::vector<ReadRecord> ops;
};

void add_input_flags(CLI::App* cmd, std::string& build_path, std::string& ops_path,
                     std::string& reads_path, bool ops_required) {
    auto* build_opt = cmd->add_option("--build", build_path, "reads used to create the graph");
    auto* ops_opt = cmd->add_option("--ops", ops_path, "held-out reads driving the operations");
    auto* reads_opt =
        cmd->add_option("--reads", reads_path, "single reads file, auto-split 80/20 in order");
    reads_opt->excludes(build_opt);
    build_opt->excludes(reads_opt);
    if (ops_required) ops_opt->needs(build_opt);
}

BenchInput load_bench_input(const std::string& build_path, const std::string& ops_path,
                            const std::string& reads_path, bool ops_needed) {
    BenchInput input;
    if (!reads_path.empty()) {
        std::vector<ReadRecord> all = load_reads(reads_path);
        size_t build_share = (all.size() * 4 + 4) / 5;
        input.build.assign(all.begin(), all.begin() + ptrdiff_t(build_share));
        input.ops.assign(all.begin() + ptrdiff_t(build_share), all.end());
    } else if (!build_path.empty()) {
        input.build = load_reads(build_path);
        if (!ops_path.empty()) input.ops = load_reads(ops_path);
    } else {
        throw CLI::ValidationError("give either --reads or --build [--ops]");
    }
    if (ops_needed && input.ops.empty())
        throw CLI::ValidationError("this benchmark needs held-out reads (--ops or --reads)");
    return input;
}

// Creation path for benchmarks: extract, sort, dedupe, then stream into the
// online builder.
DeBruijnGraph build_graph(const std::vector<ReadRecord>& reads, const BenchConfig& cfg) {
    std::vector<uint64_t> codes;
    for (const ReadRecord& rec : reads)
        for (KmerCode c : kmers_of_read(rec.seq, cfg.k, cfg.canonical)) codes.push_back(c.bits());
    std::sort(codes.begin(), codes.end());
    codes.erase(std::unique(codes.begin(), codes.end()), codes.end());

    DeBruijnGraph graph(cfg.k, cfg.canonical, cfg.epsilon, cfg.base);
    size_t i = 0;
    graph.build_from_kmer_stream([&]() -> std::optional<KmerCode> {
        if (i >= codes.size()) return std::nullopt;
        return KmerCode(codes[i++], cfg.k);
    });
    return graph;
}

int cmd_subset(const std::string& input, uint64_t n, const std::string& output) {
    size_t written = subset_reads(input, size_t(n), output);
    std::cout << "wrote " << written << " reads to " << output << "\n";
    return 0;
}

int cmd_split(const std::string& input, const std::string& out_build, const std::string& out_ops) {
    auto [build_count, ops_count] = split_80_20(input, out_build, out_ops);
    std::cout << "split " << (build_count + ops_count) << " reads: " << build_count << " -> "
              << out_build << ", " << ops_count << " -> " << out_ops << "\n";
    return 0;
}

int cmd_dump(const std::string& input, const std::string& output, const BenchConfig& cfg,
             uint64_t memory_budget) {
    uint64_t distinct = write_kmer_dump(input, cfg.k, cfg.canonical, output, memory_budget);
    std::cout << "wrote " << distinct << " distinct " << cfg.k << "-mers to " << output << "\n";
    return 0;
}

int cmd_build(const std::string& dump_path, const std::string& reads_path, const BenchConfig& cfg) {
    DeBruijnGraph graph(cfg.k, cfg.canonical, cfg.epsilon, cfg.base);
    BenchRow row;
    row.operation = "build";
    StopWatch watch;
    if (!dump_path.empty()) {
        KmerDumpReader reader(dump_path, cfg.k);
        graph.build_from_kmer_stream([&] { return reader.next(); });
        row.n_ops = reader.count();
    } else {
        SequenceReader reader(reads_path);
        while (auto rec = reader.next()) {
            row.n_ops += graph.add_read(rec->seq);
            ++row.n_reads;
        }
    }
    row.elapsed_seconds = watch.seconds();
    row.peak_logical_bytes = graph.nodes().peak_memory_bytes();
    row.final_logical_bytes = graph.nodes().memory_bytes();
    row.live_count = graph.node_count();
    report(cfg, row);
    return 0;
}

int cmd_insert_bench(const BenchInput& input, const BenchConfig& cfg) {
    DeBruijnGraph graph = build_graph(input.build, cfg);
    std::vector<const std::string*> ops_seqs;
    for (const ReadRecord& rec : input.ops) ops_seqs.push_back(&rec.seq);

    BenchRow row;
    row.operation = "insert";
    row.n_reads = input.build.size() + input.ops.size();
    StopWatch watch;
    for (const std::string* seq : ops_seqs) row.n_ops += graph.add_read(*seq);
    row.elapsed_seconds = watch.seconds();
    row.peak_logical_bytes = graph.nodes().peak_memory_bytes();
    row.final_logical_bytes = graph.nodes().memory_bytes();
    row.live_count = graph.node_count();
    report(cfg, row);
    return 0;
}

int cmd_delete_bench(const BenchInput& input, const BenchConfig& cfg) {
    DeBruijnGraph graph = build_graph(input.build, cfg);
    std::vector<KmerCode> targets;
    for (const ReadRecord& rec : input.ops)
        for (KmerCode c : kmers_of_read(rec.seq, cfg.k, false)) targets.push_back(c);

    BenchRow row;
    row.operation = "delete";
    row.n_reads = input.build.size() + input.ops.size();
    StopWatch watch;
    for (KmerCode c : targets) graph.remove_kmer(c);
    row.elapsed_seconds = watch.seconds();
    row.n_ops = targets.size();
    row.peak_logical_bytes = graph.nodes().peak_memory_bytes();
    row.final_logical_bytes = graph.nodes().memory_bytes();
    row.live_count = graph.node_count();
    report(cfg, row);
    return 0;
}

int cmd_query_bench(const BenchInput& input, const BenchConfig& cfg, uint64_t n_probes,
                    bool after_insert, bool after_delete, bool verify) {
    DeBruijnGraph graph = build_graph(input.build, cfg);

    // Oracle mirror of the graph, maintained through the same modifications.
    auto stored_bits = [&](KmerCode c) { return cfg.canonical ? canonical(c).bits() : c.bits(); };
    std::unordered_set<uint64_t> oracle;
    for (const ReadRecord& rec : input.build)
        for (KmerCode c : kmers_of_read(rec.seq, cfg.k, cfg.canonical)) oracle.insert(c.bits());

    std::string operation = "query";
    if (after_insert) {
        for (const ReadRecord& rec : input.ops) {
            graph.add_read(rec.seq);
            for (KmerCode c : kmers_of_read(rec.seq, cfg.k, cfg.canonical)) oracle.insert(c.bits());
        }
        operation += "+after-insert";
    }
    if (after_delete) {
        for (const ReadRecord& rec : input.ops) {
            for (KmerCode c : kmers_of_read(rec.seq, cfg.k, false)) {
                graph.remove_kmer(c);
                oracle.erase(stored_bits(c));
            }
        }
        operation += "+after-delete";
    }

    // Probe batch: hit_rate of the probes are live keys, the rest random
    // absent codes; everything is materialized before the timed loop.
    std::vector<uint64_t> pool(oracle.begin(), oracle.end());
    std::sort(pool.begin(), pool.end());
    std::mt19937_64 rng(cfg.seed);
    std::bernoulli_distribution want_hit(cfg.hit_rate);
    const uint64_t mask = kmer_mask(cfg.k);
    std::vector<uint64_t> probes;
    std::vector<char> expected;
    probes.reserve(n_probes);
    for (uint64_t i = 0; i < n_probes; ++i) {
        uint64_t bits;
        if (!pool.empty() && want_hit(rng)) {
            bits = pool[rng() % pool.size()];
        } else {
            bits = rng() & mask;
            for (int attempt = 0; attempt < 16 && oracle.count(stored_bits(KmerCode(bits, cfg.k)));
                 ++attempt)
                bits = rng() & mask;
        }
        probes.push_back(bits);
        expected.push_back(oracle.count(stored_bits(KmerCode(bits, cfg.k))) ? 1 : 0);
    }

    std::vector<char> answers(probes.size());
    StopWatch watch;
    for (size_t i = 0; i < probes.size(); ++i)
        answers[i] = graph.contains_kmer(KmerCode(probes[i], cfg.k)) ? 1 : 0;
    double elapsed = watch.seconds();

    uint64_t mismatches = 0;
    if (verify) {
        for (size_t i = 0; i < probes.size(); ++i)
            if (answers[i] != expected[i]) ++mismatches;
    }

    BenchRow row;
    row.operation = operation;
    row.n_reads = input.build.size() + input.ops.size();
    row.n_ops = probes.size();
    row.elapsed_seconds = elapsed;
    row.peak_logical_bytes = graph.nodes().peak_memory_bytes();
    row.final_logical_bytes = graph.nodes().memory_bytes();
    row.live_count = graph.node_count();
    report(cfg, row);

    if (verify) {
        std::cout << "verify: " << mismatches << " mismatches over " << probes.size()
                  << " probes\n";
        if (mismatches > 0)
            throw VerificationFailure("membership answers diverged from the oracle");
    }
    return 0;
}

int cmd_compact(const std::string& dump_path, const std::string& ops_path, const BenchConfig& cfg,
                bool after_insert, bool after_delete) {
    DeBruijnGraph graph(cfg.k, cfg.canonical, cfg.epsilon, cfg.base);
    KmerDumpReader reader(dump_path, cfg.k);
    graph.build_from_kmer_stream([&] { return reader.next(); });

    uint64_t n_reads = 0;
    if (!ops_path.empty() && (after_insert || after_delete)) {
        std::vector<ReadRecord> ops = load_reads(ops_path);
        n_reads = ops.size();
        if (after_insert)
            for (const ReadRecord& rec : ops) graph.add_read(rec.seq);
        if (after_delete)
            for (const ReadRecord& rec : ops)
                for (KmerCode c : kmers_of_read(rec.seq, cfg.k, false)) graph.remove_kmer(c);
    }

    uint64_t slots_before = graph.nodes().slot_count();
    uint64_t bytes_before = graph.nodes().memory_bytes();
    BenchRow row;
    row.operation = "compact";
    row.n_reads = n_reads;
    StopWatch watch;
    graph.compact();
    row.elapsed_seconds = watch.seconds();
    row.n_ops = slots_before - graph.nodes().slot_count();  // slots reclaimed
    row.peak_logical_bytes = graph.nodes().peak_memory_bytes();
    row.final_logical_bytes = graph.nodes().memory_bytes();
    row.live_count = graph.node_count();
    std::cout << "compact: slots " << slots_before << " -> " << graph.nodes().slot_count()
              << ", logical bytes " << bytes_before << " -> " << graph.nodes().memory_bytes()
              << "\n";
    report(cfg, row);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"de Bruijn graph on a learned-index set: build and benchmark tools"};
    app.require_subcommand(1);

    BenchConfig cfg;
    std::string input, output, out_build, out_ops;
    std::string dump_path, reads_path, build_path, ops_path;
    uint64_t n = 0;
    uint64_t memory_budget = kDefaultDumpMemoryBudget;
    uint64_t n_probes = 100'000;
    bool after_insert = false, after_delete = false, verify = false;

    auto* subset = app.add_subcommand("subset", "copy the first N reads of a FASTA/FASTQ file");
    subset->add_option("input", input, "input reads")->required();
    subset->add_option("output", output, "output reads")->required();
    subset->add_option("--n", n, "number of reads to keep")->required();

    auto* split = app.add_subcommand("split", "split reads 80/20 in order (build/ops parts)");
    split->add_option("input", input, "input reads")->required();
    split->add_option("out_build", out_build, "80% part")->required();
    split->add_option("out_ops", out_ops, "20% part")->required();

    auto* dump = app.add_subcommand("dump", "extract, sort and dump the distinct k-mers of reads");
    dump->add_option("input", input, "input reads")->required();
    dump->add_option("output", output, "k-mer dump to write")->required();
    add_structure_flags(dump, cfg);
    dump->add_option("--memory-budget", memory_budget,
                     "bytes of k-mer buffer before spilling sorted runs");

    auto* build = app.add_subcommand("build", "build a graph and report time and memory");
    auto* build_dump_opt = build->add_option("--dump", dump_path, "sorted k-mer dump (online build)");
    auto* build_reads_opt =
        build->add_option("--reads", reads_path, "reads file (incremental build)");
    build_dump_opt->excludes(build_reads_opt);
    build_reads_opt->excludes(build_dump_opt);
    add_structure_flags(build, cfg);
    add_report_flags(build, cfg);

    auto* ins = app.add_subcommand("insert-bench", "time read insertions into a prebuilt graph");
    add_input_flags(ins, build_path, ops_path, reads_path, true);
    add_structure_flags(ins, cfg);
    add_report_flags(ins, cfg);

    auto* del = app.add_subcommand("delete-bench", "time k-mer deletions from a prebuilt graph");
    add_input_flags(del, build_path, ops_path, reads_path, true);
    add_structure_flags(del, cfg);
    add_report_flags(del, cfg);

    auto* query = app.add_subcommand("query-bench", "time membership probes, optionally verified");
    add_input_flags(query, build_path, ops_path, reads_path, false);
    add_structure_flags(query, cfg);
    add_report_flags(query, cfg);
    query->add_option("--probes", n_probes, "number of membership probes");
    query->add_option("--hit-rate", cfg.hit_rate, "fraction of probes that are live keys")
        ->check(CLI::Range(0.0, 1.0));
    query->add_option("--seed", cfg.seed, "workload RNG seed");
    query->add_flag("--after-insert", after_insert, "apply the ops reads as insertions first");
    query->add_flag("--after-delete", after_delete, "apply the ops k-mers as deletions first");
    query->add_flag("--verify", verify, "check every answer against an oracle set");

    auto* compact = app.add_subcommand("compact", "drop tombstones and duplicates, rebuild index");
    compact->add_option("--dump", dump_path, "sorted k-mer dump to load")->required();
    compact->add_option("--ops", ops_path, "reads applied as modifications before compacting");
    compact->add_flag("--after-insert", after_insert, "apply ops reads as insertions");
    compact->add_flag("--after-delete", after_delete, "apply ops k-mers as deletions");
    add_structure_flags(compact, cfg);
    add_report_flags(compact, cfg);

    try {
        app.parse(argc, argv);

        if (app.got_subcommand(subset)) return cmd_subset(input, n, output);
        if (app.got_subcommand(split)) return cmd_split(input, out_build, out_ops);
        if (app.got_subcommand(dump)) return cmd_dump(input, output, cfg, memory_budget);
        if (app.got_subcommand(build)) {
            if (dump_path.empty() && reads_path.empty())
                throw CLI::ValidationError("build needs --dump or --reads");
            return cmd_build(dump_path, reads_path, cfg);
        }
        if (app.got_subcommand(ins))
            return cmd_insert_bench(load_bench_input(build_path, ops_path, reads_path, true), cfg);
        if (app.got_subcommand(del))
            return cmd_delete_bench(load_bench_input(build_path, ops_path, reads_path, true), cfg);
        if (app.got_subcommand(query)) {
            bool ops_needed = after_insert || after_delete;
            return cmd_query_bench(load_bench_input(build_path, ops_path, reads_path, ops_needed),
                                   cfg, n_probes, after_insert, after_delete, verify);
        }
        if (app.got_subcommand(compact))
            return cmd_compact(dump_path, ops_path, cfg, after_insert, after_delete);
        return 2;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const VerificationFailure& e) {
        std::cerr << "verification failed: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
