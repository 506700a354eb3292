#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "genemask/analysis.hpp"
#include "genemask/corpus.hpp"
#include "genemask/counts.hpp"
#include "genemask/masking.hpp"
#include "genemask/npmi.hpp"

namespace genemask {

// GENEMASK_WORKERS environment override, else hardware concurrency, >= 1.
int default_workers();

struct CountJob {
    std::string fasta;
    std::string out;
    int kmax = 10;
    int workers = 1;
};
// Counts the FASTA with record-level sharding and writes the counts file.
CountsBundle run_count(const CountJob& job);

struct GrankJob {
    std::string counts;
    std::string out;
    std::uint64_t c = 101;
    int workers = 1;
};
Grank run_grank(const GrankJob& job);

struct VocabJob {
    std::string counts;
    std::string out;
    std::uint64_t c = 101;
    std::uint64_t min_freq = 10000;
    std::size_t size = 40000;
    int workers = 1;
};
// Returns true when the vocabulary came up short of the requested size.
bool run_vocab(const VocabJob& job);

struct SegmentJob {
    std::string fasta;
    std::string out;
    std::uint64_t seed = 42;
    std::string boundaries; // optional boundary TSV
};
std::size_t run_segment(const SegmentJob& job); // segments written

struct MaskJob {
    std::string segments;
    std::string grank; // required for the npmi-guided strategy
    std::string vocab; // required for the vocabulary strategy
    std::string out;
    MaskConfig config;
    int workers = 1;
};
// One JSONL line per segment, input order. Every segment gets its own RNG
// stream from (seed, chrom:start), so worker count cannot change the bytes;
// the echoed seed field stays the run-level seed.
std::size_t run_mask(const MaskJob& job);

struct OverlapJob {
    std::string reference;
    std::string probe;
    std::string out_json;
    std::string out_ratios; // optional per-example TSV
    int n = 15;
};
OverlapReport run_overlap(const OverlapJob& job);

struct MotifJob {
    std::string grank;
    std::string pattern;
    std::string out; // optional; callers may print the returned rows instead
    bool top5 = false;
};
std::vector<MotifRank> run_motif(const MotifJob& job);

} // namespace genemask
