#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "genemask/npmi.hpp"
#include "genemask/sequence.hpp"

namespace genemask {

struct SequenceExample {
    std::string id;
    std::string sequence;
};

// Accepts FASTA ('>' headers), the 4-column segments TSV (id becomes
// chrom:start), or a plain 2-column id\tsequence TSV; format is detected
// from the first data line.
std::vector<SequenceExample> read_sequence_file(const std::string& path);

struct OverlapReport {
    int n = 15;
    // Every probe example in file order. Examples too short to hold an
    // n-gram get ratio 0 here and are tallied in n_short; median/p95 are
    // computed over the examples that do have n-grams.
    std::vector<std::pair<std::string, double>> ratios;
    double median = 0.0;
    double p95 = 0.0; // nearest-rank 95th percentile
    std::size_t n_examples = 0;
    std::size_t n_short = 0;
    std::uint64_t reference_distinct = 0;
    double space_coverage = 0.0;
};

// Exact distinct-n-gram containment of probe examples in the reference set.
// n-grams are drawn from maximal ACGT runs; n up to 31.
OverlapReport ngram_overlap(const std::vector<SequenceExample>& reference,
                            const std::vector<SequenceExample>& probe,
                            int n = 15);
OverlapReport ngram_overlap_files(const std::string& reference_path,
                                  const std::string& probe_path, int n = 15);

double space_coverage(std::uint64_t distinct, int n);

// Ids that survive both removal rules: ratio > 0.5, and ratio strictly above
// the nearest-rank 95th percentile of all ratios. Ties sitting exactly on
// the percentile are retained, so flat distributions keep everything.
std::vector<std::string> filter_high_overlap(const OverlapReport& report);

// JSON object {"median":..,"p95":..,"n_examples":..,"reference_distinct":..,
// "space_coverage":..}, reals at 9 decimals.
void write_overlap_json(const OverlapReport& report, const std::string& path);
// TSV id\tratio with header, 9-decimal ratios, probe order.
void write_overlap_ratios(const OverlapReport& report, const std::string& path);

// Degenerate-base codes A C G T R Y S W K M B D H V N, case-insensitive.
const std::vector<std::uint8_t>& iupac_codes(char c); // base codes, sorted

class MotifPattern {
public:
    explicit MotifPattern(std::string pattern);

    const std::string& pattern() const { return pattern_; }
    std::uint64_t expansion_size() const; // product of per-position choices
    std::string core() const;             // longest unambiguous ACGT run

private:
    std::string pattern_;
};

struct MotifRank {
    PackedKmer kmer;
    std::uint32_t rank = 0;
    double npmi = 0.0;

    friend bool operator==(const MotifRank&, const MotifRank&) = default;
};

// Every distinct 6-mer that can appear as a window of an instantiation of
// the pattern (for patterns shorter than 6: every 6-mer containing an
// instantiation), with its rank; ascending rank, optionally the top 5 only.
std::vector<MotifRank> motif_ranks(const MotifPattern& pattern, const Grank& grank,
                                   bool top5_only = false);

// TSV kmer\trank\tnpmi with header.
void write_motif_ranks(const std::vector<MotifRank>& ranks,
                       const std::string& path);
std::string motif_ranks_to_string(const std::vector<MotifRank>& ranks);

} // namespace genemask
