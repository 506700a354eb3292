#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "genemask/error.hpp"

namespace genemask {

struct FastaRecord {
    std::string id;       // full header text after '>'
    std::string sequence; // raw bases, may contain N / lowercase
};

// Streams records in file order, one callback per record; sequence lines are
// concatenated. warn() receives non-fatal oddities (currently empty records).
void stream_fasta(const std::string& path,
                  const std::function<void(FastaRecord&&)>& fn,
                  const std::function<void(const std::string&)>& warn = {});

std::vector<FastaRecord> read_fasta(const std::string& path);

// One pretraining segment cut from a record. Always 5..510 bases, pure ACGT.
struct Segment {
    std::string chrom;
    std::uint64_t start = 0; // 0-based offset into the source record
    std::uint32_t length = 0;
    std::string sequence;

    friend bool operator==(const Segment&, const Segment&) = default;
};

// Sorted gene-boundary positions per chromosome. A boundary at position b is
// the first base of the next gene: a segment may end at b but not cross it.
class GeneBoundarySet {
public:
    GeneBoundarySet() = default;

    void add(const std::string& chrom, std::uint64_t position);
    void finalize(); // sort + dedupe; add() after this is an error

    // First boundary strictly greater than pos, if any.
    std::optional<std::uint64_t> next_after(const std::string& chrom,
                                            std::uint64_t pos) const;

    bool empty() const { return by_chrom_.empty(); }
    const std::vector<std::uint64_t>* positions(const std::string& chrom) const;

    // TSV with columns chrom, position; '#' lines are comments.
    static GeneBoundarySet load(const std::string& path);
    void save(const std::string& path) const;

private:
    std::map<std::string, std::vector<std::uint64_t>> by_chrom_;
    bool finalized_ = false;
};

// Tiles one record into segments. From a random 1..1000 start, each step
// draws L = 510 on a coin flip, else L ~ Uniform{5..510}; with boundaries, L
// is capped at the distance to the next boundary (a capped length under 5
// skips to the boundary instead of emitting). Segments with non-ACGT
// characters are dropped but still advance the cursor. The final segment is
// clamped to the record end. Deterministic in (record id, seed).
std::vector<Segment> build_segments_for_record(const FastaRecord& record,
                                               std::uint64_t seed,
                                               const GeneBoundarySet* boundaries = nullptr);

std::vector<Segment> build_segments(const std::vector<FastaRecord>& records,
                                    std::uint64_t seed,
                                    const GeneBoundarySet* boundaries = nullptr);

// TSV with columns chrom, start, length, sequence; no header line.
void write_segments(const std::vector<Segment>& segments, const std::string& path);
std::vector<Segment> read_segments(const std::string& path);

} // namespace genemask
