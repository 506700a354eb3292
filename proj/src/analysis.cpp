#include "genemask/analysis.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <unordered_set>

#include "genemask/corpus.hpp"

namespace genemask {

namespace {

void chomp(std::string& line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
        line.pop_back();
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> cols;
    std::size_t pos = 0;
    for (;;) {
        const auto tab = line.find('\t', pos);
        if (tab == std::string_view::npos) {
            cols.push_back(line.substr(pos));
            return cols;
        }
        cols.push_back(line.substr(pos, tab - pos));
        pos = tab + 1;
    }
}

std::string fmt9(double v) {
    if (v == 0.0) v = 0.0;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

} // namespace

std::vector<SequenceExample> read_sequence_file(const std::string& path) {
    std::ifstream probe(path, std::ios::binary);
    if (!probe) throw IoError("cannot open '" + path + "'");
    std::string first;
    while (std::getline(probe, first)) {
        chomp(first);
        if (!first.empty()) break;
    }
    probe.close();

    std::vector<SequenceExample> out;
    if (first.empty()) return out;

    if (first[0] == '>') {
        for (auto& r : read_fasta(path))
            out.push_back(SequenceExample{std::move(r.id), std::move(r.sequence)});
        return out;
    }

    const auto ncols = split_tabs(first).size();
    if (ncols == 4) {
        for (auto& s : read_segments(path))
            out.push_back(SequenceExample{s.chrom + ":" + std::to_string(s.start),
                                          std::move(s.sequence)});
        return out;
    }
    if (ncols == 2) {
        std::ifstream in(path, std::ios::binary);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            chomp(line);
            if (line.empty()) continue;
            const auto cols = split_tabs(line);
            if (cols.size() != 2)
                throw FormatError("expected 'id\\tsequence'", lineno);
            out.push_back(SequenceExample{std::string(cols[0]), std::string(cols[1])});
        }
        if (in.bad()) throw IoError("read failed for '" + path + "'");
        return out;
    }
    throw FormatError("'" + path + "' is neither FASTA nor a known TSV layout");
}

namespace {

// Distinct n-gram membership. A flat bitset is affordable through n=15
// (128 MiB of bits); beyond that fall back to hashing.
class NgramSet {
public:
    explicit NgramSet(int n) : n_(n) {
        if (n < 1 || n > 31) throw LengthError("n-gram length outside [1, 31]");
        if (n <= 15)
            bits_.assign(static_cast<std::size_t>(
                             ((std::uint64_t{1} << (2 * n)) + 63) / 64),
                         0);
    }

    // Returns true if the code was new.
    bool insert(std::uint64_t code) {
        if (!bits_.empty()) {
            auto& word = bits_[code >> 6];
            const std::uint64_t bit = std::uint64_t{1} << (code & 63);
            if (word & bit) return false;
            word |= bit;
            ++distinct_;
            return true;
        }
        const bool fresh = hashed_.insert(code).second;
        distinct_ += fresh;
        return fresh;
    }

    bool contains(std::uint64_t code) const {
        if (!bits_.empty())
            return bits_[code >> 6] & (std::uint64_t{1} << (code & 63));
        return hashed_.count(code) != 0;
    }

    std::uint64_t distinct() const { return distinct_; }
    int n() const { return n_; }

private:
    int n_;
    std::uint64_t distinct_ = 0;
    std::vector<std::uint64_t> bits_;
    std::unordered_set<std::uint64_t> hashed_;
};

// scan_windows tops out at the packed-kmer limit; this variant has no LUT
// round trip through PackedKmer and supports n up to 31.
template <typename Fn>
void scan_ngrams(std::string_view seq, int n, Fn&& fn) {
    const std::uint64_t mask =
        n >= 32 ? ~std::uint64_t{0} : (std::uint64_t{1} << (2 * n)) - 1;
    std::uint64_t code = 0;
    std::size_t run = 0;
    for (const char c : seq) {
        const std::uint8_t b = base_code(c);
        if (b == kInvalidBase) {
            run = 0;
            code = 0;
            continue;
        }
        code = ((code << 2) | b) & mask;
        if (++run >= static_cast<std::size_t>(n)) fn(code);
    }
}

double median_of_sorted(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const std::size_t mid = v.size() / 2;
    if (v.size() % 2) return v[mid];
    return (v[mid - 1] + v[mid]) / 2.0;
}

double p95_of_sorted(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    const auto rank = static_cast<std::size_t>(
        std::ceil(0.95 * static_cast<double>(v.size())));
    return v[rank - 1];
}

} // namespace

double space_coverage(std::uint64_t distinct, int n) {
    if (n < 1 || n > 31) throw LengthError("n-gram length outside [1, 31]");
    return static_cast<double>(distinct) /
           static_cast<double>(std::uint64_t{1} << (2 * n));
}

OverlapReport ngram_overlap(const std::vector<SequenceExample>& reference,
                            const std::vector<SequenceExample>& probe, int n) {
    NgramSet ref_set(n);
    for (const auto& ex : reference)
        scan_ngrams(ex.sequence, n, [&](std::uint64_t code) { ref_set.insert(code); });

    OverlapReport report;
    report.n = n;
    report.n_examples = probe.size();
    report.reference_distinct = ref_set.distinct();
    report.space_coverage = space_coverage(ref_set.distinct(), n);

    std::vector<double> measured;
    measured.reserve(probe.size());
    for (const auto& ex : probe) {
        std::unordered_set<std::uint64_t> grams;
        scan_ngrams(ex.sequence, n, [&](std::uint64_t code) { grams.insert(code); });
        if (grams.empty()) {
            ++report.n_short;
            report.ratios.emplace_back(ex.id, 0.0);
            continue;
        }
        std::uint64_t hits = 0;
        for (const auto code : grams) hits += ref_set.contains(code);
        const double ratio =
            static_cast<double>(hits) / static_cast<double>(grams.size());
        report.ratios.emplace_back(ex.id, ratio);
        measured.push_back(ratio);
    }
    std::sort(measured.begin(), measured.end());
    report.median = median_of_sorted(measured);
    report.p95 = p95_of_sorted(measured);
    return report;
}

OverlapReport ngram_overlap_files(const std::string& reference_path,
                                  const std::string& probe_path, int n) {
    return ngram_overlap(read_sequence_file(reference_path),
                         read_sequence_file(probe_path), n);
}

std::vector<std::string> filter_high_overlap(const OverlapReport& report) {
    std::vector<std::string> retained;
    if (report.ratios.empty()) return retained;

    // The percentile cut is strictly-above the nearest-rank 95th percentile
    // of the full ratio distribution. Strict comparison keeps tie groups
    // sitting on the percentile value, so a flat (e.g. all-zero)
    // distribution removes nothing.
    std::vector<double> sorted;
    sorted.reserve(report.ratios.size());
    for (const auto& [id, r] : report.ratios) sorted.push_back(r);
    std::sort(sorted.begin(), sorted.end());
    const double cut = p95_of_sorted(sorted);

    for (const auto& [id, ratio] : report.ratios) {
        if (ratio > 0.5) continue;
        if (ratio > cut) continue;
        retained.push_back(id);
    }
    return retained;
}

void write_overlap_json(const OverlapReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "{\"median\":" << fmt9(report.median) << ",\"p95\":" << fmt9(report.p95)
        << ",\"n_examples\":" << report.n_examples
        << ",\"reference_distinct\":" << report.reference_distinct
        << ",\"space_coverage\":" << fmt9(report.space_coverage) << "}\n";
    if (!out) throw IoError("write failed for '" + path + "'");
}

void write_overlap_ratios(const OverlapReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "id\tratio\n";
    for (const auto& [id, ratio] : report.ratios)
        out << id << '\t' << fmt9(ratio) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

const std::vector<std::uint8_t>& iupac_codes(char c) {
    // Indexed by base codes: A=0, C=1, G=2, T=3.
    static const std::array<std::pair<char, std::vector<std::uint8_t>>, 15> table{{
        {'A', {0}},
        {'C', {1}},
        {'G', {2}},
        {'T', {3}},
        {'R', {0, 2}},
        {'Y', {1, 3}},
        {'S', {1, 2}},
        {'W', {0, 3}},
        {'K', {2, 3}},
        {'M', {0, 1}},
        {'B', {1, 2, 3}},
        {'D', {0, 2, 3}},
        {'H', {0, 1, 3}},
        {'V', {0, 1, 2}},
        {'N', {0, 1, 2, 3}},
    }};
    const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    for (const auto& [code, bases] : table)
        if (code == u) return bases;
    throw InvalidIupacError(c);
}

MotifPattern::MotifPattern(std::string pattern) : pattern_(std::move(pattern)) {
    if (pattern_.empty()) throw InvalidIupacError('\0');
    for (const char c : pattern_) iupac_codes(c);
}

std::uint64_t MotifPattern::expansion_size() const {
    std::uint64_t total = 1;
    for (const char c : pattern_) total *= iupac_codes(c).size();
    return total;
}

std::string MotifPattern::core() const {
    std::size_t best_start = 0, best_len = 0, start = 0, len = 0;
    for (std::size_t i = 0; i <= pattern_.size(); ++i) {
        if (i < pattern_.size() && is_valid_base(pattern_[i])) {
            if (len == 0) start = i;
            ++len;
            if (len > best_len) {
                best_len = len;
                best_start = start;
            }
        } else {
            len = 0;
        }
    }
    std::string core = pattern_.substr(best_start, best_len);
    for (auto& c : core) c = "ACGT"[base_code(c)];
    return core;
}

namespace {

// Walks the cartesian product of per-position base choices, emitting each
// combination as a packed code of `positions.size()` bases.
template <typename Fn>
void expand_product(const std::vector<const std::vector<std::uint8_t>*>& positions,
                    Fn&& fn) {
    std::vector<std::size_t> odometer(positions.size(), 0);
    for (;;) {
        std::uint32_t code = 0;
        for (std::size_t i = 0; i < positions.size(); ++i)
            code = (code << 2) | (*positions[i])[odometer[i]];
        fn(code);
        std::size_t i = positions.size();
        while (i > 0) {
            --i;
            if (++odometer[i] < positions[i]->size()) break;
            odometer[i] = 0;
            if (i == 0) return;
        }
    }
}

} // namespace

std::vector<MotifRank> motif_ranks(const MotifPattern& pattern, const Grank& grank,
                                   bool top5_only) {
    const std::string& p = pattern.pattern();
    std::set<std::uint32_t> codes;

    if (p.size() >= 6) {
        for (std::size_t off = 0; off + 6 <= p.size(); ++off) {
            std::vector<const std::vector<std::uint8_t>*> positions;
            for (std::size_t j = 0; j < 6; ++j)
                positions.push_back(&iupac_codes(p[off + j]));
            expand_product(positions, [&](std::uint32_t code) { codes.insert(code); });
        }
    } else {
        // Instantiations are shorter than a 6-mer: surround each one with
        // every completion at every alignment.
        static const std::vector<std::uint8_t> any{0, 1, 2, 3};
        const std::size_t free_count = 6 - p.size();
        for (std::size_t align = 0; align <= free_count; ++align) {
            std::vector<const std::vector<std::uint8_t>*> positions;
            for (std::size_t j = 0; j < align; ++j) positions.push_back(&any);
            for (const char c : p) positions.push_back(&iupac_codes(c));
            for (std::size_t j = align; j < free_count; ++j) positions.push_back(&any);
            expand_product(positions, [&](std::uint32_t code) { codes.insert(code); });
        }
    }

    std::vector<MotifRank> out;
    out.reserve(codes.size());
    for (const auto code : codes)
        out.push_back(MotifRank{PackedKmer{code, 6}, grank.rank_of(code),
                                grank.npmi_of(code)});
    std::sort(out.begin(), out.end(), [](const MotifRank& a, const MotifRank& b) {
        return a.rank < b.rank;
    });
    if (top5_only && out.size() > 5) out.resize(5);
    return out;
}

std::string motif_ranks_to_string(const std::vector<MotifRank>& ranks) {
    std::string out = "kmer\trank\tnpmi\n";
    for (const auto& r : ranks) {
        out += decode_kmer(r.kmer);
        out += '\t';
        out += std::to_string(r.rank);
        out += '\t';
        out += fmt9(r.npmi);
        out += '\n';
    }
    return out;
}

void write_motif_ranks(const std::vector<MotifRank>& ranks,
                       const std::string& path) {
    const std::string text = motif_ranks_to_string(ranks);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

} // namespace genemask
