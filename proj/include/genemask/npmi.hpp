#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "genemask/counts.hpp"
#include "genemask/sequence.hpp"

namespace genemask {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Window-frequency probabilities p_k(w) = f_k(w) / N_k, plus the rare-token
// threshold c used by the NPMI discount. Holds a reference; the bundle must
// outlive the model.
class ProbabilityModel {
public:
    explicit ProbabilityModel(const CountsBundle& bundle, std::uint64_t c = 101)
        : bundle_(&bundle), c_(c) {}

    int kmax() const { return bundle_->kmax(); }
    std::uint64_t c() const { return c_; }
    const CountsBundle& bundle() const { return *bundle_; }

    std::uint64_t freq(PackedKmer w) const { return bundle_->table(w.k).count(w); }

    double log_p(PackedKmer w) const;

private:
    const CountsBundle* bundle_;
    std::uint64_t c_;
};

struct PmiResult {
    PackedKmer kmer;
    std::uint64_t frequency = 0;
    double pmi = kNegInf;
    double npmi = kNegInf;

    friend bool operator==(const PmiResult&, const PmiResult&) = default;
};

// log p(w) minus the best log-probability over all non-identity contiguous
// segmentations, by interval dynamic programming. A zero-frequency w scores
// -infinity outright.
double pmi(PackedKmer w, const ProbabilityModel& model);

// Same quantity by brute force over all 2^(k-1)-1 segmentations. This is the
// reference the DP is tested against; visited counts the segmentations.
double pmi_exhaustive(PackedKmer w, const ProbabilityModel& model,
                      std::uint64_t* visited = nullptr);

// Frequency discount log(f) / (log(c) + log(f)); monotone in f, 0.5 at f==c,
// 0 at f==1.
double npmi_discount(std::uint64_t f, std::uint64_t c);

double npmi(PackedKmer w, const ProbabilityModel& model);

PmiResult score_kmer(PackedKmer w, const ProbabilityModel& model);

// All 4096 6-mers ranked by descending NPMI; ties by code. Rank is 1-based.
class Grank {
public:
    static Grank build(const ProbabilityModel& model, int workers = 1);
    static Grank from_entries(std::vector<PmiResult> entries);

    const std::vector<PmiResult>& entries() const { return entries_; }
    const PmiResult& at_rank(std::uint32_t rank) const; // 1-based

    double npmi_of(std::uint32_t code) const { return npmi_by_code_[code]; }
    std::uint32_t rank_of(std::uint32_t code) const { return rank_by_code_[code]; }

    // TSV: rank\tkmer\tfrequency\tpmi\tnpmi, header line, 9-decimal reals.
    void save(const std::string& path) const;
    static Grank load(const std::string& path);

private:
    Grank() = default;
    void index();

    std::vector<PmiResult> entries_;       // rank order
    std::vector<double> npmi_by_code_;     // 4096
    std::vector<std::uint32_t> rank_by_code_;
};

// Top NPMI-ranked k-mers (2 <= k <= 10) with corpus frequency >= min_freq,
// plus an O(1) per-length membership index for longest-match tokenization.
class MaskingVocabulary {
public:
    static constexpr int kMinLen = 2;
    static constexpr int kMaxLen = 10;

    // truncated (when non-null) reports whether fewer than `size` k-mers were
    // eligible, i.e. the vocabulary is smaller than requested.
    static MaskingVocabulary build(const ProbabilityModel& model,
                                   std::uint64_t min_freq = 10000,
                                   std::size_t size = 40000, int workers = 1,
                                   bool* truncated = nullptr);
    static MaskingVocabulary from_entries(std::vector<PmiResult> entries);
    static MaskingVocabulary from_strings(const std::vector<std::string>& kmers);

    const std::vector<PmiResult>& entries() const { return entries_; }
    bool contains(int k, std::uint32_t code) const {
        if (k < kMinLen || k > kMaxLen) return false;
        return members_[static_cast<std::size_t>(k - kMinLen)]
                       [static_cast<std::size_t>(code)];
    }
    std::vector<std::size_t> length_histogram() const; // index = k, 0..10

    // TSV: kmer\tlength\tfrequency\tnpmi, header line, rank order.
    void save(const std::string& path) const;
    static MaskingVocabulary load(const std::string& path);

private:
    MaskingVocabulary();
    void index();

    std::vector<PmiResult> entries_; // rank order
    std::vector<std::vector<bool>> members_; // per length 2..10, by code
};

} // namespace genemask
