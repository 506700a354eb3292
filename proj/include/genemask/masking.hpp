#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "genemask/npmi.hpp"
#include "genemask/sequence.hpp"

namespace genemask {

enum class Strategy { genemask, random, pmivoc };

std::string_view strategy_name(Strategy s);
Strategy strategy_from_name(std::string_view name);

// How the high half of the centers is sized when the budget m is odd.
enum class HighRule { ceil_half, floor_half };

struct MaskConfig {
    Strategy strategy = Strategy::genemask;
    double mlm_prob = 0.01765;
    int k = 6;
    MappingMode mapping = MappingMode::exact;
    HighRule high_rule = HighRule::ceil_half;
    std::uint64_t seed = 42;

    MaskConfig() = default;
    explicit MaskConfig(Strategy s)
        : strategy(s), mlm_prob(default_mlm_prob(s)) {}

    // 1.765% of token positions for the NPMI-guided plan (15% expected token
    // coverage / 8.5 expected span); 2.5% of nucleotides otherwise.
    static double default_mlm_prob(Strategy s);
    void validate() const;
};

enum class CenterSet { high, low };

struct MaskCenter {
    std::size_t i = 0;   // nucleotide index of the center
    std::size_t s = 0;   // chosen token start (npmi-guided strategy only)
    double mpmi = kNegInf;
    CenterSet set = CenterSet::low;

    friend bool operator==(const MaskCenter&, const MaskCenter&) = default;
};

struct MaskPlan {
    std::string seq_id;
    std::size_t n_tokens = 0;
    std::vector<std::size_t> masked;  // sorted, deduplicated token starts
    std::vector<MaskCenter> centers;  // sorted by nucleotide index
    Strategy strategy = Strategy::genemask;
    std::uint64_t seed = 0;
    // Sum of nominal span widths before the union removes overlaps: 2k-1 per
    // high center, k per low/random center, token length + k - 1 per
    // vocabulary center. Edge clamping does not reduce it.
    std::size_t pre_dedup_count = 0;

    friend bool operator==(const MaskPlan&, const MaskPlan&) = default;
};

// Center budgets. The guard epsilon keeps ceil from charging a whole extra
// center when prob*n lands a few ulps above an integer (0.025*1000 does).
std::size_t round_half_up_budget(double prob, std::size_t n); // min 1
std::size_t ceil_budget(double prob, std::size_t n);          // min 1

// Token span masked around a chosen high-scoring token: [s-(k-1), s+(k-1)]
// clamped to valid starts, 2k-1 tokens in the interior.
TokenSpan high_span(std::size_t s, std::size_t n_tokens, int k);

MaskPlan plan_genemask(const TokenizedSequence& tokens, const Grank& grank,
                       const MaskConfig& config);

MaskPlan plan_random(const TokenizedSequence& tokens, const MaskConfig& config);

// A maximal-munch vocabulary token: seq[start, start+length).
struct PmiToken {
    std::size_t start = 0;
    std::size_t length = 0;

    friend bool operator==(const PmiToken&, const PmiToken&) = default;
};

// Greedy left-to-right longest match, lengths 10 down to 2, 1-mer fallback.
// The token substrings concatenate back to seq exactly.
std::vector<PmiToken> tokenize_pmivoc(std::string_view seq,
                                      const MaskingVocabulary& vocab);

MaskPlan plan_pmivoc(const TokenizedSequence& tokens,
                     const MaskingVocabulary& vocab, const MaskConfig& config);

// One JSON object, no trailing newline. Field order is fixed: seq_id,
// n_tokens, masked, centers, strategy, seed. Center objects carry i/s/mpmi/set
// for the npmi-guided strategy and just i otherwise; mpmi uses 9 decimals,
// non-finite mpmi serializes as null.
std::string to_jsonl(const MaskPlan& plan);

} // namespace genemask
