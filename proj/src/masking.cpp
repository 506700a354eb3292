#include "genemask/masking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "genemask/rng.hpp"

namespace genemask {

std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::genemask: return "genemask";
        case Strategy::random: return "random";
        case Strategy::pmivoc: return "pmivoc";
    }
    throw Error("unknown strategy");
}

Strategy strategy_from_name(std::string_view name) {
    if (name == "genemask") return Strategy::genemask;
    if (name == "random") return Strategy::random;
    if (name == "pmivoc") return Strategy::pmivoc;
    throw Error("unknown strategy '" + std::string(name) + "'");
}

double MaskConfig::default_mlm_prob(Strategy s) {
    return s == Strategy::genemask ? 0.01765 : 0.025;
}

void MaskConfig::validate() const {
    if (!(mlm_prob > 0.0 && mlm_prob < 1.0))
        throw Error("mlm_prob must be in (0, 1)");
    check_k(k);
}

std::size_t round_half_up_budget(double prob, std::size_t n) {
    const double x = prob * static_cast<double>(n);
    const auto m = static_cast<std::size_t>(std::floor(x + 0.5));
    return m < 1 ? 1 : m;
}

std::size_t ceil_budget(double prob, std::size_t n) {
    const double x = prob * static_cast<double>(n);
    const auto m = static_cast<std::size_t>(std::ceil(x - 1e-9));
    return m < 1 ? 1 : m;
}

TokenSpan high_span(std::size_t s, std::size_t n_tokens, int k) {
    const std::size_t radius = static_cast<std::size_t>(k) - 1;
    TokenSpan span;
    span.first = s > radius ? s - radius : 0;
    span.last = std::min(s + radius, n_tokens - 1);
    return span;
}

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw Error(what);
}

std::vector<std::size_t> collect_masked(const std::vector<std::uint8_t>& flags) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < flags.size(); ++j)
        if (flags[j]) out.push_back(j);
    return out;
}

void sort_centers_by_position(std::vector<MaskCenter>& centers) {
    std::sort(centers.begin(), centers.end(),
              [](const MaskCenter& a, const MaskCenter& b) { return a.i < b.i; });
}

} // namespace

MaskPlan plan_genemask(const TokenizedSequence& tokens, const Grank& grank,
                       const MaskConfig& config) {
    config.validate();
    require(config.strategy == Strategy::genemask,
            "plan_genemask called with a different strategy");
    const std::size_t n = tokens.n();
    const std::size_t n_tokens = tokens.n_tokens();
    if (n_tokens == 0) throw EmptySequenceError("no tokens to mask");
    const int k = config.k;
    require(tokens.k() == k, "sequence tokenized with a different k");

    const std::size_t m = round_half_up_budget(config.mlm_prob, n_tokens);
    SplitMix64 rng(config.seed);
    const auto center_positions = sample_without_replacement(n, m, rng);

    // Per center: the covering token with the highest npmi, earliest start on
    // ties; its score (MPMI) decides the high/low split below.
    std::vector<MaskCenter> centers(m);
    for (std::size_t c = 0; c < m; ++c) {
        const std::size_t i = center_positions[c];
        const TokenSpan span = covering_tokens(i, n, k, config.mapping);
        std::size_t best_s = span.first;
        double best = kNegInf;
        bool first = true;
        for (std::size_t j = span.first; j <= span.last; ++j) {
            const double v = grank.npmi_of(tokens.token(j).code);
            if (first || v > best) {
                best = v;
                best_s = j;
                first = false;
            }
        }
        centers[c] = MaskCenter{i, best_s, best, CenterSet::low};
    }

    std::size_t high_count = config.high_rule == HighRule::ceil_half
                                 ? (m + 1) / 2
                                 : m / 2;
    std::vector<std::size_t> order(m);
    for (std::size_t c = 0; c < m; ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (centers[a].mpmi != centers[b].mpmi)
            return centers[a].mpmi > centers[b].mpmi;
        return centers[a].i < centers[b].i;
    });
    for (std::size_t r = 0; r < high_count; ++r)
        centers[order[r]].set = CenterSet::high;

    MaskPlan plan;
    plan.seq_id = tokens.id();
    plan.n_tokens = n_tokens;
    plan.strategy = Strategy::genemask;
    plan.seed = config.seed;

    std::vector<std::uint8_t> flags(n_tokens, 0);
    for (const auto& center : centers) {
        TokenSpan span;
        if (center.set == CenterSet::high) {
            span = high_span(center.s, n_tokens, k);
            plan.pre_dedup_count += static_cast<std::size_t>(2 * k - 1);
        } else {
            span = covering_tokens(center.i, n, k, config.mapping);
            plan.pre_dedup_count += static_cast<std::size_t>(k);
        }
        for (std::size_t j = span.first; j <= span.last; ++j) flags[j] = 1;
    }
    plan.masked = collect_masked(flags);
    plan.centers = std::move(centers);
    sort_centers_by_position(plan.centers);
    return plan;
}

MaskPlan plan_random(const TokenizedSequence& tokens, const MaskConfig& config) {
    config.validate();
    require(config.strategy == Strategy::random,
            "plan_random called with a different strategy");
    const std::size_t n = tokens.n();
    const std::size_t n_tokens = tokens.n_tokens();
    if (n_tokens == 0) throw EmptySequenceError("no tokens to mask");
    const int k = config.k;
    require(tokens.k() == k, "sequence tokenized with a different k");

    const std::size_t budget = ceil_budget(config.mlm_prob, n);
    SplitMix64 rng(config.seed);
    const auto center_positions = sample_without_replacement(n, budget, rng);

    MaskPlan plan;
    plan.seq_id = tokens.id();
    plan.n_tokens = n_tokens;
    plan.strategy = Strategy::random;
    plan.seed = config.seed;

    std::vector<std::uint8_t> flags(n_tokens, 0);
    plan.centers.reserve(budget);
    for (const std::size_t i : center_positions) {
        const TokenSpan span = covering_tokens(i, n, k, config.mapping);
        for (std::size_t j = span.first; j <= span.last; ++j) flags[j] = 1;
        plan.pre_dedup_count += static_cast<std::size_t>(k);
        plan.centers.push_back(MaskCenter{i, 0, kNegInf, CenterSet::low});
    }
    plan.masked = collect_masked(flags);
    sort_centers_by_position(plan.centers);
    return plan;
}

std::vector<PmiToken> tokenize_pmivoc(std::string_view seq,
                                      const MaskingVocabulary& vocab) {
    std::vector<PmiToken> out;
    std::size_t pos = 0;
    const std::size_t n = seq.size();
    while (pos < n) {
        std::size_t taken = 1;
        const int longest = static_cast<int>(
            std::min<std::size_t>(MaskingVocabulary::kMaxLen, n - pos));
        for (int len = longest; len >= MaskingVocabulary::kMinLen; --len) {
            const auto w = encode_kmer(seq.substr(pos, static_cast<std::size_t>(len)));
            if (vocab.contains(len, w.code)) {
                taken = static_cast<std::size_t>(len);
                break;
            }
        }
        if (taken == 1 && base_code(seq[pos]) == kInvalidBase)
            throw InvalidBaseError(seq[pos], pos);
        out.push_back(PmiToken{pos, taken});
        pos += taken;
    }
    return out;
}

MaskPlan plan_pmivoc(const TokenizedSequence& tokens,
                     const MaskingVocabulary& vocab, const MaskConfig& config) {
    config.validate();
    require(config.strategy == Strategy::pmivoc,
            "plan_pmivoc called with a different strategy");
    const std::size_t n = tokens.n();
    const std::size_t n_tokens = tokens.n_tokens();
    if (n_tokens == 0) throw EmptySequenceError("no tokens to mask");
    const int k = config.k;
    require(tokens.k() == k, "sequence tokenized with a different k");

    const auto pieces = tokenize_pmivoc(tokens.to_string(), vocab);
    std::vector<std::uint32_t> piece_of(n);
    for (std::size_t t = 0; t < pieces.size(); ++t)
        for (std::size_t d = 0; d < pieces[t].length; ++d)
            piece_of[pieces[t].start + d] = static_cast<std::uint32_t>(t);

    const std::size_t budget = round_half_up_budget(config.mlm_prob, n);
    SplitMix64 rng(config.seed);
    const auto center_positions = sample_without_replacement(n, budget, rng);

    MaskPlan plan;
    plan.seq_id = tokens.id();
    plan.n_tokens = n_tokens;
    plan.strategy = Strategy::pmivoc;
    plan.seed = config.seed;

    std::vector<std::uint8_t> flags(n_tokens, 0);
    plan.centers.reserve(budget);
    for (const std::size_t i : center_positions) {
        const PmiToken& piece = pieces[piece_of[i]];
        for (std::size_t d = 0; d < piece.length; ++d) {
            const TokenSpan span =
                covering_tokens(piece.start + d, n, k, config.mapping);
            for (std::size_t j = span.first; j <= span.last; ++j) flags[j] = 1;
        }
        plan.pre_dedup_count += piece.length + static_cast<std::size_t>(k) - 1;
        plan.centers.push_back(MaskCenter{i, 0, kNegInf, CenterSet::low});
    }
    plan.masked = collect_masked(flags);
    sort_centers_by_position(plan.centers);
    return plan;
}

namespace {

void append_json_string(std::string& out, std::string_view s) {
    out += '"';
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x",
                                  static_cast<unsigned>(static_cast<unsigned char>(c)));
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
}

} // namespace

std::string to_jsonl(const MaskPlan& plan) {
    std::string out;
    out += "{\"seq_id\":";
    append_json_string(out, plan.seq_id);
    out += ",\"n_tokens\":" + std::to_string(plan.n_tokens);
    out += ",\"masked\":[";
    for (std::size_t idx = 0; idx < plan.masked.size(); ++idx) {
        if (idx) out += ',';
        out += std::to_string(plan.masked[idx]);
    }
    out += "],\"centers\":[";
    for (std::size_t idx = 0; idx < plan.centers.size(); ++idx) {
        if (idx) out += ',';
        const auto& c = plan.centers[idx];
        out += "{\"i\":" + std::to_string(c.i);
        if (plan.strategy == Strategy::genemask) {
            out += ",\"s\":" + std::to_string(c.s);
            if (std::isfinite(c.mpmi)) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.9f",
                              c.mpmi == 0.0 ? 0.0 : c.mpmi);
                out += ",\"mpmi\":";
                out += buf;
            } else {
                out += ",\"mpmi\":null";
            }
            out += ",\"set\":\"";
            out += c.set == CenterSet::high ? "high" : "low";
            out += '"';
        }
        out += '}';
    }
    out += "],\"strategy\":\"";
    out += strategy_name(plan.strategy);
    out += "\",\"seed\":" + std::to_string(plan.seed);
    out += '}';
    return out;
}

} // namespace genemask
