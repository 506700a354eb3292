#pragma once

// Reference implementations the library is tested against. Everything here
// is deliberately written the slow, obvious way and shares nothing with the
// library code paths it checks (the RNG primitive is shared so that draw
// streams line up, but every decision made on top of the draws is
// re-derived).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "genemask/counts.hpp"
#include "genemask/rng.hpp"
#include "genemask/sequence.hpp"

namespace oracles {

inline std::string random_acgt(genemask::SplitMix64& rng, std::size_t len) {
    std::string s(len, 'A');
    for (auto& c : s) c = "ACGT"[rng.below(4)];
    return s;
}

// Fills every code of every table with a draw from [0, max_count). Such
// tables are usually marginally inconsistent, which is the point: the pmi
// paths must agree even on them.
inline genemask::CountsBundle random_bundle(int kmax, genemask::SplitMix64& rng,
                                            std::uint64_t max_count = 50) {
    genemask::CountsBundle bundle(kmax);
    for (int k = 1; k <= kmax; ++k) {
        auto& t = bundle.table(k);
        const auto space = genemask::kmer_space(k);
        for (std::uint64_t code = 0; code < space; ++code) {
            const auto c = rng.below(max_count);
            if (c) t.set_count(static_cast<std::uint32_t>(code), c);
        }
    }
    return bundle;
}

// ---- masking: straight-line transcription of the span-masking procedure ----

struct OracleCenter {
    std::size_t i = 0;
    std::size_t s = 0;
    double mpmi = 0.0;
    bool high = false;
};

struct OraclePlan {
    std::set<std::size_t> masked;
    std::vector<OracleCenter> centers; // draw order
};

// Re-derives a full npmi-guided plan from first principles: budget, center
// draws, covering windows, per-center argmax, high/low split, span union.
inline OraclePlan oracle_genemask(const std::string& seq,
                                  const std::vector<double>& npmi_by_code,
                                  std::uint64_t seed, double mlm_prob,
                                  bool high_takes_ceil, bool exact_mapping) {
    const int k = 6;
    const std::size_t n = seq.size();
    const std::size_t n_tokens = n - k + 1;

    std::size_t m = static_cast<std::size_t>(
        std::floor(mlm_prob * static_cast<double>(n_tokens) + 0.5));
    if (m < 1) m = 1;

    // Identical partial Fisher-Yates, written out by hand.
    genemask::SplitMix64 rng(seed);
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<std::size_t> picks;
    for (std::size_t d = 0; d < m; ++d) {
        const std::size_t j = d + static_cast<std::size_t>(rng.below(n - d));
        std::swap(pool[d], pool[j]);
        picks.push_back(pool[d]);
    }

    const auto token_code = [&](std::size_t start) {
        std::uint32_t code = 0;
        for (int d = 0; d < k; ++d)
            code = (code << 2) | genemask::base_code(seq[start + d]);
        return code;
    };
    const auto window_of = [&](std::size_t i) {
        std::int64_t lo, hi;
        const auto pos = static_cast<std::int64_t>(i);
        const auto last = static_cast<std::int64_t>(n_tokens) - 1;
        if (exact_mapping) {
            lo = std::max<std::int64_t>(0, pos - (k - 1));
            hi = std::min<std::int64_t>(last, pos);
        } else {
            lo = std::min(std::max<std::int64_t>(0, pos - k + 2), last);
            hi = std::min(std::max<std::int64_t>(0, pos + 1), last);
        }
        return std::pair<std::size_t, std::size_t>(lo, hi);
    };

    OraclePlan plan;
    for (const auto i : picks) {
        const auto [lo, hi] = window_of(i);
        std::size_t best_s = lo;
        double best = npmi_by_code[token_code(lo)];
        for (std::size_t s = lo + 1; s <= hi; ++s) {
            const double v = npmi_by_code[token_code(s)];
            if (v > best) {
                best = v;
                best_s = s;
            }
        }
        plan.centers.push_back(OracleCenter{i, best_s, best, false});
    }

    std::size_t high_count = high_takes_ceil ? (m + 1) / 2 : m / 2;
    std::vector<std::size_t> by_score(m);
    std::iota(by_score.begin(), by_score.end(), std::size_t{0});
    std::stable_sort(by_score.begin(), by_score.end(),
                     [&](std::size_t a, std::size_t b) {
                         if (plan.centers[a].mpmi != plan.centers[b].mpmi)
                             return plan.centers[a].mpmi > plan.centers[b].mpmi;
                         return plan.centers[a].i < plan.centers[b].i;
                     });
    for (std::size_t r = 0; r < high_count; ++r)
        plan.centers[by_score[r]].high = true;

    for (const auto& c : plan.centers) {
        if (c.high) {
            const std::size_t lo = c.s >= std::size_t(k - 1) ? c.s - (k - 1) : 0;
            const std::size_t hi = std::min(c.s + (k - 1), n_tokens - 1);
            for (std::size_t j = lo; j <= hi; ++j) plan.masked.insert(j);
        } else {
            const auto [lo, hi] = window_of(c.i);
            for (std::size_t j = lo; j <= hi; ++j) plan.masked.insert(j);
        }
    }
    return plan;
}

// ---- vocabulary tokenizer: per-position scan against raw strings ----

inline std::vector<std::pair<std::size_t, std::size_t>> oracle_pmivoc(
    const std::string& seq, const std::set<std::string>& vocab) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t pos = 0;
    while (pos < seq.size()) {
        std::size_t len = 1;
        for (std::size_t trial = std::min<std::size_t>(10, seq.size() - pos);
             trial >= 2; --trial) {
            if (vocab.count(seq.substr(pos, trial))) {
                len = trial;
                break;
            }
        }
        out.emplace_back(pos, len);
        pos += len;
    }
    return out;
}

// ---- overlap: quadratic substring sets ----

inline std::set<std::string> substring_set(const std::vector<std::string>& seqs,
                                           std::size_t n) {
    std::set<std::string> out;
    for (const auto& s : seqs) {
        if (s.size() < n) continue;
        for (std::size_t i = 0; i + n <= s.size(); ++i) {
            const std::string w = s.substr(i, n);
            if (std::all_of(w.begin(), w.end(), [](char c) {
                    return genemask::is_valid_base(c);
                }))
                out.insert(w);
        }
    }
    return out;
}

inline std::vector<double> oracle_overlap(const std::vector<std::string>& ref,
                                          const std::vector<std::string>& probe,
                                          std::size_t n) {
    const auto ref_set = substring_set(ref, n);
    std::vector<double> ratios;
    for (const auto& p : probe) {
        const auto grams = substring_set({p}, n);
        if (grams.empty()) continue;
        std::size_t hits = 0;
        for (const auto& g : grams) hits += ref_set.count(g);
        ratios.push_back(static_cast<double>(hits) /
                         static_cast<double>(grams.size()));
    }
    return ratios;
}

} // namespace oracles
