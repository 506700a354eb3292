#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "genemask/error.hpp"

namespace genemask {

// 2-bit base codes: A=0, C=1, G=2, T=3. This order makes lexicographic
// string order equal numeric order of the packed code.
inline constexpr std::uint8_t kInvalidBase = 0xFF;

namespace detail {
constexpr std::array<std::uint8_t, 256> make_base_table() {
    std::array<std::uint8_t, 256> t{};
    for (auto& v : t) v = kInvalidBase;
    t['A'] = t['a'] = 0;
    t['C'] = t['c'] = 1;
    t['G'] = t['g'] = 2;
    t['T'] = t['t'] = 3;
    return t;
}
inline constexpr std::array<std::uint8_t, 256> kBaseTable = make_base_table();
inline constexpr char kBaseChar[4] = {'A', 'C', 'G', 'T'};
} // namespace detail

// Code for one base, or kInvalidBase. Lowercase (soft-masked) accepted.
inline std::uint8_t base_code(char c) {
    return detail::kBaseTable[static_cast<unsigned char>(c)];
}

inline bool is_valid_base(char c) { return base_code(c) != kInvalidBase; }

inline constexpr int kMaxK = 15;

// A k-mer as a base-4 positional integer. 4^15 < 2^32, so code fits 32 bits.
struct PackedKmer {
    std::uint32_t code = 0;
    int k = 0;

    friend bool operator==(const PackedKmer&, const PackedKmer&) = default;
};

inline std::uint64_t kmer_space(int k) { return std::uint64_t{1} << (2 * k); }

inline void check_k(int k) {
    if (k < 1 || k > kMaxK)
        throw LengthError("k-mer length " + std::to_string(k) + " outside [1, " +
                          std::to_string(kMaxK) + "]");
}

inline PackedKmer encode_kmer(std::string_view s) {
    check_k(static_cast<int>(s.size()));
    std::uint32_t code = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::uint8_t b = base_code(s[i]);
        if (b == kInvalidBase) throw InvalidBaseError(s[i], i);
        code = (code << 2) | b;
    }
    return PackedKmer{code, static_cast<int>(s.size())};
}

inline std::string decode_kmer(PackedKmer w) {
    check_k(w.k);
    std::string s(static_cast<std::size_t>(w.k), 'A');
    std::uint32_t code = w.code;
    for (int i = w.k - 1; i >= 0; --i) {
        s[static_cast<std::size_t>(i)] = detail::kBaseChar[code & 3u];
        code >>= 2;
    }
    return s;
}

// Validates a whole string to 2-bit codes. Throws on the first bad character.
inline std::vector<std::uint8_t> encode_bases(std::string_view seq) {
    std::vector<std::uint8_t> out(seq.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const std::uint8_t b = base_code(seq[i]);
        if (b == kInvalidBase) throw InvalidBaseError(seq[i], i);
        out[i] = b;
    }
    return out;
}

struct Token {
    std::size_t start = 0;
    PackedKmer kmer;

    friend bool operator==(const Token&, const Token&) = default;
};

// All sliding windows of length k, in start order. Strict: any non-ACGT
// character throws. max(0, n-k+1) tokens.
inline std::vector<Token> tokenize(std::string_view seq, int k) {
    check_k(k);
    const auto bases = encode_bases(seq);
    std::vector<Token> out;
    if (bases.size() < static_cast<std::size_t>(k)) return out;
    out.reserve(bases.size() - k + 1);
    const std::uint32_t mask =
        static_cast<std::uint32_t>((std::uint64_t{1} << (2 * k)) - 1);
    std::uint32_t code = 0;
    for (std::size_t i = 0; i < bases.size(); ++i) {
        code = ((code << 2) | bases[i]) & mask;
        if (i + 1 >= static_cast<std::size_t>(k))
            out.push_back(Token{i + 1 - k, PackedKmer{code, k}});
    }
    return out;
}

// Calls fn(start, code) for every length-k window inside maximal ACGT runs.
// Non-ACGT characters reset the window instead of throwing, so whole
// chromosomes with N gaps stream through without preprocessing.
template <typename Fn>
void scan_windows(std::string_view seq, int k, Fn&& fn) {
    check_k(k);
    const std::uint64_t mask = (std::uint64_t{1} << (2 * k)) - 1;
    std::uint64_t code = 0;
    std::size_t run = 0;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        const std::uint8_t b = base_code(seq[i]);
        if (b == kInvalidBase) {
            run = 0;
            code = 0;
            continue;
        }
        code = ((code << 2) | b) & mask;
        if (++run >= static_cast<std::size_t>(k)) fn(i + 1 - k, code);
    }
}

// A validated sequence plus its 6-mer (or other k) token view.
class TokenizedSequence {
public:
    TokenizedSequence(std::string id, std::string_view seq, int k = 6)
        : id_(std::move(id)), bases_(encode_bases(seq)), k_(k) {
        check_k(k);
    }

    const std::string& id() const { return id_; }
    std::size_t n() const { return bases_.size(); }
    int k() const { return k_; }
    std::size_t n_tokens() const {
        return bases_.size() >= static_cast<std::size_t>(k_)
                   ? bases_.size() - k_ + 1
                   : 0;
    }
    std::uint8_t base(std::size_t i) const {
        if (i >= bases_.size()) throw IndexError("base index out of range");
        return bases_[i];
    }
    PackedKmer token(std::size_t j) const {
        if (j >= n_tokens()) throw IndexError("token index out of range");
        std::uint32_t code = 0;
        for (int d = 0; d < k_; ++d) code = (code << 2) | bases_[j + d];
        return PackedKmer{code, k_};
    }
    std::string to_string() const {
        std::string s(bases_.size(), 'A');
        for (std::size_t i = 0; i < bases_.size(); ++i)
            s[i] = detail::kBaseChar[bases_[i]];
        return s;
    }

private:
    std::string id_;
    std::vector<std::uint8_t> bases_;
    int k_;
};

// Which covering range a nucleotide maps to. `exact` is every window that
// truly contains the position. `paper_literal` reproduces a published range
// that is shifted right by one: it drops the leftmost covering window and
// adds the first window past the position.
enum class MappingMode { exact, paper_literal };

// Inclusive range of token start indices.
struct TokenSpan {
    std::size_t first = 0;
    std::size_t last = 0;

    std::size_t count() const { return last - first + 1; }
    bool contains(std::size_t j) const { return first <= j && j <= last; }
    friend bool operator==(const TokenSpan&, const TokenSpan&) = default;
};

inline TokenSpan covering_tokens(std::size_t i, std::size_t n, int k,
                                 MappingMode mode = MappingMode::exact) {
    check_k(k);
    if (n < static_cast<std::size_t>(k))
        throw IndexError("sequence shorter than window length");
    if (i >= n) throw IndexError("nucleotide index out of range");
    const auto last_start = static_cast<std::int64_t>(n) - k;
    const auto pos = static_cast<std::int64_t>(i);
    std::int64_t lo, hi;
    if (mode == MappingMode::exact) {
        lo = std::max<std::int64_t>(0, pos - k + 1);
        hi = std::min<std::int64_t>(last_start, pos);
    } else {
        lo = std::clamp<std::int64_t>(pos - k + 2, 0, last_start);
        hi = std::clamp<std::int64_t>(pos + 1, 0, last_start);
    }
    return TokenSpan{static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
}

} // namespace genemask
