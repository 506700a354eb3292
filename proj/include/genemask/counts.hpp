#pragma once

#include <cstdint>
#include <map>
#include <new>
#include <string>
#include <string_view>
#include <vector>

#include "genemask/rng.hpp"
#include "genemask/sequence.hpp"

namespace genemask {

// Dense arrays up to this k, std::map above. 4^12 entries is 128 MiB of
// counts, still fine; 4^13+ is not worth it for the lengths we ever query.
inline constexpr int kDenseMaxK = 12;

// Exact window counts for one k. total() is the number of k-windows seen,
// i.e. the probability denominator N_k.
class KmerCountTable {
public:
    explicit KmerCountTable(int k) : k_(k) {
        check_k(k);
        if (k <= kDenseMaxK) {
            try {
                dense_.assign(static_cast<std::size_t>(kmer_space(k)), 0);
            } catch (const std::bad_alloc&) {
                throw CapacityError("cannot allocate dense table for k=" +
                                    std::to_string(k));
            }
        }
    }

    int k() const { return k_; }
    std::uint64_t total() const { return total_; }
    bool dense() const { return !dense_.empty() || k_ <= kDenseMaxK; }

    void add(std::uint32_t code, std::uint64_t delta = 1) {
        if (k_ <= kDenseMaxK) {
            dense_[code] += delta;
        } else if (delta) {
            sparse_[code] += delta;
        }
        total_ += delta;
    }

    void set_count(std::uint32_t code, std::uint64_t value) {
        const std::uint64_t old = count(code);
        if (k_ <= kDenseMaxK) {
            dense_[code] = value;
        } else if (value) {
            sparse_[code] = value;
        } else {
            sparse_.erase(code);
        }
        total_ += value - old;
    }

    std::uint64_t count(std::uint32_t code) const {
        if (code >= kmer_space(k_)) throw IndexError("k-mer code out of range");
        if (k_ <= kDenseMaxK) return dense_[code];
        const auto it = sparse_.find(code);
        return it == sparse_.end() ? 0 : it->second;
    }

    std::uint64_t count(const PackedKmer& w) const {
        if (w.k != k_)
            throw ShapeMismatchError("k-mer length " + std::to_string(w.k) +
                                     " queried against k=" + std::to_string(k_) +
                                     " table");
        return count(w.code);
    }

    void merge(const KmerCountTable& other) {
        if (other.k_ != k_)
            throw ShapeMismatchError("cannot merge k=" + std::to_string(other.k_) +
                                     " into k=" + std::to_string(k_));
        other.for_each_nonzero([this](std::uint32_t code, std::uint64_t c) {
            add(code, c);
        });
    }

    // fn(code, count) over nonzero entries in ascending code order, which is
    // lexicographic order of the k-mer strings.
    template <typename Fn>
    void for_each_nonzero(Fn&& fn) const {
        if (k_ <= kDenseMaxK) {
            for (std::size_t code = 0; code < dense_.size(); ++code)
                if (dense_[code]) fn(static_cast<std::uint32_t>(code), dense_[code]);
        } else {
            for (const auto& [code, c] : sparse_) fn(code, c);
        }
    }

    std::uint64_t nonzero_entries() const {
        std::uint64_t n = 0;
        for_each_nonzero([&n](std::uint32_t, std::uint64_t) { ++n; });
        return n;
    }

    friend bool operator==(const KmerCountTable& a, const KmerCountTable& b) {
        return a.k_ == b.k_ && a.total_ == b.total_ && a.dense_ == b.dense_ &&
               a.sparse_ == b.sparse_;
    }

private:
    int k_;
    std::uint64_t total_ = 0;
    std::vector<std::uint64_t> dense_;
    std::map<std::uint32_t, std::uint64_t> sparse_;
};

// Tables for every k in 1..kmax plus a digest of the input content. The
// digest is a mod-2^64 sum of per-sequence hashes, so merging shards in any
// order reproduces the single-pass digest.
class CountsBundle {
public:
    explicit CountsBundle(int kmax) : kmax_(kmax) {
        check_k(kmax);
        tables_.reserve(static_cast<std::size_t>(kmax));
        for (int k = 1; k <= kmax; ++k) tables_.emplace_back(k);
    }

    int kmax() const { return kmax_; }
    std::uint64_t digest() const { return digest_; }
    void set_digest(std::uint64_t d) { digest_ = d; }

    const KmerCountTable& table(int k) const {
        if (k < 1 || k > kmax_)
            throw MissingTableError("no count table for k=" + std::to_string(k) +
                                    " (kmax=" + std::to_string(kmax_) + ")");
        return tables_[static_cast<std::size_t>(k - 1)];
    }
    KmerCountTable& table(int k) {
        return const_cast<KmerCountTable&>(
            static_cast<const CountsBundle*>(this)->table(k));
    }

    void merge(const CountsBundle& other) {
        if (other.kmax_ != kmax_)
            throw ShapeMismatchError("cannot merge kmax=" +
                                     std::to_string(other.kmax_) + " into kmax=" +
                                     std::to_string(kmax_));
        for (int k = 1; k <= kmax_; ++k) table(k).merge(other.table(k));
        digest_ += other.digest_;
    }

    friend bool operator==(const CountsBundle& a, const CountsBundle& b) {
        return a.kmax_ == b.kmax_ && a.digest_ == b.digest_ &&
               a.tables_ == b.tables_;
    }

private:
    int kmax_;
    std::uint64_t digest_ = 0;
    std::vector<KmerCountTable> tables_;
};

// Single-pass counter. Non-ACGT characters split the input into maximal
// valid runs; each run contributes its own windows, so chromosomes with N
// gaps count correctly without preprocessing.
class CorpusCounter {
public:
    explicit CorpusCounter(int kmax) : bundle_(kmax), kmax_(kmax) {}

    void add_sequence(std::string_view seq) {
        bundle_.set_digest(bundle_.digest() + fnv1a64(seq));
        const std::uint64_t hist_mask = (std::uint64_t{1} << (2 * kmax_)) - 1;
        std::uint64_t hist = 0;
        std::size_t run = 0;
        for (const char c : seq) {
            const std::uint8_t b = base_code(c);
            if (b == kInvalidBase) {
                run = 0;
                hist = 0;
                continue;
            }
            hist = ((hist << 2) | b) & hist_mask;
            ++run;
            const int top = run < static_cast<std::size_t>(kmax_)
                                ? static_cast<int>(run)
                                : kmax_;
            for (int k = 1; k <= top; ++k) {
                const std::uint64_t mask = (std::uint64_t{1} << (2 * k)) - 1;
                bundle_.table(k).add(static_cast<std::uint32_t>(hist & mask));
            }
        }
    }

    CountsBundle take() { return std::move(bundle_); }

private:
    CountsBundle bundle_;
    int kmax_;
};

inline CountsBundle count_corpus(const std::vector<std::string>& seqs, int kmax) {
    CorpusCounter counter(kmax);
    for (const auto& s : seqs) counter.add_sequence(s);
    return counter.take();
}

// Text format, one file per bundle:
//   #genemask-counts v1 kmax=<K> digest=<hex>
//   #k=<k> total=<N_k>
//   <kmer>\t<count>          (nonzero entries, lexicographic order)
//   ...
//   #crc=<hex>               (CRC-32 of every byte above this line)
void save_counts(const CountsBundle& bundle, const std::string& path);
CountsBundle load_counts(const std::string& path);

// Parse/serialize against in-memory strings; the file functions wrap these.
std::string counts_to_string(const CountsBundle& bundle);
CountsBundle counts_from_string(std::string_view text);

} // namespace genemask
