#include "genemask/npmi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "genemask/parallel.hpp"

namespace genemask {

namespace {

std::string fmt9(double v) {
    if (v == 0.0) v = 0.0; // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

double parse_real(std::string_view s, std::size_t line) {
    const std::string field(s);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size() || field.empty())
        throw FormatError("bad real '" + field + "'", line);
    return v;
}

std::uint64_t parse_u64(std::string_view s, std::size_t line) {
    const std::string field(s);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(field.c_str(), &end, 10);
    if (end != field.c_str() + field.size() || field.empty())
        throw FormatError("bad integer '" + field + "'", line);
    return v;
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

void chomp(std::string& line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
        line.pop_back();
}

// log p for every contiguous sub-kmer of w, indexed [a][b] inclusive.
using LogTable = std::array<std::array<double, kMaxK>, kMaxK>;

void fill_log_table(PackedKmer w, const ProbabilityModel& model, LogTable& logp) {
    std::array<std::uint8_t, kMaxK> bases{};
    std::uint32_t code = w.code;
    for (int i = w.k - 1; i >= 0; --i) {
        bases[static_cast<std::size_t>(i)] = code & 3u;
        code >>= 2;
    }
    for (int a = 0; a < w.k; ++a) {
        std::uint32_t sub = 0;
        for (int b = a; b < w.k; ++b) {
            sub = (sub << 2) | bases[static_cast<std::size_t>(b)];
            logp[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
                model.log_p(PackedKmer{sub, b - a + 1});
        }
    }
}

void check_pmi_args(PackedKmer w, const ProbabilityModel& model) {
    if (w.k < 2)
        throw LengthError("pmi needs k >= 2, got " + std::to_string(w.k));
    if (w.k > model.kmax())
        throw MissingTableError("pmi of a " + std::to_string(w.k) +
                                "-mer needs tables up to k=" + std::to_string(w.k) +
                                ", model has kmax=" + std::to_string(model.kmax()));
}

} // namespace

double ProbabilityModel::log_p(PackedKmer w) const {
    const std::uint64_t f = bundle_->table(w.k).count(w);
    if (f == 0) return kNegInf;
    const std::uint64_t n = bundle_->table(w.k).total();
    return std::log(static_cast<double>(f)) - std::log(static_cast<double>(n));
}

double pmi(PackedKmer w, const ProbabilityModel& model) {
    check_pmi_args(w, model);
    if (model.freq(w) == 0) return kNegInf;

    LogTable logp;
    fill_log_table(w, model, logp);
    const auto k = static_cast<std::size_t>(w.k);

    // B[a][b]: best log-probability over all segmentations of w[a..b],
    // identity included. The top level then forces at least one split.
    std::array<std::array<double, kMaxK>, kMaxK> B;
    for (std::size_t len = 1; len <= k; ++len) {
        for (std::size_t a = 0; a + len <= k; ++a) {
            const std::size_t b = a + len - 1;
            double best = logp[a][b];
            for (std::size_t m = a; m < b; ++m)
                best = std::max(best, B[a][m] + B[m + 1][b]);
            B[a][b] = best;
        }
    }
    double split_best = kNegInf;
    for (std::size_t m = 0; m + 1 < k; ++m)
        split_best = std::max(split_best, B[0][m] + B[m + 1][k - 1]);
    return logp[0][k - 1] - split_best;
}

double pmi_exhaustive(PackedKmer w, const ProbabilityModel& model,
                      std::uint64_t* visited) {
    if (w.k > 12)
        throw LengthError("exhaustive pmi capped at k=12, got " +
                          std::to_string(w.k));
    check_pmi_args(w, model);

    LogTable logp;
    fill_log_table(w, model, logp);
    const auto k = static_cast<std::size_t>(w.k);

    // Bit i of the mask cuts between positions i and i+1; mask 0 is the
    // identity segmentation and is excluded.
    double best = kNegInf;
    std::uint64_t seen = 0;
    const std::uint64_t top = std::uint64_t{1} << (k - 1);
    for (std::uint64_t mask = 1; mask < top; ++mask) {
        ++seen;
        double sum = 0.0;
        std::size_t a = 0;
        for (std::size_t i = 0; i + 1 < k; ++i) {
            if (mask & (std::uint64_t{1} << i)) {
                sum += logp[a][i];
                a = i + 1;
            }
        }
        sum += logp[a][k - 1];
        best = std::max(best, sum);
    }
    if (visited) *visited = seen;
    if (model.freq(w) == 0) return kNegInf;
    return logp[0][k - 1] - best;
}

double npmi_discount(std::uint64_t f, std::uint64_t c) {
    if (f <= 1) return 0.0;
    const double lf = std::log(static_cast<double>(f));
    const double lc = std::log(static_cast<double>(c ? c : 1));
    return lf / (lc + lf);
}

double npmi(PackedKmer w, const ProbabilityModel& model) {
    const std::uint64_t f = model.freq(w);
    if (f == 0) return kNegInf;
    if (f == 1) return 0.0;
    return pmi(w, model) * npmi_discount(f, model.c());
}

PmiResult score_kmer(PackedKmer w, const ProbabilityModel& model) {
    PmiResult r;
    r.kmer = w;
    r.frequency = model.freq(w);
    if (r.frequency == 0) {
        r.pmi = kNegInf;
        r.npmi = kNegInf;
        return r;
    }
    r.pmi = pmi(w, model);
    r.npmi = r.frequency == 1 ? 0.0 : r.pmi * npmi_discount(r.frequency, model.c());
    return r;
}

namespace {

bool rank_less(const PmiResult& a, const PmiResult& b) {
    if (a.npmi != b.npmi) return a.npmi > b.npmi;
    if (a.kmer.k != b.kmer.k) return a.kmer.k < b.kmer.k;
    return a.kmer.code < b.kmer.code;
}

} // namespace

Grank Grank::build(const ProbabilityModel& model, int workers) {
    if (model.kmax() < 6)
        throw MissingTableError("6-mer ranking needs tables up to k=6, model has "
                                "kmax=" + std::to_string(model.kmax()));
    Grank g;
    g.entries_.resize(4096);
    parallel_for(4096, workers, [&](std::size_t code) {
        g.entries_[code] =
            score_kmer(PackedKmer{static_cast<std::uint32_t>(code), 6}, model);
    });
    std::sort(g.entries_.begin(), g.entries_.end(), rank_less);
    g.index();
    return g;
}

Grank Grank::from_entries(std::vector<PmiResult> entries) {
    if (entries.size() != 4096)
        throw ShapeMismatchError("6-mer ranking needs exactly 4096 entries, got " +
                                 std::to_string(entries.size()));
    for (const auto& e : entries)
        if (e.kmer.k != 6) throw ShapeMismatchError("non-6-mer entry in ranking");
    Grank g;
    g.entries_ = std::move(entries);
    std::sort(g.entries_.begin(), g.entries_.end(), rank_less);
    g.index();
    return g;
}

void Grank::index() {
    npmi_by_code_.assign(4096, kNegInf);
    rank_by_code_.assign(4096, 0);
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto code = entries_[i].kmer.code;
        npmi_by_code_[code] = entries_[i].npmi;
        rank_by_code_[code] = static_cast<std::uint32_t>(i + 1);
    }
}

const PmiResult& Grank::at_rank(std::uint32_t rank) const {
    if (rank < 1 || rank > entries_.size())
        throw IndexError("rank " + std::to_string(rank) + " out of range");
    return entries_[rank - 1];
}

void Grank::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "rank\tkmer\tfrequency\tpmi\tnpmi\n";
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        const auto& e = entries_[i];
        out << (i + 1) << '\t' << decode_kmer(e.kmer) << '\t' << e.frequency
            << '\t' << fmt9(e.pmi) << '\t' << fmt9(e.npmi) << '\n';
    }
    if (!out) throw IoError("write failed for '" + path + "'");
}

Grank Grank::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw FormatError("empty ranking file", 1);
    ++lineno;
    chomp(line);
    if (line != "rank\tkmer\tfrequency\tpmi\tnpmi")
        throw FormatError("unexpected ranking header", lineno);

    std::vector<PmiResult> entries;
    entries.reserve(4096);
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        if (line.empty()) continue;
        const auto cols = split_tabs(line);
        if (cols.size() != 5) throw FormatError("expected 5 columns", lineno);
        const auto rank = parse_u64(cols[0], lineno);
        if (rank != entries.size() + 1)
            throw FormatError("rank column out of sequence", lineno);
        PmiResult e;
        e.kmer = encode_kmer(cols[1]);
        if (e.kmer.k != 6) throw FormatError("non-6-mer row", lineno);
        e.frequency = parse_u64(cols[2], lineno);
        e.pmi = parse_real(cols[3], lineno);
        e.npmi = parse_real(cols[4], lineno);
        if (!entries.empty() && e.npmi > entries.back().npmi)
            throw FormatError("npmi not non-increasing", lineno);
        entries.push_back(e);
    }
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    if (entries.size() != 4096)
        throw FormatError("expected 4096 rows, got " +
                          std::to_string(entries.size()));
    Grank g;
    g.entries_ = std::move(entries);
    g.index();
    return g;
}

MaskingVocabulary::MaskingVocabulary() = default;

MaskingVocabulary MaskingVocabulary::build(const ProbabilityModel& model,
                                           std::uint64_t min_freq,
                                           std::size_t size, int workers,
                                           bool* truncated) {
    if (model.kmax() < kMaxLen)
        throw MissingTableError("vocabulary needs tables up to k=" +
                                std::to_string(kMaxLen) + ", model has kmax=" +
                                std::to_string(model.kmax()));
    std::vector<PackedKmer> eligible;
    for (int k = kMinLen; k <= kMaxLen; ++k) {
        model.bundle().table(k).for_each_nonzero(
            [&](std::uint32_t code, std::uint64_t c) {
                if (c >= min_freq) eligible.push_back(PackedKmer{code, k});
            });
    }
    std::vector<PmiResult> scored(eligible.size());
    parallel_for(eligible.size(), workers, [&](std::size_t i) {
        scored[i] = score_kmer(eligible[i], model);
    });
    std::sort(scored.begin(), scored.end(), rank_less);
    if (truncated) *truncated = scored.size() < size;
    if (scored.size() > size) scored.resize(size);

    MaskingVocabulary v;
    v.entries_ = std::move(scored);
    v.index();
    return v;
}

MaskingVocabulary MaskingVocabulary::from_entries(std::vector<PmiResult> entries) {
    for (const auto& e : entries)
        if (e.kmer.k < kMinLen || e.kmer.k > kMaxLen)
            throw LengthError("vocabulary entries must have length 2..10");
    std::sort(entries.begin(), entries.end(), rank_less);
    MaskingVocabulary v;
    v.entries_ = std::move(entries);
    v.index();
    return v;
}

MaskingVocabulary MaskingVocabulary::from_strings(
    const std::vector<std::string>& kmers) {
    std::vector<PmiResult> entries;
    entries.reserve(kmers.size());
    for (const auto& s : kmers) entries.push_back(PmiResult{encode_kmer(s), 0, 0.0, 0.0});
    return from_entries(std::move(entries));
}

void MaskingVocabulary::index() {
    members_.assign(static_cast<std::size_t>(kMaxLen - kMinLen + 1), {});
    for (int k = kMinLen; k <= kMaxLen; ++k)
        members_[static_cast<std::size_t>(k - kMinLen)].assign(
            static_cast<std::size_t>(kmer_space(k)), false);
    for (const auto& e : entries_)
        members_[static_cast<std::size_t>(e.kmer.k - kMinLen)][e.kmer.code] = true;
}

std::vector<std::size_t> MaskingVocabulary::length_histogram() const {
    std::vector<std::size_t> h(static_cast<std::size_t>(kMaxLen) + 1, 0);
    for (const auto& e : entries_) ++h[static_cast<std::size_t>(e.kmer.k)];
    return h;
}

void MaskingVocabulary::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "kmer\tlength\tfrequency\tnpmi\n";
    for (const auto& e : entries_)
        out << decode_kmer(e.kmer) << '\t' << e.kmer.k << '\t' << e.frequency
            << '\t' << fmt9(e.npmi) << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

MaskingVocabulary MaskingVocabulary::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw FormatError("empty vocabulary file", 1);
    ++lineno;
    chomp(line);
    if (line != "kmer\tlength\tfrequency\tnpmi")
        throw FormatError("unexpected vocabulary header", lineno);

    std::vector<PmiResult> entries;
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        if (line.empty()) continue;
        const auto cols = split_tabs(line);
        if (cols.size() != 4) throw FormatError("expected 4 columns", lineno);
        PmiResult e;
        e.kmer = encode_kmer(cols[0]);
        if (static_cast<std::uint64_t>(e.kmer.k) != parse_u64(cols[1], lineno))
            throw FormatError("length column disagrees with k-mer", lineno);
        e.frequency = parse_u64(cols[2], lineno);
        e.npmi = parse_real(cols[3], lineno);
        // pmi is not stored in vocabulary files; it is not needed downstream.
        e.pmi = 0.0;
        entries.push_back(e);
    }
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    return from_entries(std::move(entries));
}

} // namespace genemask
