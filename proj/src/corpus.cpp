#include "genemask/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "genemask/rng.hpp"
#include "genemask/sequence.hpp"

namespace genemask {

namespace {

void chomp(std::string& line) {
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
        line.pop_back();
}

std::uint64_t parse_u64(std::string_view s, std::size_t line) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw FormatError("bad integer '" + std::string(s) + "'", line);
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

} // namespace

void stream_fasta(const std::string& path,
                  const std::function<void(FastaRecord&&)>& fn,
                  const std::function<void(const std::string&)>& warn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");

    FastaRecord current;
    bool have_record = false;
    std::size_t record_line = 0;
    const auto flush = [&] {
        if (!have_record) return;
        if (current.sequence.empty() && warn)
            warn("empty record '" + current.id + "' (line " +
                 std::to_string(record_line) + ")");
        fn(std::move(current));
        current = {};
    };

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        if (line.empty()) continue;
        if (line[0] == '>') {
            flush();
            current.id = line.substr(1);
            if (current.id.empty())
                throw FormatError("empty record header", lineno);
            have_record = true;
            record_line = lineno;
        } else {
            if (!have_record)
                throw FormatError("sequence content before first '>' header",
                                  lineno);
            current.sequence += line;
        }
    }
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    flush();
}

std::vector<FastaRecord> read_fasta(const std::string& path) {
    std::vector<FastaRecord> records;
    stream_fasta(path, [&](FastaRecord&& r) { records.push_back(std::move(r)); });
    return records;
}

void GeneBoundarySet::add(const std::string& chrom, std::uint64_t position) {
    if (finalized_) throw Error("boundary set already finalized");
    by_chrom_[chrom].push_back(position);
}

void GeneBoundarySet::finalize() {
    for (auto& [chrom, v] : by_chrom_) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
    }
    finalized_ = true;
}

std::optional<std::uint64_t> GeneBoundarySet::next_after(const std::string& chrom,
                                                         std::uint64_t pos) const {
    const auto it = by_chrom_.find(chrom);
    if (it == by_chrom_.end()) return std::nullopt;
    const auto& v = it->second;
    const auto b = std::upper_bound(v.begin(), v.end(), pos);
    if (b == v.end()) return std::nullopt;
    return *b;
}

const std::vector<std::uint64_t>* GeneBoundarySet::positions(
    const std::string& chrom) const {
    const auto it = by_chrom_.find(chrom);
    return it == by_chrom_.end() ? nullptr : &it->second;
}

GeneBoundarySet GeneBoundarySet::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    GeneBoundarySet set;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        if (line.empty() || line[0] == '#') continue;
        const auto cols = split_tabs(line);
        if (cols.size() != 2)
            throw FormatError("expected 'chrom\\tposition'", lineno);
        if (cols[0].empty()) throw FormatError("empty chrom", lineno);
        set.add(std::string(cols[0]), parse_u64(cols[1], lineno));
    }
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    set.finalize();
    return set;
}

void GeneBoundarySet::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << "#chrom\tposition\n";
    for (const auto& [chrom, v] : by_chrom_)
        for (const auto pos : v) out << chrom << '\t' << pos << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

namespace {

// Uppercase copy; leaves non-base characters as-is so validation still fails.
std::string normalized_upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) {
        const auto b = base_code(c);
        if (b != kInvalidBase) c = "ACGT"[b];
    }
    return out;
}

bool all_acgt(std::string_view s) {
    return std::all_of(s.begin(), s.end(), [](char c) { return is_valid_base(c); });
}

} // namespace

std::vector<Segment> build_segments_for_record(const FastaRecord& record,
                                               std::uint64_t seed,
                                               const GeneBoundarySet* boundaries) {
    std::vector<Segment> out;
    const std::uint64_t n = record.sequence.size();
    SplitMix64 rng(derive_seed(seed, record.id));

    // Start offset: 1..1000 in 1-based terms, so 0..999 here.
    std::uint64_t p = rng.below(1000);
    while (p + 5 <= n) {
        std::uint64_t len = rng.below(2) == 0 ? 510 : 5 + rng.below(506);
        if (boundaries) {
            if (const auto b = boundaries->next_after(record.id, p)) {
                const std::uint64_t cap = *b - p;
                if (cap < 5) {
                    p = *b; // too close to the boundary; restart just past it
                    continue;
                }
                len = std::min(len, cap);
            }
        }
        len = std::min(len, n - p);
        const std::string piece =
            normalized_upper(std::string_view(record.sequence).substr(p, len));
        if (all_acgt(piece))
            out.push_back(Segment{record.id, p, static_cast<std::uint32_t>(len),
                                  piece});
        p += len;
    }
    return out;
}

std::vector<Segment> build_segments(const std::vector<FastaRecord>& records,
                                    std::uint64_t seed,
                                    const GeneBoundarySet* boundaries) {
    std::vector<Segment> out;
    for (const auto& r : records) {
        auto segs = build_segments_for_record(r, seed, boundaries);
        out.insert(out.end(), std::make_move_iterator(segs.begin()),
                   std::make_move_iterator(segs.end()));
    }
    return out;
}

void write_segments(const std::vector<Segment>& segments, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    for (const auto& s : segments)
        out << s.chrom << '\t' << s.start << '\t' << s.length << '\t' << s.sequence
            << '\n';
    if (!out) throw IoError("write failed for '" + path + "'");
}

std::vector<Segment> read_segments(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::vector<Segment> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        chomp(line);
        if (line.empty()) continue;
        const auto cols = split_tabs(line);
        if (cols.size() != 4)
            throw FormatError("expected 'chrom\\tstart\\tlength\\tsequence'",
                              lineno);
        Segment s;
        s.chrom = std::string(cols[0]);
        s.start = parse_u64(cols[1], lineno);
        s.length = static_cast<std::uint32_t>(parse_u64(cols[2], lineno));
        s.sequence = std::string(cols[3]);
        if (s.sequence.size() != s.length)
            throw FormatError("length column disagrees with sequence", lineno);
        out.push_back(std::move(s));
    }
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    return out;
}

} // namespace genemask
