#include "genemask/counts.hpp"

#include <zlib.h>

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace genemask {

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::uint64_t parse_hex64(std::string_view s, std::size_t line) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw FormatError("bad hex value '" + std::string(s) + "'", line);
    return v;
}

std::uint64_t parse_u64(std::string_view s, std::size_t line) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw FormatError("bad integer '" + std::string(s) + "'", line);
    return v;
}

std::uint32_t crc_of(std::string_view body) {
    uLong crc = crc32(0L, Z_NULL, 0);
    std::size_t off = 0;
    while (off < body.size()) {
        const auto chunk = static_cast<uInt>(
            std::min<std::size_t>(body.size() - off, 1u << 30));
        crc = crc32(crc, reinterpret_cast<const Bytef*>(body.data() + off), chunk);
        off += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

// "key=value" suffix extraction for header fields.
std::string_view field_after(std::string_view s, std::string_view key,
                             std::size_t line) {
    const auto pos = s.find(key);
    if (pos == std::string_view::npos)
        throw FormatError("missing '" + std::string(key) + "' field", line);
    auto rest = s.substr(pos + key.size());
    const auto end = rest.find(' ');
    return end == std::string_view::npos ? rest : rest.substr(0, end);
}

} // namespace

std::string counts_to_string(const CountsBundle& bundle) {
    std::string body;
    body += "#genemask-counts v1 kmax=" + std::to_string(bundle.kmax()) +
            " digest=" + hex64(bundle.digest()) + "\n";
    for (int k = 1; k <= bundle.kmax(); ++k) {
        const auto& t = bundle.table(k);
        body += "#k=" + std::to_string(k) + " total=" + std::to_string(t.total()) +
                "\n";
        t.for_each_nonzero([&](std::uint32_t code, std::uint64_t c) {
            body += decode_kmer(PackedKmer{code, k});
            body += '\t';
            body += std::to_string(c);
            body += '\n';
        });
    }
    char crc_line[32];
    std::snprintf(crc_line, sizeof crc_line, "#crc=%08x\n", crc_of(body));
    return body + crc_line;
}

CountsBundle counts_from_string(std::string_view text) {
    // The CRC line must be the last line; everything before it is the body.
    const auto crc_pos = text.rfind("#crc=");
    if (crc_pos == std::string_view::npos ||
        (crc_pos != 0 && text[crc_pos - 1] != '\n'))
        throw ChecksumError("counts data has no trailing #crc line");
    const std::string_view body = text.substr(0, crc_pos);
    auto crc_field = text.substr(crc_pos + 5);
    while (!crc_field.empty() && (crc_field.back() == '\n' || crc_field.back() == '\r'))
        crc_field.remove_suffix(1);
    const auto stated = parse_hex64(crc_field, 0);
    if (static_cast<std::uint32_t>(stated) != crc_of(body) || stated > 0xffffffffull)
        throw ChecksumError("counts checksum mismatch");

    std::istringstream in{std::string(body)};
    std::string line;
    std::size_t lineno = 0;

    if (!std::getline(in, line)) throw FormatError("empty counts data", 1);
    ++lineno;
    if (!line.starts_with("#genemask-counts "))
        throw FormatError("not a counts file", lineno);
    const std::string_view header = std::string_view(line).substr(17);
    const auto version = header.substr(0, header.find(' '));
    if (version != "v1")
        throw VersionError("unsupported counts version '" + std::string(version) +
                           "'");
    const int kmax =
        static_cast<int>(parse_u64(field_after(header, "kmax=", lineno), lineno));
    const std::uint64_t digest = parse_hex64(field_after(header, "digest=", lineno), lineno);

    CountsBundle bundle(kmax);
    bundle.set_digest(digest);

    int k = 0;
    std::uint64_t stated_total = 0;
    std::uint64_t seen_total = 0;
    const auto close_block = [&] {
        if (k && seen_total != stated_total)
            throw FormatError("k=" + std::to_string(k) + " entries sum to " +
                              std::to_string(seen_total) + ", header says " +
                              std::to_string(stated_total));
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line.starts_with("#k=")) {
            close_block();
            const std::string_view rest = std::string_view(line).substr(1);
            k = static_cast<int>(parse_u64(field_after(rest, "k=", lineno), lineno));
            if (k < 1 || k > kmax) throw FormatError("block k out of range", lineno);
            stated_total = parse_u64(field_after(rest, "total=", lineno), lineno);
            seen_total = 0;
            continue;
        }
        if (line[0] == '#') throw FormatError("unexpected directive", lineno);
        if (!k) throw FormatError("entry before first #k block", lineno);
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw FormatError("missing tab", lineno);
        const std::string_view kmer = std::string_view(line).substr(0, tab);
        if (kmer.size() != static_cast<std::size_t>(k))
            throw FormatError("k-mer length does not match block", lineno);
        const auto count = parse_u64(std::string_view(line).substr(tab + 1), lineno);
        bundle.table(k).set_count(encode_kmer(kmer).code, count);
        seen_total += count;
    }
    close_block();
    return bundle;
}

void save_counts(const CountsBundle& bundle, const std::string& path) {
    const std::string text = counts_to_string(bundle);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

CountsBundle load_counts(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    return counts_from_string(buf.str());
}

} // namespace genemask
