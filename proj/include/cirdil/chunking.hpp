#pragma once

#include <charconv>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cirdil/corpus.hpp"
#include "cirdil/errors.hpp"
#include "cirdil/tokenize.hpp"

namespace cirdil {

// A base fragment: a window of one section body.
struct Chunk {
    std::string chunk_id;
    std::string doc_id;
    std::size_t section_index = 0;
    // Token offset of the window inside the section body.
    std::size_t offset = 0;
    std::vector<std::string> heading_path;
    TokenSeq tokens;

    std::size_t length() const noexcept { return tokens.size(); }

    bool operator==(const Chunk&) const = default;
};

struct ChunkLocator {
    std::string doc_id;
    std::size_t section_index = 0;
    std::size_t offset = 0;
};

// "<doc_id>#<section>@<offset>". Section and offset are zero-padded so that the
// lexicographic chunk_id order used for tie-breaking follows document order.
inline std::string make_chunk_id(std::string_view doc_id, std::size_t section, std::size_t offset) {
    auto pad = [](std::size_t v, int width) {
        std::string s = std::to_string(v);
        if (static_cast<int>(s.size()) < width) s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
        return s;
    };
    std::string id(doc_id);
    id += '#';
    id += pad(section, 3);
    id += '@';
    id += pad(offset, 5);
    return id;
}

inline std::optional<ChunkLocator> parse_chunk_id(std::string_view id) {
    const auto hash = id.rfind('#');
    const auto at = id.rfind('@');
    if (hash == std::string_view::npos || at == std::string_view::npos || at < hash || hash == 0)
        return std::nullopt;
    ChunkLocator loc;
    loc.doc_id = std::string(id.substr(0, hash));
    const auto sec = id.substr(hash + 1, at - hash - 1);
    const auto off = id.substr(at + 1);
    if (sec.empty() || off.empty()) return std::nullopt;
    auto r1 = std::from_chars(sec.data(), sec.data() + sec.size(), loc.section_index);
    auto r2 = std::from_chars(off.data(), off.data() + off.size(), loc.offset);
    if (r1.ec != std::errc{} || r1.ptr != sec.data() + sec.size()) return std::nullopt;
    if (r2.ec != std::errc{} || r2.ptr != off.data() + off.size()) return std::nullopt;
    return loc;
}

/// Splits every section body into consecutive non-overlapping windows of
/// `target` tokens. The last window of a section may be shorter. Windows never
/// cross section boundaries and empty sections produce no chunks.
inline std::vector<Chunk> chunk_document(const Document& doc, std::size_t target) {
    if (target < 16) throw DomainError("chunk target must be >= 16");
    std::vector<Chunk> chunks;
    for (std::size_t s = 0; s < doc.sections.size(); ++s) {
        const Section& section = doc.sections[s];
        for (std::size_t off = 0; off < section.body.size(); off += target) {
            const std::size_t end = std::min(section.body.size(), off + target);
            Chunk c;
            c.chunk_id = make_chunk_id(doc.doc_id, s, off);
            c.doc_id = doc.doc_id;
            c.section_index = s;
            c.offset = off;
            c.heading_path = section.heading_path;
            c.tokens.assign(section.body.begin() + static_cast<std::ptrdiff_t>(off),
                            section.body.begin() + static_cast<std::ptrdiff_t>(end));
            chunks.push_back(std::move(c));
        }
    }
    return chunks;
}

inline std::vector<Chunk> chunk_corpus(const std::vector<Document>& docs, std::size_t target) {
    std::vector<Chunk> all;
    for (const Document& d : docs) {
        auto part = chunk_document(d, target);
        all.insert(all.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return all;
}

}  // namespace cirdil
