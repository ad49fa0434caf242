#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cirdil/chunking.hpp"
#include "cirdil/errors.hpp"
#include "cirdil/injection.hpp"

namespace cirdil {

// Chunk dump: one JSON object per line with chunk_id, doc_id, heading_path and
// tokens. Section index and offset are recovered from chunk_id.
inline std::string chunks_to_jsonl(const std::vector<Chunk>& chunks) {
    std::string out;
    for (const Chunk& c : chunks) {
        const nlohmann::json j = {
            {"chunk_id", c.chunk_id}, {"doc_id", c.doc_id}, {"heading_path", c.heading_path}, {"tokens", c.tokens}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

namespace detail {

// Calls fn(json, line_no) for every non-empty line; wraps failures in ParseError.
template <typename Fn>
void for_each_jsonl(std::string_view text, Fn&& fn) {
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const auto line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;
        try {
            fn(nlohmann::json::parse(line), line_no);
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(line_no, e.what());
        }
    }
}

inline ChunkLocator locate_or_throw(const std::string& chunk_id, std::size_t line_no) {
    const auto loc = parse_chunk_id(chunk_id);
    if (!loc) throw ParseError(line_no, "malformed chunk_id '" + chunk_id + "'");
    return *loc;
}

}  // namespace detail

inline std::vector<Chunk> chunks_from_jsonl(std::string_view text) {
    std::vector<Chunk> chunks;
    detail::for_each_jsonl(text, [&](const nlohmann::json& j, std::size_t line_no) {
        Chunk c;
        j.at("chunk_id").get_to(c.chunk_id);
        j.at("doc_id").get_to(c.doc_id);
        j.at("heading_path").get_to(c.heading_path);
        j.at("tokens").get_to(c.tokens);
        const auto loc = detail::locate_or_throw(c.chunk_id, line_no);
        if (loc.doc_id != c.doc_id) throw ParseError(line_no, "chunk_id does not match doc_id");
        if (c.tokens.empty()) throw ParseError(line_no, "empty chunk");
        c.section_index = loc.section_index;
        c.offset = loc.offset;
        chunks.push_back(std::move(c));
    });
    return chunks;
}

// Enriched-chunk dump: chunk_id, strategy, cir, context_length and the full
// enriched token sequence (context first).
inline std::string enriched_to_jsonl(const std::vector<EnrichedChunk>& chunks, StrategyKind strategy) {
    std::string out;
    for (const EnrichedChunk& e : chunks) {
        const nlohmann::json j = {{"chunk_id", e.base.chunk_id},
                                  {"strategy", std::string(to_string(strategy))},
                                  {"cir", e.cir},
                                  {"context_length", e.context.length()},
                                  {"tokens", e.tokens}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

struct EnrichedRecord {
    std::string chunk_id;
    std::string doc_id;
    std::size_t section_index = 0;
    StrategyKind strategy = StrategyKind::Baseline;
    double cir = 0.0;
    std::size_t context_length = 0;
    TokenSeq tokens;
};

inline std::vector<EnrichedRecord> enriched_from_jsonl(std::string_view text) {
    std::vector<EnrichedRecord> out;
    detail::for_each_jsonl(text, [&](const nlohmann::json& j, std::size_t line_no) {
        EnrichedRecord r;
        j.at("chunk_id").get_to(r.chunk_id);
        const auto kind = parse_strategy(j.at("strategy").get<std::string>());
        if (!kind) throw ParseError(line_no, "unknown strategy");
        r.strategy = *kind;
        j.at("cir").get_to(r.cir);
        j.at("context_length").get_to(r.context_length);
        j.at("tokens").get_to(r.tokens);
        if (r.context_length >= r.tokens.size()) throw ParseError(line_no, "context covers the whole chunk");
        const auto loc = detail::locate_or_throw(r.chunk_id, line_no);
        r.doc_id = loc.doc_id;
        r.section_index = loc.section_index;
        out.push_back(std::move(r));
    });
    return out;
}

}  // namespace cirdil
