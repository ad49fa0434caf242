#pragma once

#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cirdil/corpus.hpp"
#include "cirdil/errors.hpp"
#include "cirdil/io.hpp"

namespace cirdil {

// Corpus file: JSON Lines. Line 1 is a header record carrying the document and
// query counts, followed by one "document" record per document and then the
// trailing block of "query" records.
inline constexpr std::string_view kCorpusFormat = "cirdil-corpus";
inline constexpr int kCorpusVersion = 1;

namespace detail {

using nlohmann::json;

inline json to_json(const Fact& f) {
    return {{"fact_id", f.fact_id},
            {"key_phrase", f.key_phrase},
            {"statement", f.statement},
            {"home_section", f.home_section}};
}

inline json to_json(const Section& s) {
    json facts = json::array();
    for (const Fact& f : s.facts) facts.push_back(to_json(f));
    return {{"heading_path", s.heading_path},
            {"body", s.body},
            {"sentence_lengths", s.sentence_lengths},
            {"facts", std::move(facts)}};
}

inline json to_json(const Document& d) {
    json sections = json::array();
    for (const Section& s : d.sections) sections.push_back(to_json(s));
    return {{"record", "document"},
            {"doc_id", d.doc_id},
            {"typology", std::string(to_string(d.typology))},
            {"title", d.title},
            {"sections", std::move(sections)}};
}

inline json to_json(const QuerySpec& q) {
    return {{"record", "query"},
            {"query_id", q.query_id},
            {"intent", std::string(to_string(q.intent))},
            {"text", q.text},
            {"gold_chunk_ids", q.gold_chunk_ids},
            {"gold_doc_id", q.gold_doc_id}};
}

inline Fact fact_from_json(const json& j) {
    Fact f;
    j.at("fact_id").get_to(f.fact_id);
    j.at("key_phrase").get_to(f.key_phrase);
    j.at("statement").get_to(f.statement);
    j.at("home_section").get_to(f.home_section);
    return f;
}

inline Section section_from_json(const json& j) {
    Section s;
    j.at("heading_path").get_to(s.heading_path);
    j.at("body").get_to(s.body);
    j.at("sentence_lengths").get_to(s.sentence_lengths);
    for (const json& f : j.at("facts")) s.facts.push_back(fact_from_json(f));
    return s;
}

inline Document document_from_json(const json& j) {
    Document d;
    j.at("doc_id").get_to(d.doc_id);
    const auto typ = parse_typology(j.at("typology").get<std::string>());
    if (!typ) throw std::invalid_argument("unknown typology");
    d.typology = *typ;
    j.at("title").get_to(d.title);
    for (const json& s : j.at("sections")) d.sections.push_back(section_from_json(s));
    return d;
}

inline QuerySpec query_from_json(const json& j) {
    QuerySpec q;
    j.at("query_id").get_to(q.query_id);
    const auto intent = parse_intent(j.at("intent").get<std::string>());
    if (!intent) throw std::invalid_argument("unknown intent");
    q.intent = *intent;
    j.at("text").get_to(q.text);
    j.at("gold_chunk_ids").get_to(q.gold_chunk_ids);
    j.at("gold_doc_id").get_to(q.gold_doc_id);
    return q;
}

}  // namespace detail

inline std::string corpus_to_jsonl(const Corpus& corpus) {
    using nlohmann::json;
    std::string out;
    const json header = {{"record", "header"},
                         {"format", std::string(kCorpusFormat)},
                         {"version", kCorpusVersion},
                         {"documents", corpus.documents.size()},
                         {"queries", corpus.queries.size()}};
    out += header.dump();
    out += '\n';
    for (const Document& d : corpus.documents) {
        out += detail::to_json(d).dump();
        out += '\n';
    }
    for (const QuerySpec& q : corpus.queries) {
        out += detail::to_json(q).dump();
        out += '\n';
    }
    return out;
}

inline Corpus corpus_from_jsonl(std::string_view text) {
    using nlohmann::json;
    Corpus corpus;
    std::size_t line_no = 0;
    std::size_t expected_docs = 0;
    std::size_t expected_queries = 0;
    bool have_header = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        const std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ParseError(line_no, std::string("invalid JSON: ") + e.what());
        }
        try {
            const std::string record = j.at("record").get<std::string>();
            if (!have_header) {
                if (record != "header" || j.at("format").get<std::string>() != kCorpusFormat)
                    throw ParseError(line_no, "expected corpus header record");
                if (j.at("version").get<int>() != kCorpusVersion)
                    throw ParseError(line_no, "unsupported corpus version");
                expected_docs = j.at("documents").get<std::size_t>();
                expected_queries = j.at("queries").get<std::size_t>();
                have_header = true;
            } else if (record == "document") {
                if (!corpus.queries.empty()) throw ParseError(line_no, "document record after query block");
                corpus.documents.push_back(detail::document_from_json(j));
            } else if (record == "query") {
                corpus.queries.push_back(detail::query_from_json(j));
            } else {
                throw ParseError(line_no, "unknown record type '" + record + "'");
            }
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(line_no, std::string("malformed record: ") + e.what());
        }
    }
    if (!have_header) throw ParseError(line_no + 1, "missing corpus header");
    if (corpus.documents.size() != expected_docs || corpus.queries.size() != expected_queries) {
        throw ParseError(line_no + 1, "truncated corpus: expected " + std::to_string(expected_docs) +
                                          " documents and " + std::to_string(expected_queries) +
                                          " queries, found " + std::to_string(corpus.documents.size()) +
                                          " and " + std::to_string(corpus.queries.size()));
    }
    return corpus;
}

inline void serialize_corpus(const Corpus& corpus, const std::filesystem::path& path) {
    write_file_atomic(path, corpus_to_jsonl(corpus));
}

inline Corpus deserialize_corpus(const std::filesystem::path& path) {
    return corpus_from_jsonl(read_file(path));
}

}  // namespace cirdil
