#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cirdil/errors.hpp"
#include "cirdil/tokenize.hpp"

namespace cirdil {

enum class Typology { Normative, Technical, Transactional };

inline constexpr std::array<Typology, 3> kAllTypologies = {Typology::Normative, Typology::Technical,
                                                           Typology::Transactional};

inline std::string_view to_string(Typology t) noexcept {
    switch (t) {
        case Typology::Normative: return "normative";
        case Typology::Technical: return "technical";
        case Typology::Transactional: return "transactional";
    }
    return "?";
}

inline std::optional<Typology> parse_typology(std::string_view s) noexcept {
    for (Typology t : kAllTypologies) {
        if (to_string(t) == s) return t;
    }
    return std::nullopt;
}

enum class Intent { Specific, Thematic };

inline std::string_view to_string(Intent i) noexcept {
    return i == Intent::Specific ? "specific" : "thematic";
}

inline std::optional<Intent> parse_intent(std::string_view s) noexcept {
    if (s == "specific") return Intent::Specific;
    if (s == "thematic") return Intent::Thematic;
    return std::nullopt;
}

// An atomic fact. key_phrase consists of rare tokens found nowhere else in the corpus.
struct Fact {
    std::string fact_id;
    TokenSeq key_phrase;
    TokenSeq statement;
    std::size_t home_section = 0;

    bool operator==(const Fact&) const = default;
};

struct Section {
    // heading_path[0] is the rendered document title; 1 to 4 entries.
    std::vector<std::string> heading_path;
    TokenSeq body;
    // Token counts of the consecutive sentences making up body. The extractive
    // digest used for context summaries is built from these boundaries.
    std::vector<std::size_t> sentence_lengths;
    std::vector<Fact> facts;

    bool operator==(const Section&) const = default;
};

struct Document {
    std::string doc_id;
    Typology typology = Typology::Normative;
    TokenSeq title;
    std::vector<Section> sections;

    bool operator==(const Document&) const = default;
};

struct QuerySpec {
    std::string query_id;
    Intent intent = Intent::Specific;
    TokenSeq text;
    // Specific: exactly one chunk. Thematic: every chunk of gold_doc_id.
    std::vector<std::string> gold_chunk_ids;
    std::string gold_doc_id;

    bool operator==(const QuerySpec&) const = default;
};

struct Corpus {
    std::vector<Document> documents;
    std::vector<QuerySpec> queries;

    bool operator==(const Corpus&) const = default;
};

struct IntRange {
    int lo = 0;
    int hi = 0;

    bool operator==(const IntRange&) const = default;
};

struct CorpusConfig {
    std::uint64_t seed = 42;
    std::map<Typology, int> doc_counts = {
        {Typology::Normative, 15}, {Typology::Technical, 20}, {Typology::Transactional, 15}};
    IntRange sections_per_doc{8, 14};
    int chunk_token_target = 250;
    IntRange facts_per_section{1, 2};
    int vocab_topic_size = 60;
    int vocab_shared_size = 400;
    // Documents sharing one topic vocabulary. Thematic queries must tell apart
    // documents of the same topic.
    int docs_per_topic = 10;
    int query_count = 200;
    // Requested share of specific queries. Thematic queries are capped at one per
    // document, and specific queries at the number of facts.
    double specific_fraction = 0.5;

    bool operator==(const CorpusConfig&) const = default;

    int total_docs() const {
        int n = 0;
        for (const auto& [t, c] : doc_counts) n += c;
        return n;
    }
};

// Throws ConfigError naming the first invalid field.
inline void validate(const CorpusConfig& c) {
    for (const auto& [t, n] : c.doc_counts) {
        if (n < 0) throw ConfigError("doc_counts." + std::string(to_string(t)), "must be >= 0");
    }
    if (c.total_docs() < 1) throw ConfigError("doc_counts", "total document count must be >= 1");
    if (c.sections_per_doc.lo < 1 || c.sections_per_doc.hi < c.sections_per_doc.lo)
        throw ConfigError("sections_per_doc", "need 1 <= lo <= hi");
    if (c.chunk_token_target < 16) throw ConfigError("chunk_token_target", "must be >= 16");
    if (c.facts_per_section.lo < 1 || c.facts_per_section.hi < c.facts_per_section.lo)
        throw ConfigError("facts_per_section", "need 1 <= lo <= hi");
    if (c.vocab_topic_size < 16) throw ConfigError("vocab_topic_size", "must be >= 16");
    if (c.vocab_shared_size < 1) throw ConfigError("vocab_shared_size", "must be >= 1");
    if (c.docs_per_topic < 1) throw ConfigError("docs_per_topic", "must be >= 1");
    if (c.query_count < 2) throw ConfigError("query_count", "must be >= 2");
    if (!(c.specific_fraction > 0.0 && c.specific_fraction < 1.0))
        throw ConfigError("specific_fraction", "must lie in (0, 1)");
}

// Splits a total document count across typologies in the 3:4:3 proportion of the
// reference corpus (150/200/150), so docs=50 gives 15/20/15.
inline std::map<Typology, int> scaled_doc_counts(int total) {
    const int normative = static_cast<int>((static_cast<long long>(total) * 3 + 5) / 10);
    const int transactional = static_cast<int>((static_cast<long long>(total) * 3 + 5) / 10);
    const int technical = total - normative - transactional;
    return {{Typology::Normative, normative},
            {Typology::Technical, technical},
            {Typology::Transactional, transactional}};
}

}  // namespace cirdil
