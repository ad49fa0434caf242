#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cirdil/chunking.hpp"
#include "cirdil/corpus.hpp"
#include "cirdil/errors.hpp"
#include "cirdil/tokenize.hpp"

namespace cirdil {

/// Context injection ratio L(I) / (L(I) + L(c)). Lies in [0, 1).
inline double compute_cir(std::size_t context_len, std::size_t chunk_len) {
    if (chunk_len == 0) throw DomainError("compute_cir: chunk length must be >= 1");
    return static_cast<double>(context_len) / static_cast<double>(context_len + chunk_len);
}

/// Largest context length whose CIR over a chunk of chunk_len tokens stays at or
/// below t_max: floor(chunk_len * t_max / (1 - t_max)).
inline std::size_t ddai_budget(std::size_t chunk_len, double t_max) {
    if (!(t_max > 0.0 && t_max < 1.0)) throw DomainError("ddai_budget: t_max must lie in (0, 1)");
    if (chunk_len == 0) throw DomainError("ddai_budget: chunk length must be >= 1");
    const double raw = static_cast<double>(chunk_len) * t_max / (1.0 - t_max);
    auto budget = static_cast<std::size_t>(std::floor(raw));
    // The closed form is evaluated in floating point; settle the last unit against
    // the exact CIR check.
    while (budget > 0 && compute_cir(budget, chunk_len) > t_max) --budget;
    while (compute_cir(budget + 1, chunk_len) <= t_max) ++budget;
    return budget;
}

enum class StrategyKind { Baseline, Low, Medium, High, Overload, DDAI };

inline constexpr std::array<StrategyKind, 5> kStaticStrategies = {
    StrategyKind::Baseline, StrategyKind::Low, StrategyKind::Medium, StrategyKind::High,
    StrategyKind::Overload};

inline std::string_view to_string(StrategyKind k) noexcept {
    switch (k) {
        case StrategyKind::Baseline: return "baseline";
        case StrategyKind::Low: return "low";
        case StrategyKind::Medium: return "medium";
        case StrategyKind::High: return "high";
        case StrategyKind::Overload: return "overload";
        case StrategyKind::DDAI: return "ddai";
    }
    return "?";
}

inline std::optional<StrategyKind> parse_strategy(std::string_view s) noexcept {
    for (StrategyKind k : {StrategyKind::Baseline, StrategyKind::Low, StrategyKind::Medium,
                           StrategyKind::High, StrategyKind::Overload, StrategyKind::DDAI}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

// Nominal CIR of each static strategy at the reference chunk length.
inline double nominal_cir(StrategyKind k) noexcept {
    switch (k) {
        case StrategyKind::Low: return 0.15;
        case StrategyKind::Medium: return 0.35;
        case StrategyKind::High: return 0.60;
        case StrategyKind::Overload: return 0.85;
        default: return 0.0;
    }
}

struct InjectionStrategy {
    StrategyKind kind = StrategyKind::Baseline;
    // Rendered heading path is padded with title tokens up to this length.
    std::size_t hierarchy_budget = 0;
    // Token budget of the whole context block (hierarchy + summary + metadata);
    // the summary fills what the other parts leave.
    std::size_t context_budget = 0;
    bool with_summary = false;
    bool with_metadata = false;
    double t_max = 0.35;  // DDAI only

    // Static strategies are sized so that a chunk of reference_chunk_len tokens
    // reaches the strategy's nominal CIR: Low injects the hierarchy only, Medium and
    // High add a summary, Overload adds summary and metadata. Fixed-size contexts
    // mean shorter chunks get a higher CIR.
    static InjectionStrategy preset(StrategyKind kind, std::size_t reference_chunk_len = 250,
                                    double t_max = 0.35) {
        if (!(t_max > 0.0 && t_max < 1.0)) throw DomainError("t_max must lie in (0, 1)");
        InjectionStrategy s;
        s.kind = kind;
        s.t_max = t_max;
        if (kind == StrategyKind::Baseline) return s;
        const std::size_t low_budget = ddai_budget(reference_chunk_len, nominal_cir(StrategyKind::Low));
        if (kind == StrategyKind::DDAI) {
            s.with_summary = true;
            return s;
        }
        s.hierarchy_budget = low_budget;
        s.context_budget = ddai_budget(reference_chunk_len, nominal_cir(kind));
        s.with_summary = kind != StrategyKind::Low;
        s.with_metadata = kind == StrategyKind::Overload;
        return s;
    }
};

struct ContextBlock {
    TokenSeq hierarchy_tokens;
    TokenSeq summary_tokens;
    TokenSeq metadata_tokens;

    std::size_t length() const noexcept {
        return hierarchy_tokens.size() + summary_tokens.size() + metadata_tokens.size();
    }

    TokenSeq tokens() const {
        TokenSeq out;
        out.reserve(length());
        out.insert(out.end(), hierarchy_tokens.begin(), hierarchy_tokens.end());
        out.insert(out.end(), summary_tokens.begin(), summary_tokens.end());
        out.insert(out.end(), metadata_tokens.begin(), metadata_tokens.end());
        return out;
    }

    bool operator==(const ContextBlock&) const = default;
};

struct EnrichedChunk {
    Chunk base;
    ContextBlock context;
    TokenSeq tokens;  // context tokens followed by base tokens
    double cir = 0.0;
};

// Joins heading_path entries with this token; it counts toward L(I).
inline constexpr std::string_view kHeadingSeparator = "hsep";

inline TokenSeq render_hierarchy(const std::vector<std::string>& heading_path) {
    TokenSeq out;
    for (std::size_t i = 0; i < heading_path.size(); ++i) {
        if (i) out.emplace_back(kHeadingSeparator);
        for (Token& t : tokenize(heading_path[i])) out.push_back(std::move(t));
    }
    return out;
}

/// Extractive digest of a document: the first sentence of every section in
/// order, then every section's second sentence, and so on. Sentences holding a
/// fact key phrase are skipped so the digest carries topic, not facts.
inline TokenSeq document_digest(const Document& doc) {
    std::set<Token> key_tokens;
    for (const Section& s : doc.sections) {
        for (const Fact& f : s.facts) key_tokens.insert(f.key_phrase.begin(), f.key_phrase.end());
    }
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> spans(doc.sections.size());
    std::size_t rounds = 0;
    for (std::size_t s = 0; s < doc.sections.size(); ++s) {
        std::size_t at = 0;
        for (std::size_t len : doc.sections[s].sentence_lengths) {
            spans[s].emplace_back(at, len);
            at += len;
        }
        rounds = std::max(rounds, spans[s].size());
    }
    TokenSeq digest;
    for (std::size_t r = 0; r < rounds; ++r) {
        for (std::size_t s = 0; s < doc.sections.size(); ++s) {
            if (r >= spans[s].size()) continue;
            const auto [at, len] = spans[s][r];
            const auto first = doc.sections[s].body.begin() + static_cast<std::ptrdiff_t>(at);
            const auto last = first + static_cast<std::ptrdiff_t>(len);
            const bool has_key =
                std::any_of(first, last, [&](const Token& t) { return key_tokens.count(t) > 0; });
            if (!has_key) digest.insert(digest.end(), first, last);
        }
    }
    return digest;
}

// doc_id, typology and the list of section headings.
inline TokenSeq document_metadata(const Document& doc) {
    TokenSeq out = tokenize(doc.doc_id);
    out.emplace_back(to_string(doc.typology));
    out.emplace_back("sections");
    for (const Section& s : doc.sections) {
        for (Token& t : tokenize(s.heading_path.back())) out.push_back(std::move(t));
    }
    return out;
}

namespace detail {

inline TokenSeq padded_hierarchy(const std::vector<std::string>& heading_path, const TokenSeq& title,
                                 std::size_t budget) {
    TokenSeq h = render_hierarchy(heading_path);
    for (std::size_t i = 0; h.size() < budget && !title.empty(); ++i) h.push_back(title[i % title.size()]);
    if (h.size() > budget) h.resize(budget);
    return h;
}

inline TokenSeq take_prefix(const TokenSeq& seq, std::size_t n) {
    return TokenSeq(seq.begin(), seq.begin() + static_cast<std::ptrdiff_t>(std::min(n, seq.size())));
}

}  // namespace detail

/// Builds context blocks for the chunks of one document. Digest and metadata are
/// computed once per document.
class ContextBuilder {
public:
    explicit ContextBuilder(const Document& doc)
        : doc_(doc), digest_(document_digest(doc)), metadata_(document_metadata(doc)) {}

    ContextBlock build(const Chunk& chunk, const InjectionStrategy& strategy) const {
        if (chunk.doc_id != doc_.doc_id) throw DomainError("chunk " + chunk.chunk_id + " does not belong to " + doc_.doc_id);
        ContextBlock block;
        switch (strategy.kind) {
            case StrategyKind::Baseline:
                break;
            case StrategyKind::DDAI: {
                // Hierarchy first, then summary; never metadata.
                const std::size_t budget = ddai_budget(chunk.length(), strategy.t_max);
                block.hierarchy_tokens = detail::take_prefix(render_hierarchy(chunk.heading_path), budget);
                block.summary_tokens = detail::take_prefix(digest_, budget - block.hierarchy_tokens.size());
                break;
            }
            default: {
                block.hierarchy_tokens =
                    detail::padded_hierarchy(chunk.heading_path, doc_.title, strategy.hierarchy_budget);
                if (strategy.with_metadata) block.metadata_tokens = metadata_;
                if (strategy.with_summary) {
                    const std::size_t used = block.hierarchy_tokens.size() + block.metadata_tokens.size();
                    const std::size_t room = strategy.context_budget > used ? strategy.context_budget - used : 0;
                    block.summary_tokens = detail::take_prefix(digest_, room);
                }
                break;
            }
        }
        return block;
    }

    const TokenSeq& digest() const noexcept { return digest_; }

private:
    const Document& doc_;
    TokenSeq digest_;
    TokenSeq metadata_;
};

inline ContextBlock build_context(const Document& doc, const Chunk& chunk, const InjectionStrategy& strategy) {
    return ContextBuilder(doc).build(chunk, strategy);
}

/// c' = I ⊕ c.
inline EnrichedChunk enrich(const Chunk& chunk, ContextBlock context) {
    EnrichedChunk e;
    e.tokens = context.tokens();
    e.tokens.insert(e.tokens.end(), chunk.tokens.begin(), chunk.tokens.end());
    e.cir = compute_cir(context.length(), chunk.length());
    e.base = chunk;
    e.context = std::move(context);
    return e;
}

// Enriches every chunk; chunks must belong to documents in docs.
inline std::vector<EnrichedChunk> enrich_all(const std::vector<Document>& docs, const std::vector<Chunk>& chunks,
                                             const InjectionStrategy& strategy) {
    std::map<std::string, std::size_t> doc_index;
    for (std::size_t i = 0; i < docs.size(); ++i) doc_index.emplace(docs[i].doc_id, i);
    std::map<std::size_t, ContextBuilder> builders;
    std::vector<EnrichedChunk> out;
    out.reserve(chunks.size());
    for (const Chunk& c : chunks) {
        const auto it = doc_index.find(c.doc_id);
        if (it == doc_index.end()) throw DomainError("chunk " + c.chunk_id + " has unknown doc_id");
        auto b = builders.find(it->second);
        if (b == builders.end()) b = builders.emplace(it->second, ContextBuilder(docs[it->second])).first;
        out.push_back(enrich(c, b->second.build(c, strategy)));
    }
    return out;
}

inline double mean_cir(const std::vector<EnrichedChunk>& chunks) {
    if (chunks.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& c : chunks) sum += c.cir;
    return sum / static_cast<double>(chunks.size());
}

}  // namespace cirdil
