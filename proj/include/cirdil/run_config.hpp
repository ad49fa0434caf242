#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cirdil/corpus.hpp"
#include "cirdil/embedding.hpp"
#include "cirdil/errors.hpp"
#include "cirdil/injection.hpp"
#include "cirdil/rng.hpp"

namespace cirdil {

// Plain "key = value" lines. '#' starts a comment; blank lines are ignored.
inline std::map<std::string, std::string> parse_kv(std::string_view text) {
    auto trim = [](std::string_view s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) return std::string_view{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    std::map<std::string, std::string> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) {
            if (nl == text.size()) break;
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError(line_no, "expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError(line_no, "empty key");
        out[std::string(key)] = std::string(value);
        if (nl == text.size()) break;
    }
    return out;
}

/// Fully resolved settings of one CLI run. Defaults are the reference
/// configuration (seed 42, 50 documents, d = 256, the five static strategies).
struct RunConfig {
    std::uint64_t seed = 42;
    CorpusConfig corpus;
    EmbedderConfig embedder;
    // Unset means "derived from seed".
    std::optional<std::uint64_t> hash_seed;
    std::vector<StrategyKind> strategies{kStaticStrategies.begin(), kStaticStrategies.end()};
    double t_max = 0.35;
    std::size_t ndcg_k = 10;
    std::size_t recall_k = 5;
    std::size_t threads = 1;
    std::string out_dir = ".";

    // Every stage forks its own seed from the top-level one.
    CorpusConfig resolved_corpus() const {
        CorpusConfig c = corpus;
        c.seed = fork_seed(seed, "corpus");
        return c;
    }

    EmbedderConfig resolved_embedder() const {
        EmbedderConfig e = embedder;
        e.hash_seed = hash_seed.value_or(fork_seed(seed, "embedding"));
        return e;
    }

    std::vector<InjectionStrategy> resolved_strategies() const {
        std::vector<InjectionStrategy> out;
        for (StrategyKind k : strategies)
            out.push_back(InjectionStrategy::preset(k, static_cast<std::size_t>(corpus.chunk_token_target), t_max));
        return out;
    }
};

namespace detail {

inline std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
        const auto x = std::stoull(v, &used, 0);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
    }
}

inline int parse_int(const std::string& key, const std::string& v) {
    const auto x = parse_u64(key, v);
    if (x > 1'000'000'000ULL) throw ConfigError(key, "value too large");
    return static_cast<int>(x);
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + v + "'");
    }
}

inline IntRange parse_range(const std::string& key, const std::string& v) {
    const auto comma = v.find(',');
    if (comma == std::string::npos) {
        const int x = parse_int(key, v);
        return {x, x};
    }
    return {parse_int(key, v.substr(0, comma)), parse_int(key, v.substr(comma + 1))};
}

inline std::string range_text(IntRange r) { return std::to_string(r.lo) + "," + std::to_string(r.hi); }

}  // namespace detail

inline std::vector<StrategyKind> parse_strategy_list(const std::string& key, const std::string& v) {
    std::vector<StrategyKind> out;
    std::size_t pos = 0;
    while (pos <= v.size()) {
        auto comma = v.find(',', pos);
        if (comma == std::string::npos) comma = v.size();
        const std::string name = v.substr(pos, comma - pos);
        const auto k = parse_strategy(name);
        if (!k) throw ConfigError(key, "unknown strategy '" + name + "'");
        out.push_back(*k);
        pos = comma + 1;
    }
    if (out.empty()) throw ConfigError(key, "empty strategy list");
    return out;
}

inline std::string strategy_list_text(const std::vector<StrategyKind>& ks) {
    std::string out;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (i) out += ',';
        out += to_string(ks[i]);
    }
    return out;
}

/// Applies key-value settings on top of cfg. Unknown keys are a ConfigError.
inline void apply_kv(RunConfig& cfg, const std::map<std::string, std::string>& kv) {
    using namespace detail;
    for (const auto& [key, value] : kv) {
        if (key == "seed") cfg.seed = parse_u64(key, value);
        else if (key == "docs") cfg.corpus.doc_counts = scaled_doc_counts(parse_int(key, value));
        else if (key == "docs.normative") cfg.corpus.doc_counts[Typology::Normative] = parse_int(key, value);
        else if (key == "docs.technical") cfg.corpus.doc_counts[Typology::Technical] = parse_int(key, value);
        else if (key == "docs.transactional") cfg.corpus.doc_counts[Typology::Transactional] = parse_int(key, value);
        else if (key == "sections_per_doc") cfg.corpus.sections_per_doc = parse_range(key, value);
        else if (key == "facts_per_section") cfg.corpus.facts_per_section = parse_range(key, value);
        else if (key == "chunk_target") cfg.corpus.chunk_token_target = parse_int(key, value);
        else if (key == "vocab_topic_size") cfg.corpus.vocab_topic_size = parse_int(key, value);
        else if (key == "vocab_shared_size") cfg.corpus.vocab_shared_size = parse_int(key, value);
        else if (key == "docs_per_topic") cfg.corpus.docs_per_topic = parse_int(key, value);
        else if (key == "queries") cfg.corpus.query_count = parse_int(key, value);
        else if (key == "specific_fraction") cfg.corpus.specific_fraction = parse_double(key, value);
        else if (key == "dim") cfg.embedder.dim = static_cast<std::size_t>(parse_u64(key, value));
        else if (key == "hash_seed") cfg.hash_seed = parse_u64(key, value);
        else if (key == "strategies") cfg.strategies = parse_strategy_list(key, value);
        else if (key == "t_max") cfg.t_max = parse_double(key, value);
        else if (key == "ndcg_k") cfg.ndcg_k = static_cast<std::size_t>(parse_u64(key, value));
        else if (key == "recall_k") cfg.recall_k = static_cast<std::size_t>(parse_u64(key, value));
        else if (key == "threads") cfg.threads = static_cast<std::size_t>(parse_u64(key, value));
        else if (key == "out_dir") cfg.out_dir = value;
        else throw ConfigError(key, "unknown key");
    }
}

inline void validate(const RunConfig& cfg) {
    validate(cfg.resolved_corpus());
    validate(cfg.embedder);
    if (!(cfg.t_max > 0.0 && cfg.t_max < 1.0)) throw ConfigError("t_max", "must lie in (0, 1)");
    if (cfg.ndcg_k < 1) throw ConfigError("ndcg_k", "must be >= 1");
    if (cfg.recall_k < 1) throw ConfigError("recall_k", "must be >= 1");
    if (cfg.strategies.empty()) throw ConfigError("strategies", "empty strategy list");
}

// Resolved configuration in the same key-value syntax parse_kv reads.
inline std::string to_kv_text(const RunConfig& cfg) {
    const auto& c = cfg.corpus;
    auto count = [&](Typology t) {
        const auto it = c.doc_counts.find(t);
        return std::to_string(it == c.doc_counts.end() ? 0 : it->second);
    };
    char t_max[32];
    std::snprintf(t_max, sizeof t_max, "%.17g", cfg.t_max);
    char frac[32];
    std::snprintf(frac, sizeof frac, "%.17g", c.specific_fraction);
    std::string out;
    out += "seed = " + std::to_string(cfg.seed) + "\n";
    out += "docs.normative = " + count(Typology::Normative) + "\n";
    out += "docs.technical = " + count(Typology::Technical) + "\n";
    out += "docs.transactional = " + count(Typology::Transactional) + "\n";
    out += "sections_per_doc = " + detail::range_text(c.sections_per_doc) + "\n";
    out += "facts_per_section = " + detail::range_text(c.facts_per_section) + "\n";
    out += "chunk_target = " + std::to_string(c.chunk_token_target) + "\n";
    out += "vocab_topic_size = " + std::to_string(c.vocab_topic_size) + "\n";
    out += "vocab_shared_size = " + std::to_string(c.vocab_shared_size) + "\n";
    out += "docs_per_topic = " + std::to_string(c.docs_per_topic) + "\n";
    out += "queries = " + std::to_string(c.query_count) + "\n";
    out += std::string("specific_fraction = ") + frac + "\n";
    out += "dim = " + std::to_string(cfg.embedder.dim) + "\n";
    out += "hash_seed = " + std::to_string(cfg.resolved_embedder().hash_seed) + "\n";
    out += "strategies = " + strategy_list_text(cfg.strategies) + "\n";
    out += std::string("t_max = ") + t_max + "\n";
    out += "ndcg_k = " + std::to_string(cfg.ndcg_k) + "\n";
    out += "recall_k = " + std::to_string(cfg.recall_k) + "\n";
    out += "threads = " + std::to_string(cfg.threads) + "\n";
    out += "out_dir = " + cfg.out_dir + "\n";
    return out;
}

}  // namespace cirdil
