#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "cirdil/chunking.hpp"
#include "cirdil/corpus.hpp"
#include "cirdil/rng.hpp"
#include "cirdil/tokenize.hpp"

namespace cirdil {

namespace detail {

struct TypologyProfile {
    IntRange section_tokens;
    IntRange sentence_tokens;
    const char* title_head;
};

// Normative sections are long and dense, technical ones medium, transactional
// ones are short runs of linearized "key value" rows.
inline TypologyProfile profile_of(Typology t) {
    switch (t) {
        case Typology::Normative: return {{320, 820}, {10, 20}, "regulation"};
        case Typology::Technical: return {{140, 420}, {8, 14}, "specification"};
        case Typology::Transactional: return {{36, 180}, {6, 12}, "ledger"};
    }
    return {{100, 200}, {8, 14}, "document"};
}

// Generator shape constants.
inline constexpr double kTopicShare = 0.38;       // body tokens drawn from the topic vocabulary
inline constexpr double kTitleInLead = 0.25;      // lead sentence mentions a title word
inline constexpr double kTitleInBody = 0.004;     // any other body token is a title word
inline constexpr int kAspectsPerTopic = 12;       // topic words reserved for headings
inline constexpr int kKeyRepeats = 4;             // key phrase occurrences inside a fact statement
inline constexpr double kSharedZipf = 0.7;        // rank exponent of background word frequencies
inline constexpr double kTopicZipf = 0.8;         // rank exponent of topic word frequencies

class WordFactory {
public:
    explicit WordFactory(Rng& rng) : rng_(rng) {}

    Token fresh_word(int min_syllables, int max_syllables) {
        for (;;) {
            Token w;
            const auto n = rng_.between(min_syllables, max_syllables);
            for (std::int64_t i = 0; i < n; ++i) w += syllable();
            if (used_.insert(w).second) return w;
        }
    }

    // Letters followed by digits: never collides with plain words or numbers.
    Token fresh_key_token() {
        for (;;) {
            Token w = syllable();
            w += std::to_string(rng_.between(100, 9999));
            if (used_.insert(w).second) return w;
        }
    }

private:
    std::string syllable() {
        static constexpr std::string_view onsets = "bcdfghjklmnprstvwz";
        static constexpr std::string_view vowels = "aeiou";
        static constexpr std::string_view codas = "nrslm";
        std::string s;
        s += onsets[rng_.below(onsets.size())];
        s += vowels[rng_.below(vowels.size())];
        if (rng_.chance(0.3)) s += codas[rng_.below(codas.size())];
        return s;
    }

    Rng& rng_;
    std::set<std::string> used_;
};

struct TopicVocab {
    std::vector<Token> aspects;
    std::vector<Token> general;
    WeightedSampler general_sampler;
};

struct Sentence {
    TokenSeq tokens;
    int fact = -1;  // index into the section's facts, -1 for plain sentences
};

class CorpusBuilder {
public:
    explicit CorpusBuilder(const CorpusConfig& config)
        : config_(config), rng_(fork_seed(config.seed, "corpus")), words_(rng_) {}

    Corpus build() {
        build_shared_vocab();
        const auto plan = plan_documents();
        build_topics();
        Corpus corpus;
        for (std::size_t i = 0; i < plan.size(); ++i) {
            corpus.documents.push_back(build_document(plan[i].first, plan[i].second, topic_of_[i]));
        }
        build_queries(corpus);
        return corpus;
    }

    // Valid after build(): topic index of each document, and each topic's words.
    const std::vector<std::size_t>& topic_of() const noexcept { return topic_of_; }
    const std::vector<Token>& shared_vocab() const noexcept { return shared_; }
    std::vector<Token> topic_words(std::size_t topic) const {
        std::vector<Token> w = topics_.at(topic).aspects;
        w.insert(w.end(), topics_.at(topic).general.begin(), topics_.at(topic).general.end());
        return w;
    }

private:
    void build_shared_vocab() {
        shared_.reserve(static_cast<std::size_t>(config_.vocab_shared_size));
        for (int i = 0; i < config_.vocab_shared_size; ++i) shared_.push_back(words_.fresh_word(1, 2));
        shared_sampler_ = WeightedSampler::zipf(shared_.size(), kSharedZipf);
    }

    std::vector<std::pair<Typology, int>> plan_documents() {
        std::vector<std::pair<Typology, int>> plan;
        for (Typology t : kAllTypologies) {
            const auto it = config_.doc_counts.find(t);
            const int n = it == config_.doc_counts.end() ? 0 : it->second;
            for (int k = 0; k < n; ++k) plan.emplace_back(t, k);
        }
        const std::size_t n_docs = plan.size();
        n_topics_ = (n_docs + static_cast<std::size_t>(config_.docs_per_topic) - 1) /
                    static_cast<std::size_t>(config_.docs_per_topic);
        std::vector<std::size_t> order(n_docs);
        for (std::size_t i = 0; i < n_docs; ++i) order[i] = i;
        rng_.shuffle(order);
        topic_of_.assign(n_docs, 0);
        for (std::size_t i = 0; i < n_docs; ++i) topic_of_[order[i]] = i % n_topics_;
        return plan;
    }

    void build_topics() {
        const int aspects = std::min(kAspectsPerTopic, config_.vocab_topic_size / 4);
        for (std::size_t t = 0; t < n_topics_; ++t) {
            TopicVocab v;
            for (int i = 0; i < config_.vocab_topic_size; ++i) {
                (i < aspects ? v.aspects : v.general).push_back(words_.fresh_word(2, 3));
            }
            v.general_sampler = WeightedSampler::zipf(v.general.size(), kTopicZipf);
            topics_.push_back(std::move(v));
        }
    }

    const Token& shared_word() { return shared_[shared_sampler_(rng_)]; }

    const Token& topic_word(const TopicVocab& v) { return v.general[v.general_sampler(rng_)]; }

    std::string number_token() { return std::to_string(rng_.between(1, 9999)); }

    // A body token for a plain sentence.
    Token filler_token(const TopicVocab& v, const TokenSeq& title_words) {
        if (rng_.chance(kTitleInBody)) return rng_.pick(title_words);
        if (rng_.chance(kTopicShare)) return topic_word(v);
        return shared_word();
    }

    void insert_at_random(TokenSeq& s, const Token& t) {
        const auto pos = static_cast<std::ptrdiff_t>(rng_.below(s.size() + 1));
        s.insert(s.begin() + pos, t);
    }

    Sentence plain_sentence(Typology typ, const TopicVocab& v, const TokenSeq& title_words,
                            const TypologyProfile& prof) {
        Sentence s;
        const auto len = rng_.between(prof.sentence_tokens.lo, prof.sentence_tokens.hi);
        if (typ == Typology::Transactional) {
            // key value key value ...
            for (std::int64_t i = 0; i + 1 < len; i += 2) {
                s.tokens.push_back(rng_.chance(0.5) ? rng_.pick(v.aspects) : topic_word(v));
                s.tokens.push_back(number_token());
            }
        } else {
            for (std::int64_t i = 0; i < len; ++i) s.tokens.push_back(filler_token(v, title_words));
        }
        return s;
    }

    Sentence lead_sentence(Typology typ, const TopicVocab& v, const TokenSeq& title_words,
                           const TokenSeq& heading_aspects, const TypologyProfile& prof) {
        Sentence s = plain_sentence(typ, v, title_words, prof);
        for (const Token& a : heading_aspects) insert_at_random(s.tokens, a);
        if (rng_.chance(kTitleInLead)) insert_at_random(s.tokens, rng_.pick(title_words));
        return s;
    }

    Sentence fact_sentence(Typology typ, const TopicVocab& v, const TokenSeq& key_phrase,
                           const TokenSeq& heading_aspects) {
        Sentence s;
        s.tokens.push_back(rng_.pick(heading_aspects));
        for (int rep = 0; rep < kKeyRepeats; ++rep) {
            s.tokens.insert(s.tokens.end(), key_phrase.begin(), key_phrase.end());
            if (typ == Typology::Transactional) {
                s.tokens.push_back(number_token());
            } else {
                s.tokens.push_back(shared_word());
                s.tokens.push_back(topic_word(v));
            }
        }
        return s;
    }

    Document build_document(Typology typ, int ordinal, std::size_t topic) {
        const TopicVocab& v = topics_[topic];
        const TypologyProfile prof = profile_of(typ);
        Document doc;
        doc.doc_id = std::string(to_string(typ).substr(0, 3)) + "-" + std::to_string(1000 + ordinal).substr(1);
        doc.typology = typ;

        TokenSeq title_words = {words_.fresh_word(2, 3), words_.fresh_word(2, 3)};
        doc.title.push_back(prof.title_head);
        doc.title.insert(doc.title.end(), title_words.begin(), title_words.end());
        doc.title.push_back(rng_.pick(v.aspects));
        const std::string title_str = join_tokens(doc.title);

        const auto n_sections = rng_.between(config_.sections_per_doc.lo, config_.sections_per_doc.hi);
        std::string part_heading;
        for (std::int64_t si = 0; si < n_sections; ++si) {
            Section sec;
            TokenSeq aspects;
            aspects.push_back(rng_.pick(v.aspects));
            Token second = rng_.pick(v.aspects);
            while (second == aspects[0]) second = rng_.pick(v.aspects);
            aspects.push_back(std::move(second));
            const std::string section_heading = join_tokens(aspects);
            sec.heading_path.push_back(title_str);
            if (typ == Typology::Normative) {
                if (si % 3 == 0) part_heading = "chapter " + rng_.pick(v.aspects);
                sec.heading_path.push_back(part_heading);
                sec.heading_path.push_back(section_heading);
            } else if (typ == Typology::Technical) {
                sec.heading_path.push_back(section_heading);
            } else {
                sec.heading_path.push_back("table " + section_heading);
            }
            fill_section(sec, doc, typ, v, title_words, aspects, prof, static_cast<std::size_t>(si));
            doc.sections.push_back(std::move(sec));
        }
        return doc;
    }

    void fill_section(Section& sec, const Document& doc, Typology typ, const TopicVocab& v,
                      const TokenSeq& title_words, const TokenSeq& aspects, const TypologyProfile& prof,
                      std::size_t section_index) {
        const auto target_len = rng_.between(prof.section_tokens.lo, prof.section_tokens.hi);
        const auto n_facts = rng_.between(config_.facts_per_section.lo, config_.facts_per_section.hi);

        std::vector<Sentence> sentences;
        sentences.push_back(lead_sentence(typ, v, title_words, aspects, prof));
        std::int64_t len = static_cast<std::int64_t>(sentences.front().tokens.size());
        std::vector<Sentence> facts;
        for (std::int64_t f = 0; f < n_facts; ++f) {
            Fact fact;
            fact.fact_id = doc.doc_id + "-f" + std::to_string(section_index) + "." + std::to_string(f);
            const auto key_len = rng_.between(2, 3);
            for (std::int64_t k = 0; k < key_len; ++k) fact.key_phrase.push_back(words_.fresh_key_token());
            fact.home_section = section_index;
            Sentence s = fact_sentence(typ, v, fact.key_phrase, aspects);
            s.fact = static_cast<int>(f);
            fact.statement = s.tokens;
            len += static_cast<std::int64_t>(s.tokens.size());
            sec.facts.push_back(std::move(fact));
            facts.push_back(std::move(s));
        }
        while (len < target_len) {
            sentences.push_back(plain_sentence(typ, v, title_words, prof));
            len += static_cast<std::int64_t>(sentences.back().tokens.size());
        }
        for (Sentence& f : facts) {
            const auto pos = 1 + static_cast<std::ptrdiff_t>(rng_.below(sentences.size()));
            sentences.insert(sentences.begin() + pos, std::move(f));
        }

        // Emit sentences; a fact that would straddle a chunk window boundary is
        // pushed to the next window by a filler sentence so its key phrase stays in
        // exactly one chunk.
        const auto window = static_cast<std::size_t>(config_.chunk_token_target);
        for (Sentence& s : sentences) {
            if (s.fact >= 0) {
                const std::size_t off = sec.body.size() % window;
                if (off + s.tokens.size() > window) {
                    TokenSeq filler;
                    for (std::size_t k = off; k < window; ++k) filler.push_back(shared_word());
                    sec.sentence_lengths.push_back(filler.size());
                    sec.body.insert(sec.body.end(), filler.begin(), filler.end());
                }
            }
            sec.sentence_lengths.push_back(s.tokens.size());
            sec.body.insert(sec.body.end(), s.tokens.begin(), s.tokens.end());
        }
    }

    void build_queries(Corpus& corpus) {
        const auto target = static_cast<std::size_t>(config_.chunk_token_target);
        const std::size_t n_docs = corpus.documents.size();

        struct FactRef {
            std::size_t doc;
            std::size_t section;
            std::size_t fact;
        };
        std::vector<FactRef> facts;
        for (std::size_t d = 0; d < n_docs; ++d) {
            const auto& doc = corpus.documents[d];
            for (std::size_t s = 0; s < doc.sections.size(); ++s) {
                for (std::size_t f = 0; f < doc.sections[s].facts.size(); ++f) facts.push_back({d, s, f});
            }
        }

        const auto requested_specific = static_cast<std::size_t>(
            static_cast<double>(config_.query_count) * config_.specific_fraction + 0.5);
        const std::size_t requested_thematic =
            static_cast<std::size_t>(config_.query_count) - std::min<std::size_t>(
                requested_specific, static_cast<std::size_t>(config_.query_count));
        const std::size_t n_thematic = std::min(std::max<std::size_t>(requested_thematic, 1), n_docs);
        const std::size_t n_specific =
            std::min(static_cast<std::size_t>(config_.query_count) - n_thematic, facts.size());

        rng_.shuffle(facts);
        for (std::size_t q = 0; q < n_specific; ++q) {
            const FactRef& ref = facts[q];
            const Document& doc = corpus.documents[ref.doc];
            const Section& sec = doc.sections[ref.section];
            const Fact& fact = sec.facts[ref.fact];
            QuerySpec spec;
            spec.query_id = "qs-" + std::to_string(10000 + q).substr(1);
            spec.intent = Intent::Specific;
            spec.text = fact.key_phrase;
            TokenSeq intents = tokenize(sec.heading_path.back());
            intents.erase(std::remove(intents.begin(), intents.end(), "table"), intents.end());
            rng_.shuffle(intents);
            const auto n_intent = std::min<std::size_t>(intents.size(), static_cast<std::size_t>(rng_.between(1, 3)));
            spec.text.insert(spec.text.end(), intents.begin(), intents.begin() + static_cast<std::ptrdiff_t>(n_intent));
            const std::size_t at = locate(sec.body, fact.statement);
            spec.gold_chunk_ids.push_back(make_chunk_id(doc.doc_id, ref.section, at / target * target));
            spec.gold_doc_id = doc.doc_id;
            corpus.queries.push_back(std::move(spec));
        }

        std::vector<std::size_t> doc_order(n_docs);
        for (std::size_t d = 0; d < n_docs; ++d) doc_order[d] = d;
        rng_.shuffle(doc_order);
        for (std::size_t q = 0; q < n_thematic; ++q) {
            const std::size_t d = doc_order[q];
            const Document& doc = corpus.documents[d];
            QuerySpec spec;
            spec.query_id = "qt-" + std::to_string(10000 + q).substr(1);
            spec.intent = Intent::Thematic;
            spec.text = thematic_text(doc, topics_[topic_of_[d]]);
            for (const Chunk& c : chunk_document(doc, target)) spec.gold_chunk_ids.push_back(c.chunk_id);
            spec.gold_doc_id = doc.doc_id;
            corpus.queries.push_back(std::move(spec));
        }
    }

    // Title words plus the document's most frequent topic words.
    TokenSeq thematic_text(const Document& doc, const TopicVocab& v) {
        std::unordered_map<Token, std::size_t> freq;
        std::set<Token> topic_set(v.general.begin(), v.general.end());
        for (const Section& s : doc.sections) {
            for (const Token& t : s.body) {
                if (topic_set.count(t)) ++freq[t];
            }
        }
        std::vector<std::pair<Token, std::size_t>> ranked(freq.begin(), freq.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        if (ranked.size() > 8) ranked.resize(8);
        rng_.shuffle(ranked);

        TokenSeq text;
        const auto n_title = rng_.between(1, 2);
        text.insert(text.end(), doc.title.begin() + 1, doc.title.begin() + 1 + n_title);
        const auto n_topic = std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(rng_.between(2, 4)));
        for (std::size_t i = 0; i < n_topic; ++i) text.push_back(ranked[i].first);
        return text;
    }

    static std::size_t locate(const TokenSeq& body, const TokenSeq& needle) {
        const auto it = std::search(body.begin(), body.end(), needle.begin(), needle.end());
        return static_cast<std::size_t>(it - body.begin());
    }

    const CorpusConfig& config_;
    Rng rng_;
    WordFactory words_;
    std::vector<Token> shared_;
    WeightedSampler shared_sampler_;
    std::size_t n_topics_ = 0;
    std::vector<std::size_t> topic_of_;
    std::vector<TopicVocab> topics_;
};

}  // namespace detail

/// Generates a synthetic corpus with ground-truth queries. Pure function of config.
///
/// Documents of one topic share a topic vocabulary; documents of different topics
/// share only the background vocabulary. Each fact carries globally unique key
/// tokens placed so that they land in exactly one chunk when chunked at
/// config.chunk_token_target. Specific queries are a fact's key phrase plus 1-3
/// words of its section heading; thematic queries are 1-2 title words plus the
/// document's most frequent topic words.
inline Corpus generate_corpus(const CorpusConfig& config) {
    validate(config);
    return detail::CorpusBuilder(config).build();
}

}  // namespace cirdil
