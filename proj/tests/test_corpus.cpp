#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

#include "cirdil/chunking.hpp"
#include "cirdil/corpus_gen.hpp"
#include "cirdil/corpus_io.hpp"

using namespace cirdil;

namespace {

const Corpus& reference_corpus() {
    static const Corpus corpus = generate_corpus(CorpusConfig{});
    return corpus;
}

CorpusConfig small_config(std::uint64_t seed) {
    CorpusConfig c;
    c.seed = seed;
    c.doc_counts = scaled_doc_counts(12);
    c.docs_per_topic = 3;
    c.query_count = 40;
    return c;
}

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("cirdil_test_corpus_" + name);
}

}  // namespace

TEST(CorpusGen, ReferenceCountsPerTypology) {
    const Corpus& c = reference_corpus();
    ASSERT_EQ(c.documents.size(), 50u);
    std::map<Typology, int> seen;
    for (const auto& d : c.documents) ++seen[d.typology];
    EXPECT_EQ(seen[Typology::Normative], 15);
    EXPECT_EQ(seen[Typology::Technical], 20);
    EXPECT_EQ(seen[Typology::Transactional], 15);
}

TEST(CorpusGen, ReferenceQuerySplit) {
    const Corpus& c = reference_corpus();
    std::size_t spec = 0, them = 0;
    for (const auto& q : c.queries) (q.intent == Intent::Specific ? spec : them)++;
    EXPECT_EQ(c.queries.size(), 200u);
    EXPECT_EQ(them, 50u);
    EXPECT_EQ(spec, 150u);
}

TEST(CorpusGen, MinimalCorpus) {
    CorpusConfig cfg;
    cfg.doc_counts = {{Typology::Normative, 1}, {Typology::Technical, 0}, {Typology::Transactional, 0}};
    cfg.sections_per_doc = {1, 1};
    cfg.facts_per_section = {1, 1};
    const Corpus c = generate_corpus(cfg);
    ASSERT_EQ(c.documents.size(), 1u);
    std::size_t spec = 0, them = 0;
    for (const auto& q : c.queries) (q.intent == Intent::Specific ? spec : them)++;
    EXPECT_GE(spec, 1u);
    EXPECT_EQ(them, 1u);
}

TEST(CorpusGen, SameSeedByteIdentical) {
    const auto cfg = small_config(5);
    EXPECT_EQ(corpus_to_jsonl(generate_corpus(cfg)), corpus_to_jsonl(generate_corpus(cfg)));
}

TEST(CorpusGen, DifferentSeedsDiffer) {
    EXPECT_NE(corpus_to_jsonl(generate_corpus(small_config(1))), corpus_to_jsonl(generate_corpus(small_config(2))));
}

TEST(CorpusGen, InvalidConfigNamesField) {
    auto expect_field = [](CorpusConfig cfg, const std::string& field) {
        try {
            generate_corpus(cfg);
            ADD_FAILURE() << "expected ConfigError for " << field;
        } catch (const ConfigError& e) {
            EXPECT_EQ(e.field(), field);
        }
    };
    CorpusConfig c;
    c.chunk_token_target = 15;
    expect_field(c, "chunk_token_target");
    c = {};
    c.doc_counts = {{Typology::Normative, 0}};
    expect_field(c, "doc_counts");
    c = {};
    c.doc_counts[Typology::Technical] = -1;
    expect_field(c, "doc_counts.technical");
    c = {};
    c.sections_per_doc = {3, 2};
    expect_field(c, "sections_per_doc");
    c = {};
    c.facts_per_section = {0, 1};
    expect_field(c, "facts_per_section");
    c = {};
    c.vocab_topic_size = 4;
    expect_field(c, "vocab_topic_size");
    c = {};
    c.specific_fraction = 1.0;
    expect_field(c, "specific_fraction");
}

TEST(CorpusGen, ScaledDocCounts) {
    EXPECT_EQ(scaled_doc_counts(50), (std::map<Typology, int>{
                                         {Typology::Normative, 15}, {Typology::Technical, 20}, {Typology::Transactional, 15}}));
    const auto small = scaled_doc_counts(1);
    int total = 0;
    for (const auto& [t, n] : small) total += n;
    EXPECT_EQ(total, 1);
}

class CorpusProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(CorpusProperties, DocumentStructure) {
    const Corpus c = generate_corpus(small_config(GetParam()));
    std::set<std::string> ids;
    for (const auto& d : c.documents) {
        EXPECT_TRUE(ids.insert(d.doc_id).second) << d.doc_id;
        ASSERT_FALSE(d.sections.empty());
        for (const auto& s : d.sections) {
            ASSERT_GE(s.heading_path.size(), 1u);
            ASSERT_LE(s.heading_path.size(), 4u);
            EXPECT_EQ(s.heading_path.front(), join_tokens(d.title));
            EXPECT_FALSE(s.body.empty());
            std::size_t total = 0;
            for (auto n : s.sentence_lengths) total += n;
            EXPECT_EQ(total, s.body.size());
            for (const auto& f : s.facts) {
                EXPECT_NE(std::search(s.body.begin(), s.body.end(), f.statement.begin(), f.statement.end()),
                          s.body.end())
                    << f.fact_id;
                for (const auto& k : f.key_phrase)
                    EXPECT_NE(std::find(f.statement.begin(), f.statement.end(), k), f.statement.end());
            }
        }
    }
}

TEST_P(CorpusProperties, FactKeyTokensLandInExactlyOneChunk) {
    const auto cfg = small_config(GetParam());
    const Corpus c = generate_corpus(cfg);
    const auto chunks = chunk_corpus(c.documents, static_cast<std::size_t>(cfg.chunk_token_target));
    std::map<Token, std::set<std::string>> where;
    for (const auto& ch : chunks)
        for (const auto& t : ch.tokens) where[t].insert(ch.chunk_id);
    std::size_t facts = 0;
    for (const auto& d : c.documents)
        for (const auto& s : d.sections)
            for (const auto& f : s.facts) {
                ++facts;
                for (const auto& k : f.key_phrase) EXPECT_EQ(where[k].size(), 1u) << f.fact_id << " " << k;
            }
    EXPECT_GT(facts, 0u);
}

TEST_P(CorpusProperties, TopicVocabulariesAreDisjointAcrossTopics) {
    const auto cfg = small_config(GetParam());
    detail::CorpusBuilder builder(cfg);
    const Corpus c = builder.build();
    const auto& topic_of = builder.topic_of();
    ASSERT_EQ(topic_of.size(), c.documents.size());
    std::set<std::size_t> topics(topic_of.begin(), topic_of.end());
    ASSERT_GE(topics.size(), 2u);

    std::map<std::size_t, std::set<Token>> vocab;
    for (auto t : topics) {
        const auto w = builder.topic_words(t);
        vocab[t] = std::set<Token>(w.begin(), w.end());
    }
    for (auto a : topics)
        for (auto b : topics) {
            if (a >= b) continue;
            for (const auto& w : vocab[a]) EXPECT_EQ(vocab[b].count(w), 0u) << w;
        }
    const std::set<Token> shared(builder.shared_vocab().begin(), builder.shared_vocab().end());
    for (const auto& w : shared)
        for (auto t : topics) EXPECT_EQ(vocab[t].count(w), 0u);

    // Topic words used by a document come only from its own topic.
    for (std::size_t i = 0; i < c.documents.size(); ++i) {
        for (const auto& s : c.documents[i].sections)
            for (const auto& tok : s.body)
                for (auto t : topics)
                    if (t != topic_of[i]) {
                        ASSERT_EQ(vocab[t].count(tok), 0u) << c.documents[i].doc_id << " " << tok;
                    }
    }
}

TEST_P(CorpusProperties, QueriesAreWellFormed) {
    const auto cfg = small_config(GetParam());
    const Corpus c = generate_corpus(cfg);
    const auto target = static_cast<std::size_t>(cfg.chunk_token_target);
    std::map<std::string, Chunk> by_id;
    std::map<std::string, std::vector<std::string>> doc_chunks;
    for (const auto& ch : chunk_corpus(c.documents, target)) {
        doc_chunks[ch.doc_id].push_back(ch.chunk_id);
        by_id[ch.chunk_id] = ch;
    }
    std::set<Token> all_keys;
    for (const auto& d : c.documents)
        for (const auto& s : d.sections)
            for (const auto& f : s.facts) all_keys.insert(f.key_phrase.begin(), f.key_phrase.end());

    std::set<std::string> qids;
    for (const auto& q : c.queries) {
        EXPECT_TRUE(qids.insert(q.query_id).second);
        EXPECT_GE(q.text.size(), 3u) << q.query_id;
        EXPECT_LE(q.text.size(), 8u) << q.query_id;
        if (q.intent == Intent::Specific) {
            ASSERT_EQ(q.gold_chunk_ids.size(), 1u);
            const Chunk& gold = by_id.at(q.gold_chunk_ids[0]);
            EXPECT_EQ(gold.doc_id, q.gold_doc_id);
            std::size_t keys = 0;
            for (const auto& t : q.text) {
                if (!all_keys.count(t)) continue;
                ++keys;
                EXPECT_NE(std::find(gold.tokens.begin(), gold.tokens.end(), t), gold.tokens.end()) << q.query_id;
            }
            EXPECT_GE(keys, 1u);
        } else {
            EXPECT_EQ(q.gold_chunk_ids, doc_chunks.at(q.gold_doc_id));
            for (const auto& t : q.text) EXPECT_EQ(all_keys.count(t), 0u) << q.query_id;
            std::size_t covered = 0;
            for (const auto& id : q.gold_chunk_ids) {
                const auto& toks = by_id.at(id).tokens;
                const bool hit = std::any_of(q.text.begin(), q.text.end(), [&](const Token& t) {
                    return std::find(toks.begin(), toks.end(), t) != toks.end();
                });
                covered += hit ? 1 : 0;
            }
            EXPECT_GE(2 * covered, q.gold_chunk_ids.size()) << q.query_id;
        }
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, CorpusProperties, ::testing::Values(1u, 2u, 42u, 99u, 2024u));

TEST(CorpusIo, RoundTripReferenceCorpus) {
    const auto path = temp_path("roundtrip.jsonl");
    serialize_corpus(reference_corpus(), path);
    EXPECT_EQ(deserialize_corpus(path), reference_corpus());
    std::filesystem::remove(path);
}

TEST(CorpusIo, TruncatedFileIsParseError) {
    const std::string text = corpus_to_jsonl(generate_corpus(small_config(3)));
    // Drop the last line.
    const auto cut = text.rfind('\n', text.size() - 2);
    try {
        corpus_from_jsonl(text.substr(0, cut + 1));
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_GT(e.line(), 0u);
    }
    // Cut in the middle of a record.
    EXPECT_THROW(corpus_from_jsonl(text.substr(0, text.size() / 2)), ParseError);
}

TEST(CorpusIo, MalformedLineReportsLineNumber) {
    std::string text = corpus_to_jsonl(generate_corpus(small_config(3)));
    const auto second = text.find('\n') + 1;
    text.insert(second, "{not json}\n");
    try {
        corpus_from_jsonl(text);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
}

TEST(CorpusIo, EmptyDocumentList) {
    const Corpus empty;
    const std::string text = corpus_to_jsonl(empty);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1);
    EXPECT_EQ(corpus_from_jsonl(text), empty);
}

TEST(CorpusIo, MissingFileIsIoError) {
    EXPECT_THROW(deserialize_corpus(temp_path("does_not_exist.jsonl")), IoError);
}
