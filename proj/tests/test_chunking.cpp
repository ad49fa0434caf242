#include <gtest/gtest.h>

#include "cirdil/chunking.hpp"
#include "cirdil/corpus_gen.hpp"
#include "cirdil/dumps.hpp"
#include "cirdil/rng.hpp"

using namespace cirdil;

namespace {

Document doc_with_sections(std::vector<std::size_t> lengths) {
    Document d;
    d.doc_id = "doc-x";
    d.title = {"some", "title"};
    for (std::size_t s = 0; s < lengths.size(); ++s) {
        Section sec;
        sec.heading_path = {"some title", "part " + std::to_string(s)};
        for (std::size_t i = 0; i < lengths[s]; ++i) sec.body.push_back("w" + std::to_string(s) + "x" + std::to_string(i));
        sec.sentence_lengths = {lengths[s]};
        d.sections.push_back(sec);
    }
    return d;
}

std::vector<std::size_t> lengths_of(const std::vector<Chunk>& chunks) {
    std::vector<std::size_t> out;
    for (const auto& c : chunks) out.push_back(c.length());
    return out;
}

}  // namespace

TEST(Chunking, ExactDivision) {
    EXPECT_EQ(lengths_of(chunk_document(doc_with_sections({500}), 250)), (std::vector<std::size_t>{250, 250}));
}

TEST(Chunking, RemainderWindow) {
    EXPECT_EQ(lengths_of(chunk_document(doc_with_sections({260}), 250)), (std::vector<std::size_t>{250, 10}));
}

TEST(Chunking, UnderfullSection) {
    EXPECT_EQ(lengths_of(chunk_document(doc_with_sections({10}), 250)), (std::vector<std::size_t>{10}));
}

TEST(Chunking, TargetBelowMinimumRejected) {
    EXPECT_THROW(chunk_document(doc_with_sections({10}), 15), DomainError);
}

TEST(Chunking, WindowsStayInsideSections) {
    const auto chunks = chunk_document(doc_with_sections({30, 5, 17}), 16);
    EXPECT_EQ(lengths_of(chunks), (std::vector<std::size_t>{16, 14, 5, 16, 1}));
    EXPECT_EQ(chunks[2].section_index, 1u);
    EXPECT_EQ(chunks[2].heading_path.back(), "part 1");
    EXPECT_EQ(chunks[4].offset, 16u);
}

TEST(Chunking, ChunkIdRoundTrip) {
    const std::string id = make_chunk_id("nor-007", 3, 250);
    EXPECT_EQ(id, "nor-007#003@00250");
    const auto loc = parse_chunk_id(id);
    ASSERT_TRUE(loc);
    EXPECT_EQ(loc->doc_id, "nor-007");
    EXPECT_EQ(loc->section_index, 3u);
    EXPECT_EQ(loc->offset, 250u);
    EXPECT_FALSE(parse_chunk_id("no-separators"));
    EXPECT_FALSE(parse_chunk_id("a#1@x"));
    EXPECT_FALSE(parse_chunk_id("#1@2"));
}

class ChunkingProperties : public ::testing::TestWithParam<std::uint64_t> {};

TEST_P(ChunkingProperties, LosslessPartitionAndCount) {
    Rng rng(GetParam());
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::size_t> lengths;
        const auto n = 1 + rng.below(6);
        for (std::uint64_t i = 0; i < n; ++i) lengths.push_back(rng.below(900));
        const Document d = doc_with_sections(lengths);
        const std::size_t target = 16 + rng.below(300);
        const auto chunks = chunk_document(d, target);

        std::size_t expected = 0;
        TokenSeq all_bodies;
        for (const auto& s : d.sections) {
            expected += (s.body.size() + target - 1) / target;
            all_bodies.insert(all_bodies.end(), s.body.begin(), s.body.end());
        }
        ASSERT_EQ(chunks.size(), expected);

        TokenSeq concat;
        std::set<std::string> ids;
        for (const auto& c : chunks) {
            ASSERT_GT(c.length(), 0u);
            ASSERT_LE(c.length(), target);
            ASSERT_TRUE(ids.insert(c.chunk_id).second);
            const auto loc = parse_chunk_id(c.chunk_id);
            ASSERT_TRUE(loc);
            EXPECT_EQ(loc->doc_id, c.doc_id);
            EXPECT_EQ(loc->section_index, c.section_index);
            EXPECT_EQ(loc->offset, c.offset);
            concat.insert(concat.end(), c.tokens.begin(), c.tokens.end());
        }
        ASSERT_EQ(concat, all_bodies);
    }
}

INSTANTIATE_TEST_SUITE_P(Seeds, ChunkingProperties, ::testing::Values(1u, 7u, 1234u));

TEST(Chunking, GeneratedCorpusChunkCount) {
    const Corpus c = generate_corpus(CorpusConfig{});
    const auto chunks = chunk_corpus(c.documents, 250);
    std::size_t expected = 0;
    for (const auto& d : c.documents)
        for (const auto& s : d.sections) expected += (s.body.size() + 249) / 250;
    EXPECT_EQ(chunks.size(), expected);
    // The reference corpus is sized at roughly a thousand chunks.
    EXPECT_GT(chunks.size(), 800u);
    EXPECT_LT(chunks.size(), 1200u);
}

TEST(ChunkDump, RoundTrip) {
    const auto chunks = chunk_document(doc_with_sections({40, 3}), 16);
    EXPECT_EQ(chunks_from_jsonl(chunks_to_jsonl(chunks)), chunks);
}

TEST(ChunkDump, RejectsInconsistentId) {
    auto chunks = chunk_document(doc_with_sections({20}), 16);
    chunks[0].doc_id = "other";
    EXPECT_THROW(chunks_from_jsonl(chunks_to_jsonl(chunks)), ParseError);
    EXPECT_THROW(chunks_from_jsonl("{\"chunk_id\": 1}\n"), ParseError);
}
