#include <gtest/gtest.h>

#include <set>

#include "cirdil/rng.hpp"
#include "cirdil/tokenize.hpp"

using namespace cirdil;

TEST(Tokenize, SentenceWithPunctuation) {
    EXPECT_EQ(tokenize("Returns are not accepted after 24h."),
              (TokenSeq{"returns", "are", "not", "accepted", "after", "24h"}));
}

TEST(Tokenize, EmptyInput) { EXPECT_TRUE(tokenize("").empty()); }

TEST(Tokenize, DashAndRepeatedWhitespaceCollapse) {
    EXPECT_EQ(tokenize("A\xE2\x80\x94" "B  c"), (TokenSeq{"a", "b", "c"}));
}

TEST(Tokenize, OnlyPunctuation) { EXPECT_TRUE(tokenize(" .,;:!? -- \t\n").empty()); }

TEST(Tokenize, NonAsciiLettersKept) {
    EXPECT_EQ(tokenize("Caf\xC3\xA9 \xC3\xBC" "ber"), (TokenSeq{"caf\xC3\xA9", "\xC3\xBC" "ber"}));
}

TEST(Tokenize, IdempotentOnJoinedOutput) {
    const char* samples[] = {"Hello, World!  Foo-bar 12.5%", "x", "A\xE2\x80\x94" "B  c", "key: value; key2: value2;",
                             "\xE3\x80\x82\xE6\x97\xA5\xE6\x9C\xAC"};
    for (const char* s : samples) {
        const TokenSeq once = tokenize(s);
        EXPECT_EQ(tokenize(join_tokens(once)), once) << s;
    }
}

TEST(Tokenize, TokensAreValid) {
    Rng rng(7);
    const std::string alphabet = "aB3 ,.;-_\t\n!?()\xC3\xA9";
    for (int i = 0; i < 500; ++i) {
        std::string s;
        const auto n = rng.below(40);
        for (std::uint64_t j = 0; j < n; ++j) s += alphabet[rng.below(alphabet.size())];
        for (const auto& t : tokenize(s)) EXPECT_TRUE(is_valid_token(t)) << t;
    }
}

TEST(Rng, Fnv1aKnownVectors) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
    EXPECT_EQ(fnv1a64("foobar"), 0x85944171f73967e8ULL);
}

TEST(Rng, SplitMixFirstOutputs) {
    // SplitMix64 seeded with 0 (reference sequence).
    Rng rng(0);
    EXPECT_EQ(rng.next_u64(), 0xe220a8397b1dcdafULL);
    EXPECT_EQ(rng.next_u64(), 0x6e789e6aa1b965f4ULL);
}

TEST(Rng, DeterministicAndForkedSeedsDiffer) {
    Rng a(99), b(99);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
    EXPECT_NE(fork_seed(42, "corpus"), fork_seed(42, "embedding"));
    EXPECT_EQ(fork_seed(42, "corpus"), fork_seed(42, "corpus"));
}

TEST(Rng, BelowStaysInRange) {
    Rng rng(3);
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 2000; ++i) {
        const auto x = rng.below(7);
        ASSERT_LT(x, 7u);
        seen.insert(x);
    }
    EXPECT_EQ(seen.size(), 7u);
    for (int i = 0; i < 1000; ++i) {
        const auto y = rng.between(-3, 3);
        ASSERT_GE(y, -3);
        ASSERT_LE(y, 3);
        const double u = rng.unit();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}
