#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "samplebench/providers/ngram.hpp"
#include "samplebench/providers/tokenizer.hpp"

namespace samplebench {
namespace {

TEST(Tokenizer, CharSplitsOnCodePoints) {
  EXPECT_EQ(tokenize(TokenizerKind::kChar, "h\xC3\xA9!"),
            (std::vector<Token>{"h", "\xC3\xA9", "!"}));
  // A stray continuation byte becomes its own token.
  EXPECT_EQ(tokenize(TokenizerKind::kChar, "a\x80").size(), 2u);
}

TEST(Tokenizer, WordSplitsOnWhitespace) {
  EXPECT_EQ(tokenize(TokenizerKind::kWord, "  the cat\n\tsat "),
            (std::vector<Token>{"the", "cat", "sat"}));
  EXPECT_EQ(detokenize(TokenizerKind::kWord, {"the", "cat"}), "the cat");
  EXPECT_EQ(detokenize(TokenizerKind::kChar, {"t", "h", "e"}), "the");
}

TEST(TrainNgram, SlidingBigramTallies) {
  const auto m = train_ngram("abab", 2, TokenizerKind::kChar);
  EXPECT_EQ(m.count({"a"}, "b"), 2u);
  EXPECT_EQ(m.count({"b"}, "a"), 1u);
  EXPECT_EQ(m.count({"a"}, "a"), 0u);
  EXPECT_EQ(m.context_total({"a"}), 2u);
  EXPECT_EQ(m.vocabulary(), (std::set<Token>{"a", "b", kEndOfText}));
}

TEST(TrainNgram, MinimalCorpus) {
  const auto m = train_ngram("x", 2, TokenizerKind::kChar);
  EXPECT_EQ(m.vocabulary(), (std::set<Token>{"x", kEndOfText}));
  EXPECT_TRUE(m.table().empty());
}

TEST(TrainNgram, ContextWidthFollowsOrder) {
  const auto k2 = train_ngram("abcabc", 2, TokenizerKind::kChar);
  const auto k3 = train_ngram("abcabc", 3, TokenizerKind::kChar);
  for (const auto& [ctx, _] : k2.table()) EXPECT_EQ(ctx.size(), 1u);
  for (const auto& [ctx, _] : k3.table()) EXPECT_EQ(ctx.size(), 2u);
  EXPECT_EQ(k3.count({"a", "b"}, "c"), 2u);
}

TEST(TrainNgram, Errors) {
  EXPECT_THROW(train_ngram("", 2, TokenizerKind::kChar), EmptyCorpusError);
  EXPECT_THROW(train_ngram("  \n ", 2, TokenizerKind::kWord), EmptyCorpusError);
  EXPECT_THROW(train_ngram("abc", 1, TokenizerKind::kChar), std::invalid_argument);
}

TEST(TrainNgram, WordTokenizer) {
  const auto m = train_ngram("the cat the dog", 2, TokenizerKind::kWord);
  EXPECT_EQ(m.count({"the"}, "cat"), 1u);
  EXPECT_EQ(m.count({"the"}, "dog"), 1u);
  EXPECT_EQ(m.vocabulary().size(), 4u);
}

TEST(NextDistribution, LaplaceHandEvaluation) {
  const auto m = train_ngram("abab", 2, TokenizerKind::kChar);
  const auto d = m.next_distribution({"b", "a"});
  EXPECT_DOUBLE_EQ(d.at("b"), 0.6);
  EXPECT_DOUBLE_EQ(d.at("a"), 0.2);
  EXPECT_DOUBLE_EQ(d.at(kEndOfText), 0.2);
}

TEST(NextDistribution, UnseenContextIsUniform) {
  const auto m = train_ngram("abab", 2, TokenizerKind::kChar);
  for (const auto& ctx : {std::vector<Token>{"z"}, std::vector<Token>{}}) {
    const auto d = m.next_distribution(ctx);
    for (const auto& [_, p] : d.entries()) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
  }
  // k = 3 with a single-token context never matches a two-token key.
  const auto m3 = train_ngram("abab", 3, TokenizerKind::kChar);
  const auto d3 = m3.next_distribution({"a"});
  for (const auto& [_, p] : d3.entries()) EXPECT_DOUBLE_EQ(p, 1.0 / 3.0);
}

TEST(NextDistribution, PropertyNormalizedAndStrictlyPositive) {
  const std::string corpus = "the quick brown fox jumps over the lazy dog, then naps. ";
  for (std::size_t k : {2u, 3u, 4u}) {
    const auto m = train_ngram(corpus, k, TokenizerKind::kChar);
    const auto tokens = tokenize(TokenizerKind::kChar, corpus);
    for (std::size_t end = 0; end <= tokens.size(); ++end) {
      const std::vector<Token> ctx(tokens.begin(), tokens.begin() + static_cast<long>(end));
      const auto d = m.next_distribution(ctx);
      double sum = 0.0;
      for (const auto& [_, p] : d.entries()) {
        EXPECT_GT(p, 0.0);
        sum += p;
      }
      EXPECT_NEAR(sum, 1.0, 1e-9);
      EXPECT_EQ(d.size(), m.vocabulary().size());
    }
  }
}

TEST(NextDistribution, PropertyReproducibleBitForBit) {
  const std::string corpus = "she sells sea shells by the sea shore";
  const auto a = train_ngram(corpus, 3, TokenizerKind::kChar);
  const auto b = train_ngram(corpus, 3, TokenizerKind::kChar);
  for (const auto& [ctx, _] : a.table()) EXPECT_EQ(a.next_distribution(ctx), b.next_distribution(ctx));
}

TEST(NGramProvider, ExposesDistributionMode) {
  NGramProvider toy("toy", std::make_shared<const NGramModel>(
                               train_ngram("abababab", 2, TokenizerKind::kChar)));
  EXPECT_EQ(toy.mode(), ProviderMode::kDistribution);
  ASSERT_NE(toy.distributions(), nullptr);
  SamplingParams p;
  p.top_p = 0.1;
  EXPECT_EQ(toy.complete("a", p, 4).text, "baba");
}

}  // namespace
}  // namespace samplebench
