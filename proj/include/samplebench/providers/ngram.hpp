#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "samplebench/providers/provider.hpp"
#include "samplebench/providers/tokenizer.hpp"
#include "samplebench/sampling/generate.hpp"

namespace samplebench {

class EmptyCorpusError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline const Token kEndOfText = "<|endoftext|>";

/// Add-one smoothed k-gram model. Immutable once trained.
class NGramModel {
 public:
  using Context = std::vector<Token>;

  struct ContextCounts {
    std::map<Token, std::uint64_t> next;
    std::uint64_t total = 0;
  };

  std::size_t order() const noexcept { return order_; }
  TokenizerKind tokenizer() const noexcept { return tokenizer_; }
  /// Distinct corpus tokens plus the end-of-text marker.
  const std::set<Token>& vocabulary() const noexcept { return vocabulary_; }
  const std::map<Context, ContextCounts>& table() const noexcept { return table_; }

  std::uint64_t count(const Context& ctx, const Token& next) const {
    auto it = table_.find(ctx);
    if (it == table_.end()) return 0;
    auto jt = it->second.next.find(next);
    return jt == it->second.next.end() ? 0 : jt->second;
  }

  std::uint64_t context_total(const Context& ctx) const {
    auto it = table_.find(ctx);
    return it == table_.end() ? 0 : it->second.total;
  }

  /// P(t | ctx) = (count(ctx, t) + 1) / (count(ctx, .) + |V|), using only the
  /// trailing k-1 tokens of `context`. Shorter contexts never match a key and
  /// so fall back to the uniform distribution.
  TokenDistribution next_distribution(const std::vector<Token>& context) const {
    const std::size_t width = order_ - 1;
    const std::size_t take = std::min(width, context.size());
    const Context key(context.end() - static_cast<std::ptrdiff_t>(take), context.end());

    const ContextCounts* row = nullptr;
    if (auto it = table_.find(key); it != table_.end()) row = &it->second;

    const double denom = static_cast<double>((row ? row->total : 0) + vocabulary_.size());
    std::map<Token, double> probs;
    for (const auto& token : vocabulary_) {
      std::uint64_t c = 0;
      if (row) {
        if (auto jt = row->next.find(token); jt != row->next.end()) c = jt->second;
      }
      probs.emplace_hint(probs.end(), token, static_cast<double>(c + 1) / denom);
    }
    return TokenDistribution(std::move(probs));
  }

  friend NGramModel train_ngram(std::string_view corpus, std::size_t order,
                                TokenizerKind tokenizer);

 private:
  std::size_t order_ = 2;
  TokenizerKind tokenizer_ = TokenizerKind::kChar;
  std::set<Token> vocabulary_;
  std::map<Context, ContextCounts> table_;
};

/// Tallies every sliding window of `order` tokens. No end-of-text transition
/// is added after the last corpus token; the marker only gains mass through
/// smoothing.
inline NGramModel train_ngram(std::string_view corpus, std::size_t order,
                              TokenizerKind tokenizer) {
  if (order < 2) throw std::invalid_argument("n-gram order must be >= 2");

  std::vector<Token> tokens;
  for (auto& t : tokenize(tokenizer, corpus)) {
    if (t != kEndOfText) tokens.push_back(std::move(t));
  }
  if (tokens.empty()) throw EmptyCorpusError("corpus is empty after tokenization");

  NGramModel model;
  model.order_ = order;
  model.tokenizer_ = tokenizer;
  model.vocabulary_.insert(tokens.begin(), tokens.end());
  model.vocabulary_.insert(kEndOfText);

  const std::size_t width = order - 1;
  for (std::size_t i = 0; i + order <= tokens.size(); ++i) {
    NGramModel::Context ctx(tokens.begin() + static_cast<std::ptrdiff_t>(i),
                            tokens.begin() + static_cast<std::ptrdiff_t>(i + width));
    auto& row = model.table_[std::move(ctx)];
    ++row.next[tokens[i + width]];
    ++row.total;
  }
  return model;
}

inline std::string read_corpus_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open corpus file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Local toy language model. Sampling runs in this process.
class NGramProvider final : public GenerationProvider, public DistributionSource {
 public:
  NGramProvider(std::string id, std::shared_ptr<const NGramModel> model)
      : id_(std::move(id)), model_(std::move(model)) {}

  const std::string& id() const override { return id_; }
  ProviderMode mode() const override { return ProviderMode::kDistribution; }
  const DistributionSource* distributions() const override { return this; }

  Completion complete(std::string_view prompt, const SamplingParams& params,
                      std::size_t max_tokens) const override {
    auto result = generate_sequence(*this, prompt, params, max_tokens);
    return {result.text, {}};
  }

  std::vector<Token> tokenize(std::string_view text) const override {
    return samplebench::tokenize(model_->tokenizer(), text);
  }
  std::string detokenize(const std::vector<Token>& tokens) const override {
    return samplebench::detokenize(model_->tokenizer(), tokens);
  }
  TokenDistribution next_distribution(const std::vector<Token>& context) const override {
    return model_->next_distribution(context);
  }
  const Token& end_of_text() const override { return kEndOfText; }

  const NGramModel& model() const noexcept { return *model_; }

 private:
  std::string id_;
  std::shared_ptr<const NGramModel> model_;
};

}  // namespace samplebench
