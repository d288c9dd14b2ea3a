#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mednorm/error.hpp"
#include "mednorm/text.hpp"
#include "mednorm/tsv.hpp"

namespace mednorm {

inline constexpr const char* kBosToken = "<s>";
inline constexpr const char* kEosToken = "</s>";

// Count-based n-gram model with add-one smoothing, log domain throughout.
// Every phrase is padded with order-1 <s> markers and a closing </s>; the
// predicted events are the real tokens plus </s>. vocab_size counts the
// distinct real tokens plus one for </s>, which makes each smoothed
// conditional a proper distribution over {vocabulary, </s>}.
class LanguageModel {
public:
  LanguageModel() = default;
  LanguageModel(int order, std::map<std::string, long long> ngram_counts,
                std::map<std::string, long long> context_counts, long long vocab_size)
      : order_(order), ngrams_(std::move(ngram_counts)), contexts_(std::move(context_counts)),
        vocab_size_(vocab_size) {}

  int order() const { return order_; }
  long long vocab_size() const { return vocab_size_; }
  const std::map<std::string, long long>& ngram_counts() const { return ngrams_; }

  long long ngram_count(const std::string& key) const {
    auto it = ngrams_.find(key);
    return it == ngrams_.end() ? 0 : it->second;
  }

  // Unseen contexts fall back to count 0, i.e. the uniform 1/vocab_size.
  long long context_count(const std::string& key) const {
    auto it = contexts_.find(key);
    return it == contexts_.end() ? 0 : it->second;
  }

  double event_logprob(const std::vector<std::string>& padded, std::size_t pos) const {
    const std::size_t n = static_cast<std::size_t>(order_);
    const double num = static_cast<double>(ngram_count(slice_key(padded, pos - n + 1, pos + 1))) + 1.0;
    const double den =
        static_cast<double>(context_count(slice_key(padded, pos - n + 1, pos)) + vocab_size_);
    return std::log(num / den);
  }

  static std::string slice_key(const std::vector<std::string>& toks, std::size_t from,
                               std::size_t to) {
    std::string key;
    for (std::size_t i = from; i < to; ++i) {
      if (i > from) key += ' ';
      key += toks[i];
    }
    return key;
  }

private:
  int order_ = 0;
  std::map<std::string, long long> ngrams_;
  std::map<std::string, long long> contexts_;
  long long vocab_size_ = 0;
};

inline std::vector<std::string> lm_pad(const std::vector<std::string>& tokens, int order,
                                       bool close) {
  std::vector<std::string> padded(static_cast<std::size_t>(order - 1), kBosToken);
  padded.insert(padded.end(), tokens.begin(), tokens.end());
  if (close) padded.push_back(kEosToken);
  return padded;
}

inline LanguageModel train_lm(const std::vector<Phrase>& phrases, int order) {
  if (phrases.empty()) throw EmptyCorpus();
  if (order < 1) throw InvalidArgument("train_lm: order must be >= 1");
  std::map<std::string, long long> ngrams;
  std::map<std::string, long long> contexts;
  std::set<std::string> vocab;
  for (const auto& p : phrases) {
    for (const auto& t : p.tokens) vocab.insert(t);
    const auto padded = lm_pad(p.tokens, order, true);
    for (std::size_t pos = static_cast<std::size_t>(order - 1); pos < padded.size(); ++pos) {
      const auto n = static_cast<std::size_t>(order);
      ngrams[LanguageModel::slice_key(padded, pos - n + 1, pos + 1)]++;
      contexts[LanguageModel::slice_key(padded, pos - n + 1, pos)]++;
    }
  }
  return LanguageModel(order, std::move(ngrams), std::move(contexts),
                       static_cast<long long>(vocab.size()) + 1);
}

// Full sequence log-probability including the closing </s> event.
inline double lm_logprob(const Phrase& phrase, const LanguageModel& lm) {
  const auto padded = lm_pad(phrase.tokens, lm.order(), true);
  double total = 0.0;
  for (std::size_t pos = static_cast<std::size_t>(lm.order() - 1); pos < padded.size(); ++pos)
    total += lm.event_logprob(padded, pos);
  return total;
}

// Prefix score without the </s> event, for partial hypotheses. Every add-one
// factor is strictly below 1, so this decreases strictly as tokens are
// appended (the full lm_logprob does not: the </s> factor can grow).
inline double lm_prefix_logprob(const std::vector<std::string>& tokens, const LanguageModel& lm) {
  const auto padded = lm_pad(tokens, lm.order(), false);
  double total = 0.0;
  for (std::size_t pos = static_cast<std::size_t>(lm.order() - 1); pos < padded.size(); ++pos)
    total += lm.event_logprob(padded, pos);
  return total;
}

} // namespace mednorm
