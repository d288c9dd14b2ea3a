#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "mednorm/error.hpp"
#include "mednorm/lm.hpp"
#include "mednorm/phrase_table.hpp"
#include "mednorm/text.hpp"
#include "mednorm/tsv.hpp"

namespace mednorm {

// Score applied per copied token when a source position has no phrase-table
// entry at all: survivable, but dominated by any real translation.
inline constexpr double kPassThroughScore = 1e-6;

struct TranslationHypothesis {
  Phrase phrase;    // medical register
  double score;     // normalised to sum to 1 over the returned set
  int rank;         // 1-based, scores non-increasing with rank
};

namespace detail {

struct PartialHyp {
  std::vector<std::string> target;
  double model_log; // sum of log phi (and pass-through penalties)
};

inline double logsumexp(const std::vector<double>& xs) {
  double m = xs.front();
  for (double x : xs) m = std::max(m, x);
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

} // namespace detail

// Monotone left-to-right beam decoding of a social phrase into its top-k
// medical translations. Each source segment of up to max_phrase_len tokens
// is rewritten by a phrase-table option; a position with no option at any
// length is copied verbatim at the pass-through score. Hypothesis score is
// prod(phi) * exp(lambda_lm * lm_logprob(target)); per-position beams prune
// on the partial score with the boundary-free LM prefix. The final n-best is
// deduplicated by surface form (best score kept), ranked with lexicographic
// tie-breaks, and renormalised to sum to 1.
inline std::vector<TranslationHypothesis> decode_topk(const Phrase& phr_t, const PhraseTable& pt,
                                                      const LanguageModel& lm, int k, int beam,
                                                      double lambda_lm) {
  if (phr_t.tokens.empty()) throw EmptyPhrase();
  if (k < 1) throw InvalidArgument("decode_topk: k must be >= 1");
  if (beam < k) throw InvalidArgument("decode_topk: beam must be >= k");

  const std::size_t n = phr_t.tokens.size();
  const std::size_t max_len = static_cast<std::size_t>(pt.max_phrase_len());

  auto partial_score = [&](const detail::PartialHyp& h) {
    return h.model_log + lambda_lm * lm_prefix_logprob(h.target, lm);
  };
  auto prune = [&](std::vector<detail::PartialHyp>& bucket) {
    if (bucket.size() <= static_cast<std::size_t>(beam)) return;
    std::vector<std::pair<double, std::size_t>> keyed(bucket.size());
    for (std::size_t i = 0; i < bucket.size(); ++i) keyed[i] = {partial_score(bucket[i]), i};
    std::stable_sort(keyed.begin(), keyed.end(), [&](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return bucket[a.second].target < bucket[b.second].target;
    });
    std::vector<detail::PartialHyp> kept;
    kept.reserve(static_cast<std::size_t>(beam));
    for (int i = 0; i < beam; ++i) kept.push_back(std::move(bucket[keyed[static_cast<std::size_t>(i)].second]));
    bucket = std::move(kept);
  };

  std::vector<std::vector<detail::PartialHyp>> buckets(n + 1);
  buckets[0].push_back({{}, 0.0});
  for (std::size_t pos = 0; pos < n; ++pos) {
    if (buckets[pos].empty()) continue;
    prune(buckets[pos]);

    // Translation options for every span starting at pos.
    struct Expansion {
      std::size_t end;
      const std::vector<std::string>* target;
      double log_score;
    };
    std::vector<Expansion> expansions;
    for (std::size_t end = pos + 1; end <= std::min(n, pos + max_len); ++end) {
      std::string key = phr_t.tokens[pos];
      for (std::size_t i = pos + 1; i < end; ++i) key += ' ' + phr_t.tokens[i];
      if (const auto* options = pt.find(key))
        for (const auto& opt : *options)
          expansions.push_back({end, &opt.target, std::log(opt.phi)});
    }
    std::vector<std::string> pass_through;
    if (expansions.empty()) {
      pass_through = {phr_t.tokens[pos]};
      expansions.push_back({pos + 1, &pass_through, std::log(kPassThroughScore)});
    }

    for (const auto& hyp : buckets[pos]) {
      for (const auto& x : expansions) {
        detail::PartialHyp next;
        next.target = hyp.target;
        next.target.insert(next.target.end(), x.target->begin(), x.target->end());
        next.model_log = hyp.model_log + x.log_score;
        buckets[x.end].push_back(std::move(next));
      }
    }
  }

  // Complete hypotheses: full score, dedupe by surface keeping the best.
  std::map<std::string, std::pair<double, std::vector<std::string>>> by_surface;
  for (const auto& hyp : buckets[n]) {
    Phrase target;
    target.reg = Register::medical;
    target.tokens = hyp.target;
    const double log_score = hyp.model_log + lambda_lm * lm_logprob(target, lm);
    const std::string surface = join_tokens(hyp.target);
    auto it = by_surface.find(surface);
    if (it == by_surface.end() || log_score > it->second.first)
      by_surface[surface] = {log_score, hyp.target};
  }

  std::vector<std::pair<double, std::vector<std::string>>> ranked;
  ranked.reserve(by_surface.size());
  for (auto& kv : by_surface) ranked.push_back(kv.second);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  if (ranked.size() > static_cast<std::size_t>(k)) ranked.resize(static_cast<std::size_t>(k));

  std::vector<double> logs;
  logs.reserve(ranked.size());
  for (const auto& [log_score, target] : ranked) logs.push_back(log_score);
  const double lse = detail::logsumexp(logs);

  std::vector<TranslationHypothesis> out;
  out.reserve(ranked.size());
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    TranslationHypothesis th;
    th.phrase.reg = Register::medical;
    th.phrase.tokens = ranked[i].second;
    th.score = std::exp(logs[i] - lse);
    th.rank = static_cast<int>(i) + 1;
    out.push_back(std::move(th));
  }
  return out;
}

} // namespace mednorm
