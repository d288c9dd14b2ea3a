#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "mednorm/align.hpp"
#include "mednorm/error.hpp"
#include "mednorm/text.hpp"
#include "mednorm/tsv.hpp"

namespace mednorm {

// A contiguous source span paired with a contiguous target span, both
// non-empty and at most max_phrase_len tokens.
struct PhrasePair {
  std::vector<std::string> source_span;
  std::vector<std::string> target_span;

  bool operator==(const PhrasePair& o) const {
    return source_span == o.source_span && target_span == o.target_span;
  }
  bool operator<(const PhrasePair& o) const {
    if (source_span != o.source_span) return source_span < o.source_span;
    return target_span < o.target_span;
  }
};

// All consistent span pairs up to max_len: no alignment link may cross the
// span boundary in either direction and the target range must contain at
// least one link. One PhrasePair per occurrence (duplicates carry count
// mass); output sorted lexicographically.
inline std::vector<PhrasePair> extract_phrases(const Phrase& source, const Phrase& target,
                                               const Alignment& alignment, int max_len) {
  if (max_len < 1) throw InvalidArgument("extract_phrases: max_len must be >= 1");
  const int ns = static_cast<int>(source.tokens.size());
  const int nt = static_cast<int>(target.tokens.size());
  for (const auto& [i, j] : alignment.links)
    if (i < 0 || j < 0 || i >= ns || j >= nt)
      throw IndexOutOfBounds("alignment link outside sentence pair");

  std::vector<PhrasePair> out;
  for (int s1 = 0; s1 < ns; ++s1) {
    for (int s2 = s1; s2 < std::min(ns, s1 + max_len); ++s2) {
      for (int t1 = 0; t1 < nt; ++t1) {
        for (int t2 = t1; t2 < std::min(nt, t1 + max_len); ++t2) {
          bool consistent = true;
          bool linked = false;
          for (const auto& [i, j] : alignment.links) {
            const bool in_s = (i >= s1 && i <= s2);
            const bool in_t = (j >= t1 && j <= t2);
            if (in_s != in_t) {
              consistent = false;
              break;
            }
            if (in_t) linked = true;
          }
          if (!consistent || !linked) continue;
          PhrasePair pp;
          pp.source_span.assign(source.tokens.begin() + s1, source.tokens.begin() + s2 + 1);
          pp.target_span.assign(target.tokens.begin() + t1, target.tokens.begin() + t2 + 1);
          out.push_back(std::move(pp));
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

struct PhraseOption {
  std::vector<std::string> target;
  double phi; // relative frequency phi(target | source)
};

// Source span -> translation options with relative-frequency probabilities.
// Keys are space-joined token spans (tokens never contain spaces).
class PhraseTable {
public:
  explicit PhraseTable(int max_phrase_len = 4) : max_phrase_len_(max_phrase_len) {}

  int max_phrase_len() const { return max_phrase_len_; }

  const std::vector<PhraseOption>* find(const std::string& source_key) const {
    auto it = entries_.find(source_key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  const std::map<std::string, std::vector<PhraseOption>>& entries() const { return entries_; }

  void set(const std::string& source_key, std::vector<PhraseOption> options) {
    entries_[source_key] = std::move(options);
  }

  bool empty() const { return entries_.empty(); }

private:
  int max_phrase_len_;
  std::map<std::string, std::vector<PhraseOption>> entries_;
};

// For every pair: forward and reverse Viterbi alignments from the one
// lexical table, grow-diag symmetrisation, extraction, then
// phi(target|source) = count(source,target) / count(source) over everything
// extracted. Options per source are kept sorted by target span.
inline PhraseTable build_phrase_table(const std::vector<SentencePair>& corpus,
                                      const TranslationTable& table, int max_len) {
  if (corpus.empty()) throw EmptyCorpus();
  std::map<std::string, std::map<std::string, double>> counts;
  for (const auto& [src, tgt] : corpus) {
    const Alignment fwd = viterbi_align(src, tgt, table);
    const Alignment bwd = viterbi_align_reverse(src, tgt, table);
    const Alignment sym = symmetrize(src.tokens.size(), tgt.tokens.size(), fwd, bwd);
    for (const auto& pp : extract_phrases(src, tgt, sym, max_len))
      counts[join_tokens(pp.source_span)][join_tokens(pp.target_span)] += 1.0;
  }
  PhraseTable pt(max_len);
  for (const auto& [src_key, targets] : counts) {
    double total = 0.0;
    for (const auto& [tgt_key, c] : targets) total += c;
    std::vector<PhraseOption> options;
    options.reserve(targets.size());
    for (const auto& [tgt_key, c] : targets)
      options.push_back({split_spaces(tgt_key), c / total});
    pt.set(src_key, std::move(options));
  }
  return pt;
}

} // namespace mednorm
