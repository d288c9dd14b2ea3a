#pragma once

#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mednorm/error.hpp"
#include "mednorm/text.hpp"

namespace mednorm {

// Reserved source-side token for words the model leaves unexplained. '<' is
// edge punctuation to the tokenizer, so no real token can collide.
inline constexpr const char* kNullToken = "<null>";

// Lexical translation probabilities t(target | source) with a reserved NULL
// source row. Rows are kept in ordered maps so training, queries and
// serialization are deterministic independent of hashing.
class TranslationTable {
public:
  static constexpr double kProbFloor = 1e-12;

  using Row = std::map<std::string, double>;

  double prob(const std::string& target, const std::string& source) const {
    auto row = rows_.find(source);
    if (row == rows_.end()) return kProbFloor;
    auto it = row->second.find(target);
    return it == row->second.end() ? kProbFloor : it->second;
  }

  Row& row(const std::string& source) { return rows_[source]; }
  const std::map<std::string, Row>& rows() const { return rows_; }
  std::map<std::string, Row>& rows() { return rows_; }
  bool empty() const { return rows_.empty(); }

private:
  std::map<std::string, Row> rows_;
};

// Word alignment links for one sentence pair, as (source_index,
// target_index) pairs.
struct Alignment {
  std::set<std::pair<int, int>> links;

  bool operator==(const Alignment& o) const { return links == o.links; }
};

using SentencePair = std::pair<Phrase, Phrase>; // (source, target)

// IBM Model 1 via EM. Initialisation is uniform over each source token's
// co-occurring target tokens (NULL co-occurs with everything); every
// iteration collects expected counts in corpus order, then renormalises each
// row. Deterministic for a fixed corpus order.
inline TranslationTable train_model1(const std::vector<SentencePair>& corpus, int iterations) {
  if (corpus.empty()) throw EmptyCorpus();
  if (iterations < 1) throw InvalidArgument("train_model1: iterations must be >= 1");

  TranslationTable table;
  for (const auto& [src, tgt] : corpus) {
    for (const auto& e : tgt.tokens) {
      table.row(kNullToken)[e] = 0.0;
      for (const auto& f : src.tokens) table.row(f)[e] = 0.0;
    }
  }
  for (auto& [f, row] : table.rows()) {
    const double uniform = 1.0 / static_cast<double>(row.size());
    for (auto& [e, p] : row) p = uniform;
  }

  for (int iter = 0; iter < iterations; ++iter) {
    std::map<std::string, std::map<std::string, double>> counts;
    for (const auto& [src, tgt] : corpus) {
      for (const auto& e : tgt.tokens) {
        double denom = table.prob(e, kNullToken);
        for (const auto& f : src.tokens) denom += table.prob(e, f);
        counts[kNullToken][e] += table.prob(e, kNullToken) / denom;
        for (const auto& f : src.tokens) counts[f][e] += table.prob(e, f) / denom;
      }
    }
    for (auto& [f, row] : counts) {
      double total = 0.0;
      for (const auto& [e, c] : row) total += c;
      auto& trow = table.row(f);
      for (const auto& [e, c] : row) trow[e] = c / total;
    }
  }
  return table;
}

// Corpus log-likelihood under Model 1 with the uniform alignment prior
// 1/(l+1) per target position (l source tokens plus NULL).
inline double model1_log_likelihood(const std::vector<SentencePair>& corpus,
                                    const TranslationTable& table) {
  double ll = 0.0;
  for (const auto& [src, tgt] : corpus) {
    const double positions = static_cast<double>(src.tokens.size()) + 1.0;
    for (const auto& e : tgt.tokens) {
      double p = table.prob(e, kNullToken);
      for (const auto& f : src.tokens) p += table.prob(e, f);
      ll += std::log(p / positions);
    }
  }
  return ll;
}

// Links every target position j to argmax_i t(target_j | source_i), with
// ties toward smaller i. NULL must win strictly to leave a position
// unlinked; unseen pairs score the probability floor.
inline Alignment viterbi_align(const Phrase& source, const Phrase& target,
                               const TranslationTable& table) {
  if (source.tokens.empty() || target.tokens.empty()) throw EmptyPhrase();
  Alignment out;
  for (int j = 0; j < static_cast<int>(target.tokens.size()); ++j) {
    const auto& e = target.tokens[static_cast<std::size_t>(j)];
    int best_i = 0;
    double best = -1.0;
    for (int i = 0; i < static_cast<int>(source.tokens.size()); ++i) {
      const double p = table.prob(e, source.tokens[static_cast<std::size_t>(i)]);
      if (p > best) {
        best = p;
        best_i = i;
      }
    }
    if (table.prob(e, kNullToken) > best) continue;
    out.links.insert({best_i, j});
  }
  return out;
}

// Reverse-direction argmax with the same table: every source position i
// links to the target position it most probably generates, ties toward
// smaller j. There is no NULL on the target side, so every position links.
inline Alignment viterbi_align_reverse(const Phrase& source, const Phrase& target,
                                       const TranslationTable& table) {
  if (source.tokens.empty() || target.tokens.empty()) throw EmptyPhrase();
  Alignment out;
  for (int i = 0; i < static_cast<int>(source.tokens.size()); ++i) {
    const auto& f = source.tokens[static_cast<std::size_t>(i)];
    int best_j = 0;
    double best = -1.0;
    for (int j = 0; j < static_cast<int>(target.tokens.size()); ++j) {
      const double p = table.prob(target.tokens[static_cast<std::size_t>(j)], f);
      if (p > best) {
        best = p;
        best_j = j;
      }
    }
    out.links.insert({i, best_j});
  }
  return out;
}

// Intersection of the two link sets grown with the grow-diag heuristic: scan
// the union row-major and add any link adjacent (8-neighbourhood) to an
// accepted link while its row or column is still uncovered; repeat to a
// fixpoint. Both alignments must already be in (source_index, target_index)
// space; transpose a swapped-pair alignment before calling.
inline Alignment symmetrize(std::size_t source_len, std::size_t target_len,
                            const Alignment& forward, const Alignment& backward) {
  auto check = [&](const Alignment& a, const char* name) {
    for (const auto& [i, j] : a.links)
      if (i < 0 || j < 0 || i >= static_cast<int>(source_len) || j >= static_cast<int>(target_len))
        throw IndexOutOfBounds(std::string(name) + " link (" + std::to_string(i) + "," +
                               std::to_string(j) + ") outside " + std::to_string(source_len) +
                               "x" + std::to_string(target_len));
  };
  check(forward, "forward");
  check(backward, "backward");

  std::set<std::pair<int, int>> grown;
  std::set<std::pair<int, int>> uni;
  for (const auto& l : forward.links) {
    uni.insert(l);
    if (backward.links.count(l)) grown.insert(l);
  }
  for (const auto& l : backward.links) uni.insert(l);

  std::vector<bool> row_covered(source_len, false), col_covered(target_len, false);
  for (const auto& [i, j] : grown) {
    row_covered[static_cast<std::size_t>(i)] = true;
    col_covered[static_cast<std::size_t>(j)] = true;
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& link : uni) { // std::set iterates row-major
      if (grown.count(link)) continue;
      const auto [i, j] = link;
      if (row_covered[static_cast<std::size_t>(i)] && col_covered[static_cast<std::size_t>(j)])
        continue;
      bool adjacent = false;
      for (int di = -1; di <= 1 && !adjacent; ++di)
        for (int dj = -1; dj <= 1 && !adjacent; ++dj) {
          if (di == 0 && dj == 0) continue;
          if (grown.count({i + di, j + dj})) adjacent = true;
        }
      if (!adjacent) continue;
      grown.insert(link);
      row_covered[static_cast<std::size_t>(i)] = true;
      col_covered[static_cast<std::size_t>(j)] = true;
      changed = true;
    }
  }
  return Alignment{std::move(grown)};
}

} // namespace mednorm
