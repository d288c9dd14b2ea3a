#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include "mednorm/align.hpp"
#include "mednorm/decoder.hpp"
#include "mednorm/error.hpp"
#include "mednorm/lexicon.hpp"
#include "mednorm/lm.hpp"
#include "mednorm/phrase_table.hpp"
#include "mednorm/ranker.hpp"
#include "mednorm/rng.hpp"
#include "mednorm/tsv.hpp"
#include "mednorm/vectors.hpp"

namespace mednorm {

// Disjoint index sets covering 0..n-1, sizes differing by at most one.
struct FoldSplit {
  std::vector<std::vector<std::size_t>> folds;
  std::uint64_t seed = 0;
};

// Indices shuffled by a seeded SplitMix64 Fisher-Yates, then dealt
// round-robin into k folds.
inline FoldSplit kfold_split(std::size_t n, int k, std::uint64_t seed) {
  if (k < 2) throw TooFewItems("kfold_split: k must be >= 2");
  if (n < static_cast<std::size_t>(k))
    throw TooFewItems("kfold_split: need at least " + std::to_string(k) + " items, have " +
                      std::to_string(n));
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0);
  SplitMix64 rng(seed);
  deterministic_shuffle(indices, rng);
  FoldSplit split;
  split.seed = seed;
  split.folds.assign(static_cast<std::size_t>(k), {});
  for (std::size_t i = 0; i < n; ++i)
    split.folds[i % static_cast<std::size_t>(k)].push_back(indices[i]);
  return split;
}

// Mean over phrases of 1/rank(gold) when the gold concept appears within
// `cutoff`, else 0.
inline double mrr_at_k(const std::vector<RankedConcepts>& rankings,
                       const std::vector<std::string>& gold, int cutoff) {
  if (rankings.size() != gold.size())
    throw LengthMismatch("mrr_at_k: " + std::to_string(rankings.size()) + " rankings vs " +
                         std::to_string(gold.size()) + " gold ids");
  if (cutoff < 1) throw InvalidArgument("mrr_at_k: cutoff must be >= 1");
  if (rankings.empty()) throw TooFewItems("mrr_at_k: no rankings");
  double total = 0.0;
  for (std::size_t i = 0; i < rankings.size(); ++i) {
    const std::size_t r = rankings[i].rank_of(gold[i]);
    if (r >= 1 && r <= static_cast<std::size_t>(cutoff)) total += 1.0 / static_cast<double>(r);
  }
  return total / static_cast<double>(rankings.size());
}

namespace detail {

// Regularized incomplete beta I_x(a,b) by the Lentz continued fraction
// (Numerical Recipes style), good to ~1e-12 for the arguments a t-test
// produces.
inline double betacf(double a, double b, double x) {
  const double eps = 3e-14, fpmin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0, d = 1.0 - qab * x / qap;
  if (std::fabs(d) < fpmin) d = fpmin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < fpmin) d = fpmin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) break;
  }
  return h;
}

inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log(1.0 - x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

// Two-sided p-value for a t statistic: I_{df/(df+t^2)}(df/2, 1/2).
inline double t_two_sided_p(double t, double df) {
  return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

} // namespace detail

// Two-sided paired t-test on per-item differences a - b, df = n - 1.
// Degenerate cases are pinned: all differences zero gives p = 1, a nonzero
// constant difference (sd = 0) gives p = 0.
inline double paired_ttest(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw LengthMismatch("paired_ttest: " + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + " samples");
  if (a.size() < 2) throw TooFewItems("paired_ttest: need at least 2 paired samples");
  const std::size_t n = a.size();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = a[i] - b[i];
  bool all_zero = true;
  for (double v : d)
    if (v != 0.0) all_zero = false;
  if (all_zero) return 1.0;
  double mean = 0.0;
  for (double v : d) mean += v;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : d) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));
  if (sd == 0.0) return 0.0;
  const double t = mean / (sd / std::sqrt(static_cast<double>(n)));
  return detail::t_two_sided_p(std::fabs(t), static_cast<double>(n - 1));
}

// One word-vector representation column of the report.
struct ReprConfig {
  std::string name;
  WordVectors vectors;
};

struct ExperimentConfig {
  int folds = 10;
  std::uint64_t seed = 42;
  int cutoff = 5;       // MRR cutoff
  int top_k = 5;        // decoder n-best size
  int beam = 50;
  double lambda_lm = 0.5;
  int model1_iterations = 10;
  int max_phrase_len = 4;
  int lm_order = 3;
  double fusion_mt_weight = 1.0;
  Aggregation aggregation = Aggregation::max;
  int jobs = 1;
  bool log_folds = false; // line-per-fold progress on stderr
};

struct EvalCell {
  double mrr = 0.0;
  std::vector<double> reciprocal_ranks; // length = corpus size
};

struct EvalReport {
  std::vector<Method> methods;
  std::vector<std::string> repr_names;
  std::vector<std::vector<EvalCell>> cells;        // [method][repr]
  std::vector<std::string> config_labels;          // method@repr, method-major
  std::vector<std::vector<double>> significance;   // pairwise p over rr vectors
  std::vector<std::uint64_t> fold_train_digests;   // FNV-1a of each fold's training pairs
  int phrase_errors = 0; // phrases for which some method errored (rr = 0)
  std::uint64_t seed = 0;
  int folds = 0;
  int cutoff = 5;
  std::size_t corpus_size = 0;
  std::size_t dictionary_size = 0;
};

// The one-hot vocabulary spans both registers: every corpus phrase plus
// every dictionary description.
inline WordVectors build_one_hot_vocab(const ParallelCorpus& corpus,
                                       const ConceptDictionary& dict) {
  std::vector<Phrase> sources;
  sources.reserve(corpus.size() + dict.size());
  for (const auto& pair : corpus.pairs) sources.push_back(pair.source);
  for (const auto& c : dict) sources.push_back(c.description);
  return build_one_hot(sources);
}

inline std::uint64_t digest_pairs(const std::vector<SentencePair>& pairs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [src, tgt] : pairs) {
    const std::string line = join_tokens(src.tokens) + "\t" + join_tokens(tgt.tokens) + "\n";
    h = fnv1a(line.data(), line.size(), h);
  }
  return h;
}

// Cross-validated experiment: per fold, Model 1 / phrase table / LM are
// trained on the nine training folds only, every test phrase is decoded
// once, and each (method, representation) cell ranks from the shared
// hypothesis list. Per-phrase reciprocal ranks land in corpus-indexed slots,
// so the result is identical at any jobs setting.
inline EvalReport run_experiment(const ParallelCorpus& corpus, const ConceptDictionary& dict,
                                 const std::vector<Method>& methods,
                                 const std::vector<ReprConfig>& reprs,
                                 const ExperimentConfig& cfg) {
  if (corpus.pairs.empty()) throw EmptyCorpus();
  if (dict.empty()) throw InvalidArgument("run_experiment: dictionary is empty");
  if (methods.empty() || reprs.empty())
    throw InvalidArgument("run_experiment: need at least one method and one representation");
  for (const auto& pair : corpus.pairs)
    if (!dict.find(pair.concept_id))
      throw UnknownConcept(pair.concept_id, 0);

  const std::size_t n = corpus.pairs.size();
  const FoldSplit split = kfold_split(n, cfg.folds, cfg.seed);

  EvalReport report;
  report.methods = methods;
  for (const auto& r : reprs) report.repr_names.push_back(r.name);
  report.cells.assign(methods.size(),
                      std::vector<EvalCell>(reprs.size(), EvalCell{0.0, std::vector<double>(n, 0.0)}));
  report.fold_train_digests.assign(split.folds.size(), 0);
  report.seed = cfg.seed;
  report.folds = cfg.folds;
  report.cutoff = cfg.cutoff;
  report.corpus_size = n;
  report.dictionary_size = dict.size();

  std::vector<int> fold_errors(split.folds.size(), 0);

  auto run_fold = [&](std::size_t f) {
    const auto& test_indices = split.folds[f];
    std::vector<bool> in_test(n, false);
    for (std::size_t idx : test_indices) in_test[idx] = true;

    std::vector<SentencePair> training;
    training.reserve(n - test_indices.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (in_test[i]) continue;
      const auto& pair = corpus.pairs[i];
      training.emplace_back(pair.source, dict.at(*dict.find(pair.concept_id)).description);
    }
    report.fold_train_digests[f] = digest_pairs(training);

    const TranslationTable model1 = train_model1(training, cfg.model1_iterations);
    const PhraseTable pt = build_phrase_table(training, model1, cfg.max_phrase_len);
    std::vector<Phrase> medical_side;
    medical_side.reserve(training.size());
    for (const auto& [src, tgt] : training) medical_side.push_back(tgt);
    const LanguageModel lm = train_lm(medical_side, cfg.lm_order);

    for (std::size_t idx : test_indices) {
      const auto& pair = corpus.pairs[idx];
      std::vector<TranslationHypothesis> top5;
      try {
        top5 = decode_topk(pair.source, pt, lm, cfg.top_k, cfg.beam, cfg.lambda_lm);
      } catch (const Error&) {
        // decode failure: MT methods fall back to an empty list
      }
      for (std::size_t m = 0; m < methods.size(); ++m) {
        for (std::size_t r = 0; r < reprs.size(); ++r) {
          double rr = 0.0;
          try {
            const RankedConcepts ranked = rank_with_method(
                methods[m], pair.source, dict, reprs[r].vectors, top5, cfg.fusion_mt_weight,
                cfg.aggregation);
            const std::size_t rank = ranked.rank_of(pair.concept_id);
            if (rank >= 1 && rank <= static_cast<std::size_t>(cfg.cutoff))
              rr = 1.0 / static_cast<double>(rank);
          } catch (const Error&) {
            fold_errors[f]++;
          }
          report.cells[m][r].reciprocal_ranks[idx] = rr;
        }
      }
    }
    if (cfg.log_folds)
      std::fprintf(stderr, "fold %zu/%zu done (%zu test phrases)\n", f + 1, split.folds.size(),
                   test_indices.size());
  };

  const int jobs = std::max(1, cfg.jobs);
  if (jobs == 1) {
    for (std::size_t f = 0; f < split.folds.size(); ++f) run_fold(f);
  } else {
    std::vector<std::thread> workers;
    const std::size_t nf = split.folds.size();
    for (int w = 0; w < jobs && w < static_cast<int>(nf); ++w) {
      workers.emplace_back([&, w]() {
        for (std::size_t f = static_cast<std::size_t>(w); f < nf;
             f += static_cast<std::size_t>(jobs))
          run_fold(f);
      });
    }
    for (auto& t : workers) t.join();
  }
  for (int e : fold_errors) report.phrase_errors += e;

  for (auto& row : report.cells)
    for (auto& cell : row) {
      double total = 0.0;
      for (double rr : cell.reciprocal_ranks) total += rr;
      cell.mrr = total / static_cast<double>(n);
    }

  // Pairwise significance over per-phrase reciprocal-rank vectors,
  // method-major cell order.
  for (std::size_t m = 0; m < methods.size(); ++m)
    for (std::size_t r = 0; r < reprs.size(); ++r)
      report.config_labels.push_back(method_name(methods[m]) + "@" + reprs[r].name);
  const std::size_t n_cfg = report.config_labels.size();
  report.significance.assign(n_cfg, std::vector<double>(n_cfg, 1.0));
  for (std::size_t i = 0; i < n_cfg; ++i) {
    const auto& rri = report.cells[i / reprs.size()][i % reprs.size()].reciprocal_ranks;
    for (std::size_t j = 0; j < n_cfg; ++j) {
      const auto& rrj = report.cells[j / reprs.size()][j % reprs.size()].reciprocal_ranks;
      report.significance[i][j] = paired_ttest(rri, rrj);
    }
  }
  return report;
}

// report.tsv: representation columns, one row per method, MRR to 4 decimal
// places; significance.tsv: square matrix of pairwise p-values. Header
// comments record the protocol so a run is reproducible from the file alone.
inline void write_report_files(const EvalReport& report, const std::string& report_path,
                               const std::string& significance_path) {
  auto out = open_output(report_path);
  out << "# MRR-" << report.cutoff << " per method and word-vector representation\n";
  out << "# folds: " << report.folds << "\tseed: " << report.seed
      << "\tcorpus: " << report.corpus_size << " phrases\tconcepts: " << report.dictionary_size
      << "\n";
  out << "# prng: splitmix64 fisher-yates shuffle, round-robin fold deal\n";
  out << "method";
  for (const auto& name : report.repr_names) out << '\t' << name;
  out << '\n';
  for (std::size_t m = 0; m < report.methods.size(); ++m) {
    out << method_name(report.methods[m]);
    for (std::size_t r = 0; r < report.repr_names.size(); ++r)
      out << '\t' << fmt_fixed(report.cells[m][r].mrr, 4);
    out << '\n';
  }

  auto sig = open_output(significance_path);
  sig << "# paired t-test two-sided p-values over per-phrase reciprocal ranks\n";
  sig << "config";
  for (const auto& label : report.config_labels) sig << '\t' << label;
  sig << '\n';
  for (std::size_t i = 0; i < report.config_labels.size(); ++i) {
    sig << report.config_labels[i];
    for (std::size_t j = 0; j < report.config_labels.size(); ++j)
      sig << '\t' << fmt_fixed(report.significance[i][j], 4);
    sig << '\n';
  }
}

} // namespace mednorm
