#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "mednorm/decoder.hpp"
#include "mednorm/error.hpp"
#include "mednorm/lexicon.hpp"
#include "mednorm/vectors.hpp"

namespace mednorm {

// The seven systems: the vSim cosine baseline, three translate-then-rank
// variants, and their three fused forms.
enum class Method {
  vsim,
  best_mt,
  top5_mt,
  top5_mtr,
  best_mt_vsim,
  top5_mt_vsim,
  top5_mtr_vsim,
};

inline const std::vector<Method>& all_methods() {
  static const std::vector<Method> ms = {
      Method::vsim,         Method::best_mt,      Method::top5_mt,
      Method::top5_mtr,     Method::best_mt_vsim, Method::top5_mt_vsim,
      Method::top5_mtr_vsim};
  return ms;
}

inline std::string method_name(Method m) {
  switch (m) {
    case Method::vsim: return "vSim";
    case Method::best_mt: return "bestMT";
    case Method::top5_mt: return "top5MT";
    case Method::top5_mtr: return "top5MTr";
    case Method::best_mt_vsim: return "bestMT+vSim";
    case Method::top5_mt_vsim: return "top5MT+vSim";
    case Method::top5_mtr_vsim: return "top5MTr+vSim";
  }
  return "?";
}

inline Method parse_method(const std::string& name) {
  for (Method m : all_methods())
    if (method_name(m) == name) return m;
  throw InvalidArgument("unknown method '" + name + "'");
}

inline bool method_uses_mt(Method m) { return m != Method::vsim; }
inline bool method_is_combined(Method m) {
  return m == Method::best_mt_vsim || m == Method::top5_mt_vsim || m == Method::top5_mtr_vsim;
}
inline bool method_uses_discount(Method m) {
  return m == Method::top5_mtr || m == Method::top5_mtr_vsim;
}
inline bool method_uses_best_only(Method m) {
  return m == Method::best_mt || m == Method::best_mt_vsim;
}

// How the top-k per-hypothesis concept scores collapse to one score. The
// printed equations leave this open; max is the default, sum is the ablation
// alternative.
enum class Aggregation { max, sum };

struct ScoredConcept {
  std::string id;
  double score;
};

// Concepts in non-increasing score order; equal scores keep dictionary file
// order. Always covers the whole dictionary.
struct RankedConcepts {
  std::vector<ScoredConcept> entries;

  // 1-based rank of the first entry carrying `id`; 0 if absent.
  std::size_t rank_of(const std::string& id) const {
    for (std::size_t i = 0; i < entries.size(); ++i)
      if (entries[i].id == id) return i + 1;
    return 0;
  }
};

struct RankDiagnostics {
  int vsim_term_errors = 0;
  int mt_cell_errors = 0;
};

namespace detail {

inline constexpr double kMinusInf = -std::numeric_limits<double>::infinity();

inline RankedConcepts sort_by_score(const ConceptDictionary& dict, std::vector<double> scores) {
  std::vector<std::size_t> order(dict.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  RankedConcepts out;
  out.entries.reserve(dict.size());
  for (std::size_t i : order) out.entries.push_back({dict.at(i).id, scores[i]});
  return out;
}

// Phrase vectors for the dictionary descriptions; nullopt marks a
// description whose vector errors (ZeroVector / AllTokensOOV) and which can
// only sink to the bottom.
inline std::vector<std::optional<PhraseVector>> description_vectors(const ConceptDictionary& dict,
                                                                    const WordVectors& wv,
                                                                    OovPolicy oov) {
  std::vector<std::optional<PhraseVector>> vecs;
  vecs.reserve(dict.size());
  for (const auto& c : dict) {
    try {
      vecs.push_back(phrase_vector(c.description, wv, oov));
    } catch (const Error&) {
      vecs.push_back(std::nullopt);
    }
  }
  return vecs;
}

inline std::optional<double> safe_cosine(const std::optional<PhraseVector>& u,
                                         const std::optional<PhraseVector>& v) {
  if (!u || !v) return std::nullopt;
  try {
    return cosine(*u, *v);
  } catch (const Error&) {
    return std::nullopt;
  }
}

} // namespace detail

// Baseline: concepts ranked by the cosine of the phrase vector of phr_t
// against each description vector. Unvectorisable descriptions score -inf.
// Phrase composition uses the skip policy so a partially out-of-vocabulary
// query still ranks; AllTokensOOV fires only when nothing matched.
inline RankedConcepts rank_vsim(const Phrase& phr_t, const ConceptDictionary& dict,
                                const WordVectors& wv) {
  if (dict.empty()) throw InvalidArgument("rank_vsim: dictionary is empty");
  const PhraseVector query = phrase_vector(phr_t, wv, OovPolicy::skip);
  const auto descs = detail::description_vectors(dict, wv, OovPolicy::skip);
  std::vector<double> scores(dict.size(), detail::kMinusInf);
  for (std::size_t i = 0; i < dict.size(); ++i)
    if (auto s = detail::safe_cosine(query, descs[i])) scores[i] = *s;
  return detail::sort_by_score(dict, std::move(scores));
}

// Translate-then-rank: per concept and hypothesis the cell score is
// cosine(V_hyp, V_desc), multiplied by 1/rank when `discount` is set; cells
// whose vectors error count -inf. Cell scores collapse per concept with
// `agg`.
inline RankedConcepts rank_mt(const ConceptDictionary& dict, const WordVectors& wv,
                              const std::vector<TranslationHypothesis>& hyps, bool discount,
                              Aggregation agg = Aggregation::max,
                              RankDiagnostics* diag = nullptr) {
  if (dict.empty()) throw InvalidArgument("rank_mt: dictionary is empty");
  if (hyps.empty()) throw InvalidArgument("rank_mt: hypothesis list is empty");

  std::vector<std::optional<PhraseVector>> hyp_vecs;
  hyp_vecs.reserve(hyps.size());
  for (const auto& h : hyps) {
    try {
      hyp_vecs.push_back(phrase_vector(h.phrase, wv, OovPolicy::skip));
    } catch (const Error&) {
      hyp_vecs.push_back(std::nullopt);
    }
  }
  const auto descs = detail::description_vectors(dict, wv, OovPolicy::skip);

  std::vector<double> scores(dict.size(), detail::kMinusInf);
  for (std::size_t c = 0; c < dict.size(); ++c) {
    bool any = false;
    double acc = 0.0;
    for (std::size_t h = 0; h < hyps.size(); ++h) {
      const auto cell = detail::safe_cosine(hyp_vecs[h], descs[c]);
      if (!cell) {
        if (diag) diag->mt_cell_errors++;
        continue;
      }
      const double value = discount ? *cell / static_cast<double>(hyps[h].rank) : *cell;
      if (!any) {
        acc = value;
        any = true;
      } else {
        acc = agg == Aggregation::max ? std::max(acc, value) : acc + value;
      }
    }
    if (any) scores[c] = acc;
  }
  return detail::sort_by_score(dict, std::move(scores));
}

// Fusion: score(c) = cosine(V_phr_t, V_desc_c) + mt_weight * MT_a(c), the
// plain unweighted sum at the default mt_weight of 1. A term that errors
// contributes 0 (counted in diagnostics); a concept with every term errored
// scores -inf and keeps file order at the bottom. An empty hypothesis list
// degrades to the vSim ordering.
inline RankedConcepts rank_combined(const Phrase& phr_t, const ConceptDictionary& dict,
                                    const WordVectors& wv,
                                    const std::vector<TranslationHypothesis>& hyps, bool discount,
                                    double mt_weight = 1.0, Aggregation agg = Aggregation::max,
                                    RankDiagnostics* diag = nullptr) {
  if (dict.empty()) throw InvalidArgument("rank_combined: dictionary is empty");
  const PhraseVector query = phrase_vector(phr_t, wv, OovPolicy::skip);
  const auto descs = detail::description_vectors(dict, wv, OovPolicy::skip);

  std::vector<std::optional<PhraseVector>> hyp_vecs;
  hyp_vecs.reserve(hyps.size());
  for (const auto& h : hyps) {
    try {
      hyp_vecs.push_back(phrase_vector(h.phrase, wv, OovPolicy::skip));
    } catch (const Error&) {
      hyp_vecs.push_back(std::nullopt);
    }
  }

  std::vector<double> scores(dict.size(), detail::kMinusInf);
  for (std::size_t c = 0; c < dict.size(); ++c) {
    bool any = false;
    double total = 0.0;
    if (auto s = detail::safe_cosine(query, descs[c])) {
      total += *s;
      any = true;
    } else if (diag) {
      diag->vsim_term_errors++;
    }
    if (!hyps.empty()) {
      bool mt_any = false;
      double mt_acc = 0.0;
      for (std::size_t h = 0; h < hyps.size(); ++h) {
        const auto cell = detail::safe_cosine(hyp_vecs[h], descs[c]);
        if (!cell) {
          if (diag) diag->mt_cell_errors++;
          continue;
        }
        const double value = discount ? *cell / static_cast<double>(hyps[h].rank) : *cell;
        if (!mt_any) {
          mt_acc = value;
          mt_any = true;
        } else {
          mt_acc = agg == Aggregation::max ? std::max(mt_acc, value) : mt_acc + value;
        }
      }
      if (mt_any) {
        total += mt_weight * mt_acc;
        any = true;
      }
    }
    if (any) scores[c] = total;
  }
  return detail::sort_by_score(dict, std::move(scores));
}

// Dispatch one of the seven methods from a shared k=5 hypothesis list; the
// bestMT variants consume only the rank-1 prefix.
inline RankedConcepts rank_with_method(Method method, const Phrase& phr_t,
                                       const ConceptDictionary& dict, const WordVectors& wv,
                                       const std::vector<TranslationHypothesis>& top5,
                                       double mt_weight = 1.0, Aggregation agg = Aggregation::max,
                                       RankDiagnostics* diag = nullptr) {
  if (method == Method::vsim) return rank_vsim(phr_t, dict, wv);
  std::vector<TranslationHypothesis> hyps = top5;
  if (method_uses_best_only(method) && hyps.size() > 1) hyps.resize(1);
  if (method_is_combined(method))
    return rank_combined(phr_t, dict, wv, hyps, method_uses_discount(method), mt_weight, agg,
                         diag);
  return rank_mt(dict, wv, hyps, method_uses_discount(method), agg, diag);
}

} // namespace mednorm
