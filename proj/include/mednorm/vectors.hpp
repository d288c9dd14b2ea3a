#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "mednorm/error.hpp"
#include "mednorm/text.hpp"
#include "mednorm/tsv.hpp"

namespace mednorm {

enum class VectorKind { one_hot, dense };

enum class OovPolicy { skip, zero_fail };

struct PhraseVector {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
};

// Immutable token -> vector table. All vectors share one dimension; one-hot
// tables additionally hold exactly one 1.0 per vector at a token-unique
// index.
class WordVectors {
public:
  WordVectors(VectorKind kind, std::size_t dimension) : kind_(kind), dimension_(dimension) {}

  VectorKind kind() const { return kind_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return table_.size(); }

  // Default policy: dense tables skip unseen tokens, one-hot tables treat
  // them as a hard error (the one-hot vocabulary is total by construction).
  OovPolicy default_policy() const {
    return kind_ == VectorKind::dense ? OovPolicy::skip : OovPolicy::zero_fail;
  }

  void insert(const std::string& token, std::vector<double> vec) {
    if (vec.size() != dimension_)
      throw DimensionMismatch("vector for '" + token + "' has dimension " +
                              std::to_string(vec.size()) + ", table has " +
                              std::to_string(dimension_));
    table_[token] = std::move(vec);
  }

  const std::vector<double>* find(const std::string& token) const {
    auto it = table_.find(token);
    return it == table_.end() ? nullptr : &it->second;
  }

  bool contains(const std::string& token) const { return table_.count(token) != 0; }

  const std::unordered_map<std::string, std::vector<double>>& table() const { return table_; }

  // Multiplies every stored vector by lambda. Test hook for the
  // scale-invariance property; rankings must not move.
  void scale(double lambda) {
    for (auto& [tok, vec] : table_)
      for (double& v : vec) v *= lambda;
  }

private:
  VectorKind kind_;
  std::size_t dimension_;
  std::unordered_map<std::string, std::vector<double>> table_;
};

// Vocabulary = all distinct tokens of the input phrases, sorted
// lexicographically; token i gets hot index i and the dimension is the
// vocabulary size.
inline WordVectors build_one_hot(const std::vector<Phrase>& vocab_sources) {
  if (vocab_sources.empty()) throw InvalidArgument("build_one_hot: no phrases given");
  std::map<std::string, std::size_t> vocab;
  for (const auto& p : vocab_sources)
    for (const auto& t : p.tokens) vocab.emplace(t, 0);
  std::size_t idx = 0;
  for (auto& [tok, i] : vocab) i = idx++;
  WordVectors wv(VectorKind::one_hot, vocab.size());
  for (const auto& [tok, i] : vocab) {
    std::vector<double> vec(vocab.size(), 0.0);
    vec[i] = 1.0;
    wv.insert(tok, std::move(vec));
  }
  return wv;
}

// word2vec / GloVe text output: "token v1 ... vd" per line, with an optional
// leading "count dim" header of two integers. Dimension is inferred from the
// first vector row.
inline WordVectors load_dense(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);

  auto parse_row = [&](const std::string& line, std::size_t line_no, std::string& token,
                       std::vector<double>& values) {
    values.clear();
    std::istringstream iss(line);
    if (!(iss >> token)) throw MalformedLine(path, line_no, "empty row");
    std::string field;
    while (iss >> field) {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0')
        throw MalformedLine(path, line_no, "non-numeric value '" + field + "'");
      values.push_back(v);
    }
  };

  std::string line;
  std::size_t line_no = 0;
  std::string token;
  std::vector<double> values;

  // First non-empty line: either "count dim" or the first vector row.
  std::vector<std::pair<std::string, std::vector<double>>> rows;
  bool saw_first = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!saw_first) {
      saw_first = true;
      std::istringstream probe(line);
      long long a = 0, b = 0;
      std::string rest;
      if (probe >> a >> b && !(probe >> rest)) continue; // header consumed
    }
    parse_row(line, line_no, token, values);
    if (values.empty()) throw MalformedLine(path, line_no, "row has no values");
    if (!rows.empty() && values.size() != rows.front().second.size())
      throw DimensionMismatch(path + ":" + std::to_string(line_no) + ": row has " +
                              std::to_string(values.size()) + " values, expected " +
                              std::to_string(rows.front().second.size()));
    rows.emplace_back(token, values);
  }
  if (rows.empty()) throw MalformedLine(path, line_no == 0 ? 1 : line_no, "no vector rows");

  WordVectors wv(VectorKind::dense, rows.front().second.size());
  for (auto& [tok, vec] : rows) wv.insert(tok, std::move(vec));
  return wv;
}

// Element-wise sum of the member token vectors. Under `skip` an absent token
// contributes nothing (AllTokensOOV when nothing at all was summed); under
// `zero_fail` any absent token raises OOVToken.
inline PhraseVector phrase_vector(const Phrase& phrase, const WordVectors& wv, OovPolicy oov) {
  if (phrase.tokens.empty()) throw EmptyPhrase();
  PhraseVector out;
  out.values.assign(wv.dimension(), 0.0);
  bool any = false;
  for (const auto& tok : phrase.tokens) {
    const auto* vec = wv.find(tok);
    if (!vec) {
      if (oov == OovPolicy::zero_fail) throw OOVToken(tok);
      continue;
    }
    any = true;
    for (std::size_t i = 0; i < vec->size(); ++i) out.values[i] += (*vec)[i];
  }
  if (!any) throw AllTokensOOV();
  return out;
}

inline PhraseVector phrase_vector(const Phrase& phrase, const WordVectors& wv) {
  return phrase_vector(phrase, wv, wv.default_policy());
}

inline double cosine(const PhraseVector& u, const PhraseVector& v) {
  if (u.dimension() != v.dimension())
    throw DimensionMismatch("cosine: dimensions " + std::to_string(u.dimension()) + " vs " +
                            std::to_string(v.dimension()));
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    dot += u.values[i] * v.values[i];
    nu += u.values[i] * u.values[i];
    nv += v.values[i] * v.values[i];
  }
  if (nu == 0.0 || nv == 0.0) throw ZeroVector();
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

} // namespace mednorm
