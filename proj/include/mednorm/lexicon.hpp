#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mednorm/error.hpp"
#include "mednorm/rng.hpp"
#include "mednorm/text.hpp"
#include "mednorm/tsv.hpp"

namespace mednorm {

// A target dictionary entry: identifier plus one medical-register
// description phrase.
struct Concept {
  std::string id;
  Phrase description;
};

// Concepts in file order; ids unique. Iteration order is load order so every
// downstream tie-break ("concept file order") is well defined.
class ConceptDictionary {
public:
  ConceptDictionary() = default;

  void add(Concept c, std::size_t line_no = 0) {
    if (index_.count(c.id)) throw DuplicateId(c.id, line_no);
    index_.emplace(c.id, concepts_.size());
    concepts_.push_back(std::move(c));
  }

  std::size_t size() const { return concepts_.size(); }
  bool empty() const { return concepts_.empty(); }
  const Concept& at(std::size_t i) const { return concepts_[i]; }

  std::optional<std::size_t> find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  auto begin() const { return concepts_.begin(); }
  auto end() const { return concepts_.end(); }

private:
  std::vector<Concept> concepts_;
  std::unordered_map<std::string, std::size_t> index_;
};

// One (social phrase, concept id) training pair.
struct CorpusPair {
  Phrase source;          // social register, tokenized + anonymized
  std::string concept_id; // resolves in the accompanying dictionary
};

struct ParallelCorpus {
  std::vector<CorpusPair> pairs;

  std::size_t size() const { return pairs.size(); }
};

// concepts.tsv: "<id>\t<description>", '#' comments skipped.
inline ConceptDictionary load_concepts(const std::string& path) {
  ConceptDictionary dict;
  for (const auto& line : read_data_lines(path)) {
    const auto fields = split_tabs(line.text);
    if (fields.size() != 2 || fields[0].empty())
      throw MalformedLine(path, line.number, "expected <id>\\t<description>");
    dict.add({fields[0], tokenize(fields[1], Register::medical)}, line.number);
  }
  return dict;
}

// corpus.tsv: "<phrase>\t<concept_id>". Phrases are tokenized and anonymized
// on load; ids must resolve in the dictionary.
inline ParallelCorpus load_corpus(const std::string& path, const ConceptDictionary& dict,
                                  const std::unordered_set<std::string>& drug_lexicon = {},
                                  const std::unordered_set<std::string>& gazetteer = {}) {
  ParallelCorpus corpus;
  for (const auto& line : read_data_lines(path)) {
    const auto fields = split_tabs(line.text);
    if (fields.size() != 2 || fields[1].empty())
      throw MalformedLine(path, line.number, "expected <phrase>\\t<concept_id>");
    if (!dict.find(fields[1])) throw UnknownConcept(fields[1], line.number);
    corpus.pairs.push_back(
        {anonymize(tokenize(fields[0], Register::social), drug_lexicon, gazetteer), fields[1]});
  }
  return corpus;
}

inline void save_corpus(const ParallelCorpus& corpus, const std::string& path) {
  auto out = open_output(path);
  for (const auto& pair : corpus.pairs)
    out << join_tokens(pair.source.tokens) << '\t' << pair.concept_id << '\n';
}

namespace detail {

// A stable informal variant of a token: drop vowels after the first
// character, or double the final letter when there is nothing to drop.
// Stability matters: the same token always degrades the same way, so a
// translation model can learn the mapping back.
inline std::string informal_variant(const std::string& tok) {
  auto is_vowel = [](char c) {
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
  };
  std::string out;
  out.push_back(tok[0]);
  for (std::size_t i = 1; i < tok.size(); ++i)
    if (!is_vowel(tok[i])) out.push_back(tok[i]);
  if (out == tok || out.size() < 2) out = tok + tok.back();
  return out;
}

inline const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> fw = {"so",   "omg", "like", "rly", "im",  "ugh",
                                              "been", "all", "day",  "u",   "cant", "2nite"};
  return fw;
}

} // namespace detail

// Stand-in for a hand-annotated phrase collection: for every concept,
// n_per_concept social-register paraphrases of its description. The grammar
// is fixed: per-token informal substitution at rate `noise`, up to two
// filler insertions (each with probability `noise`), and per-position
// scrambling swaps at rate `noise`. Draws come from one SplitMix64 stream in
// a fixed order, so a (dict, n, noise, seed) tuple always yields the same
// corpus. noise = 0 reproduces each description verbatim.
inline ParallelCorpus generate_synthetic(const ConceptDictionary& dict, std::size_t n_per_concept,
                                         double noise, std::uint64_t seed) {
  if (dict.empty()) throw InvalidArgument("generate_synthetic: dictionary is empty");
  if (noise < 0.0 || noise > 1.0)
    throw InvalidArgument("generate_synthetic: noise must be in [0,1]");
  SplitMix64 rng(seed);
  ParallelCorpus corpus;
  for (const auto& entry : dict) {
    for (std::size_t s = 0; s < n_per_concept; ++s) {
      std::vector<std::string> toks = entry.description.tokens;
      if (noise > 0.0) {
        for (auto& tok : toks)
          if (!is_placeholder(tok) && rng.next_double() < noise)
            tok = detail::informal_variant(tok);
        for (int round = 0; round < 2; ++round) {
          if (rng.next_double() < noise) {
            const auto& fillers = detail::filler_words();
            const std::string filler = fillers[rng.next_below(fillers.size())];
            const std::size_t pos = rng.next_below(toks.size() + 1);
            toks.insert(toks.begin() + static_cast<std::ptrdiff_t>(pos), filler);
          }
        }
        for (std::size_t i = 0; i < toks.size(); ++i)
          if (rng.next_double() < noise)
            std::swap(toks[i], toks[rng.next_below(toks.size())]);
      }
      Phrase src;
      src.reg = Register::social;
      src.tokens = std::move(toks);
      corpus.pairs.push_back({std::move(src), entry.id});
    }
  }
  return corpus;
}

} // namespace mednorm
