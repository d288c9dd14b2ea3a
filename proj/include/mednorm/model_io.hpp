#pragma once

#include <cstdlib>
#include <map>
#include <set>
#include <string>

#include "mednorm/align.hpp"
#include "mednorm/lm.hpp"
#include "mednorm/phrase_table.hpp"
#include "mednorm/rng.hpp"
#include "mednorm/tsv.hpp"

namespace mednorm {

// model1.tsv: "<source_token>\t<target_token>\t<prob>", sorted by (source,
// target). Ordered maps make the sort free.
inline void save_translation_table(const TranslationTable& table, const std::string& path) {
  auto out = open_output(path);
  for (const auto& [f, row] : table.rows())
    for (const auto& [e, p] : row) out << f << '\t' << e << '\t' << fmt_prob(p) << '\n';
}

inline TranslationTable load_translation_table(const std::string& path) {
  TranslationTable table;
  for (const auto& line : read_data_lines(path)) {
    const auto fields = split_tabs(line.text);
    if (fields.size() != 3) throw MalformedLine(path, line.number, "expected 3 fields");
    char* end = nullptr;
    const double p = std::strtod(fields[2].c_str(), &end);
    if (end == fields[2].c_str() || *end != '\0')
      throw MalformedLine(path, line.number, "bad probability '" + fields[2] + "'");
    table.row(fields[0])[fields[1]] = p;
  }
  return table;
}

// phrases.tsv: "<source_span>\t<target_span>\t<phi>" with space-joined
// spans, sorted by (source, target).
inline void save_phrase_table(const PhraseTable& pt, const std::string& path) {
  auto out = open_output(path);
  for (const auto& [src, options] : pt.entries())
    for (const auto& opt : options)
      out << src << '\t' << join_tokens(opt.target) << '\t' << fmt_prob(opt.phi) << '\n';
}

inline PhraseTable load_phrase_table(const std::string& path, int max_phrase_len) {
  std::map<std::string, std::vector<PhraseOption>> entries;
  for (const auto& line : read_data_lines(path)) {
    const auto fields = split_tabs(line.text);
    if (fields.size() != 3) throw MalformedLine(path, line.number, "expected 3 fields");
    char* end = nullptr;
    const double phi = std::strtod(fields[2].c_str(), &end);
    if (end == fields[2].c_str() || *end != '\0')
      throw MalformedLine(path, line.number, "bad phi '" + fields[2] + "'");
    entries[fields[0]].push_back({split_spaces(fields[1]), phi});
  }
  PhraseTable pt(max_phrase_len);
  for (auto& [src, options] : entries) pt.set(src, std::move(options));
  return pt;
}

// lm.tsv: "<ngram space-joined>\t<count>" for the full-order n-grams only;
// order, context counts and the vocabulary size are all recoverable from
// those rows.
inline void save_language_model(const LanguageModel& lm, const std::string& path) {
  auto out = open_output(path);
  for (const auto& [ngram, count] : lm.ngram_counts()) out << ngram << '\t' << count << '\n';
}

inline LanguageModel load_language_model(const std::string& path) {
  std::map<std::string, long long> ngrams;
  int order = 0;
  for (const auto& line : read_data_lines(path)) {
    const auto fields = split_tabs(line.text);
    if (fields.size() != 2) throw MalformedLine(path, line.number, "expected 2 fields");
    const auto toks = split_spaces(fields[0]);
    if (toks.empty()) throw MalformedLine(path, line.number, "empty n-gram");
    if (order == 0) order = static_cast<int>(toks.size());
    else if (order != static_cast<int>(toks.size()))
      throw MalformedLine(path, line.number, "inconsistent n-gram length");
    char* end = nullptr;
    const long long c = std::strtoll(fields[1].c_str(), &end, 10);
    if (end == fields[1].c_str() || *end != '\0' || c < 0)
      throw MalformedLine(path, line.number, "bad count '" + fields[1] + "'");
    ngrams[fields[0]] += c;
  }
  if (ngrams.empty()) throw MalformedLine(path, 1, "language model file has no rows");

  std::map<std::string, long long> contexts;
  std::set<std::string> vocab;
  for (const auto& [ngram, count] : ngrams) {
    const auto toks = split_spaces(ngram);
    contexts[LanguageModel::slice_key(toks, 0, toks.size() - 1)] += count;
    for (const auto& t : toks)
      if (t != kBosToken && t != kEosToken) vocab.insert(t);
  }
  return LanguageModel(order, std::move(ngrams), std::move(contexts),
                       static_cast<long long>(vocab.size()) + 1);
}

// manifest.tsv: flat key\tvalue rows describing how the directory was
// produced, including a hash of the effective configuration.
inline void save_manifest(const std::map<std::string, std::string>& entries,
                          const std::string& path) {
  auto out = open_output(path);
  std::string canonical;
  for (const auto& [key, value] : entries) canonical += key + "=" + value + "\n";
  const std::uint64_t hash = fnv1a(canonical.data(), canonical.size());
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  for (const auto& [key, value] : entries) out << key << '\t' << value << '\n';
  out << "config_hash" << '\t' << buf << '\n';
}

inline std::map<std::string, std::string> load_manifest(const std::string& path) {
  std::map<std::string, std::string> entries;
  for (const auto& line : read_data_lines(path)) {
    const auto fields = split_tabs(line.text);
    if (fields.size() != 2) throw MalformedLine(path, line.number, "expected 2 fields");
    entries[fields[0]] = fields[1];
  }
  return entries;
}

} // namespace mednorm
