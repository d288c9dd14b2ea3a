#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <unordered_set>
#include <vector>

#include "mednorm/error.hpp"
#include "mednorm/tsv.hpp"

namespace mednorm {

using Token = std::string;

enum class Register { social, medical };

// An ordered token sequence in one register. Tokens are lowercase,
// whitespace-free and non-empty; anonymisation placeholders are the only
// tokens allowed to carry uppercase.
struct Phrase {
  std::vector<Token> tokens;
  Register reg = Register::social;

  bool operator==(const Phrase& o) const { return tokens == o.tokens && reg == o.reg; }
};

inline const std::array<std::string, 7>& placeholders() {
  static const std::array<std::string, 7> ph = {
      "_NUMBER_", "_USER_", "_URL_", "_LOC_", "_EMAIL_", "_DATE_", "_DRUG_"};
  return ph;
}

inline bool is_placeholder(const std::string& tok) {
  const auto& ph = placeholders();
  return std::find(ph.begin(), ph.end(), tok) != ph.end();
}

namespace detail {

inline bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

inline std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

// Strips leading/trailing ASCII punctuation; internal punctuation ("i'm",
// "3.5") is left alone.
inline std::string strip_edge_punct(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_ascii_punct(s[b])) ++b;
  while (e > b && is_ascii_punct(s[e - 1])) --e;
  return s.substr(b, e - b);
}

inline bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

// dd/dd/dddd or dd-dd-dddd with 1-2 digit day/month fields and a 4-digit
// year, same separator in both places.
inline bool looks_like_date(const std::string& t) {
  for (char sep : {'/', '-'}) {
    std::size_t p1 = t.find(sep);
    if (p1 == std::string::npos) continue;
    std::size_t p2 = t.find(sep, p1 + 1);
    if (p2 == std::string::npos) continue;
    if (t.find(sep, p2 + 1) != std::string::npos) continue;
    const std::string a = t.substr(0, p1);
    const std::string b = t.substr(p1 + 1, p2 - p1 - 1);
    const std::string c = t.substr(p2 + 1);
    auto all_digits = [](const std::string& s) {
      return !s.empty() && std::all_of(s.begin(), s.end(), is_digit);
    };
    if (a.size() >= 1 && a.size() <= 2 && b.size() >= 1 && b.size() <= 2 && c.size() == 4 &&
        all_digits(a) && all_digits(b) && all_digits(c))
      return true;
  }
  return false;
}

// At least one digit and nothing but digits/punctuation: "20", "3.5", "1,000".
inline bool looks_like_number(const std::string& t) {
  bool digit = false;
  for (char c : t) {
    if (is_digit(c)) digit = true;
    else if (!is_ascii_punct(c)) return false;
  }
  return digit;
}

inline bool looks_like_email(const std::string& t) {
  const std::size_t at = t.find('@');
  if (at == std::string::npos) return false;
  return t.find('.', at + 1) != std::string::npos;
}

} // namespace detail

// Lowercases, splits on whitespace and strips edge punctuation per token.
// Placeholder tokens pass through verbatim (case included); tokens that are
// punctuation-only disappear. Throws EmptyPhrase if nothing survives.
inline Phrase tokenize(const std::string& raw, Register reg) {
  Phrase out;
  out.reg = reg;
  std::size_t i = 0;
  const std::size_t n = raw.size();
  while (i < n) {
    while (i < n && std::isspace(static_cast<unsigned char>(raw[i]))) ++i;
    std::size_t j = i;
    while (j < n && !std::isspace(static_cast<unsigned char>(raw[j]))) ++j;
    if (j > i) {
      std::string piece = raw.substr(i, j - i);
      if (is_placeholder(piece)) {
        out.tokens.push_back(piece);
      } else {
        piece = detail::strip_edge_punct(detail::lower(piece));
        if (!piece.empty()) out.tokens.push_back(piece);
      }
    }
    i = j;
  }
  if (out.tokens.empty()) throw EmptyPhrase("no token survives tokenization of '" + raw + "'");
  return out;
}

// Token-wise replacement, one placeholder per matching token. Rule order:
// date, number, user, url, drug, email, location. Dates are tested before
// numbers because a date is also all digits-and-punctuation. Placeholders
// match no rule, which makes the operation idempotent; the phrase length
// never changes.
inline Phrase anonymize(const Phrase& phrase,
                        const std::unordered_set<std::string>& drug_lexicon,
                        const std::unordered_set<std::string>& location_gazetteer = {}) {
  Phrase out = phrase;
  for (auto& tok : out.tokens) {
    if (detail::looks_like_date(tok)) tok = "_DATE_";
    else if (detail::looks_like_number(tok)) tok = "_NUMBER_";
    else if (tok.size() >= 2 && tok[0] == '@') tok = "_USER_";
    else if (tok.rfind("http", 0) == 0 || tok.rfind("www", 0) == 0) tok = "_URL_";
    else if (drug_lexicon.count(tok)) tok = "_DRUG_";
    else if (detail::looks_like_email(tok)) tok = "_EMAIL_";
    else if (location_gazetteer.count(tok)) tok = "_LOC_";
  }
  return out;
}

// One lowercase term per line; '#' comments and blank lines skipped.
inline std::unordered_set<std::string> load_term_set(const std::string& path) {
  std::unordered_set<std::string> terms;
  for (const auto& line : read_data_lines(path)) terms.insert(detail::lower(line.text));
  return terms;
}

} // namespace mednorm
