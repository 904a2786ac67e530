#pragma once

#include <algorithm>
#include <cctype>
#include <span>
#include <string>
#include <vector>

namespace metapop::detail {

inline std::string normalize_key(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '_' || c == '-' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

inline std::size_t edit_distance(const std::string& a, const std::string& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Closest known key, or empty when nothing is plausibly close.
inline std::string suggest_key(const std::string& bad,
                               std::span<const std::string> known) {
  const std::string nb = normalize_key(bad);
  for (const auto& k : known) {
    if (normalize_key(k) == nb) return k;
  }
  std::string best;
  std::size_t best_d = 3;  // suggest only within edit distance 2
  for (const auto& k : known) {
    const std::size_t d = edit_distance(bad, k);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

inline std::string unknown_key_message(const std::string& where,
                                       const std::string& key,
                                       std::span<const std::string> known) {
  std::string msg = where + ": unknown key '" + key + "'";
  const std::string hint = suggest_key(key, known);
  if (!hint.empty()) msg += " (did you mean '" + hint + "'?)";
  return msg;
}

}  // namespace metapop::detail
