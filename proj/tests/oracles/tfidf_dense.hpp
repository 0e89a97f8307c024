#pragma once

// Dense TF-IDF recomputed straight from the definitions, with no shared code.

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace oracle {

struct DenseTfIdf {
  std::vector<std::string> terms;         // retained, lexicographic
  std::vector<std::vector<double>> w;     // terms x docs
};

inline DenseTfIdf tfidf_dense(const std::vector<std::vector<std::string>>& docs, unsigned min_df, double max_df_ratio) {
  std::map<std::string, int> all;
  for (const auto& d : docs) {
    for (const auto& t : d) all[t] = 0;
  }
  const double n = static_cast<double>(docs.size());
  DenseTfIdf out;
  for (const auto& [term, unused] : all) {
    double df = 0;
    for (const auto& d : docs) {
      bool present = false;
      for (const auto& t : d) present = present || t == term;
      df += present;
    }
    if (df < min_df || df / n > max_df_ratio) continue;
    out.terms.push_back(term);
    std::vector<double> row;
    for (const auto& d : docs) {
      double count = 0;
      for (const auto& t : d) count += t == term;
      row.push_back(count / static_cast<double>(d.size()) * std::log(n / (1.0 + df)));
    }
    out.w.push_back(row);
  }
  return out;
}

}  // namespace oracle
