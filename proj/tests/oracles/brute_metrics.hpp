#pragma once

// Clustering and retrieval metrics by direct enumeration over explicit point lists.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

using Points = std::vector<std::vector<double>>;

inline double dist(const std::vector<double>& x, const std::vector<double>& y) {
  double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - y[i]) * (x[i] - y[i]);
  return std::sqrt(s);
}

inline std::map<std::size_t, std::vector<std::size_t>> members(const std::vector<std::size_t>& labels) {
  std::map<std::size_t, std::vector<std::size_t>> m;
  for (std::size_t i = 0; i < labels.size(); ++i) m[labels[i]].push_back(i);
  return m;
}

inline std::vector<double> mean_of(const Points& x, const std::vector<std::size_t>& idx) {
  std::vector<double> c(x[0].size(), 0.0);
  for (auto i : idx) {
    for (std::size_t d = 0; d < c.size(); ++d) c[d] += x[i][d];
  }
  for (auto& v : c) v /= static_cast<double>(idx.size());
  return c;
}

inline double silhouette(const Points& x, const std::vector<std::size_t>& labels) {
  const auto groups = members(labels);
  const std::size_t n = x.size();
  std::vector<std::vector<double>> d(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) d[i][j] = dist(x[i], x[j]);
  }
  double total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& own = groups.at(labels[i]);
    if (own.size() == 1) continue;
    double a = 0;
    for (auto j : own) a += j == i ? 0.0 : d[i][j];
    a /= static_cast<double>(own.size() - 1);
    double b = std::numeric_limits<double>::infinity();
    for (const auto& [label, idx] : groups) {
      if (label == labels[i]) continue;
      double s = 0;
      for (auto j : idx) s += d[i][j];
      b = std::min(b, s / static_cast<double>(idx.size()));
    }
    if (std::max(a, b) > 0) total += (b - a) / std::max(a, b);
  }
  return total / static_cast<double>(n);
}

// Traces of the between/within scatter matrices, each built entry by entry.
inline double calinski_harabasz(const Points& x, const std::vector<std::size_t>& labels) {
  const auto groups = members(labels);
  const std::size_t dim = x[0].size(), n = x.size(), k = groups.size();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  const auto g = mean_of(x, all);
  std::vector<std::vector<double>> sb(dim, std::vector<double>(dim, 0.0)), sw = sb;
  for (const auto& [label, idx] : groups) {
    const auto c = mean_of(x, idx);
    for (std::size_t p = 0; p < dim; ++p) {
      for (std::size_t q = 0; q < dim; ++q) {
        sb[p][q] += static_cast<double>(idx.size()) * (c[p] - g[p]) * (c[q] - g[q]);
        for (auto i : idx) sw[p][q] += (x[i][p] - c[p]) * (x[i][q] - c[q]);
      }
    }
  }
  double tb = 0, tw = 0;
  for (std::size_t p = 0; p < dim; ++p) {
    tb += sb[p][p];
    tw += sw[p][p];
  }
  return (tb / static_cast<double>(k - 1)) / (tw / static_cast<double>(n - k));
}

inline double davies_bouldin(const Points& x, const std::vector<std::size_t>& labels) {
  const auto groups = members(labels);
  std::vector<std::vector<double>> centres;
  std::vector<double> spread;
  for (const auto& [label, idx] : groups) {
    centres.push_back(mean_of(x, idx));
    double s = 0;
    for (auto i : idx) s += dist(x[i], centres.back());
    spread.push_back(s / static_cast<double>(idx.size()));
  }
  double total = 0;
  for (std::size_t i = 0; i < centres.size(); ++i) {
    double worst = 0;
    for (std::size_t j = 0; j < centres.size(); ++j) {
      if (i != j) worst = std::max(worst, (spread[i] + spread[j]) / dist(centres[i], centres[j]));
    }
    total += worst;
  }
  return total / static_cast<double>(centres.size());
}

struct Prf {
  double p, r, f1;
};

inline Prf prf(const std::vector<std::string>& ranked, const std::set<std::string>& relevant, std::size_t k) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    if (relevant.count(ranked[i])) ++hits;
  }
  const double p = static_cast<double>(hits) / static_cast<double>(k);
  const double r = static_cast<double>(hits) / static_cast<double>(relevant.size());
  return {p, r, p + r == 0 ? 0.0 : 2 * p * r / (p + r)};
}

}  // namespace oracle
