#include "topiclens/eval/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "topiclens/error.hpp"

namespace topiclens {

namespace {

double sq_distance(const PointMatrix& a, Eigen::Index i, const PointMatrix& b, Eigen::Index j) {
  double s = 0.0;
  for (Eigen::Index c = 0; c < a.cols(); ++c) {
    const double d = a(i, c) - b(j, c);
    s += d * d;
  }
  return s;
}

// Relabels to dense 0..k-1 in order of first label value; throws when fewer than two clusters.
std::vector<std::size_t> dense_labels(const PointMatrix& points, std::span<const std::size_t> labels, std::size_t& k) {
  if (labels.size() != static_cast<std::size_t>(points.rows())) {
    fail(ErrorKind::ShapeMismatch, "labels and points differ in length");
  }
  std::map<std::size_t, std::size_t> remap;
  for (auto l : labels) remap.emplace(l, 0);
  std::size_t next = 0;
  for (auto& [label, id] : remap) id = next++;
  k = remap.size();
  if (k < 2) fail(ErrorKind::SingleCluster, "clustering metrics need at least two clusters");
  std::vector<std::size_t> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[labels[i]];
  return out;
}

PointMatrix centroids_of(const PointMatrix& points, const std::vector<std::size_t>& labels, std::size_t k,
                         std::vector<std::size_t>& sizes) {
  PointMatrix c = PointMatrix::Zero(static_cast<Eigen::Index>(k), points.cols());
  sizes.assign(k, 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    c.row(static_cast<Eigen::Index>(labels[i])) += points.row(static_cast<Eigen::Index>(i));
    ++sizes[labels[i]];
  }
  for (std::size_t j = 0; j < k; ++j) c.row(static_cast<Eigen::Index>(j)) /= static_cast<double>(sizes[j]);
  return c;
}

KMeansRun run_once(const PointMatrix& x, const KMeansConfig& cfg, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(x.rows());
  const auto k = cfg.k;
  std::mt19937_64 rng(seed);
  KMeansRun run;
  run.seed = seed;
  run.centroids.resize(static_cast<Eigen::Index>(k), x.cols());

  // k-means++: first centre uniform, then proportional to squared distance to the nearest centre.
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  std::size_t pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
  for (std::size_t c = 0; c < k; ++c) {
    if (c > 0) {
      double total = 0.0;
      for (double d : nearest) total += d;
      if (total > 0.0) {
        double u = std::uniform_real_distribution<double>(0.0, total)(rng);
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          if (u < nearest[i]) {
            pick = i;
            break;
          }
          u -= nearest[i];
        }
      } else {
        pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
      }
    }
    run.centroids.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], sq_distance(x, static_cast<Eigen::Index>(i), run.centroids,
                                                    static_cast<Eigen::Index>(c)));
    }
  }

  run.assignments.assign(n, 0);
  std::vector<std::size_t> sizes(k);
  for (run.iterations = 1; run.iterations <= cfg.max_iterations; ++run.iterations) {
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = sq_distance(x, static_cast<Eigen::Index>(i), run.centroids, static_cast<Eigen::Index>(c));
        if (d < best) {
          best = d;
          run.assignments[i] = c;
        }
      }
    }
    PointMatrix next = PointMatrix::Zero(run.centroids.rows(), run.centroids.cols());
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      next.row(static_cast<Eigen::Index>(run.assignments[i])) += x.row(static_cast<Eigen::Index>(i));
      ++sizes[run.assignments[i]];
    }
    double shift = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      const auto r = static_cast<Eigen::Index>(c);
      if (sizes[c] == 0) {
        next.row(r) = run.centroids.row(r);
      } else {
        next.row(r) /= static_cast<double>(sizes[c]);
      }
      shift = std::max(shift, std::sqrt(sq_distance(next, r, run.centroids, r)));
    }
    run.centroids = std::move(next);
    if (shift < cfg.tolerance) {
      run.converged = true;
      break;
    }
  }
  run.iterations = std::min(run.iterations, cfg.max_iterations);
  run.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    run.inertia += sq_distance(x, static_cast<Eigen::Index>(i), run.centroids,
                               static_cast<Eigen::Index>(run.assignments[i]));
  }
  return run;
}

}  // namespace

KMeansResult kmeans(const PointMatrix& points, const KMeansConfig& config, std::span<const std::uint64_t> seeds) {
  if (config.k < 2) fail(ErrorKind::InvalidArgument, "k-means needs k >= 2");
  if (config.k > static_cast<std::size_t>(points.rows())) {
    fail(ErrorKind::KTooLarge, "k = " + std::to_string(config.k) + " exceeds the " + std::to_string(points.rows()) +
                                   " points");
  }
  if (seeds.empty()) fail(ErrorKind::InvalidArgument, "k-means needs at least one seed");
  KMeansResult result;
  for (auto seed : seeds) {
    result.runs.push_back(run_once(points, config, seed));
    if (result.runs.back().inertia < result.runs[result.best].inertia) result.best = result.runs.size() - 1;
  }
  return result;
}

double silhouette(const PointMatrix& points, std::span<const std::size_t> raw_labels) {
  std::size_t k = 0;
  const auto labels = dense_labels(points, raw_labels, k);
  const std::size_t n = labels.size();
  std::vector<std::size_t> sizes(k, 0);
  for (auto l : labels) ++sizes[l];
  std::vector<double> sums(n * k, 0.0);  // sums[i * k + c] = total distance from i to cluster c
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = std::sqrt(sq_distance(points, static_cast<Eigen::Index>(i), points, static_cast<Eigen::Index>(j)));
      sums[i * k + labels[j]] += d;
      sums[j * k + labels[i]] += d;
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t own = labels[i];
    if (sizes[own] == 1) continue;
    const double a = sums[i * k + own] / static_cast<double>(sizes[own] - 1);
    double b = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
      if (c != own) b = std::min(b, sums[i * k + c] / static_cast<double>(sizes[c]));
    }
    const double m = std::max(a, b);
    if (m > 0.0) total += (b - a) / m;
  }
  return total / static_cast<double>(n);
}

double calinski_harabasz(const PointMatrix& points, std::span<const std::size_t> raw_labels) {
  std::size_t k = 0;
  const auto labels = dense_labels(points, raw_labels, k);
  const std::size_t n = labels.size();
  if (n == k) fail(ErrorKind::NEqualsK, "Calinski-Harabasz is undefined when every point is its own cluster");
  std::vector<std::size_t> sizes;
  const PointMatrix c = centroids_of(points, labels, k, sizes);
  const Eigen::RowVectorXd mean = points.colwise().mean();
  double between = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    between += static_cast<double>(sizes[j]) * (c.row(static_cast<Eigen::Index>(j)) - mean).squaredNorm();
  }
  double within = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    within += sq_distance(points, static_cast<Eigen::Index>(i), c, static_cast<Eigen::Index>(labels[i]));
  }
  if (within == 0.0) return between == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return (between / static_cast<double>(k - 1)) / (within / static_cast<double>(n - k));
}

double davies_bouldin(const PointMatrix& points, std::span<const std::size_t> raw_labels) {
  std::size_t k = 0;
  const auto labels = dense_labels(points, raw_labels, k);
  std::vector<std::size_t> sizes;
  const PointMatrix c = centroids_of(points, labels, k, sizes);
  std::vector<double> spread(k, 0.0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    spread[labels[i]] +=
        std::sqrt(sq_distance(points, static_cast<Eigen::Index>(i), c, static_cast<Eigen::Index>(labels[i])));
  }
  for (std::size_t j = 0; j < k; ++j) spread[j] /= static_cast<double>(sizes[j]);
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double d = std::sqrt(sq_distance(c, static_cast<Eigen::Index>(i), c, static_cast<Eigen::Index>(j)));
      if (d == 0.0) fail(ErrorKind::CoincidentCentroids, "clusters " + std::to_string(i) + " and " +
                                                             std::to_string(j) + " share a centroid");
      worst = std::max(worst, (spread[i] + spread[j]) / d);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

ClusterScores cluster_scores(const PointMatrix& points, std::span<const std::size_t> labels) {
  return {silhouette(points, labels), calinski_harabasz(points, labels), davies_bouldin(points, labels)};
}

}  // namespace topiclens
