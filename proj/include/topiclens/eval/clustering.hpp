#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

namespace topiclens {

/// One point per row.
using PointMatrix = Eigen::MatrixXd;

struct KMeansConfig {
  std::size_t k = 2;
  std::size_t max_iterations = 300;
  double tolerance = 1e-6;  // stop when no centroid moves farther than this
};

struct KMeansRun {
  std::uint64_t seed = 0;
  std::vector<std::size_t> assignments;
  PointMatrix centroids;
  double inertia = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

struct KMeansResult {
  std::vector<KMeansRun> runs;  // one per seed, in seed order
  std::size_t best = 0;         // lowest inertia, earliest seed on ties

  const KMeansRun& best_run() const { return runs.at(best); }
};

/// k-means++ seeding then Lloyd iterations, once per seed. Empty clusters keep their previous centroid.
KMeansResult kmeans(const PointMatrix& points, const KMeansConfig& config, std::span<const std::uint64_t> seeds);

/// Mean silhouette with Euclidean distance. Points alone in their cluster score 0, as do points with a = b = 0.
double silhouette(const PointMatrix& points, std::span<const std::size_t> labels);

/// Between/within dispersion ratio. +infinity when the within dispersion is 0 and the between dispersion is not.
double calinski_harabasz(const PointMatrix& points, std::span<const std::size_t> labels);

double davies_bouldin(const PointMatrix& points, std::span<const std::size_t> labels);

struct ClusterScores {
  double silhouette = 0.0;
  double calinski_harabasz = 0.0;
  double davies_bouldin = 0.0;
};

ClusterScores cluster_scores(const PointMatrix& points, std::span<const std::size_t> labels);

}  // namespace topiclens
