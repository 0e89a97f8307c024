#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles/brute_metrics.hpp"
#include "topiclens/eval/clustering.hpp"

using namespace topiclens;
using testing::error_kind;

namespace {

PointMatrix from_rows(const oracle::Points& rows) {
  PointMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

struct Instance {
  oracle::Points points;
  std::vector<std::size_t> labels;
};

/// Gaussian clusters with every label used at least once.
Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> n_dist(10, 500), k_dist(2, 8), d_dist(1, 12);
  const std::size_t n = n_dist(rng), k = std::min(k_dist(rng), n - 1), d = d_dist(rng);
  std::normal_distribution<double> g;
  oracle::Points centers(k, std::vector<double>(d));
  for (auto& c : centers) {
    for (auto& x : c) x = 3 * g(rng);
  }
  Instance inst;
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t label = i < k ? i : pick(rng);
    std::vector<double> p(d);
    for (std::size_t j = 0; j < d; ++j) p[j] = centers[label][j] + g(rng);
    inst.points.push_back(p);
    inst.labels.push_back(label);
  }
  return inst;
}

const std::uint64_t kSeeds[] = {1, 2, 3, 4, 5};

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("metrics match brute-force recomputation on random instances") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
      const auto inst = random_instance(rng);
      const auto m = from_rows(inst.points);
      const auto s = cluster_scores(m, inst.labels);
      CHECK(s.silhouette == doctest::Approx(oracle::silhouette(inst.points, inst.labels)).epsilon(1e-9));
      CHECK(s.calinski_harabasz ==
            doctest::Approx(oracle::calinski_harabasz(inst.points, inst.labels)).epsilon(1e-9));
      CHECK(s.davies_bouldin == doctest::Approx(oracle::davies_bouldin(inst.points, inst.labels)).epsilon(1e-9));
      CHECK(s.silhouette >= -1);
      CHECK(s.silhouette <= 1);
      CHECK(s.calinski_harabasz >= 0);
      CHECK(s.davies_bouldin >= 0);
    }
  }

  TEST_CASE("one-dimensional two-pair instance") {
    const oracle::Points pts{{0}, {0.1}, {10}, {10.1}};
    const std::vector<std::size_t> labels{0, 0, 1, 1};
    // a = 0.1 for every point; b = 10.05 for the outer points and 9.95 for the inner ones
    const double expected = ((1 - 0.1 / 10.05) + (1 - 0.1 / 9.95)) / 2;
    CHECK(silhouette(from_rows(pts), labels) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(silhouette(from_rows(pts), labels) == doctest::Approx(0.99).epsilon(1e-6));
  }

  TEST_CASE("identical points in two forced clusters score zero") {
    const PointMatrix pts = PointMatrix::Ones(6, 3);
    const std::vector<std::size_t> labels{0, 0, 0, 1, 1, 1};
    CHECK(silhouette(pts, labels) == 0.0);
    CHECK(calinski_harabasz(pts, labels) == 0.0);
  }

  TEST_CASE("one-hot clusters match the pairwise oracle tightly") {
    oracle::Points pts;
    std::vector<std::size_t> labels;
    for (std::size_t c = 0; c < 3; ++c) {
      for (int i = 0; i < 4; ++i) {
        std::vector<double> p(3, 0.0);
        p[c] = 1;
        pts.push_back(p);
        labels.push_back(c);
      }
    }
    CHECK(silhouette(from_rows(pts), labels) == doctest::Approx(oracle::silhouette(pts, labels)).epsilon(1e-12));
    CHECK(silhouette(from_rows(pts), labels) == doctest::Approx(1.0));
  }

  TEST_CASE("singletons score zero in silhouette") {
    const oracle::Points pts{{0}, {1}, {1.2}, {5}};
    const std::vector<std::size_t> labels{0, 1, 1, 2};
    CHECK(silhouette(from_rows(pts), labels) == doctest::Approx(oracle::silhouette(pts, labels)).epsilon(1e-12));
  }

  TEST_CASE("calinski-harabasz limits") {
    const oracle::Points pairs{{0, 0}, {0, 0}, {5, 5}, {5, 5}};
    const std::vector<std::size_t> labels{0, 0, 1, 1};
    CHECK(std::isinf(calinski_harabasz(from_rows(pairs), labels)));
    const oracle::Points three{{0}, {1}, {2}};
    CHECK(error_kind([&] { calinski_harabasz(from_rows(three), std::vector<std::size_t>{0, 1, 2}); }) ==
          ErrorKind::NEqualsK);
  }

  TEST_CASE("mirrored clusters give two s over d") {
    // clusters at x = -3 and x = +3, each with points at distance 1 from the centroid
    const oracle::Points pts{{-3, 1}, {-3, -1}, {3, 1}, {3, -1}};
    const std::vector<std::size_t> labels{0, 0, 1, 1};
    CHECK(davies_bouldin(from_rows(pts), labels) == doctest::Approx(2.0 * 1.0 / 6.0).epsilon(1e-12));
    const oracle::Points tight{{0, 0}, {0, 0.001}, {100, 0}, {100, 0.001}};
    CHECK(davies_bouldin(from_rows(tight), labels) < 1e-4);
    const oracle::Points coincident{{-1}, {1}, {-2}, {2}};
    CHECK(error_kind([&] { davies_bouldin(from_rows(coincident), labels); }) == ErrorKind::CoincidentCentroids);
  }

  TEST_CASE("label validation") {
    const PointMatrix pts = PointMatrix::Random(5, 2);
    CHECK(error_kind([&] { silhouette(pts, std::vector<std::size_t>(5, 3)); }) == ErrorKind::SingleCluster);
    CHECK(error_kind([&] { davies_bouldin(pts, std::vector<std::size_t>(5, 0)); }) == ErrorKind::SingleCluster);
    CHECK(error_kind([&] { silhouette(pts, std::vector<std::size_t>{0, 1}); }) == ErrorKind::ShapeMismatch);
    // sparse label values are remapped, so {4, 9} behaves like {0, 1}
    const std::vector<std::size_t> a{4, 4, 9, 9, 9}, b{0, 0, 1, 1, 1};
    CHECK(cluster_scores(pts, a).silhouette == cluster_scores(pts, b).silhouette);
  }

  TEST_CASE("k-means separates two far blobs") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0, 0.05);
    PointMatrix pts(40, 2);
    for (Eigen::Index i = 0; i < 40; ++i) {
      pts(i, 0) = (i < 20 ? 0 : 10) + g(rng);
      pts(i, 1) = g(rng);
    }
    const auto result = kmeans(pts, {2}, kSeeds);
    CHECK(result.runs.size() == 5);
    for (const auto& run : result.runs) {
      CHECK(run.converged);
      for (Eigen::Index i = 1; i < 40; ++i) {
        CHECK((run.assignments[static_cast<std::size_t>(i)] == run.assignments[0]) == (i < 20));
      }
    }
  }

  TEST_CASE("k equal to n gives zero inertia") {
    const PointMatrix pts = PointMatrix::Random(6, 3);
    const auto result = kmeans(pts, {6}, kSeeds);
    CHECK(result.best_run().inertia == doctest::Approx(0.0));
    CHECK(error_kind([&] { kmeans(pts, {7}, kSeeds); }) == ErrorKind::KTooLarge);
    CHECK(error_kind([&] { kmeans(pts, {1}, kSeeds); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("duplicate points converge to a single effective centroid") {
    const PointMatrix pts = PointMatrix::Constant(10, 4, 0.5);
    const auto result = kmeans(pts, {3}, kSeeds);
    for (const auto& run : result.runs) {
      CHECK(run.converged);
      CHECK(run.inertia == 0.0);
      for (Eigen::Index c = 0; c < 3; ++c) CHECK((run.centroids.row(c).array() == 0.5).all());
    }
  }

  TEST_CASE("best run has the smallest inertia and runs are reproducible") {
    std::mt19937_64 rng(9);
    const auto inst = random_instance(rng);
    const auto pts = from_rows(inst.points);
    const auto a = kmeans(pts, {4}, kSeeds), b = kmeans(pts, {4}, kSeeds);
    for (const auto& run : a.runs) CHECK(a.best_run().inertia <= run.inertia);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
      CHECK(a.runs[i].assignments == b.runs[i].assignments);
      CHECK(a.runs[i].inertia == b.runs[i].inertia);
    }
  }
}
