#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "topiclens/fusion.hpp"

namespace topiclens {

struct IndexEntry {
  std::string chunk_id;
  std::string doc_id;
  EnrichedVector vector;
};

struct Hit {
  std::string chunk_id;
  std::string doc_id;
  double score = 0.0;
};

struct QueryResult {
  std::vector<Hit> hits;  // scores non-increasing, ties by ascending chunk_id
  std::size_t k_requested = 0;
  std::size_t k_returned() const noexcept { return hits.size(); }
};

/// Exact cosine kNN over unit vectors stored as f32. Records are kept sorted by chunk_id, so
/// position order is the tie-break order. Immutable after build.
class VectorIndex {
 public:
  static constexpr double kUnitTolerance = 1e-6;

  VectorIndex() = default;

  /// Every vector must carry `fingerprint`, have the same dimension and unit norm.
  static VectorIndex build(std::vector<IndexEntry> entries, std::uint64_t fingerprint, nlohmann::json manifest = {});

  std::size_t size() const noexcept { return ids_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  const nlohmann::json& manifest() const noexcept { return manifest_; }
  const std::string& chunk_id(std::size_t pos) const { return ids_.at(pos); }
  const std::string& doc_id(std::size_t pos) const { return docs_.at(pos); }
  std::span<const float> vector(std::size_t pos) const { return {data_.data() + pos * dim_, dim_}; }
  std::int64_t find(const std::string& chunk_id) const;

  QueryResult knn(const EnrichedVector& query, std::size_t k) const;

  /// Positions and scores of the top k, without the fingerprint check.
  std::vector<std::pair<std::size_t, double>> search(std::span<const double> query, std::size_t k) const;

  /// Writes manifest.json and vectors.bin into `dir`.
  void save(const std::filesystem::path& dir) const;
  static VectorIndex load(const std::filesystem::path& dir);

 private:
  std::size_t dim_ = 0;
  std::uint64_t fingerprint_ = 0;
  std::vector<std::string> ids_;
  std::vector<std::string> docs_;
  std::vector<float> data_;
  nlohmann::json manifest_;
};

}  // namespace topiclens
