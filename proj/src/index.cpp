#include "topiclens/index.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "topiclens/binary_io.hpp"
#include "topiclens/error.hpp"

namespace topiclens {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kBlock = 256;

bool ranks_before(const std::pair<std::size_t, double>& a, const std::pair<std::size_t, double>& b) {
  if (a.second != b.second) return a.second > b.second;
  return a.first < b.first;
}

}  // namespace

VectorIndex VectorIndex::build(std::vector<IndexEntry> entries, std::uint64_t fingerprint, nlohmann::json manifest) {
  if (entries.empty()) fail(ErrorKind::EmptyIndex, "cannot build an index from an empty batch");
  std::sort(entries.begin(), entries.end(),
            [](const IndexEntry& a, const IndexEntry& b) { return a.chunk_id < b.chunk_id; });
  VectorIndex index;
  index.dim_ = entries.front().vector.values.size();
  index.fingerprint_ = fingerprint;
  if (index.dim_ == 0) fail(ErrorKind::DimensionMismatch, "index vectors have dimension 0");
  index.ids_.reserve(entries.size());
  index.docs_.reserve(entries.size());
  index.data_.reserve(entries.size() * index.dim_);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (i > 0 && e.chunk_id == entries[i - 1].chunk_id) {
      fail(ErrorKind::DuplicateChunkId, "duplicate chunk_id '" + e.chunk_id + "'");
    }
    if (e.vector.values.size() != index.dim_) {
      fail(ErrorKind::DimensionMismatch, "vector for '" + e.chunk_id + "' has dimension " +
                                             std::to_string(e.vector.values.size()) + ", expected " +
                                             std::to_string(index.dim_));
    }
    if (e.vector.fingerprint != fingerprint) {
      fail(ErrorKind::FingerprintMismatch, "vector for '" + e.chunk_id + "' was produced by a different transform");
    }
    double norm2 = 0.0;
    for (double v : e.vector.values) norm2 += v * v;
    if (std::abs(std::sqrt(norm2) - 1.0) > kUnitTolerance) {
      fail(ErrorKind::DimensionMismatch, "vector for '" + e.chunk_id + "' is not unit-norm (norm " +
                                             std::to_string(std::sqrt(norm2)) + ")");
    }
    index.ids_.push_back(e.chunk_id);
    index.docs_.push_back(e.doc_id);
    for (double v : e.vector.values) index.data_.push_back(static_cast<float>(v));
  }
  index.manifest_ = std::move(manifest);
  return index;
}

std::int64_t VectorIndex::find(const std::string& chunk_id) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), chunk_id);
  if (it == ids_.end() || *it != chunk_id) return -1;
  return it - ids_.begin();
}

std::vector<std::pair<std::size_t, double>> VectorIndex::search(std::span<const double> query, std::size_t k) const {
  if (ids_.empty()) fail(ErrorKind::EmptyIndex, "index is empty");
  if (k == 0) fail(ErrorKind::InvalidArgument, "k must be at least 1");
  if (query.size() != dim_) {
    fail(ErrorKind::DimensionMismatch,
         "query has dimension " + std::to_string(query.size()) + ", index has " + std::to_string(dim_));
  }
  const std::size_t n = ids_.size();
  std::vector<std::pair<std::size_t, double>> scored(n);
  for (std::size_t block = 0; block < n; block += kBlock) {
    const std::size_t end = std::min(n, block + kBlock);
    for (std::size_t r = block; r < end; ++r) {
      const float* row = data_.data() + r * dim_;
      double dot = 0.0;
      for (std::size_t j = 0; j < dim_; ++j) dot += static_cast<double>(row[j]) * query[j];
      scored[r] = {r, dot};
    }
  }
  const std::size_t take = std::min(k, n);
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), ranks_before);
  scored.resize(take);
  return scored;
}

QueryResult VectorIndex::knn(const EnrichedVector& query, std::size_t k) const {
  if (ids_.empty()) fail(ErrorKind::EmptyIndex, "index is empty");
  if (query.fingerprint != fingerprint_) {
    fail(ErrorKind::FingerprintMismatch, "query fingerprint does not match the index");
  }
  QueryResult result;
  result.k_requested = k;
  for (const auto& [pos, score] : search(query.values, k)) result.hits.push_back({ids_[pos], docs_[pos], score});
  return result;
}

// vectors.bin payload: u64 dim | u64 count | u64 fingerprint | u64 id-table offset |
// count * dim f32 records | id table (chunk_id, doc_id strings).
void VectorIndex::save(const fs::path& dir) const {
  fs::create_directories(dir);
  BinaryWriter w(ArtifactKind::IndexVectors);
  w.u64(dim_);
  w.u64(ids_.size());
  w.u64(fingerprint_);
  const std::size_t table_offset = w.size() + 8 + data_.size() * sizeof(float);
  w.u64(table_offset);
  for (float v : data_) w.f32(v);
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    w.str(ids_[i]);
    w.str(docs_[i]);
  }
  w.save(dir / "vectors.bin");

  nlohmann::json m = manifest_.is_object() ? manifest_ : nlohmann::json::object();
  m["fingerprint"] = fingerprint_;
  m["dimension"] = dim_;
  m["count"] = ids_.size();
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + (dir / "manifest.json").string());
  out << m.dump(2) << '\n';
  if (!out) fail(ErrorKind::IoError, "write failed: " + (dir / "manifest.json").string());
}

VectorIndex VectorIndex::load(const fs::path& dir) {
  const auto manifest_path = dir / "manifest.json";
  const auto vectors_path = dir / "vectors.bin";
  if (!fs::exists(manifest_path)) fail(ErrorKind::IoError, "missing index file " + manifest_path.string());
  if (!fs::exists(vectors_path)) fail(ErrorKind::IoError, "missing index file " + vectors_path.string());
  VectorIndex index;
  {
    std::ifstream in(manifest_path);
    try {
      index.manifest_ = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::ParseError, manifest_path.string() + ": " + e.what());
    }
  }
  auto r = BinaryReader::open(vectors_path, ArtifactKind::IndexVectors);
  index.dim_ = r.u64();
  const std::uint64_t count = r.u64();
  index.fingerprint_ = r.u64();
  const std::uint64_t table_offset = r.u64();
  if (index.dim_ == 0 || count == 0 || table_offset != r.position() + count * index.dim_ * sizeof(float)) {
    fail(ErrorKind::ArtifactFormat, vectors_path.string() + ": inconsistent header");
  }
  index.data_.resize(count * index.dim_);
  for (auto& v : index.data_) v = r.f32();
  index.ids_.reserve(count);
  index.docs_.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    index.ids_.push_back(r.str());
    index.docs_.push_back(r.str());
    if (i > 0 && !(index.ids_[i - 1] < index.ids_[i])) {
      fail(ErrorKind::ArtifactFormat, vectors_path.string() + ": id table not strictly sorted");
    }
  }
  r.expect_end();
  if (index.manifest_.value("fingerprint", std::uint64_t{0}) != index.fingerprint_) {
    fail(ErrorKind::FingerprintMismatch, dir.string() + ": manifest and vectors.bin disagree on the fingerprint");
  }
  return index;
}

}  // namespace topiclens
