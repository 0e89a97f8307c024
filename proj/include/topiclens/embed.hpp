#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "topiclens/corpus.hpp"

namespace topiclens {

struct ContextVector {
  std::vector<double> values;
  std::string provider_id;
};

struct QueryEmbedding {
  ContextVector vector;
  bool zero_evidence = false;  // vector is all zeros and must not be indexed or searched
};

enum class ProviderKind { File, Hash, Http };

struct EmbeddingProviderConfig {
  ProviderKind kind = ProviderKind::Hash;
  std::size_t dim = 384;
  std::filesystem::path path;  // file
  std::string endpoint;        // http, e.g. "http://127.0.0.1:8080/embed"
  std::uint64_t seed = 0;      // hash
  std::size_t batch_size = 32;
  std::size_t max_in_flight = 4;
  std::size_t retries = 2;
  std::chrono::milliseconds timeout{30000};

  void validate() const;
};

ProviderKind parse_provider_kind(std::string_view name);
std::string_view to_string(ProviderKind kind);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string provider_id() const = 0;
  virtual std::size_t dim() const = 0;
  /// One L2-normalized vector per chunk, in input order.
  virtual std::vector<ContextVector> embed_chunks(std::span<const Chunk> chunks) const = 0;
  virtual QueryEmbedding embed_query(std::string_view text, const PipelineConfig& pipeline) const = 0;
};

/// Seeded feature hashing: every token adds sign_j(t) at position h_j(t) mod D for j = 0, 1, 2, where
/// h_j(t) = splitmix64(fnv1a64(t, splitmix64(seed + j))) and sign_j(t) = +1 iff bit 63 of h_j(t) is 0.
/// The sum is L2-normalized.
class HashEmbeddingProvider final : public EmbeddingProvider {
 public:
  HashEmbeddingProvider(std::size_t dim, std::uint64_t seed);

  std::string provider_id() const override;
  std::size_t dim() const override { return dim_; }
  std::vector<ContextVector> embed_chunks(std::span<const Chunk> chunks) const override;
  QueryEmbedding embed_query(std::string_view text, const PipelineConfig& pipeline) const override;

  /// Unnormalized hashed counts.
  std::vector<double> raw(std::span<const std::string> tokens) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

/// Precomputed vectors in the "TLEMB v1" text format.
class FileEmbeddingProvider final : public EmbeddingProvider {
 public:
  /// `expected_dim` of 0 accepts whatever the header declares.
  explicit FileEmbeddingProvider(const std::filesystem::path& path, std::size_t expected_dim = 0);

  std::string provider_id() const override;
  std::size_t dim() const override { return dim_; }
  std::vector<ContextVector> embed_chunks(std::span<const Chunk> chunks) const override;
  QueryEmbedding embed_query(std::string_view text, const PipelineConfig& pipeline) const override;

  std::size_t size() const noexcept { return vectors_.size(); }
  bool contains(const std::string& id) const { return vectors_.contains(id); }

 private:
  std::filesystem::path path_;
  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

/// POST {"input": [text, ...]} -> {"embeddings": [[...], ...]}; order-preserving.
class HttpEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HttpEmbeddingProvider(const EmbeddingProviderConfig& config);

  std::string provider_id() const override;
  std::size_t dim() const override { return config_.dim; }
  std::vector<ContextVector> embed_chunks(std::span<const Chunk> chunks) const override;
  QueryEmbedding embed_query(std::string_view text, const PipelineConfig& pipeline) const override;

  std::vector<std::vector<double>> embed_texts(const std::vector<std::string>& texts) const;

 private:
  std::vector<std::vector<double>> post_batch(const std::vector<std::string>& texts) const;

  EmbeddingProviderConfig config_;
  std::string host_;  // scheme://host:port
  std::string path_;
};

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config);

/// Returns false (leaving `values` untouched) when the norm is zero.
bool l2_normalize(std::vector<double>& values);

void write_embedding_file(const std::filesystem::path& path, std::size_t dim,
                          const std::vector<std::pair<std::string, std::vector<double>>>& records);

}  // namespace topiclens
