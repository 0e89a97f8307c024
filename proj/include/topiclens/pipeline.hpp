#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topiclens/corpus.hpp"
#include "topiclens/embed.hpp"
#include "topiclens/fusion.hpp"
#include "topiclens/lda.hpp"
#include "topiclens/lsa.hpp"
#include "topiclens/sparse.hpp"

namespace topiclens {

struct SparseConfig {
  std::uint32_t min_df = 2;
  double max_df_ratio = 0.5;
  bool idf_floor_zero = false;
};

enum class LsaInput { TfIdf, Counts };
enum class LdaUnit { Chunk, Document };

struct ModelConfig {
  PipelineConfig pipeline;
  SparseConfig sparse;
  LsaConfig lsa;
  LsaInput lsa_input = LsaInput::TfIdf;
  LdaConfig lda;
  LdaUnit lda_unit = LdaUnit::Chunk;
  std::size_t fold_in_iterations = 50;
  std::uint64_t fold_in_seed = 0;
};

/// Everything fitted during indexing that queries must reuse.
struct TrainedArtifacts {
  ModelConfig config;
  TfIdfModel tfidf;
  LsaModel lsa;
  LdaModel lda;

  /// Content hash over the serialized models and the fold-in settings.
  std::uint64_t digest() const;

  void save(const std::filesystem::path& dir) const;
  static TrainedArtifacts load(const std::filesystem::path& dir);
};

TrainedArtifacts fit_artifacts(const std::vector<Chunk>& chunks, const ModelConfig& config);

enum class Technique { TfIdf, Lsa, Lda, Contextual, EnrichedConcat, EnrichedWeighted, RandomTopic };

std::string_view to_string(Technique t);
Technique parse_technique(std::string_view name);

struct Representation {
  enum class Kind { TfIdf, Lsa, Lda, Contextual, Fused };
  Kind kind = Kind::Contextual;
  FusionConfig fusion;
  std::string name;
};

Representation make_representation(Technique technique, const FusionConfig& base);

/// Per-text intermediate signals, computed once and shared by every representation.
struct TextFeatures {
  std::vector<std::string> tokens;
  std::optional<ContextVector> context;
  bool context_zero = false;
  WeightVector tfidf;
  Eigen::VectorXd lsa;
  InferResult lda;
};

struct FeatureNeeds {
  bool context = true;
  bool topics = true;
};

class FeatureExtractor {
 public:
  FeatureExtractor(const TrainedArtifacts& artifacts, const EmbeddingProvider* provider);

  std::vector<TextFeatures> chunks(std::span<const Chunk> chunks, FeatureNeeds needs = {}) const;
  TextFeatures query(std::string_view text, FeatureNeeds needs = {}) const;

 private:
  void add_topics(TextFeatures& f) const;

  const TrainedArtifacts& artifacts_;
  const EmbeddingProvider* provider_;
  Tokenizer tokenizer_;
};

FeatureNeeds needs_for(const Representation& rep);

class Encoder {
 public:
  Encoder(const TrainedArtifacts& artifacts, const EmbeddingProvider* provider, Representation rep,
          std::optional<AlignmentMap> alignment = std::nullopt);

  const Representation& representation() const noexcept { return rep_; }
  std::size_t dim() const noexcept { return dim_; }
  std::uint64_t fingerprint() const noexcept { return fingerprint_; }
  const std::optional<AlignmentMap>& alignment() const noexcept { return alignment_; }

  /// Throws DegenerateResult / MissingComponent when the text carries no usable evidence.
  EnrichedVector encode(const TextFeatures& features) const;

  std::vector<EnrichedVector> encode_chunks(std::span<const Chunk> chunks) const;
  EnrichedVector encode_query(std::string_view text) const;

 private:
  const TrainedArtifacts& artifacts_;
  const EmbeddingProvider* provider_;
  Representation rep_;
  std::optional<AlignmentMap> alignment_;
  std::size_t dim_ = 0;
  std::uint64_t fingerprint_ = 0;
};

/// Query phase: tokenize, vectorize, project, fold in, embed, fuse. The encoder must reproduce the
/// fingerprint of the index being searched.
EnrichedVector enrich_query(std::string_view text, const Encoder& encoder, std::uint64_t index_fingerprint);

}  // namespace topiclens
