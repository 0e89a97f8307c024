#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "topiclens/embed.hpp"
#include "topiclens/eval/synthetic.hpp"
#include "topiclens/fusion.hpp"
#include "topiclens/pipeline.hpp"

namespace topiclens {

struct EvalConfig {
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  double train_fraction = 0.8;
  std::size_t query_tokens = 30;  // queries are the leading tokens of each test chunk
  std::vector<std::size_t> k_values{10, 20, 50};
  std::vector<Technique> techniques{Technique::TfIdf,          Technique::Lsa,
                                    Technique::Lda,            Technique::Contextual,
                                    Technique::EnrichedConcat, Technique::EnrichedWeighted,
                                    Technique::RandomTopic};
  bool clustering = true;
  std::size_t cluster_k = 0;  // 0: the LDA topic count
  std::size_t kmeans_restarts = 10;
  std::string label_key = "label";
  std::size_t max_queries = 0;  // 0: every test chunk
  std::size_t threads = 1;

  void validate() const;
};

/// Everything a CLI run needs. Every section is optional in the file; absent keys keep defaults.
struct RunConfig {
  ModelConfig model;
  EmbeddingProviderConfig embedding;
  FusionConfig fusion;
  EvalConfig eval;
  SyntheticCorpusSpec synthetic;
  std::filesystem::path corpus;     // JSONL documents
  std::filesystem::path judgments;  // optional explicit judgments

  void validate() const;
};

nlohmann::json model_config_to_json(const ModelConfig& config);
/// `path` prefixes key paths in error messages.
ModelConfig model_config_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json fusion_config_to_json(const FusionConfig& config);
FusionConfig fusion_config_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json embedding_config_to_json(const EmbeddingProviderConfig& config);
nlohmann::json synthetic_spec_to_json(const SyntheticCorpusSpec& spec);
SyntheticCorpusSpec synthetic_spec_from_json(const nlohmann::json& j, const std::string& path);

nlohmann::json run_config_to_json(const RunConfig& config);
/// Unknown keys and wrongly typed values raise ConfigError naming the key path.
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::filesystem::path& path);

/// Applies a dotted-path override such as "lda.topics=8" to a config document.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace topiclens
