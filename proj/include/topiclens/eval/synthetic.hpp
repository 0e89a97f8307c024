#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "topiclens/corpus.hpp"
#include "topiclens/eval/retrieval.hpp"
#include "topiclens/sparse.hpp"

namespace topiclens {

/// Labeled corpus drawn forward from an LDA-style generative process. Topic k owns the vocabulary
/// block [kV/K, (k+1)V/K); its term distribution puts `concentration` of the mass on a Dirichlet(1)
/// draw over that block and the rest uniformly over the whole vocabulary.
struct SyntheticCorpusSpec {
  std::size_t topics = 4;
  std::size_t docs_per_topic = 50;
  std::size_t vocab_size = 400;
  std::size_t doc_length_min = 80;
  std::size_t doc_length_max = 160;
  double concentration = 1.0;
  double noise = 0.05;  // probability a token comes from a uniformly chosen other topic
  std::size_t queries_per_topic = 5;
  std::size_t query_length = 30;
  std::uint64_t seed = 1;

  void validate() const;
};

struct SyntheticQuery {
  std::string query_id;
  std::size_t label = 0;
  std::string text;
};

struct SyntheticCorpus {
  SyntheticCorpusSpec spec;
  std::vector<std::string> vocabulary;         // term names in id order
  Eigen::MatrixXd phi;                         // topics x vocab
  Eigen::MatrixXd theta;                       // documents x topics
  std::vector<Document> documents;             // metadata["label"] holds the dominant topic
  std::vector<std::size_t> labels;             // per document
  std::vector<std::vector<TermId>> token_ids;  // per document, ids into `vocabulary`
  std::vector<SyntheticQuery> queries;
};

inline constexpr const char* kLabelKey = "label";

SyntheticCorpus generate_synthetic(const SyntheticCorpusSpec& spec);

/// Relevance for each generated query: every chunk whose document has the query's topic.
Judgments topic_judgments(const SyntheticCorpus& corpus, const std::vector<Chunk>& chunks);

/// corpus.jsonl, labels.csv, judgments.jsonl, phi.csv, theta.csv
void write_synthetic(const SyntheticCorpus& corpus, const std::vector<Chunk>& chunks, const std::filesystem::path& dir);

}  // namespace topiclens
