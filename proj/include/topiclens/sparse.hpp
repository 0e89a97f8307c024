#pragma once

#include <Eigen/SparseCore>
#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "topiclens/corpus.hpp"

namespace topiclens {

using TermId = std::uint32_t;

class Vocabulary {
 public:
  Vocabulary() = default;
  /// `terms` must be strictly increasing; `df[i]` is the chunk frequency of terms[i].
  Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> df);

  std::size_t size() const noexcept { return terms_.size(); }
  const std::string& term(TermId id) const { return terms_.at(id); }
  std::uint32_t df(TermId id) const { return df_.at(id); }
  /// Returns -1 for out-of-vocabulary terms.
  std::int64_t find(const std::string& term) const;
  TermId id(const std::string& term) const;  // throws UnknownTerm

  const std::vector<std::string>& terms() const noexcept { return terms_; }
  const std::vector<std::uint32_t>& dfs() const noexcept { return df_; }

  /// Maps tokens through the vocabulary, dropping out-of-vocabulary tokens.
  std::vector<TermId> encode(const std::vector<std::string>& tokens) const;

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint32_t> df_;
  std::unordered_map<std::string, TermId> index_;
};

/// Counts of retained terms in one chunk. `length` is the chunk's full token count.
struct SparseColumn {
  std::vector<TermId> terms;  // strictly increasing
  std::vector<std::uint32_t> counts;
  std::uint64_t length = 0;

  std::uint32_t count(TermId t) const;
  std::uint64_t retained_total() const;
};

struct TermDocMatrix {
  std::size_t n_terms = 0;
  std::vector<SparseColumn> columns;
  std::size_t n_cols() const noexcept { return columns.size(); }
};

struct BuildResult {
  Vocabulary vocabulary;
  TermDocMatrix counts;
};

BuildResult build_matrix(const std::vector<Chunk>& chunks, std::uint32_t min_df, double max_df_ratio);

/// Column for arbitrary text (queries): retained-term counts plus the full token count.
SparseColumn vectorize(const Vocabulary& vocab, const std::vector<std::string>& tokens);

using WeightMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor>;
using WeightVector = Eigen::SparseVector<double>;

class TfIdfModel {
 public:
  TfIdfModel() = default;
  /// idf[t] = ln(n_docs / (1 + df[t])); negative when a term occurs in every chunk.
  TfIdfModel(Vocabulary vocabulary, std::size_t n_docs, bool idf_floor_zero = false);

  const Vocabulary& vocabulary() const noexcept { return vocab_; }
  std::size_t n_docs() const noexcept { return n_docs_; }
  double idf(TermId t) const { return idf_.at(t); }
  const std::vector<double>& idf() const noexcept { return idf_; }
  bool idf_floor_zero() const noexcept { return floor_zero_; }

  void save(const std::filesystem::path& path) const;
  static TfIdfModel load(const std::filesystem::path& path);
  std::vector<std::uint8_t> serialize() const;
  static TfIdfModel deserialize(std::vector<std::uint8_t> bytes, const std::string& source);
  void export_json(const std::filesystem::path& path) const;

 private:
  Vocabulary vocab_;
  std::size_t n_docs_ = 0;
  bool floor_zero_ = false;
  std::vector<double> idf_;
};

/// (count / length) * idf; 0 when the term is absent from the column.
double tfidf_weight(const TfIdfModel& model, TermId term, const SparseColumn& column);

WeightMatrix tfidf_matrix(const TfIdfModel& model, const TermDocMatrix& counts);
WeightVector tfidf_vector(const TfIdfModel& model, const SparseColumn& column);

/// Raw counts as a sparse real matrix (LSA over counts instead of TF-IDF).
WeightMatrix count_matrix(const TermDocMatrix& counts);
WeightVector count_vector(std::size_t n_terms, const SparseColumn& column);

}  // namespace topiclens
