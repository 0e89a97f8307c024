#include "topiclens/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "json.hpp"
#include "topiclens/binary_io.hpp"
#include "topiclens/error.hpp"

namespace topiclens {

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::uint32_t> df)
    : terms_(std::move(terms)), df_(std::move(df)) {
  if (terms_.size() != df_.size()) fail(ErrorKind::ShapeMismatch, "vocabulary terms/df size mismatch");
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i > 0 && !(terms_[i - 1] < terms_[i])) {
      fail(ErrorKind::InvalidArgument, "vocabulary terms must be strictly increasing");
    }
    index_.emplace(terms_[i], static_cast<TermId>(i));
  }
}

std::int64_t Vocabulary::find(const std::string& term) const {
  auto it = index_.find(term);
  return it == index_.end() ? -1 : static_cast<std::int64_t>(it->second);
}

TermId Vocabulary::id(const std::string& term) const {
  auto it = index_.find(term);
  if (it == index_.end()) fail(ErrorKind::UnknownTerm, term);
  return it->second;
}

std::vector<TermId> Vocabulary::encode(const std::vector<std::string>& tokens) const {
  std::vector<TermId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (auto it = index_.find(t); it != index_.end()) ids.push_back(it->second);
  }
  return ids;
}

std::uint32_t SparseColumn::count(TermId t) const {
  auto it = std::lower_bound(terms.begin(), terms.end(), t);
  return (it != terms.end() && *it == t) ? counts[static_cast<std::size_t>(it - terms.begin())] : 0U;
}

std::uint64_t SparseColumn::retained_total() const {
  std::uint64_t total = 0;
  for (auto c : counts) total += c;
  return total;
}

BuildResult build_matrix(const std::vector<Chunk>& chunks, std::uint32_t min_df, double max_df_ratio) {
  if (chunks.empty()) fail(ErrorKind::InvalidArgument, "build_matrix: empty chunk list");
  if (!(max_df_ratio > 0.0 && max_df_ratio <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "max_df_ratio must be in (0, 1]");
  }
  // std::map keeps terms in lexicographic order, which fixes the id assignment.
  std::map<std::string, std::uint32_t> df;
  std::vector<std::map<std::string, std::uint32_t>> per_chunk(chunks.size());
  for (std::size_t d = 0; d < chunks.size(); ++d) {
    for (const auto& tok : chunks[d].tokens) ++per_chunk[d][tok];
    for (const auto& [term, _] : per_chunk[d]) ++df[term];
  }

  const double n = static_cast<double>(chunks.size());
  std::vector<std::string> terms;
  std::vector<std::uint32_t> kept_df;
  for (const auto& [term, f] : df) {
    if (f < min_df || static_cast<double>(f) / n > max_df_ratio) continue;
    terms.push_back(term);
    kept_df.push_back(f);
  }
  if (terms.empty()) fail(ErrorKind::EmptyVocabulary, "pruning removed every term");

  BuildResult out{Vocabulary(std::move(terms), std::move(kept_df)), {}};
  out.counts.n_terms = out.vocabulary.size();
  out.counts.columns.resize(chunks.size());
  for (std::size_t d = 0; d < chunks.size(); ++d) {
    auto& col = out.counts.columns[d];
    col.length = chunks[d].tokens.size();
    for (const auto& [term, c] : per_chunk[d]) {
      const auto id = out.vocabulary.find(term);
      if (id < 0) continue;
      col.terms.push_back(static_cast<TermId>(id));
      col.counts.push_back(c);
    }
  }
  return out;
}

SparseColumn vectorize(const Vocabulary& vocab, const std::vector<std::string>& tokens) {
  std::map<TermId, std::uint32_t> counts;
  for (const auto& t : tokens) {
    if (auto id = vocab.find(t); id >= 0) ++counts[static_cast<TermId>(id)];
  }
  SparseColumn col;
  col.length = tokens.size();
  for (const auto& [id, c] : counts) {
    col.terms.push_back(id);
    col.counts.push_back(c);
  }
  return col;
}

TfIdfModel::TfIdfModel(Vocabulary vocabulary, std::size_t n_docs, bool idf_floor_zero)
    : vocab_(std::move(vocabulary)), n_docs_(n_docs), floor_zero_(idf_floor_zero) {
  if (n_docs_ == 0) fail(ErrorKind::InvalidArgument, "TfIdfModel: n_docs must be positive");
  idf_.resize(vocab_.size());
  const double n = static_cast<double>(n_docs_);
  for (std::size_t t = 0; t < vocab_.size(); ++t) {
    double v = std::log(n / (1.0 + static_cast<double>(vocab_.df(static_cast<TermId>(t)))));
    idf_[t] = floor_zero_ ? std::max(0.0, v) : v;
  }
}

double tfidf_weight(const TfIdfModel& model, TermId term, const SparseColumn& column) {
  if (term >= model.vocabulary().size()) fail(ErrorKind::UnknownTerm, "term id " + std::to_string(term));
  const auto c = column.count(term);
  if (c == 0) return 0.0;
  return (static_cast<double>(c) / static_cast<double>(column.length)) * model.idf(term);
}

WeightVector tfidf_vector(const TfIdfModel& model, const SparseColumn& column) {
  const auto v = model.vocabulary().size();
  WeightVector out(static_cast<Eigen::Index>(v));
  out.reserve(static_cast<Eigen::Index>(column.terms.size()));
  for (std::size_t i = 0; i < column.terms.size(); ++i) {
    const auto t = column.terms[i];
    if (t >= v) fail(ErrorKind::ShapeMismatch, "column term id outside vocabulary");
    const double w = (static_cast<double>(column.counts[i]) / static_cast<double>(column.length)) * model.idf(t);
    out.insertBack(static_cast<Eigen::Index>(t)) = w;
  }
  return out;
}

WeightMatrix tfidf_matrix(const TfIdfModel& model, const TermDocMatrix& counts) {
  if (counts.n_terms != model.vocabulary().size()) {
    fail(ErrorKind::ShapeMismatch, "count matrix has " + std::to_string(counts.n_terms) + " rows, vocabulary " +
                                       std::to_string(model.vocabulary().size()));
  }
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t d = 0; d < counts.n_cols(); ++d) {
    const auto& col = counts.columns[d];
    for (std::size_t i = 0; i < col.terms.size(); ++i) {
      const double w = (static_cast<double>(col.counts[i]) / static_cast<double>(col.length)) * model.idf(col.terms[i]);
      // pattern follows the counts even where idf is exactly 0 (N = 1 + df)
      triplets.emplace_back(static_cast<int>(col.terms[i]), static_cast<int>(d), w);
    }
  }
  WeightMatrix m(static_cast<Eigen::Index>(counts.n_terms), static_cast<Eigen::Index>(counts.n_cols()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

WeightMatrix count_matrix(const TermDocMatrix& counts) {
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t d = 0; d < counts.n_cols(); ++d) {
    const auto& col = counts.columns[d];
    for (std::size_t i = 0; i < col.terms.size(); ++i) {
      triplets.emplace_back(static_cast<int>(col.terms[i]), static_cast<int>(d), static_cast<double>(col.counts[i]));
    }
  }
  WeightMatrix m(static_cast<Eigen::Index>(counts.n_terms), static_cast<Eigen::Index>(counts.n_cols()));
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

WeightVector count_vector(std::size_t n_terms, const SparseColumn& column) {
  WeightVector out(static_cast<Eigen::Index>(n_terms));
  for (std::size_t i = 0; i < column.terms.size(); ++i) {
    out.insertBack(static_cast<Eigen::Index>(column.terms[i])) = static_cast<double>(column.counts[i]);
  }
  return out;
}

std::vector<std::uint8_t> TfIdfModel::serialize() const {
  BinaryWriter w(ArtifactKind::TfIdf);
  w.u64(n_docs_);
  w.u32(floor_zero_ ? 1U : 0U);
  w.u64(vocab_.size());
  for (std::size_t t = 0; t < vocab_.size(); ++t) {
    w.str(vocab_.term(static_cast<TermId>(t)));
    w.u32(vocab_.df(static_cast<TermId>(t)));
  }
  for (double v : idf_) w.f64(v);
  return w.buffer();
}

TfIdfModel TfIdfModel::deserialize(std::vector<std::uint8_t> bytes, const std::string& source) {
  BinaryReader r(std::move(bytes), ArtifactKind::TfIdf, source);
  const auto n_docs = r.u64();
  const bool floor_zero = r.u32() != 0;
  const auto v = r.u64();
  std::vector<std::string> terms;
  std::vector<std::uint32_t> df;
  terms.reserve(v);
  df.reserve(v);
  for (std::uint64_t t = 0; t < v; ++t) {
    terms.push_back(r.str());
    df.push_back(r.u32());
  }
  TfIdfModel model(Vocabulary(std::move(terms), std::move(df)), n_docs, floor_zero);
  for (std::uint64_t t = 0; t < v; ++t) {
    if (r.f64() != model.idf_[t]) fail(ErrorKind::ArtifactFormat, source + ": idf table inconsistent with df");
  }
  r.expect_end();
  return model;
}

void TfIdfModel::save(const std::filesystem::path& path) const { write_file_bytes(path, serialize()); }

TfIdfModel TfIdfModel::load(const std::filesystem::path& path) {
  return deserialize(read_file_bytes(path), path.string());
}

void TfIdfModel::export_json(const std::filesystem::path& path) const {
  nlohmann::json j;
  j["n_docs"] = n_docs_;
  j["idf_floor_zero"] = floor_zero_;
  auto& terms = j["terms"] = nlohmann::json::array();
  for (std::size_t t = 0; t < vocab_.size(); ++t) {
    terms.push_back({{"id", t}, {"term", vocab_.term(static_cast<TermId>(t))},
                     {"df", vocab_.df(static_cast<TermId>(t))}, {"idf", idf_[t]}});
  }
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace topiclens
