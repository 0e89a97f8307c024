#include "topiclens/eval/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>

#include "json.hpp"
#include "topiclens/error.hpp"
#include "topiclens/hashing.hpp"

namespace topiclens {

namespace fs = std::filesystem;

void SyntheticCorpusSpec::validate() const {
  if (topics < 2) fail(ErrorKind::ConfigError, "synthetic.topics must be at least 2");
  if (docs_per_topic == 0) fail(ErrorKind::ConfigError, "synthetic.docs_per_topic must be positive");
  if (vocab_size < topics) fail(ErrorKind::ConfigError, "synthetic.vocab_size must be at least synthetic.topics");
  if (doc_length_min == 0 || doc_length_max < doc_length_min) {
    fail(ErrorKind::ConfigError, "synthetic.doc_length_min/max must satisfy 0 < min <= max");
  }
  if (!(concentration >= 0.0 && concentration <= 1.0)) {
    fail(ErrorKind::ConfigError, "synthetic.concentration must lie in [0, 1]");
  }
  if (!(noise >= 0.0 && noise < 0.5)) fail(ErrorKind::ConfigError, "synthetic.noise must lie in [0, 0.5)");
  if (query_length == 0) fail(ErrorKind::ConfigError, "synthetic.query_length must be positive");
}

namespace {

std::string padded(char prefix, std::size_t value, std::size_t count) {
  std::size_t width = 4;
  for (std::size_t limit = 10000; limit < count; limit *= 10) ++width;
  std::string digits = std::to_string(value);
  return std::string(1, prefix) + std::string(width - digits.size(), '0') + digits;
}

class Categorical {
 public:
  explicit Categorical(const Eigen::VectorXd& p) : cdf_(static_cast<std::size_t>(p.size())) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) cdf_[static_cast<std::size_t>(i)] = acc += p(i);
  }
  TermId operator()(std::mt19937_64& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, cdf_.back())(rng);
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return static_cast<TermId>(it - cdf_.begin());
  }

 private:
  std::vector<double> cdf_;
};

std::string join_terms(const std::vector<std::string>& vocab, const std::vector<TermId>& ids) {
  std::string out;
  for (auto id : ids) {
    if (!out.empty()) out += ' ';
    out += vocab[id];
  }
  return out;
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticCorpusSpec& spec) {
  spec.validate();
  SyntheticCorpus c;
  c.spec = spec;
  const std::size_t K = spec.topics;
  const std::size_t V = spec.vocab_size;
  for (std::size_t w = 0; w < V; ++w) c.vocabulary.push_back(padded('w', w, V));

  std::mt19937_64 phi_rng(derive_seed(spec.seed, "synthetic-phi"));
  std::exponential_distribution<double> gamma1(1.0);
  c.phi = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(V),
                                    (1.0 - spec.concentration) / static_cast<double>(V));
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t lo = k * V / K, hi = (k + 1) * V / K;
    std::vector<double> draw(hi - lo);
    double total = 0.0;
    for (auto& d : draw) total += d = gamma1(phi_rng);
    for (std::size_t w = lo; w < hi; ++w) {
      c.phi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w)) += spec.concentration * draw[w - lo] / total;
    }
  }
  std::vector<Categorical> topic_terms;
  for (std::size_t k = 0; k < K; ++k) topic_terms.emplace_back(c.phi.row(static_cast<Eigen::Index>(k)).transpose());

  const std::size_t n_docs = K * spec.docs_per_topic;
  c.theta = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n_docs), static_cast<Eigen::Index>(K),
                                      spec.noise / static_cast<double>(K - 1));
  std::mt19937_64 doc_rng(derive_seed(spec.seed, "synthetic-docs"));
  std::uniform_int_distribution<std::size_t> length(spec.doc_length_min, spec.doc_length_max);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> other(0, K - 2);
  for (std::size_t d = 0; d < n_docs; ++d) {
    const std::size_t label = d % K;
    c.theta(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(label)) = 1.0 - spec.noise;
    std::vector<TermId> ids(length(doc_rng));
    for (auto& id : ids) {
      std::size_t z = label;
      if (coin(doc_rng) < spec.noise) {
        z = other(doc_rng);
        if (z >= label) ++z;
      }
      id = topic_terms[z](doc_rng);
    }
    Document doc;
    doc.doc_id = padded('d', d, n_docs);
    doc.text = join_terms(c.vocabulary, ids);
    doc.metadata[kLabelKey] = std::to_string(label);
    c.documents.push_back(std::move(doc));
    c.labels.push_back(label);
    c.token_ids.push_back(std::move(ids));
  }

  std::mt19937_64 query_rng(derive_seed(spec.seed, "synthetic-queries"));
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t q = 0; q < spec.queries_per_topic; ++q) {
      std::vector<TermId> ids(spec.query_length);
      for (auto& id : ids) id = topic_terms[k](query_rng);
      c.queries.push_back({"q" + std::to_string(k) + "_" + std::to_string(q), k, join_terms(c.vocabulary, ids)});
    }
  }
  return c;
}

Judgments topic_judgments(const SyntheticCorpus& corpus, const std::vector<Chunk>& chunks) {
  std::map<std::string, std::size_t> label_of;
  for (std::size_t d = 0; d < corpus.documents.size(); ++d) label_of[corpus.documents[d].doc_id] = corpus.labels[d];
  std::vector<std::set<std::string>> by_label(corpus.spec.topics);
  for (const auto& ch : chunks) {
    auto it = label_of.find(ch.doc_id);
    if (it == label_of.end()) fail(ErrorKind::InvalidArgument, "chunk '" + ch.chunk_id + "' is not from this corpus");
    by_label[it->second].insert(ch.chunk_id);
  }
  Judgments j;
  j.provenance = Judgments::Provenance::SyntheticTopic;
  for (const auto& q : corpus.queries) {
    if (!by_label[q.label].empty()) j.add(q.query_id, q.text, by_label[q.label]);
  }
  return j;
}

namespace {

void write_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m, const std::string& row_name,
                      const std::vector<std::string>& row_ids, const std::vector<std::string>& col_ids) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << row_name;
  for (const auto& c : col_ids) out << ',' << c;
  out << '\n';
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    out << row_ids[static_cast<std::size_t>(r)];
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      std::snprintf(buf, sizeof buf, "%.9g", m(r, col));
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace

void write_synthetic(const SyntheticCorpus& corpus, const std::vector<Chunk>& chunks, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "corpus.jsonl", std::ios::trunc);
    if (!out) fail(ErrorKind::IoError, "cannot write " + (dir / "corpus.jsonl").string());
    for (const auto& d : corpus.documents) {
      nlohmann::json obj;
      obj["id"] = d.doc_id;
      obj["text"] = d.text;
      obj["meta"] = d.metadata;
      out << obj.dump() << '\n';
    }
  }
  {
    std::ofstream out(dir / "labels.csv", std::ios::trunc);
    out << "doc_id,label\n";
    for (std::size_t d = 0; d < corpus.documents.size(); ++d) {
      out << corpus.documents[d].doc_id << ',' << corpus.labels[d] << '\n';
    }
  }
  write_judgments(dir / "judgments.jsonl", topic_judgments(corpus, chunks));
  std::vector<std::string> topic_ids, doc_ids;
  for (std::size_t k = 0; k < corpus.spec.topics; ++k) topic_ids.push_back("topic" + std::to_string(k));
  for (const auto& d : corpus.documents) doc_ids.push_back(d.doc_id);
  write_matrix_csv(dir / "phi.csv", corpus.phi, "topic", topic_ids, corpus.vocabulary);
  write_matrix_csv(dir / "theta.csv", corpus.theta, "doc_id", doc_ids, topic_ids);
}

}  // namespace topiclens
