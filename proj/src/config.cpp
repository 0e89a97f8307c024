#include "topiclens/config.hpp"

#include <fstream>
#include <set>

#include "topiclens/error.hpp"

namespace topiclens {

namespace {

using nlohmann::json;

// Reads fields from one JSON object, recording which keys were consumed so the rest can be rejected.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::ConfigError, where() + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      fail(ErrorKind::ConfigError, key_path(key) + ": wrong type (" + it->type_name() + ")");
    }
    check_sign<T>(key, *it);
  }

  void get(const char* key, std::optional<double>& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (it->is_null()) {
      out.reset();
      return;
    }
    if (!it->is_number()) fail(ErrorKind::ConfigError, key_path(key) + ": expected a number or null");
    out = it->get<double>();
  }

  void get(const char* key, std::filesystem::path& out) {
    std::string s = out.string();
    get(key, s);
    out = s;
  }

  template <typename Parse>
  void get_enum(const char* key, Parse parse) {
    std::string s;
    get(key, s);
    if (s.empty()) return;
    try {
      parse(s);
    } catch (const Error& e) {
      fail(ErrorKind::ConfigError, key_path(key) + ": " + e.what());
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  std::string key_path(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.contains(it.key())) fail(ErrorKind::ConfigError, "unknown key " + key_path(it.key().c_str()));
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  template <typename T>
  void check_sign(const char* key, const json& v) const {
    if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
      if (v.is_number_integer() && v.get<std::int64_t>() < 0) {
        fail(ErrorKind::ConfigError, key_path(key) + ": must be non-negative");
      }
      if (v.is_number_float()) fail(ErrorKind::ConfigError, key_path(key) + ": expected an integer");
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename F>
void with_section(Section& parent, const char* key, F body) {
  if (const json* j = parent.sub(key)) {
    Section s(*j, parent.key_path(key));
    body(s);
    s.finish();
  }
}

void read_pipeline(Section& s, PipelineConfig& c) {
  s.get("chunk_size", c.chunk_size);
  s.get("overlap", c.overlap);
  s.get("stopwords", c.stopword_list);
  s.get("lowercase", c.lowercase);
  s.get("keep_numbers", c.keep_numbers);
}

void read_sparse(Section& s, SparseConfig& c) {
  s.get("min_df", c.min_df);
  s.get("max_df_ratio", c.max_df_ratio);
  s.get("idf_floor_zero", c.idf_floor_zero);
}

void read_lsa(Section& s, ModelConfig& m) {
  auto& c = m.lsa;
  s.get("rank", c.rank);
  s.get("oversampling", c.oversampling);
  s.get("power_iterations", c.power_iterations);
  s.get("max_iterations", c.max_iterations);
  s.get("residual_tolerance", c.residual_tolerance);
  s.get("seed", c.seed);
  s.get_enum("input", [&](const std::string& v) {
    if (v == "tfidf") m.lsa_input = LsaInput::TfIdf;
    else if (v == "counts") m.lsa_input = LsaInput::Counts;
    else fail(ErrorKind::ConfigError, "expected \"tfidf\" or \"counts\", got \"" + v + "\"");
  });
}

void read_lda(Section& s, ModelConfig& m) {
  auto& c = m.lda;
  s.get("topics", c.topics);
  s.get("alpha", c.alpha);
  s.get("beta", c.beta);
  s.get("iterations", c.iterations);
  s.get("burn_in", c.burn_in);
  s.get("sample_lag", c.sample_lag);
  s.get("seed", c.seed);
  s.get_enum("unit", [&](const std::string& v) {
    if (v == "chunk") m.lda_unit = LdaUnit::Chunk;
    else if (v == "document") m.lda_unit = LdaUnit::Document;
    else fail(ErrorKind::ConfigError, "expected \"chunk\" or \"document\", got \"" + v + "\"");
  });
  s.get("fold_in_iterations", m.fold_in_iterations);
  s.get("fold_in_seed", m.fold_in_seed);
}

void read_model(Section& s, ModelConfig& m) {
  with_section(s, "pipeline", [&](Section& x) { read_pipeline(x, m.pipeline); });
  with_section(s, "sparse", [&](Section& x) { read_sparse(x, m.sparse); });
  with_section(s, "lsa", [&](Section& x) { read_lsa(x, m); });
  with_section(s, "lda", [&](Section& x) { read_lda(x, m); });
}

void read_fusion(Section& s, FusionConfig& c) {
  s.get_enum("strategy", [&](const std::string& v) { c.strategy = parse_fusion_strategy(v); });
  s.get("alpha", c.alpha);
  s.get_enum("composition", [&](const std::string& v) { c.composition = parse_topic_composition(v); });
  s.get("lsa_weight", c.lsa_weight);
  s.get("lda_weight", c.lda_weight);
  s.get("topic_weight", c.topic_weight);
  s.get("alignment_seed", c.alignment_seed);
}

void read_embedding(Section& s, EmbeddingProviderConfig& c) {
  s.get_enum("provider", [&](const std::string& v) { c.kind = parse_provider_kind(v); });
  s.get("dim", c.dim);
  s.get("path", c.path);
  s.get("endpoint", c.endpoint);
  s.get("seed", c.seed);
  s.get("batch_size", c.batch_size);
  s.get("max_in_flight", c.max_in_flight);
  s.get("retries", c.retries);
  std::uint64_t timeout_ms = static_cast<std::uint64_t>(c.timeout.count());
  s.get("timeout_ms", timeout_ms);
  c.timeout = std::chrono::milliseconds(timeout_ms);
}

void read_eval(Section& s, EvalConfig& c) {
  s.get("seeds", c.seeds);
  s.get("train_fraction", c.train_fraction);
  s.get("query_tokens", c.query_tokens);
  s.get("k_values", c.k_values);
  std::vector<std::string> names;
  s.get("techniques", names);
  if (!names.empty()) {
    c.techniques.clear();
    for (const auto& n : names) {
      try {
        c.techniques.push_back(parse_technique(n));
      } catch (const Error& e) {
        fail(ErrorKind::ConfigError, s.key_path("techniques") + ": " + e.what());
      }
    }
  }
  s.get("clustering", c.clustering);
  s.get("cluster_k", c.cluster_k);
  s.get("kmeans_restarts", c.kmeans_restarts);
  s.get("label_key", c.label_key);
  s.get("max_queries", c.max_queries);
  s.get("threads", c.threads);
}

void read_synthetic(Section& s, SyntheticCorpusSpec& c) {
  s.get("topics", c.topics);
  s.get("docs_per_topic", c.docs_per_topic);
  s.get("vocab_size", c.vocab_size);
  s.get("doc_length_min", c.doc_length_min);
  s.get("doc_length_max", c.doc_length_max);
  s.get("concentration", c.concentration);
  s.get("noise", c.noise);
  s.get("queries_per_topic", c.queries_per_topic);
  s.get("query_length", c.query_length);
  s.get("seed", c.seed);
}

}  // namespace

void EvalConfig::validate() const {
  if (seeds.empty()) fail(ErrorKind::ConfigError, "eval.seeds must not be empty");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    fail(ErrorKind::ConfigError, "eval.train_fraction must lie in (0, 1)");
  }
  if (query_tokens == 0) fail(ErrorKind::ConfigError, "eval.query_tokens must be positive");
  if (k_values.empty()) fail(ErrorKind::ConfigError, "eval.k_values must not be empty");
  for (auto k : k_values) {
    if (k == 0) fail(ErrorKind::ConfigError, "eval.k_values entries must be positive");
  }
  if (techniques.empty()) fail(ErrorKind::ConfigError, "eval.techniques must not be empty");
  if (cluster_k == 1) fail(ErrorKind::ConfigError, "eval.cluster_k must be 0 (LDA topic count) or >= 2");
  if (kmeans_restarts == 0) fail(ErrorKind::ConfigError, "eval.kmeans_restarts must be positive");
  if (threads == 0) fail(ErrorKind::ConfigError, "eval.threads must be positive");
}

void RunConfig::validate() const {
  model.pipeline.validate();
  model.lda.validate();
  if (model.sparse.min_df == 0) fail(ErrorKind::ConfigError, "sparse.min_df must be >= 1");
  if (!(model.sparse.max_df_ratio > 0.0 && model.sparse.max_df_ratio <= 1.0)) {
    fail(ErrorKind::ConfigError, "sparse.max_df_ratio must lie in (0, 1]");
  }
  if (model.lsa.rank == 0) fail(ErrorKind::ConfigError, "lsa.rank must be >= 1");
  if (model.fold_in_iterations < 2) fail(ErrorKind::ConfigError, "lda.fold_in_iterations must be >= 2");
  embedding.validate();
  fusion.validate();
  eval.validate();
  synthetic.validate();
}

json model_config_to_json(const ModelConfig& m) {
  json j;
  j["pipeline"] = {{"chunk_size", m.pipeline.chunk_size},
                   {"overlap", m.pipeline.overlap},
                   {"stopwords", m.pipeline.stopword_list},
                   {"lowercase", m.pipeline.lowercase},
                   {"keep_numbers", m.pipeline.keep_numbers}};
  j["sparse"] = {{"min_df", m.sparse.min_df},
                 {"max_df_ratio", m.sparse.max_df_ratio},
                 {"idf_floor_zero", m.sparse.idf_floor_zero}};
  j["lsa"] = {{"rank", m.lsa.rank},
              {"oversampling", m.lsa.oversampling},
              {"power_iterations", m.lsa.power_iterations},
              {"max_iterations", m.lsa.max_iterations},
              {"residual_tolerance", m.lsa.residual_tolerance},
              {"seed", m.lsa.seed},
              {"input", m.lsa_input == LsaInput::TfIdf ? "tfidf" : "counts"}};
  j["lda"] = {{"topics", m.lda.topics},
              {"alpha", m.lda.alpha ? json(*m.lda.alpha) : json(nullptr)},
              {"beta", m.lda.beta},
              {"iterations", m.lda.iterations},
              {"burn_in", m.lda.burn_in},
              {"sample_lag", m.lda.sample_lag},
              {"seed", m.lda.seed},
              {"unit", m.lda_unit == LdaUnit::Chunk ? "chunk" : "document"},
              {"fold_in_iterations", m.fold_in_iterations},
              {"fold_in_seed", m.fold_in_seed}};
  return j;
}

ModelConfig model_config_from_json(const json& j, const std::string& path) {
  ModelConfig m;
  Section s(j, path);
  read_model(s, m);
  s.finish();
  return m;
}

json fusion_config_to_json(const FusionConfig& c) {
  return {{"strategy", std::string(to_string(c.strategy))},
          {"alpha", c.alpha},
          {"composition", std::string(to_string(c.composition))},
          {"lsa_weight", c.lsa_weight},
          {"lda_weight", c.lda_weight},
          {"topic_weight", c.topic_weight},
          {"alignment_seed", c.alignment_seed}};
}

FusionConfig fusion_config_from_json(const json& j, const std::string& path) {
  FusionConfig c;
  Section s(j, path);
  read_fusion(s, c);
  s.finish();
  return c;
}

json embedding_config_to_json(const EmbeddingProviderConfig& c) {
  return {{"provider", std::string(to_string(c.kind))},
          {"dim", c.dim},
          {"path", c.path.string()},
          {"endpoint", c.endpoint},
          {"seed", c.seed},
          {"batch_size", c.batch_size},
          {"max_in_flight", c.max_in_flight},
          {"retries", c.retries},
          {"timeout_ms", c.timeout.count()}};
}

json synthetic_spec_to_json(const SyntheticCorpusSpec& c) {
  return {{"topics", c.topics},
          {"docs_per_topic", c.docs_per_topic},
          {"vocab_size", c.vocab_size},
          {"doc_length_min", c.doc_length_min},
          {"doc_length_max", c.doc_length_max},
          {"concentration", c.concentration},
          {"noise", c.noise},
          {"queries_per_topic", c.queries_per_topic},
          {"query_length", c.query_length},
          {"seed", c.seed}};
}

SyntheticCorpusSpec synthetic_spec_from_json(const json& j, const std::string& path) {
  SyntheticCorpusSpec c;
  Section s(j, path);
  read_synthetic(s, c);
  s.finish();
  return c;
}

json run_config_to_json(const RunConfig& c) {
  json j = model_config_to_json(c.model);
  j["embedding"] = embedding_config_to_json(c.embedding);
  j["fusion"] = fusion_config_to_json(c.fusion);
  std::vector<std::string> techniques;
  for (auto t : c.eval.techniques) techniques.emplace_back(to_string(t));
  j["eval"] = {{"seeds", c.eval.seeds},
               {"train_fraction", c.eval.train_fraction},
               {"query_tokens", c.eval.query_tokens},
               {"k_values", c.eval.k_values},
               {"techniques", techniques},
               {"clustering", c.eval.clustering},
               {"cluster_k", c.eval.cluster_k},
               {"kmeans_restarts", c.eval.kmeans_restarts},
               {"label_key", c.eval.label_key},
               {"max_queries", c.eval.max_queries},
               {"threads", c.eval.threads}};
  j["synthetic"] = synthetic_spec_to_json(c.synthetic);
  j["corpus"] = c.corpus.string();
  j["judgments"] = c.judgments.string();
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  Section s(j, "");
  read_model(s, c.model);
  with_section(s, "embedding", [&](Section& x) { read_embedding(x, c.embedding); });
  with_section(s, "fusion", [&](Section& x) { read_fusion(x, c.fusion); });
  with_section(s, "eval", [&](Section& x) { read_eval(x, c.eval); });
  with_section(s, "synthetic", [&](Section& x) { read_synthetic(x, c.synthetic); });
  s.get("corpus", c.corpus);
  s.get("judgments", c.judgments);
  s.finish();
  c.validate();
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, true);
  } catch (const json::exception& e) {
    fail(ErrorKind::ConfigError, path.string() + ": " + e.what());
  }
  RunConfig c = run_config_from_json(j);
  // relative data paths resolve against the config file's directory
  const auto base = path.parent_path();
  if (!c.corpus.empty() && c.corpus.is_relative()) c.corpus = base / c.corpus;
  if (!c.judgments.empty() && c.judgments.is_relative()) c.judgments = base / c.judgments;
  if (!c.embedding.path.empty() && c.embedding.path.is_relative()) c.embedding.path = base / c.embedding.path;
  return c;
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    fail(ErrorKind::ConfigError, "override '" + assignment + "' must look like key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(raw);
  } catch (const json::exception&) {
    value = raw;  // bare strings need no quoting
  }
  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) fail(ErrorKind::ConfigError, "override key '" + key + "' has an empty component");
    if (!node->is_object()) *node = json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

}  // namespace topiclens
