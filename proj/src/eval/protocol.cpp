#include "topiclens/eval/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <random>
#include <set>
#include <thread>
#include <unordered_map>

#include "topiclens/error.hpp"
#include "topiclens/hashing.hpp"
#include "topiclens/index.hpp"

namespace topiclens {

namespace fs = std::filesystem;

std::vector<Variant> technique_variants(const std::vector<Technique>& techniques, const FusionConfig& fusion) {
  std::vector<Variant> out;
  for (auto t : techniques) out.push_back({std::string(to_string(t)), make_representation(t, fusion)});
  return out;
}

std::vector<Variant> ablation_variants(const FusionConfig& fusion) {
  auto fused = [&](FusionStrategy s, TopicComposition c) {
    Representation r;
    r.kind = Representation::Kind::Fused;
    r.fusion = fusion;
    r.fusion.strategy = s;
    r.fusion.composition = c;
    return r;
  };
  Representation contextual;
  contextual.kind = Representation::Kind::Contextual;
  contextual.fusion = fusion;
  std::vector<Variant> v{
      {"Contextual Only", contextual},
      {"+ LSA (concat)", fused(FusionStrategy::Concat, TopicComposition::Lsa)},
      {"+ LDA (concat)", fused(FusionStrategy::Concat, TopicComposition::Lda)},
      {"+ LSA (weighted)", fused(FusionStrategy::Weighted, TopicComposition::Lsa)},
      {"+ LDA (weighted)", fused(FusionStrategy::Weighted, TopicComposition::Lda)},
      {"Topic-Enriched", fused(fusion.strategy, TopicComposition::LsaLda)},
      {"Random Topic Vectors", fused(fusion.strategy, TopicComposition::Random)},
  };
  for (auto& x : v) x.rep.name = x.name;
  return v;
}

Split split_documents(std::vector<std::string> doc_ids, std::uint64_t seed, double train_fraction) {
  std::sort(doc_ids.begin(), doc_ids.end());
  if (std::adjacent_find(doc_ids.begin(), doc_ids.end()) != doc_ids.end()) {
    fail(ErrorKind::DuplicateId, "duplicate doc_id in split input");
  }
  if (doc_ids.size() < 2) fail(ErrorKind::InvalidArgument, "a train/test split needs at least two documents");
  std::mt19937_64 rng(derive_seed(seed, "split"));
  std::vector<std::size_t> order(doc_ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  // Fisher-Yates with explicit draws: std::shuffle's draw sequence is implementation-defined.
  for (std::size_t i = order.size(); i-- > 1;) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }
  auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(doc_ids.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, doc_ids.size() - 1);
  Split s;
  for (std::size_t i = 0; i < order.size(); ++i) (i < n_train ? s.train : s.test).push_back(doc_ids[order[i]]);
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

ModelConfig seeded_model(const ModelConfig& base, std::uint64_t seed) {
  ModelConfig m = base;
  m.lsa.seed = derive_seed(seed, "lsa");
  m.lda.seed = derive_seed(seed, "lda");
  m.fold_in_seed = derive_seed(seed, "fold-in");
  return m;
}

FusionConfig seeded_fusion(const FusionConfig& base, std::uint64_t seed) {
  FusionConfig f = base;
  f.alignment_seed = derive_seed(seed, "alignment");
  return f;
}

const MetricSummary& VariantReport::at_k(std::size_t k) const {
  for (const auto& m : retrieval) {
    if (m.k == k) return m;
  }
  fail(ErrorKind::InvalidArgument, "variant '" + name + "' has no metrics at k = " + std::to_string(k));
}

const VariantReport& EvalReport::variant(const std::string& name) const {
  for (const auto& v : variants) {
    if (v.name == name) return v;
  }
  fail(ErrorKind::InvalidArgument, "report has no variant '" + name + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

struct PreparedCorpus {
  std::vector<std::string> doc_ids;
  std::unordered_map<std::string, std::vector<Chunk>> chunks;
  std::unordered_map<std::string, std::string> labels;
};

PreparedCorpus prepare(const ProtocolInput& input, const RunConfig& cfg) {
  PreparedCorpus p;
  const Tokenizer tokenizer(cfg.model.pipeline);
  for (const auto& d : input.documents) {
    if (p.chunks.contains(d.doc_id)) fail(ErrorKind::DuplicateId, "duplicate doc_id '" + d.doc_id + "'");
    p.doc_ids.push_back(d.doc_id);
    p.chunks[d.doc_id] = chunk_document(d, tokenizer, cfg.model.pipeline);
    if (!input.judgments) {
      auto it = d.metadata.find(cfg.eval.label_key);
      if (it == d.metadata.end()) {
        fail(ErrorKind::MissingJudgments, "document '" + d.doc_id + "' has no '" + cfg.eval.label_key +
                                              "' metadata and no judgments file was given");
      }
      p.labels[d.doc_id] = it->second;
    }
  }
  std::sort(p.doc_ids.begin(), p.doc_ids.end());
  return p;
}

struct Query {
  std::string id;
  std::string text;
};

struct SeedOutcome {
  SeedStats stats;
  std::vector<SeedResult> results;  // per variant
  std::map<std::string, double> seconds;
};

class Stopwatch {
 public:
  explicit Stopwatch(std::map<std::string, double>& sink) : sink_(sink), last_(Clock::now()) {}
  void lap(const std::string& stage) {
    const auto now = Clock::now();
    sink_[stage] += std::chrono::duration<double>(now - last_).count();
    last_ = now;
  }

 private:
  std::map<std::string, double>& sink_;
  Clock::time_point last_;
};

bool is_degenerate(const Error& e) {
  return e.kind() == ErrorKind::DegenerateResult || e.kind() == ErrorKind::MissingComponent;
}

PointMatrix index_points(const VectorIndex& index) {
  PointMatrix m(static_cast<Eigen::Index>(index.size()), static_cast<Eigen::Index>(index.dim()));
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto v = index.vector(i);
    for (std::size_t j = 0; j < v.size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
  }
  return m;
}

SeedOutcome run_seed(const PreparedCorpus& corpus, const ProtocolInput& input, const RunConfig& cfg,
                     const std::vector<Variant>& variants, const EmbeddingProvider* provider, std::uint64_t seed) {
  SeedOutcome out;
  out.stats.seed = seed;
  Stopwatch clock(out.seconds);

  const Split split = split_documents(corpus.doc_ids, seed, cfg.eval.train_fraction);
  std::vector<Chunk> train;
  for (const auto& id : split.train) {
    const auto& c = corpus.chunks.at(id);
    train.insert(train.end(), c.begin(), c.end());
  }
  out.stats.train_docs = split.train.size();
  out.stats.test_docs = split.test.size();
  out.stats.train_chunks = train.size();

  Judgments judgments;
  judgments.provenance = input.judgments ? Judgments::Provenance::ExplicitFile : Judgments::Provenance::SyntheticTopic;
  std::vector<Query> queries;
  if (input.judgments) {
    std::set<std::string> indexed;
    for (const auto& c : train) indexed.insert(c.chunk_id);
    for (const auto& [qid, rel] : input.judgments->relevant) {
      std::set<std::string> kept;
      std::set_intersection(rel.begin(), rel.end(), indexed.begin(), indexed.end(), std::inserter(kept, kept.end()));
      const auto text = input.judgments->query_text.find(qid);
      if (text == input.judgments->query_text.end() || text->second.empty()) {
        fail(ErrorKind::MissingJudgments, "judged query '" + qid + "' has no query_text");
      }
      if (kept.empty()) {
        ++out.stats.skipped_queries;
        continue;
      }
      judgments.add(qid, text->second, std::move(kept));
      queries.push_back({qid, text->second});
    }
  } else {
    std::map<std::string, std::set<std::string>> by_label;
    for (const auto& c : train) by_label[corpus.labels.at(c.doc_id)].insert(c.chunk_id);
    std::vector<const Chunk*> candidates;
    for (const auto& id : split.test) {
      for (const auto& c : corpus.chunks.at(id)) candidates.push_back(&c);
    }
    std::vector<const Chunk*> chosen = candidates;
    if (cfg.eval.max_queries > 0 && candidates.size() > cfg.eval.max_queries) {
      chosen.clear();
      for (std::size_t i = 0; i < cfg.eval.max_queries; ++i) {
        chosen.push_back(candidates[i * candidates.size() / cfg.eval.max_queries]);
      }
    }
    for (const Chunk* c : chosen) {
      auto rel = by_label.find(corpus.labels.at(c->doc_id));
      if (rel == by_label.end()) {
        ++out.stats.skipped_queries;
        continue;
      }
      Chunk prefix = *c;
      prefix.tokens.resize(std::min(prefix.tokens.size(), cfg.eval.query_tokens));
      std::string text = chunk_text(prefix);
      judgments.add(c->chunk_id, text, rel->second);
      queries.push_back({c->chunk_id, std::move(text)});
    }
  }
  clock.lap("split");

  const TrainedArtifacts artifacts = fit_artifacts(train, seeded_model(cfg.model, seed));
  clock.lap("fit");

  const FusionConfig fusion = seeded_fusion(cfg.fusion, seed);
  std::vector<Representation> reps;
  FeatureNeeds needs{false, false};
  for (const auto& v : variants) {
    Representation rep = v.rep;
    rep.fusion.alignment_seed = fusion.alignment_seed;
    const auto n = needs_for(rep);
    needs.context = needs.context || n.context;
    needs.topics = needs.topics || n.topics;
    reps.push_back(std::move(rep));
  }
  const FeatureExtractor extractor(artifacts, provider);
  const auto chunk_features = extractor.chunks(train, needs);
  std::vector<TextFeatures> query_features;
  query_features.reserve(queries.size());
  for (const auto& q : queries) query_features.push_back(extractor.query(q.text, needs));
  clock.lap("features");

  std::vector<VectorIndex> indexes;
  std::vector<std::vector<std::optional<EnrichedVector>>> query_vectors(reps.size());
  std::vector<bool> usable(queries.size(), true);
  for (std::size_t v = 0; v < reps.size(); ++v) {
    const Encoder encoder(artifacts, provider, reps[v]);
    std::vector<IndexEntry> entries;
    entries.reserve(train.size());
    for (std::size_t i = 0; i < train.size(); ++i) {
      entries.push_back({train[i].chunk_id, train[i].doc_id, encoder.encode(chunk_features[i])});
    }
    indexes.push_back(VectorIndex::build(std::move(entries), encoder.fingerprint()));
    for (std::size_t q = 0; q < queries.size(); ++q) {
      try {
        query_vectors[v].emplace_back(std::in_place, encoder.encode(query_features[q]));
      } catch (const Error& e) {
        if (!is_degenerate(e)) throw;
        query_vectors[v].emplace_back();
        usable[q] = false;
      }
    }
  }
  for (bool u : usable) out.stats.skipped_queries += !u;
  out.stats.queries = static_cast<std::size_t>(std::count(usable.begin(), usable.end(), true));
  if (out.stats.queries == 0) fail(ErrorKind::DegenerateResult, "seed " + std::to_string(seed) + ": no usable queries");
  clock.lap("encode");

  out.results.resize(reps.size());
  for (std::size_t v = 0; v < reps.size(); ++v) {
    const auto& index = indexes[v];
    std::vector<RankedQuery> ranked;
    for (std::size_t q = 0; q < queries.size(); ++q) {
      if (!usable[q]) continue;
      RankedQuery r;
      r.query_id = queries[q].id;
      for (const auto& [pos, score] : index.search(query_vectors[v][q]->values, index.size())) {
        r.ranked.push_back(index.chunk_id(pos));
      }
      ranked.push_back(std::move(r));
    }
    auto& res = out.results[v];
    res.seed = seed;
    res.retrieval = retrieval_metrics(ranked, judgments, cfg.eval.k_values);
    res.pr = per_seed_pr(ranked, judgments);
  }
  clock.lap("retrieval");

  if (cfg.eval.clustering) {
    const std::size_t k = cfg.eval.cluster_k > 0 ? cfg.eval.cluster_k : artifacts.lda.topics();
    out.stats.cluster_k = k;
    std::vector<std::uint64_t> restarts;
    for (std::size_t r = 0; r < cfg.eval.kmeans_restarts; ++r) {
      restarts.push_back(derive_seed(seed, "kmeans/" + std::to_string(r)));
    }
    KMeansConfig kc;
    kc.k = k;
    for (std::size_t v = 0; v < reps.size(); ++v) {
      const auto points = index_points(indexes[v]);
      const auto km = kmeans(points, kc, restarts);
      out.results[v].clusters = cluster_scores(points, km.best_run().assignments);
    }
    clock.lap("clustering");
  }
  return out;
}

template <typename F>
Summary summarize_by(const std::vector<SeedResult>& runs, F field) {
  std::vector<double> values;
  for (const auto& r : runs) values.push_back(field(r));
  return summarize(values);
}

}  // namespace

EvalReport run_protocol(const ProtocolInput& input, const RunConfig& cfg, const std::vector<Variant>& variants) {
  cfg.eval.validate();
  if (variants.empty()) fail(ErrorKind::InvalidArgument, "no techniques to evaluate");
  const auto corpus = prepare(input, cfg);
  const auto provider = make_provider(cfg.embedding);

  const auto& seeds = cfg.eval.seeds;
  std::vector<SeedOutcome> outcomes(seeds.size());
  std::vector<std::exception_ptr> errors(seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < seeds.size(); i = next++) {
      try {
        outcomes[i] = run_seed(corpus, input, cfg, variants, provider.get(), seeds[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(cfg.eval.threads, seeds.size());
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  EvalReport report;
  report.seeds = seeds;
  report.split = cfg.eval.train_fraction;
  report.k_values = cfg.eval.k_values;
  report.judgments_provenance = input.judgments ? "explicit-file" : "synthetic-topic";
  for (const auto& o : outcomes) {
    report.seed_stats.push_back(o.stats);
    for (const auto& [stage, s] : o.seconds) report.stage_seconds[stage] += s;
  }
  for (std::size_t v = 0; v < variants.size(); ++v) {
    VariantReport vr;
    vr.name = variants[v].name;
    for (const auto& o : outcomes) vr.per_seed.push_back(o.results[v]);
    if (cfg.eval.clustering) {
      vr.silhouette = summarize_by(vr.per_seed, [](const SeedResult& r) { return r.clusters->silhouette; });
      vr.calinski_harabasz =
          summarize_by(vr.per_seed, [](const SeedResult& r) { return r.clusters->calinski_harabasz; });
      vr.davies_bouldin = summarize_by(vr.per_seed, [](const SeedResult& r) { return r.clusters->davies_bouldin; });
    }
    for (std::size_t ki = 0; ki < cfg.eval.k_values.size(); ++ki) {
      MetricSummary m;
      m.k = cfg.eval.k_values[ki];
      m.precision = summarize_by(vr.per_seed, [&](const SeedResult& r) { return r.retrieval[ki].precision; });
      m.recall = summarize_by(vr.per_seed, [&](const SeedResult& r) { return r.retrieval[ki].recall; });
      m.f1 = summarize_by(vr.per_seed, [&](const SeedResult& r) { return r.retrieval[ki].f1; });
      vr.retrieval.push_back(m);
    }
    const auto grid = recall_grid();
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto s = summarize_by(vr.per_seed, [&](const SeedResult& r) { return r.pr[g]; });
      vr.pr_curve.push_back({grid[g], s.mean, s.sd});
    }
    report.variants.push_back(std::move(vr));
  }
  return report;
}

EvalReport run_protocol(const ProtocolInput& input, const RunConfig& cfg) {
  return run_protocol(input, cfg, technique_variants(cfg.eval.techniques, cfg.fusion));
}

EvalReport run_ablation(const ProtocolInput& input, const RunConfig& cfg) {
  RunConfig c = cfg;
  c.eval.clustering = false;
  if (std::find(c.eval.k_values.begin(), c.eval.k_values.end(), 10) == c.eval.k_values.end()) {
    c.eval.k_values.insert(c.eval.k_values.begin(), 10);
  }
  return run_protocol(input, c, ablation_variants(c.fusion));
}

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Left-aligned first column, right-aligned numbers.
std::string aligned(const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> width;
  for (const auto& r : rows) {
    width.resize(std::max(width.size(), r.size()), 0);
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());
  }
  std::string out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    for (std::size_t c = 0; c < r.size(); ++c) {
      const std::string pad(width[c] - r[c].size(), ' ');
      if (c > 0) out += "  ";
      out += c == 0 ? r[c] + pad : pad + r[c];
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    out += '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w;
      out += std::string(total + 2 * (width.size() - 1), '-') + '\n';
    }
  }
  return out;
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << content;
  if (!out) fail(ErrorKind::IoError, "write failed: " + path.string());
}

std::string file_safe(const std::string& name) {
  std::string out;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-';
    out += ok ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : '_';
  }
  return out;
}

}  // namespace

std::string clustering_csv(const EvalReport& r) {
  std::string out =
      "technique,silhouette_mean,silhouette_sd,calinski_harabasz_mean,calinski_harabasz_sd,davies_bouldin_mean,"
      "davies_bouldin_sd\n";
  for (const auto& v : r.variants) {
    if (!v.silhouette) continue;
    out += csv_field(v.name) + ',' + num(v.silhouette->mean) + ',' + num(v.silhouette->sd) + ',' +
           num(v.calinski_harabasz->mean) + ',' + num(v.calinski_harabasz->sd) + ',' + num(v.davies_bouldin->mean) +
           ',' + num(v.davies_bouldin->sd) + '\n';
  }
  return out;
}

std::string retrieval_csv(const EvalReport& r) {
  std::string out = "technique,k,precision_mean,precision_sd,recall_mean,recall_sd,f1_mean,f1_sd\n";
  for (const auto& v : r.variants) {
    for (const auto& m : v.retrieval) {
      out += csv_field(v.name) + ',' + std::to_string(m.k) + ',' + num(m.precision.mean) + ',' + num(m.precision.sd) +
             ',' + num(m.recall.mean) + ',' + num(m.recall.sd) + ',' + num(m.f1.mean) + ',' + num(m.f1.sd) + '\n';
    }
  }
  return out;
}

std::string per_seed_csv(const EvalReport& r) {
  std::string out = "seed,technique,silhouette,calinski_harabasz,davies_bouldin,k,precision,recall,f1\n";
  for (const auto& v : r.variants) {
    for (const auto& s : v.per_seed) {
      for (const auto& m : s.retrieval) {
        out += std::to_string(s.seed) + ',' + csv_field(v.name) + ',';
        out += s.clusters ? num(s.clusters->silhouette) + ',' + num(s.clusters->calinski_harabasz) + ',' +
                                num(s.clusters->davies_bouldin)
                          : std::string(",,");
        out += ',' + std::to_string(m.k) + ',' + num(m.precision) + ',' + num(m.recall) + ',' + num(m.f1) + '\n';
      }
    }
  }
  return out;
}

std::string pr_curve_csv(const VariantReport& v) {
  std::string out = "grid_recall,mean_precision,sd\n";
  char buf[16];
  for (const auto& p : v.pr_curve) {
    std::snprintf(buf, sizeof buf, "%.2f", p.recall);
    out += std::string(buf) + ',' + num(p.mean_precision) + ',' + num(p.sd) + '\n';
  }
  return out;
}

std::string ablation_csv(const EvalReport& r) {
  std::string out = "variant,precision_at_10,recall_at_10,f1_at_10,precision_at_10_sd,recall_at_10_sd,f1_at_10_sd\n";
  for (const auto& v : r.variants) {
    const auto& m = v.at_k(10);
    out += csv_field(v.name) + ',' + num(m.precision.mean) + ',' + num(m.recall.mean) + ',' + num(m.f1.mean) + ',' +
           num(m.precision.sd) + ',' + num(m.recall.sd) + ',' + num(m.f1.sd) + '\n';
  }
  return out;
}

std::string eval_text(const EvalReport& r) {
  std::string out;
  std::string seeds;
  for (auto s : r.seeds) seeds += (seeds.empty() ? "" : ",") + std::to_string(s);
  out += "seeds=[" + seeds + "] split=" + num(r.split) + " judgments=" + r.judgments_provenance + "\n\n";
  bool any_clusters = false;
  for (const auto& v : r.variants) any_clusters = any_clusters || v.silhouette.has_value();
  if (any_clusters) {
    std::vector<std::vector<std::string>> rows{{"technique", "silhouette", "calinski_harabasz", "davies_bouldin"}};
    for (const auto& v : r.variants) {
      if (!v.silhouette) continue;
      rows.push_back({v.name, num(v.silhouette->mean), num(v.calinski_harabasz->mean), num(v.davies_bouldin->mean)});
    }
    out += aligned(rows) + '\n';
  }
  std::vector<std::vector<std::string>> rows{{"technique"}};
  for (auto k : r.k_values) {
    for (const char* m : {"P@", "R@", "F1@"}) rows[0].push_back(m + std::to_string(k));
  }
  for (const auto& v : r.variants) {
    std::vector<std::string> row{v.name};
    for (const auto& m : v.retrieval) {
      row.push_back(num(m.precision.mean));
      row.push_back(num(m.recall.mean));
      row.push_back(num(m.f1.mean));
    }
    rows.push_back(std::move(row));
  }
  return out + aligned(rows);
}

std::string ablation_text(const EvalReport& r) {
  std::vector<std::vector<std::string>> rows{{"Variant", "Precision@10", "Recall@10", "F1 Score@10"}};
  for (const auto& v : r.variants) {
    const auto& m = v.at_k(10);
    rows.push_back({v.name, num(m.precision.mean), num(m.recall.mean), num(m.f1.mean)});
  }
  return aligned(rows);
}

nlohmann::json report_json(const EvalReport& r) {
  nlohmann::json j;
  j["seeds"] = r.seeds;
  j["split"] = r.split;
  j["k_values"] = r.k_values;
  j["judgments"] = r.judgments_provenance;
  for (const auto& s : r.seed_stats) {
    j["seed_stats"].push_back({{"seed", s.seed},
                               {"train_docs", s.train_docs},
                               {"test_docs", s.test_docs},
                               {"train_chunks", s.train_chunks},
                               {"queries", s.queries},
                               {"skipped_queries", s.skipped_queries},
                               {"cluster_k", s.cluster_k}});
  }
  const bool with_sd = r.seeds.size() >= 2;
  auto summary = [&](const Summary& s) {
    nlohmann::json x{{"mean", s.mean}};
    x["sd"] = with_sd ? nlohmann::json(s.sd) : nlohmann::json(nullptr);
    return x;
  };
  for (const auto& v : r.variants) {
    nlohmann::json x{{"name", v.name}};
    if (v.silhouette) {
      x["silhouette"] = summary(*v.silhouette);
      x["calinski_harabasz"] = std::isinf(v.calinski_harabasz->mean) ? nlohmann::json("inf")
                                                                      : summary(*v.calinski_harabasz);
      x["davies_bouldin"] = summary(*v.davies_bouldin);
    }
    for (const auto& m : v.retrieval) {
      x["retrieval"].push_back(
          {{"k", m.k}, {"precision", summary(m.precision)}, {"recall", summary(m.recall)}, {"f1", summary(m.f1)}});
    }
    j["variants"].push_back(std::move(x));
  }
  j["stage_seconds"] = r.stage_seconds;
  return j;
}

void write_eval_report(const EvalReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "clustering.csv", clustering_csv(r));
  write_text(dir / "retrieval.csv", retrieval_csv(r));
  write_text(dir / "per_seed.csv", per_seed_csv(r));
  for (const auto& v : r.variants) write_text(dir / ("pr_curve_" + file_safe(v.name) + ".csv"), pr_curve_csv(v));
  write_text(dir / "report.json", report_json(r).dump(2) + "\n");
  write_text(dir / "report.txt", eval_text(r));
}

void write_ablation_report(const EvalReport& r, const fs::path& dir) {
  fs::create_directories(dir);
  write_text(dir / "ablation.csv", ablation_csv(r));
  write_text(dir / "ablation.txt", ablation_text(r));
  write_text(dir / "report.json", report_json(r).dump(2) + "\n");
}

}  // namespace topiclens
