#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "topiclens/config.hpp"
#include "topiclens/error.hpp"
#include "topiclens/eval/protocol.hpp"
#include "topiclens/eval/synthetic.hpp"
#include "topiclens/index.hpp"
#include "topiclens/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace topiclens;

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string format = "text";
  std::size_t threads = 0;
  std::string seeds;
  std::string corpus;
  bool synthetic = false;
};

void log(const std::string& msg) { std::cerr << "[topiclens] " << msg << '\n'; }

RunConfig resolve(const Common& c) {
  json doc = json::object();
  fs::path base;
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    if (!in) fail(ErrorKind::ConfigError, "cannot open config file " + c.config);
    try {
      doc = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
      fail(ErrorKind::ConfigError, c.config + ": " + e.what());
    }
    base = fs::path(c.config).parent_path();
  }
  for (const auto& o : c.overrides) apply_override(doc, o);
  if (c.threads > 0) apply_override(doc, "eval.threads=" + std::to_string(c.threads));
  if (!c.seeds.empty()) apply_override(doc, "eval.seeds=[" + c.seeds + "]");
  RunConfig cfg = run_config_from_json(doc);
  auto rebase = [&](fs::path& p) {
    if (!p.empty() && p.is_relative() && !base.empty()) p = base / p;
  };
  rebase(cfg.corpus);
  rebase(cfg.judgments);
  rebase(cfg.embedding.path);
  if (!c.corpus.empty()) cfg.corpus = c.corpus;
  return cfg;
}

std::vector<Document> load_documents(const Common& c, const RunConfig& cfg) {
  if (c.synthetic) {
    log("generating synthetic corpus (" + std::to_string(cfg.synthetic.topics) + " topics x " +
        std::to_string(cfg.synthetic.docs_per_topic) + " docs)");
    return generate_synthetic(cfg.synthetic).documents;
  }
  if (cfg.corpus.empty()) fail(ErrorKind::ConfigError, "no corpus: pass --corpus, set \"corpus\", or use --synthetic");
  return read_documents_jsonl(cfg.corpus);
}

void add_common(CLI::App* cmd, Common& c, bool corpus) {
  cmd->add_option("-c,--config", c.config, "JSON run configuration");
  cmd->add_option("--set", c.overrides, "Override a config value, e.g. --set lda.topics=8 (repeatable)");
  cmd->add_option("--format", c.format, "Output format on stdout")->check(CLI::IsMember({"csv", "json", "text"}));
  if (corpus) {
    cmd->add_option("--corpus", c.corpus, "Corpus JSONL (overrides the config)");
    cmd->add_flag("--synthetic", c.synthetic, "Generate the corpus from the config's synthetic spec");
  }
}

void emit(const std::string& format, const json& as_json, const std::string& as_csv, const std::string& as_text) {
  if (format == "json") std::cout << as_json.dump(2) << '\n';
  else if (format == "csv") std::cout << as_csv;
  else std::cout << as_text;
}

std::string kv_text(const json& j) {
  std::string out;
  for (auto it = j.begin(); it != j.end(); ++it) out += it.key() + ": " + it.value().dump() + '\n';
  return out;
}

std::string kv_csv(const json& j) {
  std::string head, row;
  for (auto it = j.begin(); it != j.end(); ++it) {
    head += (head.empty() ? "" : ",") + it.key();
    row += (row.empty() ? "" : ",") + (it.value().is_string() ? it.value().get<std::string>() : it.value().dump());
  }
  return head + '\n' + row + '\n';
}

json corpus_stats(const IngestResult& r) {
  std::size_t tokens = 0;
  for (const auto& c : r.chunks) tokens += c.tokens.size();
  return {{"documents", r.documents.size()}, {"chunks", r.chunks.size()}, {"chunk_tokens", tokens}};
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

int cmd_synth(const Common& c, const std::string& out_dir) {
  const RunConfig cfg = resolve(c);
  const auto corpus = generate_synthetic(cfg.synthetic);
  const auto ingested = ingest_documents(corpus.documents, cfg.model.pipeline);
  write_synthetic(corpus, ingested.chunks, out_dir);
  write_json(fs::path(out_dir) / "spec.json", synthetic_spec_to_json(cfg.synthetic));
  json stats = corpus_stats(ingested);
  stats["topics"] = cfg.synthetic.topics;
  stats["queries"] = corpus.queries.size();
  stats["out"] = out_dir;
  emit(c.format, stats, kv_csv(stats), kv_text(stats));
  return kOk;
}

int cmd_ingest(const Common& c, const std::string& out) {
  const RunConfig cfg = resolve(c);
  const auto ingested = ingest_documents(load_documents(c, cfg), cfg.model.pipeline);
  if (!out.empty()) write_chunk_dump(out, ingested.chunks);
  const json stats = corpus_stats(ingested);
  emit(c.format, stats, kv_csv(stats), kv_text(stats));
  return kOk;
}

int cmd_fit(const Common& c, const std::string& out_dir) {
  const RunConfig cfg = resolve(c);
  const auto ingested = ingest_documents(load_documents(c, cfg), cfg.model.pipeline);
  log("fitting on " + std::to_string(ingested.chunks.size()) + " chunks");
  const auto artifacts = fit_artifacts(ingested.chunks, cfg.model);
  artifacts.save(out_dir);
  write_json(fs::path(out_dir) / "run_config.json", run_config_to_json(cfg));
  json stats = corpus_stats(ingested);
  stats["vocabulary"] = artifacts.tfidf.vocabulary().size();
  stats["lsa_rank"] = artifacts.lsa.rank();
  stats["lsa_explained_energy"] = artifacts.lsa.explained_energy();
  stats["lda_topics"] = artifacts.lda.topics();
  stats["digest"] = artifacts.digest();
  emit(c.format, stats, kv_csv(stats), kv_text(stats));
  return kOk;
}

int cmd_build_index(const Common& c, const std::string& artifacts_dir, const std::string& technique,
                    const std::string& out_dir) {
  const RunConfig cfg = resolve(c);
  const auto artifacts = TrainedArtifacts::load(artifacts_dir);
  // chunk exactly as the artifacts were fitted, whatever pipeline the current config carries
  const auto ingested = ingest_documents(load_documents(c, cfg), artifacts.config.pipeline);
  const auto provider = make_provider(cfg.embedding);
  const Representation rep = make_representation(parse_technique(technique), cfg.fusion);
  const Encoder encoder(artifacts, provider.get(), rep);
  log("encoding " + std::to_string(ingested.chunks.size()) + " chunks as " + technique);
  const auto vectors = encoder.encode_chunks(ingested.chunks);
  std::vector<IndexEntry> entries;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    entries.push_back({ingested.chunks[i].chunk_id, ingested.chunks[i].doc_id, vectors[i]});
  }
  json manifest;
  manifest["format"] = "topiclens-index";
  manifest["technique"] = technique;
  manifest["fusion"] = fusion_config_to_json(rep.fusion);
  manifest["embedding"] = embedding_config_to_json(cfg.embedding);
  manifest["artifacts_digest"] = artifacts.digest();
  manifest["corpus"] = corpus_stats(ingested);
  manifest["config"] = run_config_to_json(cfg);
  const auto index = VectorIndex::build(std::move(entries), encoder.fingerprint(), manifest);
  index.save(out_dir);
  artifacts.save(fs::path(out_dir) / "artifacts");
  if (encoder.alignment()) encoder.alignment()->save(fs::path(out_dir) / "alignment.bin");
  const json stats{{"technique", technique}, {"records", index.size()}, {"dimension", index.dim()},
                   {"fingerprint", index.fingerprint()}, {"out", out_dir}};
  emit(c.format, stats, kv_csv(stats), kv_text(stats));
  return kOk;
}

int cmd_query(const std::string& format, const std::string& index_dir, const std::string& text, std::size_t k) {
  const auto index = VectorIndex::load(index_dir);
  const auto& m = index.manifest();
  for (const char* key : {"technique", "fusion", "embedding"}) {
    if (!m.contains(key)) fail(ErrorKind::ArtifactFormat, index_dir + "/manifest.json lacks \"" + key + "\"");
  }
  const auto artifacts = TrainedArtifacts::load(fs::path(index_dir) / "artifacts");
  json embedding_doc = json::object();
  embedding_doc["embedding"] = m["embedding"];
  const auto embedding = run_config_from_json(embedding_doc).embedding;
  const auto provider = make_provider(embedding);
  const auto fusion = fusion_config_from_json(m["fusion"], "manifest.fusion");
  const Representation rep = make_representation(parse_technique(m["technique"].get<std::string>()), fusion);
  std::optional<AlignmentMap> alignment;
  if (fs::exists(fs::path(index_dir) / "alignment.bin")) alignment = AlignmentMap::load(fs::path(index_dir) / "alignment.bin");
  const Encoder encoder(artifacts, provider.get(), rep, alignment);
  const auto result = index.knn(enrich_query(text, encoder, index.fingerprint()), k);

  json j{{"k_requested", result.k_requested}, {"k_returned", result.k_returned()}, {"hits", json::array()}};
  std::string csv = "rank,chunk_id,doc_id,score\n";
  std::vector<std::vector<std::string>> rows;
  char score[32];
  std::size_t w_chunk = 8, w_doc = 6;
  for (std::size_t i = 0; i < result.hits.size(); ++i) {
    const auto& h = result.hits[i];
    std::snprintf(score, sizeof score, "%.6f", h.score);
    j["hits"].push_back({{"rank", i + 1}, {"chunk_id", h.chunk_id}, {"doc_id", h.doc_id}, {"score", h.score}});
    csv += std::to_string(i + 1) + ',' + h.chunk_id + ',' + h.doc_id + ',' + score + '\n';
    rows.push_back({std::to_string(i + 1), h.chunk_id, h.doc_id, score});
    w_chunk = std::max(w_chunk, h.chunk_id.size());
    w_doc = std::max(w_doc, h.doc_id.size());
  }
  std::ostringstream text_out;
  auto line = [&](const std::string& a, const std::string& b, const std::string& c2, const std::string& d) {
    text_out << std::string(4 - std::min<std::size_t>(4, a.size()), ' ') << a << "  " << b
             << std::string(w_chunk - b.size(), ' ') << "  " << c2 << std::string(w_doc - c2.size(), ' ') << "  " << d
             << '\n';
  };
  line("rank", "chunk_id", "doc_id", "score");
  for (const auto& r : rows) line(r[0], r[1], r[2], r[3]);
  emit(format, j, csv, text_out.str());
  return kOk;
}

std::optional<Judgments> load_judgments(const RunConfig& cfg) {
  if (cfg.judgments.empty()) return std::nullopt;
  return read_judgments(cfg.judgments);
}

int cmd_eval(const Common& c, const std::string& out_dir) {
  const RunConfig cfg = resolve(c);
  ProtocolInput input{load_documents(c, cfg), load_judgments(cfg)};
  log("running " + std::to_string(cfg.eval.seeds.size()) + " seeds over " + std::to_string(input.documents.size()) +
      " documents");
  const auto report = run_protocol(input, cfg);
  if (!out_dir.empty()) {
    write_eval_report(report, out_dir);
    write_json(fs::path(out_dir) / "run_config.json", run_config_to_json(cfg));
  }
  emit(c.format, report_json(report), clustering_csv(report) + "\n" + retrieval_csv(report), eval_text(report));
  return kOk;
}

int cmd_ablate(const Common& c, const std::string& out_dir) {
  const RunConfig cfg = resolve(c);
  ProtocolInput input{load_documents(c, cfg), load_judgments(cfg)};
  const auto report = run_ablation(input, cfg);
  if (!out_dir.empty()) {
    write_ablation_report(report, out_dir);
    write_json(fs::path(out_dir) / "run_config.json", run_config_to_json(cfg));
  }
  emit(c.format, report_json(report), ablation_csv(report), ablation_text(report));
  return kOk;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ConfigError:
    case ErrorKind::InvalidArgument: return kUsage;
    case ErrorKind::ConvergenceFailure: return kInternal;
    default: return kData;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topic-enriched chunk retrieval: ingest, fit, index, query and evaluate."};
  app.require_subcommand(1);
  Common common;
  std::string out, artifacts, technique = "enriched-concat", index_dir, query_text;
  std::size_t k = 10;

  auto* synth = app.add_subcommand("synth", "Generate a labelled synthetic corpus with judgments");
  add_common(synth, common, false);
  synth->add_option("--out", out, "Output directory")->required();

  auto* ingest = app.add_subcommand("ingest", "Tokenize and chunk a corpus; write a chunk dump");
  add_common(ingest, common, true);
  ingest->add_option("--out", out, "Chunk dump JSONL path");

  auto* fit = app.add_subcommand("fit", "Fit TF-IDF, LSA and LDA artifacts");
  add_common(fit, common, true);
  fit->add_option("--out", out, "Artifact directory")->required();

  auto* build = app.add_subcommand("build-index", "Encode every chunk and persist a vector index");
  add_common(build, common, true);
  build->add_option("--artifacts", artifacts, "Artifact directory from `fit`")->required();
  build->add_option("--technique", technique, "tfidf, lsa, lda, contextual, enriched-concat, enriched-weighted, random-topic");
  build->add_option("--out", out, "Index directory")->required();

  auto* query = app.add_subcommand("query", "Rank indexed chunks against a query");
  query->add_option("--index", index_dir, "Index directory from `build-index`")->required();
  query->add_option("text", query_text, "Query text")->required();
  query->add_option("-k", k, "Number of results")->check(CLI::PositiveNumber);
  query->add_option("--format", common.format, "Output format")->check(CLI::IsMember({"csv", "json", "text"}));

  auto* eval = app.add_subcommand("eval", "Run the seeded 80/20 evaluation protocol");
  add_common(eval, common, true);
  eval->add_option("--out", out, "Report directory");
  eval->add_option("--threads", common.threads, "Maximum worker threads");
  eval->add_option("--seeds", common.seeds, "Comma-separated seeds, e.g. 1,2,3");

  auto* ablate = app.add_subcommand("ablate", "Run the seven-variant ablation grid");
  add_common(ablate, common, true);
  ablate->add_option("--out", out, "Report directory");
  ablate->add_option("--threads", common.threads, "Maximum worker threads");
  ablate->add_option("--seeds", common.seeds, "Comma-separated seeds, e.g. 1,2,3");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*synth) return cmd_synth(common, out);
    if (*ingest) return cmd_ingest(common, out);
    if (*fit) return cmd_fit(common, out);
    if (*build) return cmd_build_index(common, artifacts, technique, out);
    if (*query) return cmd_query(common.format, index_dir, query_text, k);
    if (*eval) return cmd_eval(common, out);
    if (*ablate) return cmd_ablate(common, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kUsage;
}
