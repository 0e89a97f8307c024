#include "topiclens/pipeline.hpp"

#include <bit>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "topiclens/config.hpp"
#include "topiclens/error.hpp"
#include "topiclens/hashing.hpp"

namespace topiclens {

namespace fs = std::filesystem;

std::uint64_t TrainedArtifacts::digest() const {
  Hasher h;
  h.text("topiclens-artifacts-v1");
  h.bytes(tfidf.serialize());
  h.bytes(lsa.serialize());
  h.bytes(lda.serialize());
  const auto& p = config.pipeline;
  h.u64(p.chunk_size).u64(p.overlap).text(p.stopword_list).u64(p.lowercase).u64(p.keep_numbers);
  h.u64(static_cast<std::uint64_t>(config.lsa_input));
  h.u64(config.fold_in_iterations).u64(config.fold_in_seed);
  return h.digest();
}

void TrainedArtifacts::save(const fs::path& dir) const {
  fs::create_directories(dir);
  tfidf.save(dir / "tfidf.bin");
  tfidf.export_json(dir / "tfidf.json");
  lsa.save(dir / "lsa.bin");
  lda.save(dir / "lda.bin");
  nlohmann::json meta;
  meta["model"] = model_config_to_json(config);
  meta["digest"] = digest();
  meta["vocabulary_size"] = tfidf.vocabulary().size();
  meta["n_chunks"] = tfidf.n_docs();
  meta["lsa_rank"] = lsa.rank();
  meta["lsa_explained_energy"] = lsa.explained_energy();
  meta["lda_topics"] = lda.topics();
  std::ofstream out(dir / "artifacts.json", std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + (dir / "artifacts.json").string());
  out << meta.dump(2) << '\n';
}

TrainedArtifacts TrainedArtifacts::load(const fs::path& dir) {
  for (const char* name : {"artifacts.json", "tfidf.bin", "lsa.bin", "lda.bin"}) {
    if (!fs::exists(dir / name)) fail(ErrorKind::IoError, "missing artifact " + (dir / name).string());
  }
  std::ifstream in(dir / "artifacts.json");
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, (dir / "artifacts.json").string() + ": " + e.what());
  }
  TrainedArtifacts a;
  a.config = model_config_from_json(meta.at("model"), "model");
  a.tfidf = TfIdfModel::load(dir / "tfidf.bin");
  a.lsa = LsaModel::load(dir / "lsa.bin");
  a.lda = LdaModel::load(dir / "lda.bin");
  if (meta.contains("digest") && meta["digest"].get<std::uint64_t>() != a.digest()) {
    fail(ErrorKind::ArtifactFormat, dir.string() + ": artifact digest does not match artifacts.json");
  }
  return a;
}

namespace {

// Rebuilds each document's filtered token stream from its chunks (dropping the overlaps).
std::vector<std::vector<std::string>> document_streams(const std::vector<Chunk>& chunks) {
  std::vector<std::vector<std::string>> docs;
  const std::string* current = nullptr;
  std::size_t covered = 0;
  for (const auto& c : chunks) {
    if (!current || *current != c.doc_id) {
      docs.emplace_back();
      current = &c.doc_id;
      covered = c.span.start;
    }
    auto& stream = docs.back();
    const std::size_t skip = covered > c.span.start ? covered - c.span.start : 0;
    for (std::size_t i = skip; i < c.tokens.size(); ++i) stream.push_back(c.tokens[i]);
    covered = std::max(covered, c.span.end);
  }
  return docs;
}

}  // namespace

TrainedArtifacts fit_artifacts(const std::vector<Chunk>& chunks, const ModelConfig& config) {
  config.pipeline.validate();
  config.lda.validate();
  auto built = build_matrix(chunks, config.sparse.min_df, config.sparse.max_df_ratio);

  TrainedArtifacts a;
  a.config = config;
  a.tfidf = TfIdfModel(built.vocabulary, chunks.size(), config.sparse.idf_floor_zero);
  const WeightMatrix input =
      config.lsa_input == LsaInput::TfIdf ? tfidf_matrix(a.tfidf, built.counts) : count_matrix(built.counts);
  a.lsa = fit_lsa(input, config.lsa).model;

  std::vector<std::vector<TermId>> streams;
  if (config.lda_unit == LdaUnit::Chunk) {
    streams.reserve(chunks.size());
    for (const auto& c : chunks) streams.push_back(built.vocabulary.encode(c.tokens));
  } else {
    for (const auto& doc : document_streams(chunks)) streams.push_back(built.vocabulary.encode(doc));
  }
  a.lda = fit_lda(streams, built.vocabulary, config.lda).model;
  return a;
}

std::string_view to_string(Technique t) {
  switch (t) {
    case Technique::TfIdf: return "tfidf";
    case Technique::Lsa: return "lsa";
    case Technique::Lda: return "lda";
    case Technique::Contextual: return "contextual";
    case Technique::EnrichedConcat: return "enriched-concat";
    case Technique::EnrichedWeighted: return "enriched-weighted";
    case Technique::RandomTopic: return "random-topic";
  }
  return "?";
}

Technique parse_technique(std::string_view name) {
  for (auto t : {Technique::TfIdf, Technique::Lsa, Technique::Lda, Technique::Contextual, Technique::EnrichedConcat,
                 Technique::EnrichedWeighted, Technique::RandomTopic}) {
    if (to_string(t) == name) return t;
  }
  fail(ErrorKind::ConfigError, "unknown technique '" + std::string(name) + "'");
}

Representation make_representation(Technique technique, const FusionConfig& base) {
  Representation rep;
  rep.fusion = base;
  rep.name = std::string(to_string(technique));
  switch (technique) {
    case Technique::TfIdf: rep.kind = Representation::Kind::TfIdf; break;
    case Technique::Lsa: rep.kind = Representation::Kind::Lsa; break;
    case Technique::Lda: rep.kind = Representation::Kind::Lda; break;
    case Technique::Contextual: rep.kind = Representation::Kind::Contextual; break;
    case Technique::EnrichedConcat:
      rep.kind = Representation::Kind::Fused;
      rep.fusion.strategy = FusionStrategy::Concat;
      break;
    case Technique::EnrichedWeighted:
      rep.kind = Representation::Kind::Fused;
      rep.fusion.strategy = FusionStrategy::Weighted;
      break;
    case Technique::RandomTopic:
      rep.kind = Representation::Kind::Fused;
      rep.fusion.composition = TopicComposition::Random;
      break;
  }
  return rep;
}

FeatureNeeds needs_for(const Representation& rep) {
  using K = Representation::Kind;
  return {rep.kind == K::Contextual || rep.kind == K::Fused, rep.kind != K::Contextual};
}

FeatureExtractor::FeatureExtractor(const TrainedArtifacts& artifacts, const EmbeddingProvider* provider)
    : artifacts_(artifacts), provider_(provider), tokenizer_(artifacts.config.pipeline) {}

void FeatureExtractor::add_topics(TextFeatures& f) const {
  const auto& vocab = artifacts_.tfidf.vocabulary();
  const auto column = vectorize(vocab, f.tokens);
  f.tfidf = column.length > 0 ? tfidf_vector(artifacts_.tfidf, column)
                              : WeightVector(static_cast<Eigen::Index>(vocab.size()));
  f.lsa = artifacts_.config.lsa_input == LsaInput::TfIdf ? artifacts_.lsa.project(f.tfidf)
                                                        : artifacts_.lsa.project(count_vector(vocab.size(), column));
  const auto ids = vocab.encode(f.tokens);
  f.lda = infer_mixture(artifacts_.lda, ids, artifacts_.config.fold_in_iterations, artifacts_.config.fold_in_seed);
}

std::vector<TextFeatures> FeatureExtractor::chunks(std::span<const Chunk> chunks, FeatureNeeds needs) const {
  std::vector<TextFeatures> out(chunks.size());
  std::vector<ContextVector> context;
  if (needs.context) {
    if (!provider_) fail(ErrorKind::InvalidArgument, "representation needs an embedding provider");
    context = provider_->embed_chunks(chunks);
  }
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    out[i].tokens = chunks[i].tokens;
    if (needs.context) out[i].context = std::move(context[i]);
    if (needs.topics) add_topics(out[i]);
  }
  return out;
}

TextFeatures FeatureExtractor::query(std::string_view text, FeatureNeeds needs) const {
  TextFeatures f;
  f.tokens = tokenizer_(text);
  if (needs.context) {
    if (!provider_) fail(ErrorKind::InvalidArgument, "representation needs an embedding provider");
    if (f.tokens.empty()) {
      f.context_zero = true;
    } else {
      auto q = provider_->embed_query(text, artifacts_.config.pipeline);
      f.context_zero = q.zero_evidence;
      f.context = std::move(q.vector);
    }
  }
  if (needs.topics) add_topics(f);
  return f;
}

namespace {

std::size_t topic_dim(const TrainedArtifacts& a, TopicComposition c) {
  switch (c) {
    case TopicComposition::Lsa: return a.lsa.rank();
    case TopicComposition::Lda: return a.lda.topics();
    case TopicComposition::LsaLda:
    case TopicComposition::Random: return a.lsa.rank() + a.lda.topics();
  }
  return 0;
}

std::vector<double> unit_or_throw(std::vector<double> v, const char* what) {
  if (!l2_normalize(v)) fail(ErrorKind::DegenerateResult, std::string(what) + " vector is zero");
  return v;
}

}  // namespace

Encoder::Encoder(const TrainedArtifacts& artifacts, const EmbeddingProvider* provider, Representation rep,
                 std::optional<AlignmentMap> alignment)
    : artifacts_(artifacts), provider_(provider), rep_(std::move(rep)), alignment_(std::move(alignment)) {
  using K = Representation::Kind;
  rep_.fusion.validate();
  const bool uses_context = rep_.kind == K::Contextual || rep_.kind == K::Fused;
  if (uses_context && !provider_) fail(ErrorKind::InvalidArgument, rep_.name + " needs an embedding provider");
  const bool weighted = rep_.kind == K::Fused && rep_.fusion.strategy == FusionStrategy::Weighted;
  switch (rep_.kind) {
    case K::TfIdf: dim_ = artifacts_.tfidf.vocabulary().size(); break;
    case K::Lsa: dim_ = artifacts_.lsa.rank(); break;
    case K::Lda: dim_ = artifacts_.lda.topics(); break;
    case K::Contextual: dim_ = provider_->dim(); break;
    case K::Fused:
      dim_ = weighted ? provider_->dim() : provider_->dim() + topic_dim(artifacts_, rep_.fusion.composition);
      break;
  }
  if (weighted) {
    if (!alignment_) {
      alignment_.emplace(topic_dim(artifacts_, rep_.fusion.composition), provider_->dim(), rep_.fusion.alignment_seed);
    }
    if (alignment_->topic_dim() != topic_dim(artifacts_, rep_.fusion.composition) ||
        alignment_->context_dim() != provider_->dim()) {
      fail(ErrorKind::DimensionMismatch, "alignment map shape does not match the artifacts/provider");
    }
  } else {
    alignment_.reset();
  }

  Hasher h;
  h.text("topiclens-encoder-v1");
  h.u64(static_cast<std::uint64_t>(rep_.kind));
  const auto& f = rep_.fusion;
  h.u64(static_cast<std::uint64_t>(f.strategy)).u64(std::bit_cast<std::uint64_t>(f.alpha));
  h.u64(static_cast<std::uint64_t>(f.composition));
  h.u64(std::bit_cast<std::uint64_t>(f.lsa_weight)).u64(std::bit_cast<std::uint64_t>(f.lda_weight));
  h.u64(std::bit_cast<std::uint64_t>(f.topic_weight)).u64(f.alignment_seed);
  h.u64(artifacts_.digest());
  if (uses_context) h.text(provider_->provider_id()).u64(provider_->dim());
  if (alignment_) h.bytes(alignment_->serialize());
  h.u64(dim_);
  fingerprint_ = h.digest();
}

EnrichedVector Encoder::encode(const TextFeatures& features) const {
  using K = Representation::Kind;
  EnrichedVector out;
  out.fingerprint = fingerprint_;
  auto context = [&]() -> const std::vector<double>& {
    if (features.context_zero || !features.context) fail(ErrorKind::DegenerateResult, "no contextual evidence");
    return features.context->values;
  };
  switch (rep_.kind) {
    case K::TfIdf: {
      std::vector<double> dense(dim_, 0.0);
      for (WeightVector::InnerIterator it(features.tfidf); it; ++it) dense[static_cast<std::size_t>(it.index())] = it.value();
      out.values = unit_or_throw(std::move(dense), "TF-IDF");
      break;
    }
    case K::Lsa:
      out.values = unit_or_throw({features.lsa.data(), features.lsa.data() + features.lsa.size()}, "LSA");
      break;
    case K::Lda:
      out.values = unit_or_throw(features.lda.mixture.theta, "LDA");
      break;
    case K::Contextual:
      out.values = context();
      break;
    case K::Fused: {
      std::vector<double> topic;
      if (rep_.fusion.composition == TopicComposition::Random) {
        Hasher key;
        for (const auto& t : features.tokens) key.text(t);
        topic = random_topic_vector(topic_dim(artifacts_, TopicComposition::Random),
                                    derive_seed(rep_.fusion.alignment_seed, "random-topic"), key.digest());
      } else {
        topic = topic_vector(std::optional<Eigen::VectorXd>(features.lsa), std::optional<TopicMixture>(features.lda.mixture),
                             rep_.fusion);
      }
      out.values = rep_.fusion.strategy == FusionStrategy::Concat
                       ? fuse_concat(context(), topic, rep_.fusion.topic_weight)
                       : fuse_weighted(context(), topic, *alignment_, rep_.fusion.alpha);
      break;
    }
  }
  return out;
}

std::vector<EnrichedVector> Encoder::encode_chunks(std::span<const Chunk> chunks) const {
  const FeatureExtractor fx(artifacts_, provider_);
  const auto features = fx.chunks(chunks, needs_for(rep_));
  std::vector<EnrichedVector> out;
  out.reserve(features.size());
  for (const auto& f : features) out.push_back(encode(f));
  return out;
}

EnrichedVector Encoder::encode_query(std::string_view text) const {
  const FeatureExtractor fx(artifacts_, provider_);
  const auto f = fx.query(text, needs_for(rep_));
  if (f.tokens.empty()) fail(ErrorKind::DegenerateResult, "query has no tokens after normalization");
  return encode(f);
}

EnrichedVector enrich_query(std::string_view text, const Encoder& encoder, std::uint64_t index_fingerprint) {
  if (encoder.fingerprint() != index_fingerprint) {
    fail(ErrorKind::FingerprintMismatch, "query transform does not match the index it is searched against");
  }
  return encoder.encode_query(text);
}

}  // namespace topiclens
