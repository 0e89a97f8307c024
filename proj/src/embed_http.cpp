#include <algorithm>
#include <future>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "topiclens/embed.hpp"
#include "topiclens/error.hpp"

namespace topiclens {

HttpEmbeddingProvider::HttpEmbeddingProvider(const EmbeddingProviderConfig& config) : config_(config) {
  config_.validate();
  const auto& url = config_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) fail(ErrorKind::ConfigError, "embedding.endpoint must be an http:// URL");
  const auto path_start = url.find('/', scheme_end + 3);
  host_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : url.substr(path_start);
}

std::string HttpEmbeddingProvider::provider_id() const {
  return "http:" + config_.endpoint + ":dim=" + std::to_string(config_.dim);
}

std::vector<std::vector<double>> HttpEmbeddingProvider::post_batch(const std::vector<std::string>& texts) const {
  const std::string body = nlohmann::json{{"input", texts}}.dump();
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50) * (1 << std::min<std::size_t>(attempt, 6)));
    httplib::Client client(host_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
    client.set_connection_timeout(std::max<long long>(1, secs), 0);
    client.set_read_timeout(std::max<long long>(1, secs), 0);
    auto res = client.Post(path_, body, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) fail(ErrorKind::TransportError, config_.endpoint + ": HTTP " + std::to_string(res->status));

    nlohmann::json reply;
    try {
      reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::TransportError, config_.endpoint + ": malformed reply: " + e.what());
    }
    if (!reply.contains("embeddings") || !reply["embeddings"].is_array()) {
      fail(ErrorKind::TransportError, config_.endpoint + ": reply has no 'embeddings' array");
    }
    const auto& rows = reply["embeddings"];
    if (rows.size() != texts.size()) {
      fail(ErrorKind::TransportError, config_.endpoint + ": " + std::to_string(rows.size()) + " embeddings for " +
                                          std::to_string(texts.size()) + " inputs");
    }
    std::vector<std::vector<double>> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
      auto v = row.get<std::vector<double>>();
      if (v.size() != config_.dim) {
        fail(ErrorKind::DimensionMismatch, config_.endpoint + ": got dim " + std::to_string(v.size()) +
                                               ", configured " + std::to_string(config_.dim));
      }
      out.push_back(std::move(v));
    }
    return out;
  }
  fail(ErrorKind::TransportError, config_.endpoint + ": " + last_error);
}

std::vector<std::vector<double>> HttpEmbeddingProvider::embed_texts(const std::vector<std::string>& texts) const {
  std::vector<std::vector<std::string>> batches;
  for (std::size_t i = 0; i < texts.size(); i += config_.batch_size) {
    const auto end = std::min(texts.size(), i + config_.batch_size);
    batches.emplace_back(texts.begin() + static_cast<std::ptrdiff_t>(i), texts.begin() + static_cast<std::ptrdiff_t>(end));
  }
  std::vector<std::vector<double>> out;
  out.reserve(texts.size());
  // at most max_in_flight requests outstanding; results are stitched back in order
  for (std::size_t b = 0; b < batches.size(); b += config_.max_in_flight) {
    std::vector<std::future<std::vector<std::vector<double>>>> pending;
    const auto end = std::min(batches.size(), b + config_.max_in_flight);
    for (std::size_t i = b; i < end; ++i) {
      pending.push_back(std::async(std::launch::async, [this, &batches, i] { return post_batch(batches[i]); }));
    }
    for (auto& f : pending) {
      for (auto& v : f.get()) out.push_back(std::move(v));
    }
  }
  return out;
}

std::vector<ContextVector> HttpEmbeddingProvider::embed_chunks(std::span<const Chunk> chunks) const {
  std::vector<std::string> texts;
  texts.reserve(chunks.size());
  for (const auto& c : chunks) texts.push_back(chunk_text(c));
  auto rows = embed_texts(texts);
  std::vector<ContextVector> out;
  out.reserve(rows.size());
  const auto id = provider_id();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!l2_normalize(rows[i])) fail(ErrorKind::DegenerateResult, "zero embedding for " + chunks[i].chunk_id);
    out.push_back({std::move(rows[i]), id});
  }
  return out;
}

QueryEmbedding HttpEmbeddingProvider::embed_query(std::string_view text, const PipelineConfig& pipeline) const {
  // same text normalization as chunks: filtered tokens joined by spaces
  Chunk as_chunk;
  as_chunk.tokens = tokenize(text, pipeline);
  QueryEmbedding q;
  q.vector.provider_id = provider_id();
  if (as_chunk.tokens.empty()) {
    q.vector.values.assign(config_.dim, 0.0);
    q.zero_evidence = true;
    return q;
  }
  auto rows = embed_texts({chunk_text(as_chunk)});
  q.vector.values = std::move(rows.front());
  q.zero_evidence = !l2_normalize(q.vector.values);
  return q;
}

}  // namespace topiclens
