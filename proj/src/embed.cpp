#include "topiclens/embed.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "topiclens/error.hpp"
#include "topiclens/hashing.hpp"

namespace topiclens {

void EmbeddingProviderConfig::validate() const {
  if (dim < 8) fail(ErrorKind::ConfigError, "embedding.dim must be >= 8");
  switch (kind) {
    case ProviderKind::File:
      if (path.empty()) fail(ErrorKind::ConfigError, "embedding.path is required for the file provider");
      break;
    case ProviderKind::Http:
      if (endpoint.empty()) fail(ErrorKind::ConfigError, "embedding.endpoint is required for the http provider");
      if (batch_size < 1 || max_in_flight < 1) {
        fail(ErrorKind::ConfigError, "embedding.batch_size and embedding.max_in_flight must be >= 1");
      }
      break;
    case ProviderKind::Hash:
      break;
  }
}

ProviderKind parse_provider_kind(std::string_view name) {
  if (name == "hash") return ProviderKind::Hash;
  if (name == "file") return ProviderKind::File;
  if (name == "http") return ProviderKind::Http;
  fail(ErrorKind::ConfigError, "unknown embedding provider '" + std::string(name) + "'");
}

std::string_view to_string(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::File: return "file";
    case ProviderKind::Hash: return "hash";
    case ProviderKind::Http: return "http";
  }
  return "?";
}

bool l2_normalize(std::vector<double>& values) {
  double sq = 0.0;
  for (double v : values) sq += v * v;
  if (!(sq > 0.0) || !std::isfinite(sq)) return false;
  const double inv = 1.0 / std::sqrt(sq);
  for (double& v : values) v *= inv;
  return true;
}

// ---------------------------------------------------------------- hash

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim_ < 8) fail(ErrorKind::ConfigError, "hash provider dim must be >= 8");
}

std::string HashEmbeddingProvider::provider_id() const {
  return "hash:dim=" + std::to_string(dim_) + ":seed=" + std::to_string(seed_);
}

std::vector<double> HashEmbeddingProvider::raw(std::span<const std::string> tokens) const {
  std::vector<double> v(dim_, 0.0);
  for (const auto& t : tokens) {
    for (std::uint64_t j = 0; j < 3; ++j) {
      const std::uint64_t h = splitmix64(fnv1a64(t, splitmix64(seed_ + j)));
      v[h % dim_] += (h >> 63) == 0 ? 1.0 : -1.0;
    }
  }
  return v;
}

std::vector<ContextVector> HashEmbeddingProvider::embed_chunks(std::span<const Chunk> chunks) const {
  std::vector<ContextVector> out;
  out.reserve(chunks.size());
  const auto id = provider_id();
  for (const auto& c : chunks) {
    auto v = raw(c.tokens);
    if (!l2_normalize(v)) fail(ErrorKind::DegenerateResult, "hash embedding of " + c.chunk_id + " is zero");
    out.push_back({std::move(v), id});
  }
  return out;
}

QueryEmbedding HashEmbeddingProvider::embed_query(std::string_view text, const PipelineConfig& pipeline) const {
  const auto tokens = tokenize(text, pipeline);
  QueryEmbedding q;
  q.vector.provider_id = provider_id();
  q.vector.values = raw(tokens);
  q.zero_evidence = !l2_normalize(q.vector.values);
  return q;
}

// ---------------------------------------------------------------- file

namespace {

std::size_t parse_header_dim(const std::string& header, const std::string& source) {
  constexpr std::string_view prefix = "TLEMB v1 dim=";
  if (header.rfind(prefix, 0) != 0) fail(ErrorKind::ParseError, source + ":1: expected 'TLEMB v1 dim=<D>' header");
  std::size_t dim = 0;
  const char* first = header.data() + prefix.size();
  const char* last = header.data() + header.size();
  auto [ptr, ec] = std::from_chars(first, last, dim);
  if (ec != std::errc() || ptr != last || dim == 0) fail(ErrorKind::ParseError, source + ":1: bad dimension");
  return dim;
}

}  // namespace

FileEmbeddingProvider::FileEmbeddingProvider(const std::filesystem::path& path, std::size_t expected_dim)
    : path_(path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open embedding file " + path.string());
  const auto source = path.string();
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::ParseError, source + ": empty embedding file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  dim_ = parse_header_dim(line, source);
  if (expected_dim != 0 && expected_dim != dim_) {
    fail(ErrorKind::DimensionMismatch, source + ": header dim=" + std::to_string(dim_) + ", configured " +
                                           std::to_string(expected_dim));
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto where = source + ":" + std::to_string(line_no);
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) fail(ErrorKind::ParseError, where + ": expected '<chunk_id>\\t<values>'");
    std::string id = line.substr(0, tab);
    std::vector<double> values;
    values.reserve(dim_);
    std::size_t pos = tab + 1;
    while (pos <= line.size()) {
      auto comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      const std::string field = line.substr(pos, comma - pos);
      char* end = nullptr;
      const float v = std::strtof(field.c_str(), &end);
      if (field.empty() || end != field.c_str() + field.size() || !std::isfinite(v)) {
        fail(ErrorKind::ParseError, where + ": bad value '" + field + "'");
      }
      values.push_back(static_cast<double>(v));
      pos = comma + 1;
    }
    if (values.size() != dim_) {
      fail(ErrorKind::DimensionMismatch, where + ": " + std::to_string(values.size()) + " values, header says " +
                                             std::to_string(dim_));
    }
    if (!l2_normalize(values)) fail(ErrorKind::DegenerateResult, where + ": zero vector for " + id);
    if (!vectors_.emplace(id, std::move(values)).second) fail(ErrorKind::DuplicateId, where + ": " + id);
  }
}

std::string FileEmbeddingProvider::provider_id() const {
  return "file:" + path_.filename().string() + ":dim=" + std::to_string(dim_);
}

std::vector<ContextVector> FileEmbeddingProvider::embed_chunks(std::span<const Chunk> chunks) const {
  std::vector<ContextVector> out;
  out.reserve(chunks.size());
  const auto id = provider_id();
  for (const auto& c : chunks) {
    auto it = vectors_.find(c.chunk_id);
    if (it == vectors_.end()) fail(ErrorKind::MissingEmbedding, c.chunk_id);
    out.push_back({it->second, id});
  }
  return out;
}

QueryEmbedding FileEmbeddingProvider::embed_query(std::string_view, const PipelineConfig&) const {
  fail(ErrorKind::InvalidArgument, "the file provider only serves precomputed chunk vectors; use http for queries");
}

void write_embedding_file(const std::filesystem::path& path, std::size_t dim,
                          const std::vector<std::pair<std::string, std::vector<double>>>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  out << "TLEMB v1 dim=" << dim << '\n';
  out << std::setprecision(9);
  for (const auto& [id, values] : records) {
    if (values.size() != dim) fail(ErrorKind::DimensionMismatch, id);
    out << id << '\t';
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out << ',';
      out << static_cast<float>(values[i]);
    }
    out << '\n';
  }
}

std::unique_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config) {
  config.validate();
  switch (config.kind) {
    case ProviderKind::Hash: return std::make_unique<HashEmbeddingProvider>(config.dim, config.seed);
    case ProviderKind::File: return std::make_unique<FileEmbeddingProvider>(config.path, config.dim);
    case ProviderKind::Http: return std::make_unique<HttpEmbeddingProvider>(config);
  }
  fail(ErrorKind::ConfigError, "unknown provider kind");
}

}  // namespace topiclens
