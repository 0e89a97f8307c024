#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace topiclens {

struct Document {
  std::string doc_id;
  std::string text;
  std::map<std::string, std::string> metadata;
  bool operator==(const Document&) const = default;
};

/// Half-open [start, end) range of positions in a document's filtered token stream.
struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - start; }
  bool operator==(const TokenSpan&) const = default;
};

struct Chunk {
  std::string chunk_id;  // doc_id + "#" + ordinal
  std::string doc_id;
  std::vector<std::string> tokens;
  TokenSpan span;
  bool operator==(const Chunk&) const = default;
};

struct PipelineConfig {
  std::size_t chunk_size = 500;
  std::size_t overlap = 50;
  // "spanish", "english", "none", or a path to a file with one stopword per line.
  std::string stopword_list = "spanish";
  bool lowercase = true;
  bool keep_numbers = true;

  void validate() const;
};

std::string make_chunk_id(std::string_view doc_id, std::size_t ordinal);

/// Word tokenizer: maximal runs of Unicode letters, digits and combining marks;
/// '.' and ',' are kept when both neighbours are word characters ("19.640").
class Tokenizer {
 public:
  explicit Tokenizer(const PipelineConfig& config);
  Tokenizer(const PipelineConfig& config, std::unordered_set<std::string> stopwords);

  std::vector<std::string> operator()(std::string_view text) const;

  const std::unordered_set<std::string>& stopwords() const noexcept { return stopwords_; }

 private:
  bool lowercase_;
  bool keep_numbers_;
  std::unordered_set<std::string> stopwords_;
};

std::vector<std::string> tokenize(std::string_view text, const PipelineConfig& config);

/// Resolves a builtin list name or reads a stopword file; entries are lowercased when `lowercase`.
std::unordered_set<std::string> load_stopwords(const std::string& source, bool lowercase);

std::vector<Chunk> chunk_tokens(std::string_view doc_id, const std::vector<std::string>& tokens,
                                const PipelineConfig& config);
std::vector<Chunk> chunk_document(const Document& doc, const Tokenizer& tokenizer, const PipelineConfig& config);
std::vector<Chunk> chunk_document(const Document& doc, const PipelineConfig& config);

/// Tokens joined by single spaces; re-tokenizing it reproduces the chunk's tokens.
std::string chunk_text(const Chunk& chunk);

struct IngestResult {
  std::vector<Document> documents;  // sorted by doc_id
  std::vector<Chunk> chunks;        // document order, then ordinal
};

std::vector<Document> read_documents_jsonl(const std::filesystem::path& path);
IngestResult ingest_documents(std::vector<Document> docs, const PipelineConfig& config);
IngestResult ingest_jsonl(const std::filesystem::path& path, const PipelineConfig& config);

void write_chunk_dump(const std::filesystem::path& path, const std::vector<Chunk>& chunks);
std::vector<Chunk> read_chunk_dump(const std::filesystem::path& path);

}  // namespace topiclens
