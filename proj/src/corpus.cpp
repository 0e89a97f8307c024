#include "topiclens/corpus.hpp"

#include <unicode/uchar.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <fstream>
#include "json.hpp"
#include <unordered_map>

#include "topiclens/error.hpp"
#include "topiclens/stopwords.hpp"

namespace topiclens {

using nlohmann::json;

void PipelineConfig::validate() const {
  if (chunk_size < 1) fail(ErrorKind::ConfigError, "chunk_size must be >= 1");
  if (overlap >= chunk_size) fail(ErrorKind::ConfigError, "overlap must be < chunk_size");
}

std::string make_chunk_id(std::string_view doc_id, std::size_t ordinal) {
  std::string id(doc_id);
  id += '#';
  id += std::to_string(ordinal);
  return id;
}

namespace {

bool is_word_char(UChar32 c) {
  if (u_isalnum(c)) return true;
  const auto type = u_charType(c);
  return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK;
}

std::string to_lower(std::string_view token) {
  std::string out;
  icu::UnicodeString::fromUTF8(icu::StringPiece(token.data(), static_cast<int32_t>(token.size())))
      .toLower(icu::Locale::getRoot())
      .toUTF8String(out);
  return out;
}

bool is_numeric_token(std::string_view token) {
  const auto* s = reinterpret_cast<const uint8_t*>(token.data());
  const auto n = static_cast<int32_t>(token.size());
  for (int32_t i = 0; i < n;) {
    UChar32 c;
    U8_NEXT(s, i, n, c);
    if (c >= 0 && u_isalpha(c)) return false;
  }
  return true;
}

}  // namespace

std::unordered_set<std::string> load_stopwords(const std::string& source, bool lowercase) {
  std::unordered_set<std::string> words;
  auto add = [&](std::string_view w) {
    if (!w.empty()) words.insert(lowercase ? to_lower(w) : std::string(w));
  };
  if (source == "none" || source.empty()) return words;
  if (source == "spanish") {
    for (auto w : stopwords::spanish()) add(w);
    return words;
  }
  if (source == "english") {
    for (auto w : stopwords::english()) add(w);
    return words;
  }
  std::ifstream in(source);
  if (!in) fail(ErrorKind::IoError, "cannot open stopword file " + source);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    add(std::string_view(line).substr(first));
  }
  return words;
}

Tokenizer::Tokenizer(const PipelineConfig& config)
    : Tokenizer(config, load_stopwords(config.stopword_list, config.lowercase)) {}

Tokenizer::Tokenizer(const PipelineConfig& config, std::unordered_set<std::string> stopwords)
    : lowercase_(config.lowercase), keep_numbers_(config.keep_numbers), stopwords_(std::move(stopwords)) {}

std::vector<std::string> Tokenizer::operator()(std::string_view text) const {
  std::vector<std::string> tokens;
  const auto* s = reinterpret_cast<const uint8_t*>(text.data());
  const auto n = static_cast<int32_t>(text.size());

  auto emit = [&](int32_t begin, int32_t end) {
    std::string token(text.substr(static_cast<std::size_t>(begin), static_cast<std::size_t>(end - begin)));
    if (lowercase_) token = to_lower(token);
    if (!keep_numbers_ && is_numeric_token(token)) return;
    if (stopwords_.contains(token)) return;
    tokens.push_back(std::move(token));
  };

  int32_t start = -1;  // byte offset of the current word, -1 when outside a word
  int32_t i = 0;
  while (i < n) {
    const int32_t here = i;
    UChar32 c;
    U8_NEXT(s, i, n, c);
    if (c >= 0 && is_word_char(c)) {
      if (start < 0) start = here;
      continue;
    }
    if (start >= 0 && (c == '.' || c == ',') && i < n) {
      int32_t peek = i;
      UChar32 next;
      U8_NEXT(s, peek, n, next);
      if (next >= 0 && is_word_char(next)) continue;
    }
    if (start >= 0) {
      emit(start, here);
      start = -1;
    }
  }
  if (start >= 0) emit(start, n);
  return tokens;
}

std::vector<std::string> tokenize(std::string_view text, const PipelineConfig& config) {
  return Tokenizer(config)(text);
}

std::vector<Chunk> chunk_tokens(std::string_view doc_id, const std::vector<std::string>& tokens,
                                const PipelineConfig& config) {
  config.validate();
  if (tokens.empty()) fail(ErrorKind::EmptyDocument, std::string(doc_id));
  const std::size_t stride = config.chunk_size - config.overlap;
  std::vector<Chunk> chunks;
  for (std::size_t start = 0;; start += stride) {
    const std::size_t end = std::min(start + config.chunk_size, tokens.size());
    Chunk chunk;
    chunk.chunk_id = make_chunk_id(doc_id, chunks.size());
    chunk.doc_id = std::string(doc_id);
    chunk.span = {start, end};
    chunk.tokens.assign(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                        tokens.begin() + static_cast<std::ptrdiff_t>(end));
    chunks.push_back(std::move(chunk));
    if (end == tokens.size()) break;
  }
  return chunks;
}

std::vector<Chunk> chunk_document(const Document& doc, const Tokenizer& tokenizer, const PipelineConfig& config) {
  return chunk_tokens(doc.doc_id, tokenizer(doc.text), config);
}

std::vector<Chunk> chunk_document(const Document& doc, const PipelineConfig& config) {
  return chunk_document(doc, Tokenizer(config), config);
}

std::string chunk_text(const Chunk& chunk) {
  std::string text;
  for (const auto& t : chunk.tokens) {
    if (!text.empty()) text += ' ';
    text += t;
  }
  return text;
}

std::vector<Document> read_documents_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open corpus " + path.string());
  std::vector<Document> docs;
  std::unordered_map<std::string, std::size_t> first_line;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      fail(ErrorKind::ParseError, where + ": " + e.what());
    }
    if (!obj.is_object()) fail(ErrorKind::ParseError, where + ": expected a JSON object");
    if (!obj.contains("id") || !obj["id"].is_string() || obj["id"].get_ref<const std::string&>().empty()) {
      fail(ErrorKind::ParseError, where + ": missing or empty string field 'id'");
    }
    if (!obj.contains("text") || !obj["text"].is_string()) {
      fail(ErrorKind::ParseError, where + ": missing string field 'text'");
    }
    Document doc;
    doc.doc_id = obj["id"].get<std::string>();
    doc.text = obj["text"].get<std::string>();
    if (obj.contains("meta")) {
      const auto& meta = obj["meta"];
      if (!meta.is_object()) fail(ErrorKind::ParseError, where + ": 'meta' must be an object");
      for (const auto& [key, value] : meta.items()) {
        if (!value.is_string()) fail(ErrorKind::ParseError, where + ": meta." + key + " must be a string");
        doc.metadata.emplace(key, value.get<std::string>());
      }
    }
    if (auto [it, inserted] = first_line.emplace(doc.doc_id, line_no); !inserted) {
      fail(ErrorKind::DuplicateId, doc.doc_id + " (lines " + std::to_string(it->second) + " and " +
                                       std::to_string(line_no) + ")");
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

IngestResult ingest_documents(std::vector<Document> docs, const PipelineConfig& config) {
  config.validate();
  std::sort(docs.begin(), docs.end(), [](const Document& a, const Document& b) { return a.doc_id < b.doc_id; });
  for (std::size_t i = 1; i < docs.size(); ++i) {
    if (docs[i].doc_id == docs[i - 1].doc_id) fail(ErrorKind::DuplicateId, docs[i].doc_id);
  }
  const Tokenizer tokenizer(config);
  IngestResult result;
  for (const auto& doc : docs) {
    if (doc.doc_id.empty()) fail(ErrorKind::ParseError, "empty doc_id");
    auto chunks = chunk_document(doc, tokenizer, config);
    result.chunks.insert(result.chunks.end(), std::make_move_iterator(chunks.begin()),
                         std::make_move_iterator(chunks.end()));
  }
  result.documents = std::move(docs);
  return result;
}

IngestResult ingest_jsonl(const std::filesystem::path& path, const PipelineConfig& config) {
  return ingest_documents(read_documents_jsonl(path), config);
}

void write_chunk_dump(const std::filesystem::path& path, const std::vector<Chunk>& chunks) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  for (const auto& c : chunks) {
    json obj = {{"chunk_id", c.chunk_id},
                {"doc_id", c.doc_id},
                {"span", {c.span.start, c.span.end}},
                {"tokens", c.tokens}};
    out << obj.dump() << '\n';
  }
}

std::vector<Chunk> read_chunk_dump(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<Chunk> chunks;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto obj = json::parse(line);
      Chunk c;
      c.chunk_id = obj.at("chunk_id").get<std::string>();
      c.doc_id = obj.at("doc_id").get<std::string>();
      const auto& span = obj.at("span");
      c.span = {span.at(0).get<std::size_t>(), span.at(1).get<std::size_t>()};
      c.tokens = obj.at("tokens").get<std::vector<std::string>>();
      chunks.push_back(std::move(c));
    } catch (const json::exception& e) {
      fail(ErrorKind::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return chunks;
}

}  // namespace topiclens
