#pragma once

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "topiclens/corpus.hpp"
#include "topiclens/error.hpp"

namespace testing {

/// Kind of the topiclens::Error thrown by `f`, or nullopt when it returns normally.
template <typename F>
std::optional<topiclens::ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const topiclens::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("topiclens_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline topiclens::Chunk make_chunk(const std::string& id, std::vector<std::string> tokens) {
  topiclens::Chunk c;
  c.chunk_id = id + "#0";
  c.doc_id = id;
  c.span = {0, tokens.size()};
  c.tokens = std::move(tokens);
  return c;
}

/// Chunks of random tokens drawn from a vocabulary of `vocab` synthetic terms.
inline std::vector<topiclens::Chunk> random_chunks(std::size_t n, std::size_t vocab, std::size_t min_len,
                                                   std::size_t max_len, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> term(0, vocab - 1), len(min_len, max_len);
  std::vector<topiclens::Chunk> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::string> tokens(len(rng));
    for (auto& t : tokens) t = "t" + std::to_string(term(rng));
    out.push_back(make_chunk("d" + std::to_string(1000 + i), std::move(tokens)));
  }
  return out;
}

}  // namespace testing
