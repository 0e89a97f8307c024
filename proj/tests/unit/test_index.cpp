#include <fstream>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "oracles/knn_scan.hpp"
#include "topiclens/embed.hpp"
#include "topiclens/index.hpp"

using namespace topiclens;
using testing::error_kind;

namespace {

constexpr std::uint64_t kFp = 0xfeedULL;

std::vector<double> random_unit(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  l2_normalize(v);
  return v;
}

/// 200 vectors where every tenth repeats an earlier one, so exact ties occur.
std::vector<IndexEntry> corpus(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<IndexEntry> out;
  for (std::size_t i = 0; i < n; ++i) {
    auto v = (i % 10 == 9) ? out[i / 2].vector.values : random_unit(dim, rng);
    out.push_back({"c" + std::to_string(100000 + (i * 7919) % 100003), "d" + std::to_string(i / 3), {v, kFp}});
  }
  return out;
}

}  // namespace

TEST_SUITE("index") {
  TEST_CASE("knn equals the exhaustive scan, scores and tie order") {
    const auto entries = corpus(200, 24, 1);
    const auto index = VectorIndex::build(entries, kFp);
    std::vector<std::string> ids;
    std::vector<std::vector<float>> stored;
    for (const auto& e : entries) {
      ids.push_back(e.chunk_id);
      stored.emplace_back(e.vector.values.begin(), e.vector.values.end());
    }
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
      // half the queries point exactly at stored vectors, whose duplicates then tie at the top
      const auto q = trial % 2 ? entries[static_cast<std::size_t>(trial) * 9].vector.values : random_unit(24, rng);
      for (std::size_t k : {1u, 10u, 50u}) {
        const auto expected = oracle::knn_scan(ids, stored, q, k);
        const auto got = index.knn({q, kFp}, k);
        REQUIRE(got.k_returned() == expected.size());
        CHECK(got.k_requested == k);
        for (std::size_t i = 0; i < expected.size(); ++i) {
          CHECK(got.hits[i].chunk_id == expected[i].id);
          CHECK(got.hits[i].score == expected[i].score);
        }
      }
    }
  }

  TEST_CASE("self query ranks first with score one") {
    const auto entries = corpus(30, 16, 3);
    const auto index = VectorIndex::build(entries, kFp);
    const auto r = index.knn(entries[4].vector, 3);
    CHECK(r.hits.front().chunk_id == entries[4].chunk_id);
    CHECK(r.hits.front().doc_id == entries[4].doc_id);
    CHECK(r.hits.front().score == doctest::Approx(1.0).epsilon(1e-6));
    for (std::size_t i = 1; i < r.hits.size(); ++i) CHECK(r.hits[i - 1].score >= r.hits[i].score);
  }

  TEST_CASE("k beyond the index size returns everything") {
    const auto entries = corpus(3, 8, 4);
    const auto index = VectorIndex::build(entries, kFp);
    CHECK(index.size() == 3);
    const auto r = index.knn(entries[0].vector, 10);
    CHECK(r.k_returned() == 3);
    CHECK(r.k_requested == 10);
  }

  TEST_CASE("persistence is bit exact") {
    const auto entries = corpus(50, 12, 5);
    const auto index = VectorIndex::build(entries, kFp, {{"technique", "test"}});
    const auto dir = testing::scratch_dir("index");
    index.save(dir);
    const auto loaded = VectorIndex::load(dir);
    REQUIRE(loaded.size() == index.size());
    CHECK(loaded.fingerprint() == kFp);
    CHECK(loaded.manifest().at("technique") == "test");
    for (std::size_t i = 0; i < index.size(); ++i) {
      CHECK(loaded.chunk_id(i) == index.chunk_id(i));
      CHECK(loaded.doc_id(i) == index.doc_id(i));
      const auto a = index.vector(i), b = loaded.vector(i);
      CHECK(std::equal(a.begin(), a.end(), b.begin()));
    }
    const auto q = entries[7].vector;
    const auto x = index.knn(q, 10), y = loaded.knn(q, 10);
    for (std::size_t i = 0; i < 10; ++i) {
      CHECK(x.hits[i].chunk_id == y.hits[i].chunk_id);
      CHECK(x.hits[i].score == y.hits[i].score);
    }
  }

  TEST_CASE("corrupted or inconsistent files are rejected") {
    const auto index = VectorIndex::build(corpus(5, 8, 6), kFp);
    const auto dir = testing::scratch_dir("index_bad");
    index.save(dir);
    {
      auto manifest = index.manifest();
      manifest["fingerprint"] = 1;
      std::ofstream(dir / "manifest.json") << manifest.dump();
    }
    CHECK(error_kind([&] { VectorIndex::load(dir); }) == ErrorKind::FingerprintMismatch);
    std::filesystem::remove(dir / "vectors.bin");
    CHECK(error_kind([&] { VectorIndex::load(dir); }) == ErrorKind::IoError);
  }

  TEST_CASE("build validation") {
    auto entries = corpus(4, 8, 7);
    CHECK(error_kind([] { VectorIndex::build({}, kFp); }) == ErrorKind::EmptyIndex);
    auto dup = entries;
    dup[2].chunk_id = dup[0].chunk_id;
    CHECK(error_kind([&] { VectorIndex::build(dup, kFp); }) == ErrorKind::DuplicateChunkId);
    auto ragged = entries;
    ragged[1].vector.values.push_back(0.0);
    CHECK(error_kind([&] { VectorIndex::build(ragged, kFp); }) == ErrorKind::DimensionMismatch);
    auto scaled = entries;
    for (auto& x : scaled[3].vector.values) x *= 1.1;
    CHECK(error_kind([&] { VectorIndex::build(scaled, kFp); }) == ErrorKind::DimensionMismatch);
    auto foreign = entries;
    foreign[0].vector.fingerprint = 2;
    CHECK(error_kind([&] { VectorIndex::build(foreign, kFp); }) == ErrorKind::FingerprintMismatch);
  }

  TEST_CASE("query validation") {
    const auto entries = corpus(4, 8, 8);
    const auto index = VectorIndex::build(entries, kFp);
    CHECK(error_kind([&] { index.knn(entries[0].vector, 0); }) == ErrorKind::InvalidArgument);
    CHECK(error_kind([&] { index.knn({entries[0].vector.values, 3}, 1); }) == ErrorKind::FingerprintMismatch);
    CHECK(error_kind([&] { index.knn({std::vector<double>(5, 0.2), kFp}, 1); }) == ErrorKind::DimensionMismatch);
    const VectorIndex empty;
    CHECK(error_kind([&] { empty.knn(entries[0].vector, 1); }) == ErrorKind::EmptyIndex);
  }

  TEST_CASE("identical queries give identical results") {
    const auto entries = corpus(100, 10, 9);
    const auto index = VectorIndex::build(entries, kFp);
    const auto a = index.knn(entries[11].vector, 20), b = index.knn(entries[11].vector, 20);
    for (std::size_t i = 0; i < 20; ++i) {
      CHECK(a.hits[i].chunk_id == b.hits[i].chunk_id);
      CHECK(a.hits[i].score == b.hits[i].score);
    }
  }
}
