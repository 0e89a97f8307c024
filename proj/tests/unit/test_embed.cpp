#include <atomic>
#include <fstream>
#include <thread>

#include "doctest.h"
#include "helpers.hpp"
#include "httplib.h"
#include "json.hpp"
#include "oracles/hash_embed.hpp"
#include "topiclens/embed.hpp"

using namespace topiclens;
using testing::error_kind;
using testing::make_chunk;

namespace {

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

PipelineConfig plain() {
  PipelineConfig c;
  c.stopword_list = "none";
  return c;
}

/// Toy embedding service: vector i of a batch is a deterministic function of the text.
class ToyServer {
 public:
  explicit ToyServer(std::size_t dim, int fail_first = 0) : dim_(dim), failures_left_(fail_first) {
    server_.Post("/embed", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      if (failures_left_-- > 0) {
        res.status = 503;
        return;
      }
      const auto body = nlohmann::json::parse(req.body);
      nlohmann::json rows = nlohmann::json::array();
      for (const auto& text : body.at("input")) {
        std::vector<double> v(dim_, 0.0);
        const auto s = text.get<std::string>();
        for (std::size_t i = 0; i < s.size(); ++i) v[(static_cast<unsigned char>(s[i]) + i) % dim_] += 1.0;
        rows.push_back(v);
      }
      res.set_content(nlohmann::json{{"embeddings", rows}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~ToyServer() {
    server_.stop();
    thread_.join();
  }
  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/embed"; }
  int requests() const { return requests_; }

 private:
  httplib::Server server_;
  std::size_t dim_;
  std::atomic<int> failures_left_;
  std::atomic<int> requests_{0};
  int port_ = 0;
  std::thread thread_;
};

}  // namespace

TEST_SUITE("embed") {
  TEST_CASE("hash provider matches an independent reimplementation") {
    const HashEmbeddingProvider p(384, 11);
    const auto chunks = testing::random_chunks(20, 500, 1, 40, 4);
    const auto out = p.embed_chunks(chunks);
    REQUIRE(out.size() == chunks.size());
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      const auto expected = oracle::hash_embed(chunks[i].tokens, 384, 11);
      CHECK(out[i].values == expected);
      CHECK(norm(out[i].values) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(out[i].provider_id == p.provider_id());
    }
  }

  TEST_CASE("hash provider queries go through the tokenizer") {
    const HashEmbeddingProvider p(64, 3);
    const auto chunk = p.embed_chunks(std::vector<Chunk>{make_chunk("d", {"ley", "19.640"})}).front();
    const auto query = p.embed_query("LEY 19.640!", plain());
    CHECK_FALSE(query.zero_evidence);
    CHECK(query.vector.values == chunk.values);
    CHECK(p.embed_query("...", plain()).zero_evidence);
    CHECK(HashEmbeddingProvider(64, 4).embed_query("ley", plain()).vector.values !=
          p.embed_query("ley", plain()).vector.values);
  }

  TEST_CASE("file provider round-trip") {
    const auto dir = testing::scratch_dir("embfile");
    std::vector<std::pair<std::string, std::vector<double>>> records;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int i = 0; i < 10; ++i) {
      std::vector<double> v(16);
      for (auto& x : v) x = g(rng);
      records.emplace_back("d" + std::to_string(i) + "#0", v);
    }
    write_embedding_file(dir / "emb.tlemb", 16, records);
    const FileEmbeddingProvider p(dir / "emb.tlemb", 16);
    CHECK(p.size() == 10);
    CHECK(p.dim() == 16);
    std::vector<Chunk> chunks;
    for (int i = 0; i < 10; ++i) chunks.push_back(make_chunk("d" + std::to_string(i), {"x"}));
    const auto out = p.embed_chunks(chunks);
    for (std::size_t i = 0; i < out.size(); ++i) {
      CHECK(norm(out[i].values) == doctest::Approx(1.0).epsilon(1e-9));
      const double scale = norm(records[i].second);
      for (std::size_t j = 0; j < 16; ++j) CHECK(out[i].values[j] == doctest::Approx(records[i].second[j] / scale));
    }
    chunks.push_back(make_chunk("absent", {"x"}));
    CHECK(error_kind([&] { p.embed_chunks(chunks); }) == ErrorKind::MissingEmbedding);
    CHECK(error_kind([&] { FileEmbeddingProvider(dir / "emb.tlemb", 32); }) == ErrorKind::DimensionMismatch);
    CHECK(error_kind([&] { p.embed_query("x", plain()); }) == ErrorKind::InvalidArgument);
  }

  TEST_CASE("file provider rejects malformed files") {
    const auto dir = testing::scratch_dir("embbad");
    auto write = [&](const std::string& name, const std::string& body) {
      std::ofstream(dir / name) << body;
      return dir / name;
    };
    CHECK(error_kind([&] { FileEmbeddingProvider(write("h.tlemb", "EMB dim=2\na\t1,0\n")); }) == ErrorKind::ParseError);
    CHECK(error_kind([&] { FileEmbeddingProvider(write("n.tlemb", "TLEMB v1 dim=2\na\t1,0,3\n")); }) ==
          ErrorKind::DimensionMismatch);
    CHECK(error_kind([&] { FileEmbeddingProvider(write("v.tlemb", "TLEMB v1 dim=2\na\t1,x\n")); }) == ErrorKind::ParseError);
    CHECK(error_kind([&] { FileEmbeddingProvider(write("d.tlemb", "TLEMB v1 dim=2\na\t1,0\na\t0,1\n")); }) ==
          ErrorKind::DuplicateId);
    CHECK(error_kind([&] { FileEmbeddingProvider(write("z.tlemb", "TLEMB v1 dim=2\na\t0,0\n")); }) ==
          ErrorKind::DegenerateResult);
    CHECK(error_kind([&] { FileEmbeddingProvider(dir / "nope.tlemb"); }) == ErrorKind::IoError);
  }

  TEST_CASE("http provider batches, preserves order and retries") {
    ToyServer server(12, 1);
    EmbeddingProviderConfig cfg;
    cfg.kind = ProviderKind::Http;
    cfg.dim = 12;
    cfg.endpoint = server.endpoint();
    cfg.batch_size = 3;
    cfg.max_in_flight = 2;
    cfg.retries = 2;
    cfg.timeout = std::chrono::milliseconds(5000);
    const HttpEmbeddingProvider p(cfg);
    const auto chunks = testing::random_chunks(8, 50, 2, 6, 9);
    const auto batched = p.embed_chunks(chunks);
    REQUIRE(batched.size() == 8);
    for (std::size_t i = 0; i < chunks.size(); ++i) {
      EmbeddingProviderConfig one = cfg;
      one.batch_size = 1;
      const auto single = HttpEmbeddingProvider(one).embed_chunks(std::span(&chunks[i], 1));
      CHECK(single.front().values == batched[i].values);
      CHECK(norm(batched[i].values) == doctest::Approx(1.0));
    }
    CHECK(server.requests() >= 4);
    const auto q = p.embed_query(chunk_text(chunks[2]), plain());
    CHECK(q.vector.values == batched[2].values);
    CHECK(p.embed_query("¿?", plain()).zero_evidence);
  }

  TEST_CASE("http provider reports transport and shape failures") {
    ToyServer server(12, 100);
    EmbeddingProviderConfig cfg;
    cfg.kind = ProviderKind::Http;
    cfg.dim = 12;
    cfg.endpoint = server.endpoint();
    cfg.retries = 1;
    const auto chunks = testing::random_chunks(2, 10, 2, 3, 1);
    CHECK(error_kind([&] { HttpEmbeddingProvider(cfg).embed_chunks(chunks); }) == ErrorKind::TransportError);

    ToyServer healthy(12);
    cfg.endpoint = healthy.endpoint();
    cfg.dim = 16;
    CHECK(error_kind([&] { HttpEmbeddingProvider(cfg).embed_chunks(chunks); }) == ErrorKind::DimensionMismatch);
    cfg.endpoint = "127.0.0.1:1/embed";
    CHECK(error_kind([&] { HttpEmbeddingProvider{cfg}; }) == ErrorKind::ConfigError);
  }

  TEST_CASE("provider config validation") {
    EmbeddingProviderConfig cfg;
    cfg.dim = 4;
    CHECK(error_kind([&] { cfg.validate(); }) == ErrorKind::ConfigError);
    cfg.dim = 16;
    cfg.kind = ProviderKind::File;
    CHECK(error_kind([&] { cfg.validate(); }) == ErrorKind::ConfigError);
    CHECK(parse_provider_kind("http") == ProviderKind::Http);
    CHECK(error_kind([] { parse_provider_kind("onnx"); }) == ErrorKind::ConfigError);
    std::vector<double> zero(3, 0.0);
    CHECK_FALSE(l2_normalize(zero));
  }
}
