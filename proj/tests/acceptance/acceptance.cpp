// Acceptance checks. Each criterion prints one PASS/FAIL line with the measured values;
// `acceptance <name>` runs a single criterion, no argument runs all of them.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "oracles/brute_metrics.hpp"
#include "oracles/jacobi_svd.hpp"
#include "oracles/knn_scan.hpp"
#include "oracles/tfidf_dense.hpp"
#include "support/lda_recovery.hpp"
#include "topiclens/config.hpp"
#include "topiclens/eval/protocol.hpp"
#include "topiclens/index.hpp"

using namespace topiclens;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

RunConfig synthetic_config() { return load_run_config(fs::path(TOPICLENS_SOURCE_DIR) / "configs" / "synthetic.json"); }

std::vector<Chunk> random_token_chunks(std::size_t n, std::size_t vocab, std::size_t max_len, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> term(0, vocab - 1), len(1, max_len);
  std::vector<Chunk> out;
  for (std::size_t i = 0; i < n; ++i) {
    Chunk c;
    c.doc_id = "d" + std::to_string(1000 + i);
    c.chunk_id = c.doc_id + "#0";
    c.tokens.resize(len(rng));
    for (auto& t : c.tokens) t = "t" + std::to_string(term(rng));
    c.span = {0, c.tokens.size()};
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<double> random_unit(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<double> v(n);
  for (auto& x : v) x = g(rng);
  l2_normalize(v);
  return v;
}

// ---------------------------------------------------------------------------------------------

Outcome tfidf_oracle() {
  std::mt19937_64 rng(1);
  double worst = 0, engine_seconds = 0;
  const std::size_t shapes[][2] = {{5, 8}, {20, 30}, {50, 40}, {100, 100}, {100, 60}, {30, 100}, {80, 90}, {100, 100}};
  for (const auto& shape : shapes) {
    const std::size_t docs = shape[0], vocab = shape[1];
    auto chunks = random_token_chunks(docs, vocab, 3 * vocab / 2, rng);
    const auto t0 = Clock::now();
    const auto built = build_matrix(chunks, 1, 1.0);
    const TfIdfModel model(built.vocabulary, docs);
    const Eigen::MatrixXd w = Eigen::MatrixXd(tfidf_matrix(model, built.counts));
    engine_seconds += seconds_since(t0);
    std::vector<std::vector<std::string>> tokens;
    for (const auto& c : chunks) tokens.push_back(c.tokens);
    const auto expected = oracle::tfidf_dense(tokens, 1, 1.0);
    if (expected.terms != built.vocabulary.terms()) return {false, "vocabulary differs from the oracle"};
    for (std::size_t t = 0; t < expected.terms.size(); ++t) {
      for (std::size_t d = 0; d < docs; ++d) {
        worst = std::max(worst, std::abs(w(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d)) - expected.w[t][d]));
      }
    }
  }
  return {worst <= 1e-12 && engine_seconds < 1.0,
          "max |diff| " + fmt("%.3g", worst) + " (tol 1e-12), " + fmt("%.3f", engine_seconds) + " s (budget 1 s)"};
}

Outcome svd_correctness() {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  double worst_rel = 0, worst_increase = 0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 5; ++trial) {
    Eigen::MatrixXd a(40, 60);
    for (Eigen::Index i = 0; i < 40; ++i) {
      for (Eigen::Index j = 0; j < 60; ++j) a(i, j) = u(rng) < 0.3 ? u(rng) : 0.0;
    }
    std::vector<std::vector<double>> rows(40);
    for (Eigen::Index i = 0; i < 40; ++i) {
      for (Eigen::Index j = 0; j < 60; ++j) rows[static_cast<std::size_t>(i)].push_back(a(i, j));
    }
    const auto expected = oracle::singular_values(rows);
    const WeightMatrix w = a.sparseView(0.0, 0.0);
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t r = 1; r <= 10; ++r) {
      LsaConfig cfg;
      cfg.rank = r;
      cfg.seed = static_cast<std::uint64_t>(trial);
      const auto fit = fit_lsa(w, cfg);
      for (std::size_t i = 0; i < r; ++i) {
        worst_rel = std::max(worst_rel, std::abs(fit.model.sigma()[static_cast<Eigen::Index>(i)] - expected[i]) / expected[i]);
      }
      const double err = reconstruction_error(fit.model, w);
      worst_increase = std::max(worst_increase, err - previous);
      previous = err;
    }
  }
  const double secs = seconds_since(t0);
  return {worst_rel <= 1e-6 && worst_increase <= 0.0 && secs < 5.0,
          "max rel sigma error " + fmt("%.3g", worst_rel) + " (tol 1e-6), max error increase over r " +
              fmt("%.3g", std::max(0.0, worst_increase)) + ", " + fmt("%.2f", secs) + " s (budget 5 s)"};
}

Outcome lda_recovery() {
  const auto t0 = Clock::now();
  double worst_l1 = 0, worst_acc = 1;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    SyntheticCorpusSpec spec;  // K = 4, 50 docs per topic, noise 0.05
    spec.seed = seed;
    const auto score = testing::lda_recovery(spec, seed);
    worst_l1 = std::max(worst_l1, score.worst_row_l1);
    worst_acc = std::min(worst_acc, score.accuracy);
  }
  const double secs = seconds_since(t0);
  return {worst_l1 < 0.15 && worst_acc > 0.9 && secs < 60,
          "worst matched phi row L1 " + fmt("%.4f", worst_l1) + " (< 0.15), worst accuracy " + fmt("%.4f", worst_acc) +
              " (> 0.9), 5 seeds, " + fmt("%.1f", secs) + " s (budget 60 s)"};
}

Outcome gibbs_conservation() {
  SyntheticCorpusSpec spec;
  const auto corpus = generate_synthetic(spec);
  LdaConfig cfg;
  cfg.topics = 4;
  cfg.iterations = 200;
  cfg.burn_in = 50;
  cfg.seed = 3;
  std::size_t sweeps = 0, violations = 0;
  fit_lda(corpus.token_ids, spec.vocab_size, cfg, [&](std::size_t, const GibbsCounts& c) {
    ++sweeps;
    for (std::size_t d = 0; d < corpus.token_ids.size(); ++d) {
      std::uint64_t sum = 0;
      for (std::size_t k = 0; k < c.topics; ++k) sum += c.n_dk[d * c.topics + k];
      violations += sum != corpus.token_ids[d].size();
    }
    for (std::size_t k = 0; k < c.topics; ++k) {
      std::uint64_t sum = 0;
      for (std::size_t w = 0; w < c.vocab_size; ++w) sum += c.n_wk[w * c.topics + k];
      violations += sum != c.n_k[k];
    }
  });
  return {violations == 0 && sweeps == cfg.iterations,
          std::to_string(sweeps) + " sweeps checked, " + std::to_string(violations) + " violations"};
}

Outcome fusion_boundaries() {
  const auto cfg = synthetic_config();
  const auto corpus = generate_synthetic(cfg.synthetic);
  auto chunks = ingest_documents(corpus.documents, cfg.model.pipeline).chunks;
  if (chunks.size() < 500) return {false, "synthetic corpus has only " + std::to_string(chunks.size()) + " chunks"};
  chunks.resize(500);
  const auto artifacts = fit_artifacts(chunks, cfg.model);
  const auto provider = make_provider(cfg.embedding);

  auto ranking = [&](const Encoder& enc, const VectorIndex& index, const std::string& text) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& hit : index.knn(enc.encode_query(text), index.size()).hits) out.emplace_back(hit.chunk_id, hit.score);
    return out;
  };
  auto build = [&](const Encoder& enc) {
    const auto vectors = enc.encode_chunks(chunks);
    std::vector<IndexEntry> entries;
    for (std::size_t i = 0; i < chunks.size(); ++i) entries.push_back({chunks[i].chunk_id, chunks[i].doc_id, vectors[i]});
    return VectorIndex::build(std::move(entries), enc.fingerprint());
  };

  FusionConfig weighted = cfg.fusion;
  weighted.alpha = 1.0;
  FusionConfig flat = cfg.fusion;
  flat.topic_weight = 0.0;
  const Encoder contextual(artifacts, provider.get(), make_representation(Technique::Contextual, cfg.fusion));
  const Encoder alpha_one(artifacts, provider.get(), make_representation(Technique::EnrichedWeighted, weighted));
  const Encoder zero_weight(artifacts, provider.get(), make_representation(Technique::EnrichedConcat, flat));
  const auto ic = build(contextual), iw = build(alpha_one), iz = build(zero_weight);

  std::vector<std::string> queries;
  for (const auto& q : corpus.queries) queries.push_back(q.text);
  for (std::size_t i = 0; i < chunks.size(); i += 25) queries.push_back(chunk_text(chunks[i]));
  std::size_t weighted_diffs = 0, concat_diffs = 0;
  for (const auto& q : queries) {
    const auto base = ranking(contextual, ic, q);
    weighted_diffs += ranking(alpha_one, iw, q) != base;
    const auto z = ranking(zero_weight, iz, q);
    for (std::size_t i = 0; i < base.size(); ++i) concat_diffs += z[i].first != base[i].first || z[i].second != base[i].second;
  }
  return {weighted_diffs == 0 && concat_diffs == 0,
          std::to_string(queries.size()) + " queries over 500 chunks: alpha=1 rankings differing " +
              std::to_string(weighted_diffs) + ", topic_weight=0 rank positions differing " + std::to_string(concat_diffs)};
}

Outcome knn_exactness() {
  std::mt19937_64 rng(6);
  std::vector<IndexEntry> entries;
  std::vector<std::string> ids;
  std::vector<std::vector<float>> stored;
  for (std::size_t i = 0; i < 200; ++i) {
    // every eighth vector repeats an earlier one, forcing exact ties
    auto v = i % 8 == 7 ? entries[i / 3].vector.values : random_unit(32, rng);
    const auto id = "c" + std::to_string((i * 7919) % 1000003);
    entries.push_back({id, "d" + std::to_string(i), {v, 1}});
    ids.push_back(id);
    stored.emplace_back(v.begin(), v.end());
  }
  const auto index = VectorIndex::build(entries, 1);
  std::size_t mismatches = 0, checks = 0;
  double secs = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto q = trial % 2 ? entries[static_cast<std::size_t>(trial) * 6].vector.values : random_unit(32, rng);
    for (std::size_t k : {1u, 10u, 50u}) {
      const auto t0 = Clock::now();
      const auto got = index.knn({q, 1}, k);
      secs += seconds_since(t0);
      const auto expected = oracle::knn_scan(ids, stored, q, k);
      ++checks;
      bool same = got.hits.size() == expected.size();
      for (std::size_t i = 0; same && i < expected.size(); ++i) {
        same = got.hits[i].chunk_id == expected[i].id && got.hits[i].score == expected[i].score;
      }
      mismatches += !same;
    }
  }
  return {mismatches == 0 && secs < 1.0, std::to_string(checks) + " queries, " + std::to_string(mismatches) +
                                             " mismatching rankings, " + fmt("%.4f", secs) + " s (budget 1 s)"};
}

Outcome clustering_oracles() {
  std::mt19937_64 rng(7);
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_int_distribution<std::size_t> n_dist(10, 500), k_dist(2, 8), d_dist(1, 16);
    const std::size_t n = n_dist(rng), k = k_dist(rng), d = d_dist(rng);
    std::normal_distribution<double> g;
    std::vector<std::vector<double>> centers(k, std::vector<double>(d));
    for (auto& c : centers) {
      for (auto& x : c) x = 2.5 * g(rng);
    }
    oracle::Points pts;
    std::vector<std::size_t> labels;
    PointMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const auto label = i < k ? i : pick(rng);
      std::vector<double> p(d);
      for (std::size_t j = 0; j < d; ++j) {
        p[j] = centers[label][j] + g(rng);
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = p[j];
      }
      pts.push_back(p);
      labels.push_back(label);
    }
    const auto s = cluster_scores(m, labels);
    auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };
    worst = std::max({worst, rel(s.silhouette, oracle::silhouette(pts, labels)),
                      rel(s.calinski_harabasz, oracle::calinski_harabasz(pts, labels)),
                      rel(s.davies_bouldin, oracle::davies_bouldin(pts, labels))});
  }
  PointMatrix line(4, 1);
  line << 0, 0.1, 10, 10.1;
  const double s1 = silhouette(line, std::vector<std::size_t>{0, 0, 1, 1});
  const bool oracle_ok = worst <= 1e-9, instance_ok = std::abs(s1 - 0.9896) <= 1e-4;
  return {oracle_ok && instance_ok, "20 instances max diff " + fmt("%.3g", worst) + " (tol 1e-9); 1-D instance " +
                                        fmt("%.6f", s1) + " vs 0.9896 +/- 1e-4" +
                                        (instance_ok ? "" : " (hand value from a = 0.1, b = 10.05 / 9.95 is 0.990000)")};
}

Outcome retrieval_oracle() {
  struct Case {
    std::vector<int> ranked;
    std::vector<int> relevant;
    std::size_t k;
    double p, r, f1;  // enumerated by hand
  };
  auto range = [](int a, int b) {
    std::vector<int> v;
    for (int i = a; i <= b; ++i) v.push_back(i);
    return v;
  };
  std::vector<int> seven_of_ten = range(1, 7);
  for (int x : {50, 51, 52}) seven_of_ten.push_back(x);
  const std::vector<Case> cases{
      {seven_of_ten, range(1, 14), 10, 7.0 / 10, 7.0 / 14, 7.0 / 12},
      {range(20, 29), range(1, 5), 10, 0.0, 0.0, 0.0},
      {range(1, 10), range(1, 10), 10, 1.0, 1.0, 1.0},
      {{1, 30, 2, 31, 3}, {1, 2, 3, 4}, 5, 3.0 / 5, 3.0 / 4, 2.0 / 3},
      {{30, 31, 1}, {1}, 1, 0.0, 0.0, 0.0},
      {{30, 31, 1}, {1}, 3, 1.0 / 3, 1.0, 1.0 / 2},
      {{1, 2}, {1, 2, 3}, 10, 2.0 / 10, 2.0 / 3, 4.0 / 13},
      {range(1, 20), {2, 4, 6, 8, 10, 12, 14, 16, 18, 20}, 20, 10.0 / 20, 1.0, 2.0 / 3},
      {range(1, 50), {50, 49, 1}, 20, 1.0 / 20, 1.0 / 3, 2.0 / 23},
      {{5, 4, 3, 2, 1}, {1}, 1, 0.0, 0.0, 0.0},
  };
  std::size_t failures = 0;
  for (const auto& c : cases) {
    std::vector<std::string> ranked;
    for (int x : c.ranked) ranked.push_back("c" + std::to_string(x));
    std::set<std::string> relevant;
    for (int x : c.relevant) relevant.insert("c" + std::to_string(x));
    const auto s = prf_at_k(ranked, relevant, c.k);
    failures += !(s.precision == c.p && s.recall == c.r && s.f1 == c.f1);
  }
  return {failures == 0, std::to_string(cases.size()) + " constructed pairs, " + std::to_string(failures) + " inexact"};
}

Outcome appendix_a_ordering() {
  const auto cfg = synthetic_config();
  const auto t0 = Clock::now();
  const ProtocolInput input{generate_synthetic(cfg.synthetic).documents, std::nullopt};
  const auto report = run_ablation(input, cfg);
  const double secs = seconds_since(t0);
  auto p10 = [&](const char* name) { return report.variant(name).at_k(10).precision.mean; };
  auto f10 = [&](const char* name) { return report.variant(name).at_k(10).f1.mean; };
  const double te = p10("Topic-Enriched"), co = p10("Contextual Only"), rt = p10("Random Topic Vectors");
  bool singles_ok = true;
  std::string singles;
  for (const char* name : {"+ LSA (concat)", "+ LDA (concat)", "+ LSA (weighted)", "+ LDA (weighted)"}) {
    singles_ok = singles_ok && f10(name) >= f10("Contextual Only");
    singles += std::string(", F1@10 ") + name + " " + fmt("%.4f", f10(name));
  }
  return {te > co && co > rt && singles_ok && secs < 600,
          "P@10 enriched " + fmt("%.4f", te) + " > contextual " + fmt("%.4f", co) + " > random " + fmt("%.4f", rt) +
              "; F1@10 contextual " + fmt("%.4f", f10("Contextual Only")) + singles + "; " + std::to_string(report.seeds.size()) +
              " seeds, " + fmt("%.1f", secs) + " s (budget 600 s)"};
}

Outcome table1_ordering() {
  auto cfg = synthetic_config();
  cfg.eval.techniques = {Technique::TfIdf, Technique::Lsa, Technique::Lda, Technique::Contextual,
                         Technique::EnrichedConcat};
  const ProtocolInput input{generate_synthetic(cfg.synthetic).documents, std::nullopt};
  const auto report = run_protocol(input, cfg);
  const auto& enriched = report.variant("enriched-concat");
  bool best = true;
  std::ostringstream detail;
  detail << "means over " << report.seeds.size() << " seeds (silhouette / CH / DB):";
  for (const auto& v : report.variants) {
    detail << ' ' << v.name << ' ' << fmt("%.3f", v.silhouette->mean) << '/' << fmt("%.1f", v.calinski_harabasz->mean)
           << '/' << fmt("%.3f", v.davies_bouldin->mean) << ';';
    if (v.name == enriched.name) continue;
    best = best && enriched.silhouette->mean > v.silhouette->mean &&
           enriched.calinski_harabasz->mean > v.calinski_harabasz->mean &&
           enriched.davies_bouldin->mean < v.davies_bouldin->mean;
  }
  return {best, detail.str()};
}

Outcome eval_determinism() {
  const fs::path root = fs::temp_directory_path() / "topiclens_acceptance_determinism";
  fs::remove_all(root);
  const std::string config = (fs::path(TOPICLENS_SOURCE_DIR) / "configs" / "synthetic.json").string();
  for (const char* run : {"a", "b"}) {
    const std::string cmd = std::string("\"") + TOPICLENS_CLI + "\" eval -c \"" + config + "\" --synthetic --out \"" +
                            (root / run).string() + "\" > /dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, "cli eval failed: " + cmd};
  }
  std::size_t files = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(root / "a")) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const auto other = root / "b" / entry.path().filename();
    differing += !fs::exists(other) || slurp(entry.path()) != slurp(other);
  }
  return {files > 0 && differing == 0,
          std::to_string(files) + " CSV reports compared across two cli eval runs, " + std::to_string(differing) + " differ"};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"tfidf-oracle", tfidf_oracle},
    {"svd-correctness", svd_correctness},
    {"lda-recovery", lda_recovery},
    {"gibbs-conservation", gibbs_conservation},
    {"fusion-boundaries", fusion_boundaries},
    {"knn-exactness", knn_exactness},
    {"clustering-oracles", clustering_oracles},
    {"retrieval-oracle", retrieval_oracle},
    {"appendix-a-ordering", appendix_a_ordering},
    {"table1-ordering", table1_ordering},
    {"eval-determinism", eval_determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> wanted(argv + 1, argv + argc);
  int failed = 0;
  bool matched = wanted.empty();
  for (const auto& [name, check] : kCriteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
    matched = true;
    Outcome outcome;
    try {
      outcome = check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw ") + e.what()};
    }
    std::cout << (outcome.pass ? "PASS " : "FAIL ") << name << ": " << outcome.detail << std::endl;
    failed += !outcome.pass;
  }
  if (!matched) {
    std::cerr << "unknown criterion\n";
    return 2;
  }
  return failed == 0 ? 0 : 1;
}
