#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topiclens/config.hpp"
#include "topiclens/eval/clustering.hpp"
#include "topiclens/eval/retrieval.hpp"
#include "topiclens/stats.hpp"

namespace topiclens {

struct Variant {
  std::string name;
  Representation rep;
};

std::vector<Variant> technique_variants(const std::vector<Technique>& techniques, const FusionConfig& fusion);

/// The seven rows of the ablation grid, in reporting order.
std::vector<Variant> ablation_variants(const FusionConfig& fusion);

struct ProtocolInput {
  std::vector<Document> documents;     // labelled through metadata[eval.label_key] unless judgments is set
  std::optional<Judgments> judgments;  // explicit queries; relevance restricted to indexed chunks
};

struct Split {
  std::vector<std::string> train;  // doc_ids, sorted
  std::vector<std::string> test;
};

/// Depends only on the sorted doc_ids and the seed, never on document content.
Split split_documents(std::vector<std::string> doc_ids, std::uint64_t seed, double train_fraction);

/// Per-stage seeds for one protocol seed.
ModelConfig seeded_model(const ModelConfig& base, std::uint64_t seed);
FusionConfig seeded_fusion(const FusionConfig& base, std::uint64_t seed);

struct SeedResult {
  std::uint64_t seed = 0;
  std::optional<ClusterScores> clusters;
  std::vector<PrfScore> retrieval;  // one per k
  std::vector<double> pr;           // mean interpolated precision per grid point
};

struct MetricSummary {
  std::size_t k = 0;
  Summary precision, recall, f1;
};

struct VariantReport {
  std::string name;
  std::vector<SeedResult> per_seed;  // in seed order
  std::optional<Summary> silhouette, calinski_harabasz, davies_bouldin;
  std::vector<MetricSummary> retrieval;
  std::vector<PrPoint> pr_curve;

  const MetricSummary& at_k(std::size_t k) const;
};

struct SeedStats {
  std::uint64_t seed = 0;
  std::size_t train_docs = 0, test_docs = 0, train_chunks = 0, queries = 0, skipped_queries = 0;
  std::size_t cluster_k = 0;
};

struct EvalReport {
  std::vector<std::uint64_t> seeds;
  double split = 0.0;
  std::vector<std::size_t> k_values;
  std::string judgments_provenance;
  std::vector<SeedStats> seed_stats;
  std::vector<VariantReport> variants;
  std::map<std::string, double> stage_seconds;  // summed over seeds; excluded from CSV output

  const VariantReport& variant(const std::string& name) const;
};

EvalReport run_protocol(const ProtocolInput& input, const RunConfig& config, const std::vector<Variant>& variants);
EvalReport run_protocol(const ProtocolInput& input, const RunConfig& config);
EvalReport run_ablation(const ProtocolInput& input, const RunConfig& config);

/// clustering.csv, retrieval.csv, per_seed.csv, pr_curve_<variant>.csv, report.json, report.txt
void write_eval_report(const EvalReport& report, const std::filesystem::path& dir);
/// ablation.csv, ablation.txt
void write_ablation_report(const EvalReport& report, const std::filesystem::path& dir);

std::string clustering_csv(const EvalReport& report);
std::string retrieval_csv(const EvalReport& report);
std::string per_seed_csv(const EvalReport& report);
std::string pr_curve_csv(const VariantReport& variant);
std::string ablation_csv(const EvalReport& report);
std::string eval_text(const EvalReport& report);
std::string ablation_text(const EvalReport& report);
nlohmann::json report_json(const EvalReport& report);

}  // namespace topiclens
