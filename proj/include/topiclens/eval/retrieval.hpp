#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace topiclens {

struct Judgments {
  enum class Provenance { SyntheticTopic, ExplicitFile };

  Provenance provenance = Provenance::ExplicitFile;
  std::map<std::string, std::set<std::string>> relevant;  // query_id -> relevant chunk_ids, never empty
  std::map<std::string, std::string> query_text;

  void add(const std::string& query_id, std::string text, std::set<std::string> relevant_ids);
  const std::set<std::string>& relevant_for(const std::string& query_id) const;  // MissingJudgments
};

/// JSONL: {"query_id", "query_text", "relevant": [chunk_id, ...]}
Judgments read_judgments(const std::filesystem::path& path);
void write_judgments(const std::filesystem::path& path, const Judgments& judgments);

struct RankedQuery {
  std::string query_id;
  std::vector<std::string> ranked;  // best first
};

struct PrfScore {
  std::size_t k = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

PrfScore prf_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant, std::size_t k);

/// Macro average over queries, one entry per k.
std::vector<PrfScore> retrieval_metrics(std::span<const RankedQuery> results, const Judgments& judgments,
                                        std::span<const std::size_t> ks);

/// Recall grid 0.00, 0.05, ..., 1.00.
std::vector<double> recall_grid();

/// Precision envelope max_{j >= i} P_j read off at each grid recall; 0 where the recall is never reached.
std::vector<double> interpolated_precision(std::span<const std::string> ranked, const std::set<std::string>& relevant);

struct PrPoint {
  double recall = 0.0;
  double mean_precision = 0.0;
  double sd = 0.0;
};

/// Per-seed mean over queries, then mean and sample sd across seeds (sd = 0 for one seed).
std::vector<PrPoint> pr_curve(std::span<const std::vector<RankedQuery>> per_seed, const Judgments& judgments);

std::vector<double> per_seed_pr(std::span<const RankedQuery> results, const Judgments& judgments);

}  // namespace topiclens
