#include "topiclens/eval/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "topiclens/error.hpp"
#include "topiclens/stats.hpp"

namespace topiclens {

namespace {
constexpr std::size_t kGridSteps = 20;
}

void Judgments::add(const std::string& query_id, std::string text, std::set<std::string> relevant_ids) {
  if (relevant_ids.empty()) fail(ErrorKind::InvalidArgument, "query '" + query_id + "' has no relevant chunks");
  if (!relevant.emplace(query_id, std::move(relevant_ids)).second) {
    fail(ErrorKind::DuplicateId, "duplicate query_id '" + query_id + "'");
  }
  query_text[query_id] = std::move(text);
}

const std::set<std::string>& Judgments::relevant_for(const std::string& query_id) const {
  auto it = relevant.find(query_id);
  if (it == relevant.end()) fail(ErrorKind::MissingJudgments, "no judgments for query '" + query_id + "'");
  return it->second;
}

Judgments read_judgments(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open judgments file " + path.string());
  Judgments j;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    try {
      const auto obj = nlohmann::json::parse(line);
      std::set<std::string> rel;
      for (const auto& id : obj.at("relevant")) rel.insert(id.get<std::string>());
      j.add(obj.at("query_id").get<std::string>(), obj.value("query_text", std::string{}), std::move(rel));
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::ParseError, where + ": " + e.what());
    } catch (const Error& e) {
      fail(e.kind(), where + ": " + e.what());
    }
  }
  return j;
}

void write_judgments(const std::filesystem::path& path, const Judgments& judgments) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path.string());
  for (const auto& [id, rel] : judgments.relevant) {
    nlohmann::json obj;
    obj["query_id"] = id;
    auto text = judgments.query_text.find(id);
    obj["query_text"] = text == judgments.query_text.end() ? std::string{} : text->second;
    obj["relevant"] = std::vector<std::string>(rel.begin(), rel.end());
    out << obj.dump() << '\n';
  }
  if (!out) fail(ErrorKind::IoError, "write failed: " + path.string());
}

PrfScore prf_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant, std::size_t k) {
  if (k == 0) fail(ErrorKind::InvalidArgument, "k must be at least 1");
  if (relevant.empty()) fail(ErrorKind::InvalidArgument, "relevance set is empty");
  const std::size_t depth = std::min(k, ranked.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < depth; ++i) hits += relevant.contains(ranked[i]);
  PrfScore s;
  s.k = k;
  s.precision = static_cast<double>(hits) / static_cast<double>(k);
  s.recall = static_cast<double>(hits) / static_cast<double>(relevant.size());
  // 2PR / (P + R) reduced to one rounding, so rational values come out exact
  s.f1 = static_cast<double>(2 * hits) / static_cast<double>(k + relevant.size());
  return s;
}

std::vector<PrfScore> retrieval_metrics(std::span<const RankedQuery> results, const Judgments& judgments,
                                        std::span<const std::size_t> ks) {
  if (results.empty()) fail(ErrorKind::InvalidArgument, "no queries to score");
  std::vector<PrfScore> out;
  for (auto k : ks) {
    PrfScore mean;
    mean.k = k;
    for (const auto& q : results) {
      const auto s = prf_at_k(q.ranked, judgments.relevant_for(q.query_id), k);
      mean.precision += s.precision;
      mean.recall += s.recall;
      mean.f1 += s.f1;
    }
    const auto n = static_cast<double>(results.size());
    mean.precision /= n;
    mean.recall /= n;
    mean.f1 /= n;
    out.push_back(mean);
  }
  return out;
}

std::vector<double> recall_grid() {
  std::vector<double> grid(kGridSteps + 1);
  for (std::size_t i = 0; i <= kGridSteps; ++i) grid[i] = static_cast<double>(i) / static_cast<double>(kGridSteps);
  return grid;
}

std::vector<double> interpolated_precision(std::span<const std::string> ranked, const std::set<std::string>& relevant) {
  if (relevant.empty()) fail(ErrorKind::InvalidArgument, "relevance set is empty");
  // (recall, precision) after each relevant hit; the envelope only changes there.
  std::vector<std::pair<double, double>> points;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (!relevant.contains(ranked[i])) continue;
    ++hits;
    points.emplace_back(static_cast<double>(hits) / static_cast<double>(relevant.size()),
                        static_cast<double>(hits) / static_cast<double>(i + 1));
  }
  for (std::size_t i = points.size(); i-- > 1;) points[i - 1].second = std::max(points[i - 1].second, points[i].second);
  std::vector<double> out;
  std::size_t p = 0;
  for (std::size_t g = 0; g <= kGridSteps; ++g) {
    // grid point g is reached once hits / |relevant| >= g / steps, compared exactly in integers
    while (p < points.size() && (p + 1) * kGridSteps < g * relevant.size()) ++p;
    out.push_back(p < points.size() ? points[p].second : 0.0);
  }
  return out;
}

std::vector<double> per_seed_pr(std::span<const RankedQuery> results, const Judgments& judgments) {
  if (results.empty()) fail(ErrorKind::InvalidArgument, "no queries to score");
  std::vector<double> mean(kGridSteps + 1, 0.0);
  for (const auto& q : results) {
    const auto p = interpolated_precision(q.ranked, judgments.relevant_for(q.query_id));
    for (std::size_t g = 0; g < mean.size(); ++g) mean[g] += p[g];
  }
  for (auto& m : mean) m /= static_cast<double>(results.size());
  return mean;
}

std::vector<PrPoint> pr_curve(std::span<const std::vector<RankedQuery>> per_seed, const Judgments& judgments) {
  if (per_seed.empty()) fail(ErrorKind::InvalidArgument, "no seeds to average");
  std::vector<std::vector<double>> curves;
  for (const auto& seed : per_seed) curves.push_back(per_seed_pr(seed, judgments));
  const auto grid = recall_grid();
  std::vector<PrPoint> out;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    std::vector<double> values;
    for (const auto& c : curves) values.push_back(c[g]);
    const auto s = summarize(values);
    out.push_back({grid[g], s.mean, s.sd});
  }
  return out;
}

}  // namespace topiclens
