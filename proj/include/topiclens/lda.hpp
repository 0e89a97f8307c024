#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "topiclens/sparse.hpp"

namespace topiclens {

struct LdaConfig {
  std::size_t topics = 12;
  std::optional<double> alpha;  // defaults to 50 / topics
  double beta = 0.01;
  std::size_t iterations = 1000;
  std::size_t burn_in = 200;
  std::size_t sample_lag = 10;
  std::uint64_t seed = 0;

  double effective_alpha() const { return alpha.value_or(50.0 / static_cast<double>(topics)); }
  void validate() const;
};

struct TopicMixture {
  std::vector<double> theta;
  std::size_t argmax() const;
};

class LdaModel {
 public:
  LdaModel() = default;
  LdaModel(std::size_t topics, std::size_t vocab_size, double alpha, double beta, std::vector<double> phi,
           std::vector<std::uint32_t> n_kw, std::vector<std::uint64_t> n_k);

  std::size_t topics() const noexcept { return topics_; }
  std::size_t vocab_size() const noexcept { return vocab_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }
  /// p(w | z = k), posterior mean over the retained samples.
  double phi(std::size_t k, TermId w) const { return phi_[k * vocab_ + w]; }
  std::span<const double> phi_row(std::size_t k) const { return {phi_.data() + k * vocab_, vocab_}; }
  std::uint32_t n_kw(std::size_t k, TermId w) const { return n_kw_[k * vocab_ + w]; }
  std::uint64_t n_k(std::size_t k) const { return n_k_[k]; }

  std::vector<std::uint8_t> serialize() const;
  static LdaModel deserialize(std::vector<std::uint8_t> bytes, const std::string& source);
  void save(const std::filesystem::path& path) const;
  static LdaModel load(const std::filesystem::path& path);

 private:
  std::size_t topics_ = 0;
  std::size_t vocab_ = 0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  std::vector<double> phi_;          // topics x vocab, row-major
  std::vector<std::uint32_t> n_kw_;  // final-sweep topic-term counts, topics x vocab
  std::vector<std::uint64_t> n_k_;
};

/// Read-only view of the sampler's count tables, handed to sweep observers.
struct GibbsCounts {
  std::size_t topics;
  std::size_t vocab_size;
  std::span<const std::uint32_t> n_dk;       // docs x topics
  std::span<const std::uint32_t> n_wk;       // vocab x topics
  std::span<const std::uint64_t> n_k;        // topics
  std::span<const std::size_t> doc_lengths;  // docs
};

using SweepObserver = std::function<void(std::size_t sweep, const GibbsCounts&)>;

struct LdaFit {
  LdaModel model;
  std::vector<TopicMixture> theta;  // per document, posterior mean
  std::size_t samples = 0;
};

LdaFit fit_lda(const std::vector<std::vector<TermId>>& docs, std::size_t vocab_size, const LdaConfig& config,
               const SweepObserver& observer = {});
LdaFit fit_lda(const std::vector<std::vector<TermId>>& docs, const Vocabulary& vocab, const LdaConfig& config,
               const SweepObserver& observer = {});

struct InferResult {
  TopicMixture mixture;
  bool degenerate = false;  // no in-vocabulary evidence; mixture is uniform
};

/// Gibbs fold-in with phi frozen; `tokens` must already be mapped through the training vocabulary.
InferResult infer_mixture(const LdaModel& model, std::span<const TermId> tokens, std::size_t iterations = 50,
                          std::uint64_t seed = 0);

/// p(w) = sum_k p(w | z = k) p(z = k | d)
double word_probability(const LdaModel& model, const TopicMixture& mixture, TermId term);

}  // namespace topiclens
