#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "topiclens/embed.hpp"
#include "topiclens/lda.hpp"

namespace topiclens {

enum class FusionStrategy { Concat, Weighted };
enum class TopicComposition { Lsa, Lda, LsaLda, Random };

struct FusionConfig {
  FusionStrategy strategy = FusionStrategy::Concat;
  double alpha = 0.45;  // weight of the contextual vector in weighted fusion
  TopicComposition composition = TopicComposition::LsaLda;
  double lsa_weight = 1.0;
  double lda_weight = 1.0;
  double topic_weight = 1.0;  // scale of the topic block in concat fusion
  std::uint64_t alignment_seed = 0;

  void validate() const;
};

std::string_view to_string(FusionStrategy s);
std::string_view to_string(TopicComposition c);
FusionStrategy parse_fusion_strategy(std::string_view name);
TopicComposition parse_topic_composition(std::string_view name);

struct EnrichedVector {
  std::vector<double> values;
  std::uint64_t fingerprint = 0;
};

/// Each present component is L2-normalized and scaled by its weight, concatenated (lsa, lda),
/// and the result re-normalized. A required component that is absent or zero raises MissingComponent.
std::vector<double> topic_vector(const std::optional<Eigen::VectorXd>& lsa, const std::optional<TopicMixture>& lda,
                                 const FusionConfig& config);

/// Seeded random unit vector keyed by content, for the random-topic control.
std::vector<double> random_topic_vector(std::size_t dim, std::uint64_t seed, std::uint64_t content_key);

/// [e_context, topic_weight * t_topic], L2-normalized.
std::vector<double> fuse_concat(const std::vector<double>& context, const std::vector<double>& topic,
                                double topic_weight = 1.0);

/// Fixed orthonormal-row map P: (topic dim m) -> (context dim D), so P P^T = I_m and ||P^T t|| = ||t||.
class AlignmentMap {
 public:
  AlignmentMap() = default;
  AlignmentMap(std::size_t topic_dim, std::size_t context_dim, std::uint64_t seed);
  explicit AlignmentMap(Eigen::MatrixXd p);

  std::size_t topic_dim() const noexcept { return static_cast<std::size_t>(p_.rows()); }
  std::size_t context_dim() const noexcept { return static_cast<std::size_t>(p_.cols()); }
  const Eigen::MatrixXd& matrix() const noexcept { return p_; }

  /// P^T t, re-normalized.
  std::vector<double> lift(const std::vector<double>& topic) const;

  std::vector<std::uint8_t> serialize() const;
  static AlignmentMap deserialize(std::vector<std::uint8_t> bytes, const std::string& source);
  void save(const std::filesystem::path& path) const;
  static AlignmentMap load(const std::filesystem::path& path);

 private:
  Eigen::MatrixXd p_;  // topic_dim x context_dim
};

/// alpha * e_context + (1 - alpha) * lift(t_topic), L2-normalized. DegenerateResult when the
/// combination has norm below 1e-9.
std::vector<double> fuse_weighted(const std::vector<double>& context, const std::vector<double>& topic,
                                  const AlignmentMap& alignment, double alpha);

}  // namespace topiclens
