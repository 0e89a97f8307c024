#include "topiclens/fusion.hpp"

#include <Eigen/QR>
#include <cmath>
#include <random>

#include "topiclens/binary_io.hpp"
#include "topiclens/error.hpp"
#include "topiclens/hashing.hpp"

namespace topiclens {

void FusionConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) fail(ErrorKind::ConfigError, "fusion.alpha must be in [0, 1]");
  if (!(lsa_weight >= 0.0) || !(lda_weight >= 0.0) || !(topic_weight >= 0.0)) {
    fail(ErrorKind::ConfigError, "fusion weights must be non-negative");
  }
}

std::string_view to_string(FusionStrategy s) { return s == FusionStrategy::Concat ? "concat" : "weighted"; }

std::string_view to_string(TopicComposition c) {
  switch (c) {
    case TopicComposition::Lsa: return "lsa";
    case TopicComposition::Lda: return "lda";
    case TopicComposition::LsaLda: return "lsa+lda";
    case TopicComposition::Random: return "random";
  }
  return "?";
}

FusionStrategy parse_fusion_strategy(std::string_view name) {
  if (name == "concat") return FusionStrategy::Concat;
  if (name == "weighted") return FusionStrategy::Weighted;
  fail(ErrorKind::ConfigError, "unknown fusion strategy '" + std::string(name) + "'");
}

TopicComposition parse_topic_composition(std::string_view name) {
  if (name == "lsa") return TopicComposition::Lsa;
  if (name == "lda") return TopicComposition::Lda;
  if (name == "lsa+lda") return TopicComposition::LsaLda;
  if (name == "random") return TopicComposition::Random;
  fail(ErrorKind::ConfigError, "unknown topic composition '" + std::string(name) + "'");
}

namespace {

void append_scaled_unit(std::vector<double>& out, const double* data, std::size_t n, double weight,
                        std::string_view what) {
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) sq += data[i] * data[i];
  if (!(sq > 0.0)) fail(ErrorKind::MissingComponent, std::string(what) + " component is zero (degenerate)");
  const double scale = weight / std::sqrt(sq);
  for (std::size_t i = 0; i < n; ++i) out.push_back(data[i] * scale);
}

}  // namespace

std::vector<double> topic_vector(const std::optional<Eigen::VectorXd>& lsa, const std::optional<TopicMixture>& lda,
                                 const FusionConfig& config) {
  const bool want_lsa = config.composition == TopicComposition::Lsa || config.composition == TopicComposition::LsaLda;
  const bool want_lda = config.composition == TopicComposition::Lda || config.composition == TopicComposition::LsaLda;
  if (config.composition == TopicComposition::Random) {
    fail(ErrorKind::InvalidArgument, "random composition is built with random_topic_vector");
  }
  if (want_lsa && !lsa) fail(ErrorKind::MissingComponent, "composition needs an LSA vector");
  if (want_lda && !lda) fail(ErrorKind::MissingComponent, "composition needs an LDA mixture");

  std::vector<double> t;
  if (want_lsa) append_scaled_unit(t, lsa->data(), static_cast<std::size_t>(lsa->size()), config.lsa_weight, "LSA");
  if (want_lda) append_scaled_unit(t, lda->theta.data(), lda->theta.size(), config.lda_weight, "LDA");
  if (!l2_normalize(t)) fail(ErrorKind::MissingComponent, "topic vector is zero (all component weights are 0)");
  return t;
}

std::vector<double> random_topic_vector(std::size_t dim, std::uint64_t seed, std::uint64_t content_key) {
  std::mt19937_64 rng(splitmix64(seed ^ splitmix64(content_key)));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  do {
    for (auto& x : v) x = gauss(rng);
  } while (!l2_normalize(v));
  return v;
}

std::vector<double> fuse_concat(const std::vector<double>& context, const std::vector<double>& topic,
                                double topic_weight) {
  std::vector<double> out(context);
  out.reserve(context.size() + topic.size());
  for (double x : topic) out.push_back(topic_weight * x);
  // a zero weight leaves the (unit-norm) contextual block bit-identical
  if (topic_weight != 0.0 && !l2_normalize(out)) fail(ErrorKind::DegenerateResult, "concat fusion produced zero");
  return out;
}

AlignmentMap::AlignmentMap(std::size_t topic_dim, std::size_t context_dim, std::uint64_t seed) {
  if (topic_dim == 0 || topic_dim > context_dim) {
    fail(ErrorKind::DimensionMismatch, "alignment needs 0 < topic dim (" + std::to_string(topic_dim) +
                                           ") <= context dim (" + std::to_string(context_dim) + ")");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(static_cast<Eigen::Index>(context_dim), static_cast<Eigen::Index>(topic_dim));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) g(i, j) = gauss(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(g.rows(), g.cols());
  p_ = q.transpose();
}

AlignmentMap::AlignmentMap(Eigen::MatrixXd p) : p_(std::move(p)) {}

std::vector<double> AlignmentMap::lift(const std::vector<double>& topic) const {
  if (topic.size() != topic_dim()) {
    fail(ErrorKind::DimensionMismatch, "alignment expects topic dim " + std::to_string(topic_dim()) + ", got " +
                                           std::to_string(topic.size()));
  }
  const Eigen::Map<const Eigen::VectorXd> t(topic.data(), static_cast<Eigen::Index>(topic.size()));
  const Eigen::VectorXd lifted = p_.transpose() * t;
  std::vector<double> out(lifted.data(), lifted.data() + lifted.size());
  if (!l2_normalize(out)) fail(ErrorKind::DegenerateResult, "lifted topic vector is zero");
  return out;
}

std::vector<double> fuse_weighted(const std::vector<double>& context, const std::vector<double>& topic,
                                  const AlignmentMap& alignment, double alpha) {
  if (context.size() != alignment.context_dim()) {
    fail(ErrorKind::DimensionMismatch, "context dim " + std::to_string(context.size()) + " vs alignment " +
                                           std::to_string(alignment.context_dim()));
  }
  auto lifted = alignment.lift(topic);
  // the boundaries of the convex combination are returned exactly
  if (alpha == 1.0) return context;
  if (alpha == 0.0) return lifted;
  std::vector<double> out(context.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = alpha * context[i] + (1.0 - alpha) * lifted[i];
    sq += out[i] * out[i];
  }
  if (std::sqrt(sq) < 1e-9) fail(ErrorKind::DegenerateResult, "weighted fusion cancelled to ~0");
  l2_normalize(out);
  return out;
}

std::vector<std::uint8_t> AlignmentMap::serialize() const {
  BinaryWriter w(ArtifactKind::Alignment);
  w.u64(topic_dim());
  w.u64(context_dim());
  for (Eigen::Index i = 0; i < p_.rows(); ++i) {
    for (Eigen::Index j = 0; j < p_.cols(); ++j) w.f64(p_(i, j));
  }
  return w.buffer();
}

AlignmentMap AlignmentMap::deserialize(std::vector<std::uint8_t> bytes, const std::string& source) {
  BinaryReader r(std::move(bytes), ArtifactKind::Alignment, source);
  const auto rows = static_cast<Eigen::Index>(r.u64());
  const auto cols = static_cast<Eigen::Index>(r.u64());
  Eigen::MatrixXd p(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) p(i, j) = r.f64();
  }
  r.expect_end();
  return AlignmentMap(std::move(p));
}

void AlignmentMap::save(const std::filesystem::path& path) const { write_file_bytes(path, serialize()); }

AlignmentMap AlignmentMap::load(const std::filesystem::path& path) {
  return deserialize(read_file_bytes(path), path.string());
}

}  // namespace topiclens
