#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>

#include "topiclens/sparse.hpp"

namespace topiclens {

struct LsaConfig {
  std::size_t rank = 100;
  std::size_t oversampling = 10;
  std::size_t power_iterations = 4;
  // Extra subspace iterations allowed beyond `power_iterations` before giving up.
  std::size_t max_iterations = 500;
  // max_i ||A v_i - sigma_i u_i|| / sigma_1 must fall below this.
  double residual_tolerance = 1e-8;
  std::uint64_t seed = 0;
};

/// Truncated SVD artifact: term-topic basis U_r and singular values (descending, positive).
class LsaModel {
 public:
  LsaModel() = default;
  LsaModel(Eigen::MatrixXd u, Eigen::VectorXd sigma, double explained_energy);

  std::size_t rank() const noexcept { return static_cast<std::size_t>(sigma_.size()); }
  std::size_t n_terms() const noexcept { return static_cast<std::size_t>(u_.rows()); }
  const Eigen::MatrixXd& u() const noexcept { return u_; }
  const Eigen::VectorXd& sigma() const noexcept { return sigma_; }
  double explained_energy() const noexcept { return energy_; }

  /// Fold-in: U_r^T x. Chunks and queries go through this same projection.
  Eigen::VectorXd project(const WeightVector& column) const;

  std::vector<std::uint8_t> serialize() const;
  static LsaModel deserialize(std::vector<std::uint8_t> bytes, const std::string& source);
  void save(const std::filesystem::path& path) const;
  static LsaModel load(const std::filesystem::path& path);

 private:
  Eigen::MatrixXd u_;
  Eigen::VectorXd sigma_;
  double energy_ = 0.0;
};

struct LsaFit {
  LsaModel model;
  Eigen::MatrixXd doc_coords;  // N x r, rows of V_r * Sigma_r
  std::size_t iterations = 0;  // subspace iterations performed
  double residual = 0.0;       // final max relative residual
};

/// Randomized subspace iteration (Gaussian sketch, QR re-orthonormalization between products).
LsaFit fit_lsa(const WeightMatrix& weights, const LsaConfig& config);

/// Exact path via a full dense SVD; intended for small matrices.
LsaFit fit_lsa_dense(const WeightMatrix& weights, std::size_t rank);

/// ||A - U_r U_r^T A||_F, which equals ||A - U_r Sigma_r V_r^T||_F for an exact decomposition.
double reconstruction_error(const LsaModel& model, const WeightMatrix& weights);

}  // namespace topiclens
