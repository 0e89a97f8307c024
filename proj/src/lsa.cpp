#include "topiclens/lsa.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <random>

#include "topiclens/binary_io.hpp"
#include "topiclens/error.hpp"

namespace topiclens {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd orthonormalize(const MatrixXd& y) {
  Eigen::HouseholderQR<MatrixXd> qr(y);
  return qr.householderQ() * MatrixXd::Identity(y.rows(), y.cols());
}

// Largest-magnitude entry of every U column becomes positive; V follows.
void fix_signs(MatrixXd& u, MatrixXd& v) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index arg = 0;
    for (Index i = 1; i < u.rows(); ++i) {
      if (std::abs(u(i, j)) > std::abs(u(arg, j))) arg = i;
    }
    if (u(arg, j) < 0.0) {
      u.col(j) = -u.col(j);
      v.col(j) = -v.col(j);
    }
  }
}

void check_inputs(const WeightMatrix& a, std::size_t rank) {
  const auto limit = static_cast<std::size_t>(std::min(a.rows(), a.cols()));
  if (rank == 0) fail(ErrorKind::InvalidArgument, "LSA rank must be >= 1");
  if (rank > limit) {
    fail(ErrorKind::RankTooLarge, "rank " + std::to_string(rank) + " exceeds min(V, N) = " + std::to_string(limit));
  }
  if (a.nonZeros() == 0 || a.squaredNorm() == 0.0) fail(ErrorKind::InvalidArgument, "LSA input matrix is zero");
}

LsaFit assemble(MatrixXd u, VectorXd sigma, MatrixXd v, double total_energy, std::size_t iterations,
                double residual) {
  const double tiny = sigma(0) * 1e-12;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (!(sigma(i) > tiny)) {
      fail(ErrorKind::RankTooLarge, "matrix numerical rank is below the requested rank " +
                                        std::to_string(sigma.size()));
    }
  }
  fix_signs(u, v);
  LsaFit fit;
  fit.doc_coords = v * sigma.asDiagonal();
  const double energy = sigma.squaredNorm() / total_energy;
  fit.model = LsaModel(std::move(u), std::move(sigma), energy);
  fit.iterations = iterations;
  fit.residual = residual;
  return fit;
}

}  // namespace

LsaModel::LsaModel(MatrixXd u, VectorXd sigma, double explained_energy)
    : u_(std::move(u)), sigma_(std::move(sigma)), energy_(explained_energy) {
  if (u_.cols() != sigma_.size()) fail(ErrorKind::ShapeMismatch, "LSA basis/sigma rank mismatch");
}

VectorXd LsaModel::project(const WeightVector& column) const {
  if (column.size() != u_.rows()) {
    fail(ErrorKind::ShapeMismatch, "LSA projection expects dimension " + std::to_string(u_.rows()) + ", got " +
                                       std::to_string(column.size()));
  }
  VectorXd out = VectorXd::Zero(u_.cols());
  for (WeightVector::InnerIterator it(column); it; ++it) out += it.value() * u_.row(it.index()).transpose();
  return out;
}

LsaFit fit_lsa(const WeightMatrix& a, const LsaConfig& config) {
  check_inputs(a, config.rank);
  const Index n = a.cols();
  const Index r = static_cast<Index>(config.rank);
  const Index width = std::min<Index>(r + static_cast<Index>(config.oversampling), std::min(a.rows(), n));

  std::mt19937_64 rng(config.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixXd omega(n, width);
  for (Index j = 0; j < width; ++j) {
    for (Index i = 0; i < n; ++i) omega(i, j) = gauss(rng);
  }

  const WeightMatrix at = a.transpose();
  MatrixXd q = orthonormalize(a * omega);
  std::size_t iterations = 0;
  auto step = [&] {
    q = orthonormalize(a * orthonormalize(at * q));
    ++iterations;
  };
  for (std::size_t i = 0; i < config.power_iterations; ++i) step();

  const double total = a.squaredNorm();
  for (;;) {
    const MatrixXd bt = at * q;  // B^T = A^T Q, N x width
    Eigen::BDCSVD<MatrixXd> svd(bt, Eigen::ComputeThinU | Eigen::ComputeThinV);
    // B = Q^T A = (V_b S U_b^T) with bt = U_bt S V_bt^T, so left factors of B are V_bt.
    const VectorXd sigma = svd.singularValues().head(r);
    const MatrixXd u = q * svd.matrixV().leftCols(r);
    const MatrixXd v = svd.matrixU().leftCols(r);

    double worst = 0.0;
    const MatrixXd av = a * v;
    for (Index i = 0; i < r; ++i) worst = std::max(worst, (av.col(i) - sigma(i) * u.col(i)).norm());
    worst /= sigma(0);
    if (worst <= config.residual_tolerance || width == std::min(a.rows(), n)) {
      return assemble(u, sigma, v, total, iterations, worst);
    }
    if (iterations >= config.power_iterations + config.max_iterations) {
      fail(ErrorKind::ConvergenceFailure, "randomized SVD residual " + std::to_string(worst) + " after " +
                                              std::to_string(iterations) + " iterations");
    }
    step();
  }
}

LsaFit fit_lsa_dense(const WeightMatrix& a, std::size_t rank) {
  check_inputs(a, rank);
  const MatrixXd dense(a);
  Eigen::BDCSVD<MatrixXd> svd(dense, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto r = static_cast<Index>(rank);
  return assemble(svd.matrixU().leftCols(r), svd.singularValues().head(r), svd.matrixV().leftCols(r),
                  a.squaredNorm(), 0, 0.0);
}

double reconstruction_error(const LsaModel& model, const WeightMatrix& a) {
  if (static_cast<std::size_t>(a.rows()) != model.n_terms()) {
    fail(ErrorKind::ShapeMismatch, "reconstruction_error: row count differs from the model");
  }
  // Column-wise residuals; subtracting squared norms would cancel catastrophically near zero.
  double total = 0.0;
  for (Index j = 0; j < a.cols(); ++j) {
    const VectorXd col = VectorXd(a.col(j));
    total += (col - model.u() * (model.u().transpose() * col)).squaredNorm();
  }
  return std::sqrt(total);
}

std::vector<std::uint8_t> LsaModel::serialize() const {
  BinaryWriter w(ArtifactKind::Lsa);
  w.u64(rank());
  w.u64(n_terms());
  w.f64(energy_);
  for (Index i = 0; i < sigma_.size(); ++i) w.f64(sigma_(i));
  for (Index i = 0; i < u_.rows(); ++i) {
    for (Index j = 0; j < u_.cols(); ++j) w.f64(u_(i, j));
  }
  return w.buffer();
}

LsaModel LsaModel::deserialize(std::vector<std::uint8_t> bytes, const std::string& source) {
  BinaryReader r(std::move(bytes), ArtifactKind::Lsa, source);
  const auto rank = static_cast<Index>(r.u64());
  const auto terms = static_cast<Index>(r.u64());
  const double energy = r.f64();
  VectorXd sigma(rank);
  for (Index i = 0; i < rank; ++i) sigma(i) = r.f64();
  MatrixXd u(terms, rank);
  for (Index i = 0; i < terms; ++i) {
    for (Index j = 0; j < rank; ++j) u(i, j) = r.f64();
  }
  r.expect_end();
  return LsaModel(std::move(u), std::move(sigma), energy);
}

void LsaModel::save(const std::filesystem::path& path) const { write_file_bytes(path, serialize()); }

LsaModel LsaModel::load(const std::filesystem::path& path) { return deserialize(read_file_bytes(path), path.string()); }

}  // namespace topiclens
