#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fjscb/basis.hpp"
#include "fjscb/fdata.hpp"

namespace fjscb {

/// Block design X_c (n x c): block j holds the standardized scores x_ij,k.
struct Design {
  Eigen::MatrixXd x;
  std::vector<std::size_t> dims;       ///< c_j
  std::vector<std::size_t> offsets;    ///< first column of block j
  std::vector<Eigen::VectorXd> scales; ///< f_jk per block
  std::vector<bool> excluded;          ///< per column; excluded columns are zero

  [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(x.rows()); }
  [[nodiscard]] std::size_t c() const noexcept { return static_cast<std::size_t>(x.cols()); }
  [[nodiscard]] std::size_t p() const noexcept { return dims.size(); }
};

[[nodiscard]] Design build_design(const ScoreSet& scores);

/// Block-diagonal R(lambda) with block j entries lambda * raw_j(k,l) / (f_jk f_jl).
/// Rows and columns of excluded coordinates are zero. Throws std::logic_error
/// when an included coordinate has zero scale.
[[nodiscard]] Eigen::MatrixXd build_penalty(const std::vector<Eigen::MatrixXd>& raw,
                                            const std::vector<Eigen::VectorXd>& scales,
                                            const std::vector<bool>& excluded, double lambda);
[[nodiscard]] Eigen::MatrixXd build_penalty(const std::vector<Eigen::MatrixXd>& raw, const Design& design,
                                            double lambda);

/// Result of the penalized least squares solve.
///
/// `sigma_tilde` = X'X/n + R(lambda) on included coordinates. Excluded
/// coordinates carry a unit diagonal, so the matrix stays positive definite
/// and solves leave those coordinates at zero for right-hand sides that vanish there.
struct PenalizedFit {
  Eigen::VectorXd theta;
  Eigen::MatrixXd sigma_tilde;
  Eigen::LLT<Eigen::MatrixXd> factor;
  double lambda = 0.0;
  std::vector<std::size_t> dims;
  std::vector<std::size_t> offsets;
  std::vector<Eigen::VectorXd> scales;
  std::vector<bool> excluded;
  Eigen::VectorXd residuals;
  double hat_trace = 0.0;
  std::size_t n = 0;

  [[nodiscard]] std::size_t p() const noexcept { return dims.size(); }
  [[nodiscard]] std::size_t c() const noexcept { return static_cast<std::size_t>(theta.size()); }
  /// Solves sigma_tilde * v = rhs using the stored factorization.
  [[nodiscard]] Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return factor.solve(rhs); }
};

/// theta = [X'X/n + R]^{-1} X'y/n. Throws IllPosedFitError if the normal matrix
/// has min eigenvalue below 1e-12 * trace / c.
[[nodiscard]] PenalizedFit fit_penalized(const Design& design, const Eigen::VectorXd& y, const Eigen::MatrixXd& penalty,
                                         double lambda);

/// Penalized least squares criterion (1/n)|y - X theta|^2 + theta' R theta.
[[nodiscard]] double penalized_criterion(const Design& design, const Eigen::VectorXd& y,
                                         const Eigen::MatrixXd& penalty, const Eigen::VectorXd& theta);

/// Per-predictor reconstruction rows: W_j(t, k) = alpha_k(t) / f_jk (zero when excluded),
/// so beta_j = W_j * theta_j.
[[nodiscard]] std::vector<Eigen::MatrixXd> reconstruction_matrices(const PenalizedFit& fit,
                                                                   const std::vector<BasisSet>& bases,
                                                                   std::span<const double> points);

/// p x |points| matrix of the estimated coefficient curves.
[[nodiscard]] Eigen::MatrixXd reconstruct_beta(const PenalizedFit& fit, const std::vector<BasisSet>& bases,
                                               std::span<const double> points);

/// GCV(lambda) = (RSS/n) / (1 - Trace(H)/n)^2. Throws DegenerateFitError if Trace(H) >= n.
[[nodiscard]] double gcv_score(const PenalizedFit& fit);

/// {lambda, dims, gcv, theta, residual_variance}
[[nodiscard]] nlohmann::json fit_summary_json(const PenalizedFit& fit);

}  // namespace fjscb
