#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fjscb/estimator.hpp"
#include "fjscb/fdata.hpp"

namespace fjscb {

struct TuningConfig {
  double cpv_threshold = 0.85;
  std::vector<double> lambda_grid;           ///< empty -> default_lambda_grid()
  std::vector<std::size_t> m_grid;           ///< empty -> default_m_grid(n)
  std::optional<std::vector<std::size_t>> fixed_dims;
  std::optional<double> fixed_lambda;
  std::optional<std::size_t> fixed_m;

  /// Checks the invariants that do not depend on the data. Throws ConfigError.
  void validate() const;
};

/// `count` log-spaced values from `lo` to `hi` inclusive.
[[nodiscard]] std::vector<double> log_grid(double lo, double hi, std::size_t count);
/// 40 log-spaced points on [1e-14, 1e-2].
[[nodiscard]] std::vector<double> default_lambda_grid();
/// Integers 2..max(6, ceil(2 n^{1/3})), capped at n/2.
[[nodiscard]] std::vector<std::size_t> default_m_grid(std::size_t n);

struct CpvResult {
  Eigen::VectorXd eigenvalues;
  std::size_t d = 0;
  std::size_t c = 0;
};

/// Smallest d with cumulative share >= threshold; c = 2d.
[[nodiscard]] CpvResult select_dim_cpv(const Eigen::VectorXd& eigenvalues, double threshold);
/// Uses the FPC spectrum of predictor j over `master`.
[[nodiscard]] CpvResult select_dim_cpv(const FunctionalDataSet& data, std::size_t predictor, const BasisSet& master,
                                       double threshold);

struct GcvResult {
  std::vector<double> grid;
  std::vector<double> scores;   ///< NaN where the fit failed
  std::vector<std::string> failures;
  double chosen = 0.0;
};

/// Grid search for the GCV minimizer; exact ties go to the smaller lambda.
[[nodiscard]] GcvResult select_lambda_gcv(const Design& design, const Eigen::VectorXd& y,
                                          const std::vector<Eigen::MatrixXd>& raw_penalties,
                                          const std::vector<double>& lambda_grid);

/// Xi(m) = (1/((n-m+1) m)) sum_j S_j S_j' with S_j the window sum of rows j..j+m-1.
[[nodiscard]] Eigen::MatrixXd block_covariance(const Eigen::MatrixXd& z_hat, std::size_t m);

struct MvResult {
  std::vector<std::size_t> grid;
  std::vector<double> volatility;   ///< NaN at the two boundary candidates on each side
  std::size_t chosen = 0;
};

/// Minimum-volatility block size: minimizes the 5-window standard error of Xi(m).
[[nodiscard]] MvResult select_block_mv(const Eigen::MatrixXd& z_hat, const std::vector<std::size_t>& m_grid);
/// Same rule on precomputed Xi(m), one per grid entry.
[[nodiscard]] MvResult select_block_mv(const std::vector<std::size_t>& m_grid, const std::vector<Eigen::MatrixXd>& xi);

[[nodiscard]] nlohmann::json to_json(const CpvResult& r);
[[nodiscard]] nlohmann::json to_json(const GcvResult& r);
[[nodiscard]] nlohmann::json to_json(const MvResult& r);

}  // namespace fjscb
