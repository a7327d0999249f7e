#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fjscb/basis.hpp"
#include "fjscb/estimator.hpp"

namespace fjscb {

enum class WeightMode { Unit, StdDriven };

struct BootstrapPlan {
  std::size_t replicates = 1000;                 ///< B
  std::size_t block_size = 1;                    ///< m; 1 is the i.i.d. multiplier bootstrap
  std::vector<double> alpha_levels{0.05, 0.10};
  WeightMode weight_mode = WeightMode::Unit;
  std::vector<double> eval_grid = uniform_grid(201);
  std::uint64_t master_seed = 0;
  std::vector<std::size_t> group;                ///< 0-based predictor indices; empty means all
  std::size_t threads = 1;                       ///< 0 -> hardware concurrency

  /// Throws ConfigError unless 1 <= m <= n-1, B >= 100, every alpha in (0,1),
  /// and eval_grid has >= 100 increasing points including 0 and 1.
  void validate(std::size_t n, std::size_t p) const;
};

/// z_hat row i = x_ci * residual_i.
[[nodiscard]] Eigen::MatrixXd score_residual_vectors(const Eigen::MatrixXd& x, const Eigen::VectorXd& residuals);

/// Window sums of z_hat for the block multiplier bootstrap.
class BlockMultiplier {
 public:
  BlockMultiplier(const Eigen::MatrixXd& z_hat, std::size_t m);

  [[nodiscard]] std::size_t block_size() const noexcept { return m_; }
  [[nodiscard]] std::size_t block_count() const noexcept { return static_cast<std::size_t>(sums_.rows()); }
  /// Row j = sum_{i=j}^{j+m-1} z_hat_i, accumulated left to right.
  [[nodiscard]] const Eigen::MatrixXd& block_sums() const noexcept { return sums_; }

  /// U = (n-m+1)^{-1/2} sum_j (m^{-1/2} S_j) u_j; `u` has block_count() entries.
  [[nodiscard]] Eigen::VectorXd draw(const Eigen::VectorXd& u) const;

 private:
  std::size_t m_;
  Eigen::MatrixXd sums_;
  double scale_;
};

[[nodiscard]] Eigen::VectorXd block_multiplier_draw(const Eigen::MatrixXd& z_hat, std::size_t m,
                                                    const Eigen::VectorXd& u);

/// Q(t) = C_f(t) Sigma^{-1} U as a p x |grid| matrix; `recon` comes from reconstruction_matrices().
[[nodiscard]] Eigen::MatrixXd bootstrap_process(const PenalizedFit& fit, const std::vector<Eigen::MatrixXd>& recon,
                                                const Eigen::VectorXd& u_boot);

struct WeightEstimate {
  Eigen::MatrixXd weight;   ///< p x |grid|
  Eigen::MatrixXd stddev;   ///< pointwise bootstrap std (divisor B); zero in Unit mode
  Eigen::VectorXd floor;    ///< lift threshold per predictor
};

/// Unit: g = 1. StdDriven: g_j = std_j / int std_j, then max(g_j, max std_j / (100 int std_j)).
/// A predictor whose bootstrap std vanishes everywhere gets g = 1.
[[nodiscard]] WeightEstimate estimate_weights(std::span<const Eigen::MatrixXd> processes, WeightMode mode,
                                              std::span<const double> grid);

/// max over t and j in group of |process_j(t) / g_j(t)|; empty group means all j.
[[nodiscard]] double max_deviation(const Eigen::MatrixXd& process, const Eigen::MatrixXd& weight,
                                   std::span<const std::size_t> group = {});

/// ceil((1-alpha) B)-th order statistic (1-based) of `deviations`.
[[nodiscard]] double bootstrap_quantile(std::span<const double> deviations, double alpha);

struct BandLevel {
  double alpha = 0.05;
  double q_hat = 0.0;
  Eigen::MatrixXd lower;   ///< one row per band predictor
  Eigen::MatrixXd upper;
};

struct BandSet {
  std::vector<double> grid;
  std::vector<std::size_t> predictors;   ///< 0-based indices of the band rows
  Eigen::MatrixXd beta_hat;              ///< rows follow `predictors`
  Eigen::MatrixXd weight;                ///< rows follow `predictors`
  std::vector<BandLevel> levels;
  std::vector<double> deviations;        ///< M_r in replicate order
  BootstrapPlan plan;
  std::size_t n = 0;
};

/// Steps (d)-(f): B block-multiplier replicates with seeds derive_seed(master_seed, r),
/// data-driven or unit weights, order-statistic quantiles and the bands
/// beta_hat +- g q / sqrt(n). Deterministic for a fixed seed and any thread count.
[[nodiscard]] BandSet build_band(const PenalizedFit& fit, const std::vector<BasisSet>& bases,
                                 const Eigen::MatrixXd& z_hat, const BootstrapPlan& plan);

/// CSV with columns j,t,beta_hat,lower,upper,weight (j 1-based) for one level.
void write_band_csv(std::ostream& out, const BandSet& band, std::size_t level_index);
/// [{alpha, q_hat, B, m, seed}, ...]
[[nodiscard]] nlohmann::json quantile_summary_json(const BandSet& band);

}  // namespace fjscb
