#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fjscb/basis.hpp"
#include "fjscb/bootstrap.hpp"
#include "fjscb/fdata.hpp"
#include "fjscb/pipeline.hpp"
#include "fjscb/tuning.hpp"

namespace fjscb {

enum class DMode { Tridiagonal, Diagonal };
enum class BetaScenario { A, Zero };

[[nodiscard]] BetaScenario parse_beta_scenario(std::string_view name);
[[nodiscard]] std::string_view to_string(BetaScenario s) noexcept;

/// FMA(1) predictors x_i = D(eta_i + phi1 eta_{i-1}), eta_ik ~ N(0, k^-2),
/// truncated at k_dgp coordinates and synthesized on an equispaced grid.
struct DgpConfig {
  std::size_t n = 400;
  std::size_t grid_size = 100;
  std::size_t k_dgp = 25;
  double phi1 = 0.5;
  DMode d_mode = DMode::Tridiagonal;
  BasisKind synth_basis = BasisKind::Fourier;
  BetaScenario beta = BetaScenario::A;
  std::uint64_t seed = 0;

  void validate() const;
};

/// k_dgp x k_dgp mixing matrix: identity, or 1 on the diagonal and 1/5 off it.
[[nodiscard]] Eigen::MatrixXd mixing_matrix(DMode mode, std::size_t k);

struct FmaSample {
  std::vector<double> grid;
  Eigen::MatrixXd scores;   ///< n x k_dgp generator scores
  Eigen::MatrixXd curves;   ///< n x grid_size
};

[[nodiscard]] FmaSample gen_fma1(const DgpConfig& config, std::mt19937_64& gen);

/// beta_1..beta_k: (0.8, 0.5, -0.3, 4^-3, 5^-3, ...) or all zero.
[[nodiscard]] Eigen::VectorXd beta_coefficients(BetaScenario scenario, std::size_t k);

/// beta(t) = sum_{k <= basis.size()} beta_k alpha_k(t).
[[nodiscard]] Eigen::VectorXd true_beta(BetaScenario scenario, const BasisSet& basis, std::span<const double> points);

/// Scores on the leading principal component of the (fully observed) generator scores.
[[nodiscard]] Eigen::VectorXd first_fpc_scores(const Eigen::MatrixXd& scores);

/// Student t_8 draw as Z / sqrt(chi2_8 / 8).
[[nodiscard]] double draw_t8(std::mt19937_64& gen);

/// AR(1) s_i = 0.2 s_{i-1} + e_i, e_i ~ sqrt(3/4) t_8, 50 burn-in steps.
[[nodiscard]] Eigen::VectorXd gen_ar_innovations(std::size_t n, std::mt19937_64& gen);

/// epsilon_i = 0.5 s_i xhat_i1.
[[nodiscard]] Eigen::VectorXd gen_errors_b(const Eigen::VectorXd& first_fpc, std::mt19937_64& gen);

struct SimulatedData {
  FunctionalDataSet data;
  Eigen::VectorXd beta_coeffs;
  BasisSet synth_basis;
};

/// One draw of (X, Y) with Y_i = sum_k beta_k x_ik + epsilon_i.
[[nodiscard]] SimulatedData simulate_dataset(const DgpConfig& config, std::uint64_t seed);

/// Synthesis pairing used for the coverage tables: Fourier cells synthesize in the
/// Fourier basis with tridiagonal D, Legendre cells in the Legendre basis, FPC
/// cells in the Legendre basis with diagonal D.
void pair_synthesis(DgpConfig& config, WorkingBasis basis);

struct SimulationSettings {
  DgpConfig dgp;
  WorkingBasis basis = WorkingBasis::Fourier;
  WeightMode weights = WeightMode::Unit;
  std::vector<double> alpha_levels{0.05, 0.10};
  std::size_t replicates = 1000;   ///< bootstrap B per Monte Carlo run
  std::size_t eval_points = 201;
  TuningConfig tuning;
  std::size_t reps = 1000;         ///< Monte Carlo runs
  std::uint64_t seed = 0;
  std::size_t threads = 1;

  void validate() const;
};

/// True when truth(t) lies in [lower(t), upper(t)] at every grid point of every row.
[[nodiscard]] bool covers(const Eigen::MatrixXd& lower, const Eigen::MatrixXd& upper, const Eigen::MatrixXd& truth);

struct LevelSummary {
  double alpha = 0.05;
  double coverage = 0.0;
  double mean_width = 0.0;
  double se = 0.0;                 ///< sqrt(p(1-p)/reps)
  std::vector<int> events;         ///< per successful replication
  std::vector<double> widths;
};

struct SimulationReport {
  SimulationSettings settings;
  std::vector<LevelSummary> levels;
  std::size_t completed = 0;
  std::size_t failures = 0;
  std::vector<std::string> failure_messages;
  bool invalid = false;            ///< more than 1% of replications failed
  bool low_precision = false;      ///< fewer than 100 replications
  std::vector<std::size_t> chosen_m;
  std::vector<double> chosen_lambda;
  std::vector<std::size_t> chosen_c;
};

/// Monte Carlo coverage of the JSCB. Replication r uses seeds derived from
/// (seed, r) only, so results do not depend on thread count.
[[nodiscard]] SimulationReport run_monte_carlo(const SimulationSettings& settings);

/// Re-aggregates coverage, width and SE from per-replication vectors.
void summarize(LevelSummary& level);

[[nodiscard]] nlohmann::json to_json(const SimulationReport& report);

/// Table layout: rows (weight mode, basis); columns (n, phi1, level) with "coverage (width)" cells.
void write_table_csv(std::ostream& out, std::span<const SimulationReport> reports);

}  // namespace fjscb
