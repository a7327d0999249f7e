#include "fjscb/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>
#include <string>

#include "fjscb/errors.hpp"
#include "fjscb/parallel.hpp"

namespace fjscb {

void BootstrapPlan::validate(std::size_t n, std::size_t p) const {
  if (block_size < 1 || block_size + 1 > n) {
    throw ConfigError("block size m = " + std::to_string(block_size) + " must lie in [1, n-1] with n = " +
                      std::to_string(n));
  }
  if (replicates < 100) throw ConfigError("bootstrap needs B >= 100 replicates");
  if (alpha_levels.empty()) throw ConfigError("at least one alpha level is required");
  for (double a : alpha_levels) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha levels must lie in (0,1)");
  }
  if (eval_grid.size() < 100) throw ConfigError("evaluation grid needs at least 100 points");
  if (eval_grid.front() != 0.0 || eval_grid.back() != 1.0) throw ConfigError("evaluation grid must include 0 and 1");
  if (!std::is_sorted(eval_grid.begin(), eval_grid.end())) throw ConfigError("evaluation grid must be increasing");
  for (std::size_t j : group) {
    if (j >= p) throw ConfigError("group index " + std::to_string(j + 1) + " exceeds p = " + std::to_string(p));
  }
}

Eigen::MatrixXd score_residual_vectors(const Eigen::MatrixXd& x, const Eigen::VectorXd& residuals) {
  if (x.rows() != residuals.size()) throw ConfigError("score_residual_vectors: row count mismatch");
  return residuals.asDiagonal() * x;
}

BlockMultiplier::BlockMultiplier(const Eigen::MatrixXd& z_hat, std::size_t m) : m_(m) {
  const auto n = static_cast<std::size_t>(z_hat.rows());
  if (m < 1 || m > n) {
    throw ConfigError("block size m = " + std::to_string(m) + " must lie in [1, n] with n = " + std::to_string(n));
  }
  const std::size_t blocks = n - m + 1;
  sums_.resize(static_cast<Eigen::Index>(blocks), z_hat.cols());
  // Direct window sums: O(n m c), bitwise reproducible against naive recomputation.
  for (Eigen::Index col = 0; col < z_hat.cols(); ++col) {
    for (std::size_t j = 0; j < blocks; ++j) {
      double acc = 0.0;
      for (std::size_t i = j; i < j + m; ++i) acc += z_hat(static_cast<Eigen::Index>(i), col);
      sums_(static_cast<Eigen::Index>(j), col) = acc;
    }
  }
  scale_ = 1.0 / (std::sqrt(static_cast<double>(blocks)) * std::sqrt(static_cast<double>(m)));
}

Eigen::VectorXd BlockMultiplier::draw(const Eigen::VectorXd& u) const {
  if (u.size() != sums_.rows()) {
    throw ConfigError("block multiplier: expected " + std::to_string(sums_.rows()) + " multipliers, got " +
                      std::to_string(u.size()));
  }
  return (sums_.transpose() * u) * scale_;
}

Eigen::VectorXd block_multiplier_draw(const Eigen::MatrixXd& z_hat, std::size_t m, const Eigen::VectorXd& u) {
  return BlockMultiplier(z_hat, m).draw(u);
}

Eigen::MatrixXd bootstrap_process(const PenalizedFit& fit, const std::vector<Eigen::MatrixXd>& recon,
                                  const Eigen::VectorXd& u_boot) {
  if (static_cast<std::size_t>(u_boot.size()) != fit.c()) throw ConfigError("bootstrap_process: U has wrong length");
  if (recon.size() != fit.p()) throw ConfigError("bootstrap_process: one reconstruction block per predictor required");
  const Eigen::VectorXd v = fit.solve(u_boot);
  const Eigen::Index grid = recon.empty() ? 0 : recon.front().rows();
  Eigen::MatrixXd q(static_cast<Eigen::Index>(fit.p()), grid);
  for (std::size_t j = 0; j < fit.p(); ++j) {
    q.row(static_cast<Eigen::Index>(j)) =
        (recon[j] * v.segment(static_cast<Eigen::Index>(fit.offsets[j]), static_cast<Eigen::Index>(fit.dims[j])))
            .transpose();
  }
  return q;
}

WeightEstimate estimate_weights(std::span<const Eigen::MatrixXd> processes, WeightMode mode,
                                std::span<const double> grid) {
  if (processes.empty()) throw ConfigError("estimate_weights: no bootstrap processes");
  const Eigen::Index p = processes.front().rows();
  const Eigen::Index g = processes.front().cols();
  if (static_cast<std::size_t>(g) != grid.size()) throw ConfigError("estimate_weights: grid size mismatch");
  WeightEstimate w;
  w.weight = Eigen::MatrixXd::Ones(p, g);
  w.stddev = Eigen::MatrixXd::Zero(p, g);
  w.floor = Eigen::VectorXd::Zero(p);
  if (mode == WeightMode::Unit) return w;
  if (processes.size() < 2) throw ConfigError("estimate_weights: StdDriven mode needs B >= 2");

  const auto b = static_cast<double>(processes.size());
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(p, g);
  for (const auto& q : processes) mean += q;
  mean /= b;
  Eigen::MatrixXd ss = Eigen::MatrixXd::Zero(p, g);
  for (const auto& q : processes) ss += (q - mean).array().square().matrix();
  w.stddev = (ss / b).array().sqrt().matrix();

  for (Eigen::Index j = 0; j < p; ++j) {
    const Eigen::VectorXd sd = w.stddev.row(j).transpose();
    const double integral = trapezoid(grid, std::span<const double>(sd.data(), static_cast<std::size_t>(sd.size())));
    if (!(integral > 0.0)) {
      w.weight.row(j).setOnes();
      w.floor(j) = 1.0;
      continue;
    }
    const double floor = sd.maxCoeff() / (100.0 * integral);
    w.floor(j) = floor;
    w.weight.row(j) = (sd / integral).cwiseMax(floor).transpose();
  }
  return w;
}

double max_deviation(const Eigen::MatrixXd& process, const Eigen::MatrixXd& weight, std::span<const std::size_t> group) {
  double best = 0.0;
  auto scan = [&](Eigen::Index j) { best = std::max(best, (process.row(j).array() / weight.row(j).array()).abs().maxCoeff()); };
  if (group.empty()) {
    for (Eigen::Index j = 0; j < process.rows(); ++j) scan(j);
  } else {
    for (std::size_t j : group) scan(static_cast<Eigen::Index>(j));
  }
  return best;
}

double bootstrap_quantile(std::span<const double> deviations, double alpha) {
  if (deviations.empty()) throw ConfigError("bootstrap_quantile: no deviations");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("bootstrap_quantile: alpha must lie in (0,1)");
  const auto b = static_cast<double>(deviations.size());
  // guard against (1-alpha)*B landing just above an integer through rounding
  auto k = static_cast<std::size_t>(std::ceil((1.0 - alpha) * b - 1e-9));
  k = std::clamp<std::size_t>(k, 1, deviations.size());
  std::vector<double> sorted(deviations.begin(), deviations.end());
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k - 1), sorted.end());
  return sorted[k - 1];
}

BandSet build_band(const PenalizedFit& fit, const std::vector<BasisSet>& bases, const Eigen::MatrixXd& z_hat,
                   const BootstrapPlan& plan) {
  plan.validate(fit.n, fit.p());
  const BlockMultiplier blocks(z_hat, plan.block_size);
  const auto recon = reconstruction_matrices(fit, bases, plan.eval_grid);

  const std::size_t replicates = plan.replicates;
  std::vector<Eigen::MatrixXd> processes(replicates);
  parallel_for(replicates, plan.threads, [&](std::size_t r) {
    std::mt19937_64 gen(derive_seed(plan.master_seed, r));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd u(static_cast<Eigen::Index>(blocks.block_count()));
    for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = normal(gen);
    processes[r] = bootstrap_process(fit, recon, blocks.draw(u));
  });

  const WeightEstimate weights = estimate_weights(processes, plan.weight_mode, plan.eval_grid);

  BandSet band;
  band.grid = plan.eval_grid;
  band.plan = plan;
  band.n = fit.n;
  if (plan.group.empty()) {
    for (std::size_t j = 0; j < fit.p(); ++j) band.predictors.push_back(j);
  } else {
    band.predictors = plan.group;
  }
  band.deviations.resize(replicates);
  for (std::size_t r = 0; r < replicates; ++r) {
    band.deviations[r] = max_deviation(processes[r], weights.weight, band.predictors);
  }

  const Eigen::MatrixXd beta_all = reconstruct_beta(fit, bases, plan.eval_grid);
  const auto rows = static_cast<Eigen::Index>(band.predictors.size());
  const auto g = static_cast<Eigen::Index>(plan.eval_grid.size());
  band.beta_hat.resize(rows, g);
  band.weight.resize(rows, g);
  for (Eigen::Index a = 0; a < rows; ++a) {
    const auto j = static_cast<Eigen::Index>(band.predictors[static_cast<std::size_t>(a)]);
    band.beta_hat.row(a) = beta_all.row(j);
    band.weight.row(a) = weights.weight.row(j);
  }
  const double root_n = std::sqrt(static_cast<double>(fit.n));
  for (double alpha : plan.alpha_levels) {
    BandLevel level;
    level.alpha = alpha;
    level.q_hat = bootstrap_quantile(band.deviations, alpha);
    const Eigen::MatrixXd half = band.weight * (level.q_hat / root_n);
    level.lower = band.beta_hat - half;
    level.upper = band.beta_hat + half;
    band.levels.push_back(std::move(level));
  }
  return band;
}

void write_band_csv(std::ostream& out, const BandSet& band, std::size_t level_index) {
  if (level_index >= band.levels.size()) throw ConfigError("write_band_csv: level index out of range");
  const BandLevel& level = band.levels[level_index];
  out << "j,t,beta_hat,lower,upper,weight\n";
  out << std::setprecision(17);
  for (std::size_t a = 0; a < band.predictors.size(); ++a) {
    const auto r = static_cast<Eigen::Index>(a);
    for (std::size_t t = 0; t < band.grid.size(); ++t) {
      const auto c = static_cast<Eigen::Index>(t);
      out << band.predictors[a] + 1 << ',' << band.grid[t] << ',' << band.beta_hat(r, c) << ',' << level.lower(r, c)
          << ',' << level.upper(r, c) << ',' << band.weight(r, c) << '\n';
    }
  }
}

nlohmann::json quantile_summary_json(const BandSet& band) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& level : band.levels) {
    out.push_back({{"alpha", level.alpha},
                   {"q_hat", level.q_hat},
                   {"B", band.plan.replicates},
                   {"m", band.plan.block_size},
                   {"seed", band.plan.master_seed}});
  }
  return out;
}

}  // namespace fjscb
