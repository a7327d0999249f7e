#include "fjscb/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fjscb/errors.hpp"

namespace fjscb {

namespace {

nlohmann::json nan_to_null(const std::vector<double>& v) {
  nlohmann::json out = nlohmann::json::array();
  for (double x : v) {
    if (std::isfinite(x)) {
      out.push_back(x);
    } else {
      out.push_back(nullptr);
    }
  }
  return out;
}

}  // namespace

void TuningConfig::validate() const {
  if (!(cpv_threshold > 0.0 && cpv_threshold < 1.0)) throw ConfigError("cpv threshold must lie in (0,1)");
  if (!std::is_sorted(lambda_grid.begin(), lambda_grid.end())) throw ConfigError("lambda grid must be sorted");
  for (double l : lambda_grid) {
    if (!(l > 0.0)) throw ConfigError("lambda grid values must be positive");
  }
  if (fixed_lambda && !(*fixed_lambda >= 0.0)) throw ConfigError("fixed lambda must be non-negative");
  if (!m_grid.empty()) {
    if (!std::is_sorted(m_grid.begin(), m_grid.end()) ||
        std::adjacent_find(m_grid.begin(), m_grid.end()) != m_grid.end()) {
      throw ConfigError("m grid must be strictly increasing");
    }
    if (m_grid.front() < 1) throw ConfigError("m grid values must be >= 1");
    if (!fixed_m && m_grid.size() < 5) throw ConfigError("minimum volatility needs at least 5 candidate block sizes");
  }
  if (fixed_m && *fixed_m < 1) throw ConfigError("block size must be >= 1");
  if (fixed_dims) {
    for (std::size_t c : *fixed_dims) {
      if (c == 0) throw ConfigError("fixed dimensions must be positive");
    }
  }
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0 && hi >= lo) || count == 0) throw ConfigError("log_grid: need 0 < lo <= hi and count >= 1");
  if (count == 1) return {lo};
  std::vector<double> g(count);
  const double a = std::log(lo);
  const double step = (std::log(hi) - a) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) g[i] = std::exp(a + step * static_cast<double>(i));
  g.front() = lo;
  g.back() = hi;
  return g;
}

std::vector<double> default_lambda_grid() { return log_grid(1e-14, 1e-2, 40); }

std::vector<std::size_t> default_m_grid(std::size_t n) {
  const auto hi_rate = static_cast<std::size_t>(std::ceil(2.0 * std::cbrt(static_cast<double>(n))));
  const std::size_t hi = std::min(std::max<std::size_t>(hi_rate, 6), n / 2);
  std::vector<std::size_t> g;
  for (std::size_t m = 2; m <= hi; ++m) g.push_back(m);
  return g;
}

CpvResult select_dim_cpv(const Eigen::VectorXd& eigenvalues, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("cpv threshold must lie in (0,1)");
  const Eigen::VectorXd ev = eigenvalues.cwiseMax(0.0);
  const double total = ev.sum();
  if (!(total > 0.0)) throw ConfigError("cpv: predictor has zero total variance");
  CpvResult r;
  r.eigenvalues = eigenvalues;
  double acc = 0.0;
  for (Eigen::Index k = 0; k < ev.size(); ++k) {
    acc += ev(k);
    if (acc / total >= threshold * (1.0 - 1e-12)) {
      r.d = static_cast<std::size_t>(k) + 1;
      break;
    }
  }
  if (r.d == 0) r.d = static_cast<std::size_t>(ev.size());
  r.c = 2 * r.d;
  return r;
}

CpvResult select_dim_cpv(const FunctionalDataSet& data, std::size_t predictor, const BasisSet& master,
                         double threshold) {
  const FpcResult fpc = compute_fpc(data, predictor, master, 1);
  return select_dim_cpv(fpc.eigenvalues, threshold);
}

GcvResult select_lambda_gcv(const Design& design, const Eigen::VectorXd& y,
                            const std::vector<Eigen::MatrixXd>& raw_penalties, const std::vector<double>& lambda_grid) {
  if (lambda_grid.empty()) throw ConfigError("select_lambda_gcv: lambda grid is empty");
  GcvResult r;
  r.grid = lambda_grid;
  r.scores.assign(lambda_grid.size(), std::numeric_limits<double>::quiet_NaN());
  const Eigen::MatrixXd unit_penalty = build_penalty(raw_penalties, design, 1.0);
  double best = std::numeric_limits<double>::infinity();
  bool found = false;
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    const double lambda = lambda_grid[i];
    try {
      const PenalizedFit fit = fit_penalized(design, y, lambda * unit_penalty, lambda);
      r.scores[i] = gcv_score(fit);
    } catch (const NumericalError& e) {
      r.failures.push_back("lambda=" + std::to_string(lambda) + ": " + e.what());
      continue;
    }
    const double s = r.scores[i];
    if (!found || s < best || (s == best && lambda < r.chosen)) {
      best = s;
      r.chosen = lambda;
      found = true;
    }
  }
  if (!found) {
    std::string msg = "select_lambda_gcv: every candidate fit failed:";
    for (const auto& f : r.failures) msg += "\n  " + f;
    throw NumericalError(msg);
  }
  return r;
}

Eigen::MatrixXd block_covariance(const Eigen::MatrixXd& z_hat, std::size_t m) {
  const auto n = static_cast<std::size_t>(z_hat.rows());
  if (m < 1 || m > n) throw ConfigError("block_covariance: block size must lie in [1, n]");
  const std::size_t blocks = n - m + 1;
  Eigen::MatrixXd sums(static_cast<Eigen::Index>(blocks), z_hat.cols());
  for (std::size_t j = 0; j < blocks; ++j) {
    sums.row(static_cast<Eigen::Index>(j)) =
        z_hat.middleRows(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(m)).colwise().sum();
  }
  Eigen::MatrixXd xi = sums.transpose() * sums / (static_cast<double>(blocks) * static_cast<double>(m));
  return 0.5 * (xi + xi.transpose());
}

MvResult select_block_mv(const Eigen::MatrixXd& z_hat, const std::vector<std::size_t>& m_grid) {
  if (m_grid.size() < 5) throw ConfigError("select_block_mv: need at least 5 candidate block sizes");
  if (!std::is_sorted(m_grid.begin(), m_grid.end())) throw ConfigError("select_block_mv: m grid must be sorted");
  const auto n = static_cast<std::size_t>(z_hat.rows());
  if (m_grid.front() < 1 || m_grid.back() > n) throw ConfigError("select_block_mv: block sizes must lie in [1, n]");

  std::vector<Eigen::MatrixXd> xi;
  xi.reserve(m_grid.size());
  for (std::size_t m : m_grid) xi.push_back(block_covariance(z_hat, m));
  return select_block_mv(m_grid, xi);
}

MvResult select_block_mv(const std::vector<std::size_t>& m_grid, const std::vector<Eigen::MatrixXd>& xi) {
  if (m_grid.size() < 5) throw ConfigError("select_block_mv: need at least 5 candidate block sizes");
  if (xi.size() != m_grid.size()) throw ConfigError("select_block_mv: one covariance per candidate required");

  MvResult r;
  r.grid = m_grid;
  r.volatility.assign(m_grid.size(), std::numeric_limits<double>::quiet_NaN());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 2; j + 2 < m_grid.size(); ++j) {
    Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(xi[j].rows(), xi[j].cols());
    for (std::size_t k = j - 2; k <= j + 2; ++k) mean += xi[k];
    mean /= 5.0;
    double ss = 0.0;
    for (std::size_t k = j - 2; k <= j + 2; ++k) ss += (xi[k] - mean).squaredNorm();
    const double se = std::sqrt(ss / 4.0);
    r.volatility[j] = se;
    if (se < best) {
      best = se;
      r.chosen = m_grid[j];
    }
  }
  if (r.chosen == 0) throw NumericalError("select_block_mv: volatility undefined for every interior candidate");
  return r;
}

nlohmann::json to_json(const CpvResult& r) {
  return {{"eigenvalues", std::vector<double>(r.eigenvalues.data(), r.eigenvalues.data() + r.eigenvalues.size())},
          {"d_j", r.d},
          {"c_j", r.c}};
}

nlohmann::json to_json(const GcvResult& r) {
  return {{"grid", r.grid}, {"scores", nan_to_null(r.scores)}, {"chosen", r.chosen}, {"failures", r.failures}};
}

nlohmann::json to_json(const MvResult& r) {
  return {{"grid", r.grid}, {"L_values", nan_to_null(r.volatility)}, {"chosen", r.chosen}};
}

}  // namespace fjscb
