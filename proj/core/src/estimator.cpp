#include "fjscb/estimator.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "fjscb/errors.hpp"

namespace fjscb {

Design build_design(const ScoreSet& scores) {
  Design d;
  d.dims = scores.dims;
  d.scales = scores.scales;
  std::size_t c = 0;
  for (std::size_t cj : scores.dims) {
    d.offsets.push_back(c);
    c += cj;
  }
  const Eigen::Index n = scores.standardized.empty() ? 0 : scores.standardized.front().rows();
  d.x.resize(n, static_cast<Eigen::Index>(c));
  d.excluded.reserve(c);
  for (std::size_t j = 0; j < scores.dims.size(); ++j) {
    d.x.middleCols(static_cast<Eigen::Index>(d.offsets[j]), static_cast<Eigen::Index>(scores.dims[j])) =
        scores.standardized[j];
    d.excluded.insert(d.excluded.end(), scores.excluded[j].begin(), scores.excluded[j].end());
  }
  return d;
}

Eigen::MatrixXd build_penalty(const std::vector<Eigen::MatrixXd>& raw, const std::vector<Eigen::VectorXd>& scales,
                              const std::vector<bool>& excluded, double lambda) {
  if (raw.size() != scales.size()) throw ConfigError("build_penalty: one raw penalty per predictor required");
  if (!(lambda >= 0.0)) throw ConfigError("build_penalty: lambda must be non-negative");
  Eigen::Index c = 0;
  for (const auto& s : scales) c += s.size();
  if (static_cast<std::size_t>(c) != excluded.size()) throw ConfigError("build_penalty: exclusion mask size mismatch");
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(c, c);
  Eigen::Index off = 0;
  for (std::size_t j = 0; j < raw.size(); ++j) {
    const Eigen::Index cj = scales[j].size();
    if (raw[j].rows() < cj || raw[j].cols() < cj) {
      throw ConfigError("build_penalty: raw penalty for predictor " + std::to_string(j + 1) + " is too small");
    }
    for (Eigen::Index k = 0; k < cj; ++k) {
      if (excluded[static_cast<std::size_t>(off + k)]) continue;
      if (!(scales[j](k) > 0.0)) {
        throw std::logic_error("build_penalty: included coordinate (" + std::to_string(j + 1) + ", " +
                               std::to_string(k + 1) + ") has zero scale");
      }
      for (Eigen::Index l = 0; l < cj; ++l) {
        if (excluded[static_cast<std::size_t>(off + l)]) continue;
        r(off + k, off + l) = lambda * raw[j](k, l) / (scales[j](k) * scales[j](l));
      }
    }
    off += cj;
  }
  return r;
}

Eigen::MatrixXd build_penalty(const std::vector<Eigen::MatrixXd>& raw, const Design& design, double lambda) {
  return build_penalty(raw, design.scales, design.excluded, lambda);
}

PenalizedFit fit_penalized(const Design& design, const Eigen::VectorXd& y, const Eigen::MatrixXd& penalty,
                           double lambda) {
  const Eigen::Index n = design.x.rows();
  const Eigen::Index c = design.x.cols();
  if (y.size() != n) throw ConfigError("fit_penalized: response length does not match design rows");
  if (penalty.rows() != c || penalty.cols() != c) throw ConfigError("fit_penalized: penalty has wrong shape");
  if (n == 0 || c == 0) throw ConfigError("fit_penalized: empty design");

  const double inv_n = 1.0 / static_cast<double>(n);
  const Eigen::MatrixXd gram = design.x.transpose() * design.x * inv_n;
  Eigen::MatrixXd sigma = gram + penalty;
  sigma = 0.5 * (sigma + sigma.transpose());
  Eigen::Index included = 0;
  double trace = 0.0;
  for (Eigen::Index k = 0; k < c; ++k) {
    if (design.excluded[static_cast<std::size_t>(k)]) {
      sigma.row(k).setZero();
      sigma.col(k).setZero();
      sigma(k, k) = 1.0;
    } else {
      trace += sigma(k, k);
      ++included;
    }
  }
  if (included == 0) throw IllPosedFitError("fit_penalized: every design coordinate is excluded");

  // PD check on the included block only; excluded coordinates carry unit diagonals.
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = 0; k < c; ++k) {
    if (!design.excluded[static_cast<std::size_t>(k)]) idx.push_back(k);
  }
  const auto m = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) sub(a, b) = sigma(idx[a], idx[b]);
  }
  const double min_eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sub, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  const double tol = 1e-12 * trace / static_cast<double>(included);
  if (!(min_eig >= tol) || !std::isfinite(min_eig)) {
    throw IllPosedFitError("fit_penalized: X'X/n + R(lambda) is numerically singular (min eigenvalue " +
                           std::to_string(min_eig) + ", lambda = " + std::to_string(lambda) +
                           "); increase lambda or reduce the truncation dimensions");
  }

  PenalizedFit fit;
  fit.factor.compute(sigma);
  if (fit.factor.info() != Eigen::Success) {
    throw IllPosedFitError("fit_penalized: Cholesky factorization failed; increase lambda or reduce dimensions");
  }
  fit.theta = fit.factor.solve(design.x.transpose() * y * inv_n);
  fit.residuals = y - design.x * fit.theta;
  // Trace(H) = Trace(Sigma^{-1} X'X/n)
  fit.hat_trace = fit.factor.solve(gram).trace();
  fit.sigma_tilde = std::move(sigma);
  fit.lambda = lambda;
  fit.dims = design.dims;
  fit.offsets = design.offsets;
  fit.scales = design.scales;
  fit.excluded = design.excluded;
  fit.n = static_cast<std::size_t>(n);
  return fit;
}

double penalized_criterion(const Design& design, const Eigen::VectorXd& y, const Eigen::MatrixXd& penalty,
                           const Eigen::VectorXd& theta) {
  const Eigen::VectorXd r = y - design.x * theta;
  return r.squaredNorm() / static_cast<double>(design.n()) + theta.dot(penalty * theta);
}

std::vector<Eigen::MatrixXd> reconstruction_matrices(const PenalizedFit& fit, const std::vector<BasisSet>& bases,
                                                     std::span<const double> points) {
  if (bases.size() != fit.p()) throw ConfigError("reconstruction: one basis per predictor required");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(fit.p());
  for (std::size_t j = 0; j < fit.p(); ++j) {
    const auto cj = static_cast<Eigen::Index>(fit.dims[j]);
    if (bases[j].size() < fit.dims[j]) throw ConfigError("reconstruction: basis smaller than fitted dimension");
    Eigen::MatrixXd w = bases[j].eval(points).topRows(cj).transpose();
    for (Eigen::Index k = 0; k < cj; ++k) {
      if (fit.excluded[fit.offsets[j] + static_cast<std::size_t>(k)]) {
        w.col(k).setZero();
      } else {
        w.col(k) /= fit.scales[j](k);
      }
    }
    out.push_back(std::move(w));
  }
  return out;
}

Eigen::MatrixXd reconstruct_beta(const PenalizedFit& fit, const std::vector<BasisSet>& bases,
                                 std::span<const double> points) {
  const auto w = reconstruction_matrices(fit, bases, points);
  Eigen::MatrixXd beta(static_cast<Eigen::Index>(fit.p()), static_cast<Eigen::Index>(points.size()));
  for (std::size_t j = 0; j < fit.p(); ++j) {
    beta.row(static_cast<Eigen::Index>(j)) =
        (w[j] * fit.theta.segment(static_cast<Eigen::Index>(fit.offsets[j]), static_cast<Eigen::Index>(fit.dims[j])))
            .transpose();
  }
  return beta;
}

double gcv_score(const PenalizedFit& fit) {
  const auto n = static_cast<double>(fit.n);
  if (!(fit.hat_trace < n)) {
    throw DegenerateFitError("gcv_score: Trace(H) = " + std::to_string(fit.hat_trace) + " >= n = " +
                             std::to_string(fit.n));
  }
  const double shrink = 1.0 - fit.hat_trace / n;
  return (fit.residuals.squaredNorm() / n) / (shrink * shrink);
}

nlohmann::json fit_summary_json(const PenalizedFit& fit) {
  nlohmann::json j;
  j["lambda"] = fit.lambda;
  j["dims"] = fit.dims;
  try {
    j["gcv"] = gcv_score(fit);
  } catch (const DegenerateFitError&) {
    j["gcv"] = nullptr;
  }
  j["theta"] = std::vector<double>(fit.theta.data(), fit.theta.data() + fit.theta.size());
  j["residual_variance"] = fit.residuals.squaredNorm() / static_cast<double>(fit.n);
  j["hat_trace"] = fit.hat_trace;
  j["n"] = fit.n;
  return j;
}

}  // namespace fjscb
