#include "fjscb/fdata.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fjscb/errors.hpp"

namespace fjscb {

void FunctionalDataSet::validate(std::size_t min_grid) const {
  if (grid.size() < min_grid) {
    throw ConfigError("grid has " + std::to_string(grid.size()) + " points; at least " + std::to_string(min_grid) +
                      " required");
  }
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!(grid[g] >= 0.0 && grid[g] <= 1.0)) throw ConfigError("grid point outside [0,1]");
    if (g > 0 && !(grid[g] > grid[g - 1])) throw ConfigError("grid is not strictly increasing");
  }
  if (curves.empty()) throw ConfigError("dataset has no functional predictors");
  for (std::size_t j = 0; j < curves.size(); ++j) {
    if (static_cast<std::size_t>(curves[j].rows()) != n() ||
        static_cast<std::size_t>(curves[j].cols()) != grid.size()) {
      throw ConfigError("predictor " + std::to_string(j + 1) + " has shape " + std::to_string(curves[j].rows()) +
                        "x" + std::to_string(curves[j].cols()) + ", expected " + std::to_string(n()) + "x" +
                        std::to_string(grid.size()));
    }
  }
}

FunctionalDataSet center(FunctionalDataSet data) {
  for (auto& x : data.curves) {
    const Eigen::RowVectorXd mean = x.colwise().mean();
    x.rowwise() -= mean;
  }
  if (data.responses.size() > 0) data.responses.array() -= data.responses.mean();
  data.centered = true;
  return data;
}

Eigen::MatrixXd basis_inner_products(const Eigen::MatrixXd& curves, std::span<const double> grid,
                                     const BasisSet& basis, std::size_t count) {
  const std::vector<double> w = trapezoid_weights(grid);
  const Eigen::Map<const Eigen::VectorXd> wv(w.data(), static_cast<Eigen::Index>(w.size()));
  const Eigen::MatrixXd values = basis.eval(grid).topRows(static_cast<Eigen::Index>(count));
  return curves * wv.asDiagonal() * values.transpose();
}

ScoreSet project_scores(const FunctionalDataSet& data, const std::vector<BasisSet>& bases,
                        const std::vector<std::size_t>& dims) {
  const std::size_t p = data.p();
  if (bases.size() != p || dims.size() != p) {
    throw ConfigError("project_scores: need one basis and one dimension per predictor");
  }
  ScoreSet s;
  s.dims = dims;
  const auto n = static_cast<double>(data.n());
  for (std::size_t j = 0; j < p; ++j) {
    if (dims[j] == 0 || dims[j] > bases[j].size()) {
      throw ConfigError("predictor " + std::to_string(j + 1) + ": dimension c_j = " + std::to_string(dims[j]) +
                        " exceeds basis size " + std::to_string(bases[j].size()));
    }
    Eigen::MatrixXd raw = basis_inner_products(data.curves[j], data.grid, bases[j], dims[j]);
    const Eigen::RowVectorXd mean = raw.colwise().mean();
    Eigen::VectorXd scale =
        ((raw.rowwise() - mean).array().square().colwise().sum() / n).sqrt().transpose();
    const double top = scale.size() > 0 ? scale.maxCoeff() : 0.0;
    std::vector<bool> excluded(dims[j], false);
    Eigen::MatrixXd std_scores = Eigen::MatrixXd::Zero(raw.rows(), raw.cols());
    for (Eigen::Index k = 0; k < raw.cols(); ++k) {
      if (!(top > 0.0) || scale(k) < kScaleFloor * top) {
        excluded[static_cast<std::size_t>(k)] = true;
        continue;
      }
      std_scores.col(k) = raw.col(k) / scale(k);
    }
    s.raw.push_back(std::move(raw));
    s.scales.push_back(std::move(scale));
    s.standardized.push_back(std::move(std_scores));
    s.excluded.push_back(std::move(excluded));
  }
  return s;
}

Eigen::MatrixXd master_coefficients(const Eigen::MatrixXd& curves, std::span<const double> grid,
                                    const BasisSet& master) {
  if (grid.size() < 2 * master.size()) return basis_inner_products(curves, grid, master, master.size());
  // Least squares fit of every curve on the master family, exact for curves in its span.
  const Eigen::MatrixXd design = master.eval(grid).transpose();
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  return qr.solve(curves.transpose()).transpose();
}

FpcResult compute_fpc(const FunctionalDataSet& data, std::size_t predictor, const BasisSet& master,
                      std::size_t rank) {
  if (predictor >= data.p()) throw ConfigError("compute_fpc: predictor index out of range");
  if (rank == 0 || rank > master.size()) {
    throw ConfigError("compute_fpc: rank " + std::to_string(rank) + " not in [1, " + std::to_string(master.size()) +
                      "]");
  }
  const Eigen::MatrixXd a = master_coefficients(data.curves[predictor], data.grid, master);
  const Eigen::MatrixXd centered = a.rowwise() - a.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(data.n());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) throw NumericalError("compute_fpc: eigendecomposition failed");
  const Eigen::Index m = cov.rows();
  // Eigen returns ascending order.
  Eigen::VectorXd values = eig.eigenvalues().reverse().cwiseMax(0.0);
  Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();

  std::vector<std::string> warnings;
  Eigen::MatrixXd coeffs(static_cast<Eigen::Index>(rank), m);
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(rank); ++k) {
    Eigen::VectorXd v = vectors.col(k);
    // <phi_k, master_1> is the first coefficient; fall back to the first
    // non-negligible coefficient when it vanishes.
    Eigen::Index lead = 0;
    if (std::abs(v(0)) < 1e-10) {
      for (Eigen::Index l = 0; l < m; ++l) {
        if (std::abs(v(l)) >= 1e-10) {
          lead = l;
          break;
        }
      }
    }
    if (v(lead) < 0.0) v = -v;
    coeffs.row(k) = v.transpose();
    if (k + 1 < static_cast<Eigen::Index>(rank) && values(k) - values(k + 1) <= 1e-10) {
      warnings.push_back("eigenvalues " + std::to_string(k + 1) + " and " + std::to_string(k + 2) +
                             " are not separated (difference <= 1e-10); FPC " + std::to_string(k + 1) +
                             " is not identifiable");
    }
  }
  return FpcResult{BasisSet::in_master(master, std::move(coeffs)), std::move(values), std::move(warnings)};
}

const BasisSet& default_master_basis() {
  static const BasisSet master = BasisSet::legendre(25);
  return master;
}

FunctionalDataSet make_lagged(const std::vector<double>& grid, const Eigen::MatrixXd& series,
                              const Eigen::VectorXd& responses, const std::vector<std::string>& ids,
                              std::size_t lags) {
  const auto total = static_cast<std::size_t>(series.rows());
  if (static_cast<std::size_t>(responses.size()) != total) {
    throw ConfigError("make_lagged: series and responses differ in length");
  }
  if (lags == 0) throw ConfigError("make_lagged: lags must be positive");
  if (lags >= total) {
    throw ConfigError("make_lagged: " + std::to_string(lags) + " lags leave no usable rows from a series of length " +
                      std::to_string(total));
  }
  const std::size_t rows = total - lags;
  FunctionalDataSet d;
  d.grid = grid;
  d.responses = responses.tail(static_cast<Eigen::Index>(rows));
  for (std::size_t j = 1; j <= lags; ++j) {
    // predictor j uses X_{t-j} for responses y_t, t = lags..total-1
    d.curves.push_back(series.middleRows(static_cast<Eigen::Index>(lags - j), static_cast<Eigen::Index>(rows)));
  }
  if (ids.size() == total) d.ids.assign(ids.begin() + static_cast<std::ptrdiff_t>(lags), ids.end());
  return d;
}

}  // namespace fjscb
