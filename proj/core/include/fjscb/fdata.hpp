#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fjscb/basis.hpp"

namespace fjscb {

/// n observations of p functional predictors on a shared grid, plus scalar responses.
struct FunctionalDataSet {
  std::vector<double> grid;              ///< strictly increasing, within [0,1]
  std::vector<Eigen::MatrixXd> curves;   ///< curves[j](i, g) = X_ij(grid[g])
  Eigen::VectorXd responses;             ///< Y_i
  std::vector<std::string> ids;          ///< observation ids (may be empty for synthetic data)
  bool centered = false;

  [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(responses.size()); }
  [[nodiscard]] std::size_t p() const noexcept { return curves.size(); }

  /// Shape and grid checks. `min_grid` is the density required for score
  /// projection (20 points by default); loaders call it with 2.
  void validate(std::size_t min_grid = 20) const;
};

/// Raw basis scores, their scales f_jk and the standardized scores x_ij,k.
struct ScoreSet {
  std::vector<Eigen::MatrixXd> raw;           ///< raw[j] is n x c_j
  std::vector<Eigen::VectorXd> scales;        ///< scales[j](k) = Std of raw[j].col(k), divisor n
  std::vector<Eigen::MatrixXd> standardized;  ///< raw / scale; zero column when excluded
  std::vector<std::vector<bool>> excluded;    ///< floored coordinates dropped from the design
  std::vector<std::size_t> dims;              ///< c_j
};

/// Relative threshold below which a scale f_jk counts as zero.
inline constexpr double kScaleFloor = 1e-8;

/// Removes pointwise curve means and the response mean.
[[nodiscard]] FunctionalDataSet center(FunctionalDataSet data);

/// Projects curve j onto bases[j] (first dims[j] functions) with the trapezoid
/// rule on the observation grid, then standardizes each coordinate.
[[nodiscard]] ScoreSet project_scores(const FunctionalDataSet& data, const std::vector<BasisSet>& bases,
                                      const std::vector<std::size_t>& dims);

/// n x size matrix of trapezoid inner products <X_ij, alpha_k> on the data grid.
[[nodiscard]] Eigen::MatrixXd basis_inner_products(const Eigen::MatrixXd& curves, std::span<const double> grid,
                                                   const BasisSet& basis, std::size_t count);

/// n x master.size() expansion coefficients of the curves. Least squares on the
/// grid when it has at least twice as many points as the master family,
/// trapezoid inner products otherwise.
[[nodiscard]] Eigen::MatrixXd master_coefficients(const Eigen::MatrixXd& curves, std::span<const double> grid,
                                                  const BasisSet& master);

struct FpcResult {
  BasisSet basis;                 ///< InMasterBasis of the requested rank
  Eigen::VectorXd eigenvalues;    ///< full sample spectrum, decreasing, clamped at 0
  std::vector<std::string> warnings;
};

/// Functional principal components of predictor j, expressed in `master`.
/// Eigenvalues are variances of the FPC scores (divisor n).
[[nodiscard]] FpcResult compute_fpc(const FunctionalDataSet& data, std::size_t predictor, const BasisSet& master,
                                    std::size_t rank);

/// Legendre family of order 25 used as master for data-driven bases.
[[nodiscard]] const BasisSet& default_master_basis();

// ---- CSV ingestion -------------------------------------------------------

/// Reads the wide curves CSV (`id,t_1..t_G` or `id,pred,t_1..t_G`) and the
/// responses CSV (`id,y`). The grid header is rescaled affinely onto [0,1].
/// Throws ParseError with file/row/column context.
[[nodiscard]] FunctionalDataSet load_curves(const std::filesystem::path& curves_file,
                                            const std::filesystem::path& responses_file);

/// Curves only (single-series workflows that derive responses elsewhere).
struct CurveTable {
  std::vector<double> grid;
  std::vector<std::string> ids;
  std::vector<Eigen::MatrixXd> curves;
};
[[nodiscard]] CurveTable load_curve_table(const std::filesystem::path& curves_file);

/// Builds a lagged design from a single curve series x_0..x_{N-1} and
/// responses y_0..y_{N-1}: row t (t = lags..N-1) regresses y_t on
/// X_{t-1}, ..., X_{t-lags}, giving N - lags observations and p = lags.
[[nodiscard]] FunctionalDataSet make_lagged(const std::vector<double>& grid, const Eigen::MatrixXd& series,
                                            const Eigen::VectorXd& responses, const std::vector<std::string>& ids,
                                            std::size_t lags);

}  // namespace fjscb
