#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fjscb/basis.hpp"
#include "fjscb/bootstrap.hpp"
#include "fjscb/estimator.hpp"
#include "fjscb/fdata.hpp"
#include "fjscb/tuning.hpp"

namespace fjscb {

enum class WorkingBasis { Fourier, Legendre, Fpc };

[[nodiscard]] std::string_view to_string(WorkingBasis b) noexcept;
[[nodiscard]] WorkingBasis parse_working_basis(std::string_view name);
[[nodiscard]] std::string_view to_string(WeightMode m) noexcept;
[[nodiscard]] WeightMode parse_weight_mode(std::string_view name);

struct TuningReport {
  std::vector<CpvResult> cpv;        ///< empty when dims were fixed
  std::optional<GcvResult> gcv;      ///< empty when lambda was fixed
  std::optional<MvResult> mv;        ///< empty when m was fixed
  std::vector<std::size_t> dims;
  double lambda = 0.0;
  std::size_t block_size = 1;
  std::vector<std::string> warnings;
};

[[nodiscard]] nlohmann::json to_json(const TuningReport& r);

/// Steps (a)-(c): centering, truncation (CPV), working bases, score projection,
/// lambda (GCV), penalized fit, score-residual vectors and block size (MV).
struct FittedModel {
  std::vector<BasisSet> bases;
  ScoreSet scores;
  Design design;
  PenalizedFit fit;
  Eigen::MatrixXd z_hat;
  TuningReport tuning;
};

[[nodiscard]] FittedModel fit_model(const FunctionalDataSet& data, WorkingBasis basis, const TuningConfig& tuning);

/// Steps (d)-(f) on a fitted model; the plan's block size is replaced by the tuned m.
[[nodiscard]] BandSet band_model(const FittedModel& model, BootstrapPlan plan);

}  // namespace fjscb
