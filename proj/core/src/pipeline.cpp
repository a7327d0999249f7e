#include "fjscb/pipeline.hpp"

#include <algorithm>
#include <string>

#include "fjscb/errors.hpp"

namespace fjscb {

std::string_view to_string(WorkingBasis b) noexcept {
  switch (b) {
    case WorkingBasis::Fourier:
      return "fourier";
    case WorkingBasis::Legendre:
      return "legendre";
    case WorkingBasis::Fpc:
      return "fpc";
  }
  return "unknown";
}

WorkingBasis parse_working_basis(std::string_view name) {
  if (name == "fourier") return WorkingBasis::Fourier;
  if (name == "legendre") return WorkingBasis::Legendre;
  if (name == "fpc") return WorkingBasis::Fpc;
  throw ConfigError("unknown basis '" + std::string(name) + "' (expected fourier, legendre or fpc)");
}

std::string_view to_string(WeightMode m) noexcept { return m == WeightMode::Unit ? "unit" : "std"; }

WeightMode parse_weight_mode(std::string_view name) {
  if (name == "unit") return WeightMode::Unit;
  if (name == "std") return WeightMode::StdDriven;
  throw ConfigError("unknown weight mode '" + std::string(name) + "' (expected unit or std)");
}

nlohmann::json to_json(const TuningReport& r) {
  nlohmann::json j;
  if (r.cpv.empty()) {
    j["cpv"] = {{"fixed", true}, {"c_j", r.dims}};
  } else {
    nlohmann::json eig = nlohmann::json::array();
    std::vector<std::size_t> d, c;
    for (const auto& cpv : r.cpv) {
      eig.push_back(to_json(cpv)["eigenvalues"]);
      d.push_back(cpv.d);
      c.push_back(cpv.c);
    }
    j["cpv"] = {{"eigenvalues", eig}, {"d_j", d}, {"c_j", c}};
  }
  j["gcv"] = r.gcv ? to_json(*r.gcv) : nlohmann::json{{"fixed", true}, {"chosen", r.lambda}};
  j["mv"] = r.mv ? to_json(*r.mv) : nlohmann::json{{"fixed", true}, {"chosen", r.block_size}};
  j["warnings"] = r.warnings;
  return j;
}

FittedModel fit_model(const FunctionalDataSet& input, WorkingBasis basis_kind, const TuningConfig& tuning) {
  tuning.validate();
  input.validate();
  const FunctionalDataSet data = input.centered ? input : center(input);
  const std::size_t p = data.p();
  const BasisSet& master = default_master_basis();

  FittedModel model;
  TuningReport& report = model.tuning;
  if (tuning.fixed_dims && tuning.fixed_dims->size() != p) {
    throw ConfigError("fixed dimensions: expected " + std::to_string(p) + " values, got " +
                      std::to_string(tuning.fixed_dims->size()));
  }

  // (b) truncation dimensions and working bases
  for (std::size_t j = 0; j < p; ++j) {
    const bool need_fpc = !tuning.fixed_dims || basis_kind == WorkingBasis::Fpc;
    std::optional<FpcResult> fpc;
    if (need_fpc) {
      fpc = compute_fpc(data, j, master, master.size());
      for (const auto& w : fpc->warnings) report.warnings.push_back("predictor " + std::to_string(j + 1) + ": " + w);
    }
    std::size_t cj = 0;
    if (tuning.fixed_dims) {
      cj = (*tuning.fixed_dims)[j];
    } else {
      CpvResult cpv = select_dim_cpv(fpc->eigenvalues, tuning.cpv_threshold);
      cj = cpv.c;
      report.cpv.push_back(std::move(cpv));
    }
    if (basis_kind == WorkingBasis::Fpc && cj > master.size()) {
      report.warnings.push_back("predictor " + std::to_string(j + 1) + ": c_j = " + std::to_string(cj) +
                                " capped at the master basis size " + std::to_string(master.size()));
      cj = master.size();
    }
    report.dims.push_back(cj);
    switch (basis_kind) {
      case WorkingBasis::Fourier:
        model.bases.push_back(BasisSet::fourier(cj));
        break;
      case WorkingBasis::Legendre:
        model.bases.push_back(BasisSet::legendre(cj));
        break;
      case WorkingBasis::Fpc:
        model.bases.push_back(fpc->basis.truncated(cj));
        break;
    }
  }

  model.scores = project_scores(data, model.bases, report.dims);
  model.design = build_design(model.scores);
  std::vector<Eigen::MatrixXd> raw;
  raw.reserve(p);
  for (std::size_t j = 0; j < p; ++j) raw.push_back(model.bases[j].raw_penalty(report.dims[j]));

  // lambda
  if (tuning.fixed_lambda) {
    report.lambda = *tuning.fixed_lambda;
  } else {
    const std::vector<double> grid = tuning.lambda_grid.empty() ? default_lambda_grid() : tuning.lambda_grid;
    report.gcv = select_lambda_gcv(model.design, data.responses, raw, grid);
    report.lambda = report.gcv->chosen;
  }

  // (c) fit and residual scores
  model.fit = fit_penalized(model.design, data.responses, build_penalty(raw, model.design, report.lambda),
                            report.lambda);
  model.z_hat = score_residual_vectors(model.design.x, model.fit.residuals);

  // (a) block size
  if (tuning.fixed_m) {
    report.block_size = *tuning.fixed_m;
  } else {
    const std::vector<std::size_t> grid = tuning.m_grid.empty() ? default_m_grid(data.n()) : tuning.m_grid;
    if (!grid.empty() && grid.back() > data.n() / 2) {
      throw ConfigError("m grid candidate " + std::to_string(grid.back()) + " exceeds n/2 = " +
                        std::to_string(data.n() / 2));
    }
    report.mv = select_block_mv(model.z_hat, grid);
    report.block_size = report.mv->chosen;
  }
  return model;
}

BandSet band_model(const FittedModel& model, BootstrapPlan plan) {
  plan.block_size = model.tuning.block_size;
  return build_band(model.fit, model.bases, model.z_hat, plan);
}

}  // namespace fjscb
