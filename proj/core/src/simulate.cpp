#include "fjscb/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "fjscb/errors.hpp"
#include "fjscb/parallel.hpp"

namespace fjscb {

BetaScenario parse_beta_scenario(std::string_view name) {
  if (name == "a") return BetaScenario::A;
  if (name == "zero") return BetaScenario::Zero;
  throw ConfigError("unknown scenario '" + std::string(name) + "' (expected a or zero)");
}

std::string_view to_string(BetaScenario s) noexcept { return s == BetaScenario::A ? "a" : "zero"; }

void DgpConfig::validate() const {
  if (n < 10) throw ConfigError("simulation needs n >= 10");
  if (grid_size < 20) throw ConfigError("synthesis grid needs at least 20 points");
  if (k_dgp < 10) throw ConfigError("K_dgp must be at least 10");
  if (!(phi1 >= 0.0) || !std::isfinite(phi1)) throw ConfigError("phi1 must be a finite value >= 0");
  if (synth_basis == BasisKind::InMasterBasis) throw ConfigError("synthesis basis must be fourier or legendre");
}

Eigen::MatrixXd mixing_matrix(DMode mode, std::size_t k) {
  const auto kk = static_cast<Eigen::Index>(k);
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(kk, kk);
  if (mode == DMode::Tridiagonal) {
    for (Eigen::Index i = 0; i + 1 < kk; ++i) {
      d(i, i + 1) = 0.2;
      d(i + 1, i) = 0.2;
    }
  }
  return d;
}

FmaSample gen_fma1(const DgpConfig& config, std::mt19937_64& gen) {
  config.validate();
  const auto n = static_cast<Eigen::Index>(config.n);
  const auto k = static_cast<Eigen::Index>(config.k_dgp);
  std::normal_distribution<double> normal(0.0, 1.0);
  // eta_0 .. eta_n; eta_0 is the one-step burn-in for the MA term
  Eigen::MatrixXd eta(n + 1, k);
  for (Eigen::Index i = 0; i <= n; ++i) {
    for (Eigen::Index c = 0; c < k; ++c) eta(i, c) = normal(gen) / static_cast<double>(c + 1);
  }
  const Eigen::MatrixXd innov = eta.bottomRows(n) + config.phi1 * eta.topRows(n);
  const Eigen::MatrixXd d = mixing_matrix(config.d_mode, config.k_dgp);

  FmaSample s;
  s.grid = uniform_grid(config.grid_size);
  s.scores = innov * d.transpose();
  const BasisSet basis =
      config.synth_basis == BasisKind::Fourier ? BasisSet::fourier(config.k_dgp) : BasisSet::legendre(config.k_dgp);
  s.curves = s.scores * basis.eval(s.grid);
  return s;
}

Eigen::VectorXd beta_coefficients(BetaScenario scenario, std::size_t k) {
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  if (scenario == BetaScenario::Zero) return b;
  const double head[3] = {0.8, 0.5, -0.3};
  for (std::size_t i = 0; i < k; ++i) {
    const auto kk = static_cast<double>(i + 1);
    b(static_cast<Eigen::Index>(i)) = i < 3 ? head[i] : 1.0 / (kk * kk * kk);
  }
  return b;
}

Eigen::VectorXd true_beta(BetaScenario scenario, const BasisSet& basis, std::span<const double> points) {
  return basis.eval(points).transpose() * beta_coefficients(scenario, basis.size());
}

Eigen::VectorXd first_fpc_scores(const Eigen::MatrixXd& scores) {
  const Eigen::MatrixXd centered = scores.rowwise() - scores.colwise().mean();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(scores.rows());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  Eigen::VectorXd v = eig.eigenvectors().col(cov.cols() - 1);
  if (v(0) < 0.0) v = -v;
  return centered * v;
}

double draw_t8(std::mt19937_64& gen) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(8.0);
  const double z = normal(gen);
  return z / std::sqrt(chi2(gen) / 8.0);
}

Eigen::VectorXd gen_ar_innovations(std::size_t n, std::mt19937_64& gen) {
  constexpr std::size_t burn_in = 50;
  const double scale = std::sqrt(0.75);
  Eigen::VectorXd s(static_cast<Eigen::Index>(n));
  double prev = 0.0;
  for (std::size_t i = 0; i < burn_in + n; ++i) {
    prev = 0.2 * prev + scale * draw_t8(gen);
    if (i >= burn_in) s(static_cast<Eigen::Index>(i - burn_in)) = prev;
  }
  return s;
}

Eigen::VectorXd gen_errors_b(const Eigen::VectorXd& first_fpc, std::mt19937_64& gen) {
  const Eigen::VectorXd s = gen_ar_innovations(static_cast<std::size_t>(first_fpc.size()), gen);
  return 0.5 * s.cwiseProduct(first_fpc);
}

SimulatedData simulate_dataset(const DgpConfig& config, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  FmaSample sample = gen_fma1(config, gen);
  const Eigen::VectorXd beta = beta_coefficients(config.beta, config.k_dgp);
  const Eigen::VectorXd eps = gen_errors_b(first_fpc_scores(sample.scores), gen);

  FunctionalDataSet data;
  data.grid = std::move(sample.grid);
  data.responses = sample.scores * beta + eps;
  data.curves.push_back(std::move(sample.curves));
  const BasisSet basis =
      config.synth_basis == BasisKind::Fourier ? BasisSet::fourier(config.k_dgp) : BasisSet::legendre(config.k_dgp);
  return SimulatedData{std::move(data), beta, basis};
}

void SimulationSettings::validate() const {
  dgp.validate();
  tuning.validate();
  if (reps < 50) throw ConfigError("Monte Carlo needs at least 50 replications");
  if (replicates < 100) throw ConfigError("bootstrap needs B >= 100 replicates");
  if (eval_points < 100) throw ConfigError("evaluation grid needs at least 100 points");
  if (alpha_levels.empty()) throw ConfigError("at least one alpha level is required");
  for (double a : alpha_levels) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("alpha levels must lie in (0,1)");
  }
}

bool covers(const Eigen::MatrixXd& lower, const Eigen::MatrixXd& upper, const Eigen::MatrixXd& truth) {
  return (truth.array() >= lower.array()).all() && (truth.array() <= upper.array()).all();
}

void summarize(LevelSummary& level) {
  const auto reps = static_cast<double>(level.events.size());
  if (level.events.empty()) {
    level.coverage = level.mean_width = level.se = 0.0;
    return;
  }
  double hits = 0.0;
  double width = 0.0;
  for (std::size_t r = 0; r < level.events.size(); ++r) {
    hits += level.events[r];
    width += level.widths[r];
  }
  level.coverage = hits / reps;
  level.mean_width = width / reps;
  level.se = std::sqrt(level.coverage * (1.0 - level.coverage) / reps);
}

namespace {

struct RepOutcome {
  bool ok = false;
  std::string error;
  std::vector<int> events;
  std::vector<double> widths;
  std::size_t m = 0;
  double lambda = 0.0;
  std::size_t c = 0;
};

}  // namespace

void pair_synthesis(DgpConfig& config, WorkingBasis basis) {
  config.synth_basis = basis == WorkingBasis::Fourier ? BasisKind::Fourier : BasisKind::Legendre;
  config.d_mode = basis == WorkingBasis::Fpc ? DMode::Diagonal : DMode::Tridiagonal;
}

SimulationReport run_monte_carlo(const SimulationSettings& settings) {
  settings.validate();
  const std::vector<double> grid = uniform_grid(settings.eval_points);
  const BasisSet synth = settings.dgp.synth_basis == BasisKind::Fourier ? BasisSet::fourier(settings.dgp.k_dgp)
                                                                       : BasisSet::legendre(settings.dgp.k_dgp);
  const Eigen::RowVectorXd truth = true_beta(settings.dgp.beta, synth, grid).transpose();

  std::vector<RepOutcome> outcomes(settings.reps);
  parallel_for(settings.reps, settings.threads, [&](std::size_t r) {
    RepOutcome& out = outcomes[r];
    try {
      const SimulatedData sim = simulate_dataset(settings.dgp, derive_seed(settings.seed, 2 * r));
      const FittedModel model = fit_model(sim.data, settings.basis, settings.tuning);
      BootstrapPlan plan;
      plan.replicates = settings.replicates;
      plan.alpha_levels = settings.alpha_levels;
      plan.weight_mode = settings.weights;
      plan.eval_grid = grid;
      plan.master_seed = derive_seed(settings.seed, 2 * r + 1);
      plan.threads = 1;
      const BandSet band = band_model(model, plan);
      Eigen::MatrixXd truth_rows(band.beta_hat.rows(), band.beta_hat.cols());
      truth_rows.rowwise() = truth;
      for (const auto& level : band.levels) {
        out.events.push_back(covers(level.lower, level.upper, truth_rows) ? 1 : 0);
        double w = 0.0;
        for (Eigen::Index j = 0; j < level.upper.rows(); ++j) {
          const Eigen::VectorXd diff = (level.upper.row(j) - level.lower.row(j)).transpose();
          w += trapezoid(grid, std::span<const double>(diff.data(), static_cast<std::size_t>(diff.size())));
        }
        out.widths.push_back(w / static_cast<double>(level.upper.rows()));
      }
      out.m = model.tuning.block_size;
      out.lambda = model.tuning.lambda;
      out.c = model.tuning.dims.front();
      out.ok = true;
    } catch (const std::exception& e) {
      out.error = "replication " + std::to_string(r) + ": " + e.what();
    }
  });

  SimulationReport report;
  report.settings = settings;
  for (double a : settings.alpha_levels) report.levels.push_back(LevelSummary{a, 0.0, 0.0, 0.0, {}, {}});
  for (const auto& out : outcomes) {
    if (!out.ok) {
      ++report.failures;
      report.failure_messages.push_back(out.error);
      continue;
    }
    ++report.completed;
    for (std::size_t l = 0; l < report.levels.size(); ++l) {
      report.levels[l].events.push_back(out.events[l]);
      report.levels[l].widths.push_back(out.widths[l]);
    }
    report.chosen_m.push_back(out.m);
    report.chosen_lambda.push_back(out.lambda);
    report.chosen_c.push_back(out.c);
  }
  for (auto& level : report.levels) summarize(level);
  report.invalid = static_cast<double>(report.failures) > 0.01 * static_cast<double>(settings.reps);
  report.low_precision = settings.reps < 100;
  return report;
}

nlohmann::json to_json(const SimulationReport& report) {
  const auto& s = report.settings;
  nlohmann::json levels = nlohmann::json::array();
  for (const auto& l : report.levels) {
    levels.push_back({{"alpha", l.alpha},
                      {"level", 1.0 - l.alpha},
                      {"coverage", l.coverage},
                      {"mean_width", l.mean_width},
                      {"mc_se", l.se},
                      {"events", l.events}});
  }
  auto mean_of = [](const auto& v) {
    double acc = 0.0;
    for (auto x : v) acc += static_cast<double>(x);
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
  };
  return {{"config",
           {{"n", s.dgp.n},
            {"phi1", s.dgp.phi1},
            {"grid_size", s.dgp.grid_size},
            {"k_dgp", s.dgp.k_dgp},
            {"d_mode", s.dgp.d_mode == DMode::Diagonal ? "diagonal" : "tridiagonal"},
            {"synth_basis", to_string(s.dgp.synth_basis)},
            {"scenario", to_string(s.dgp.beta)},
            {"basis", to_string(s.basis)},
            {"weights", to_string(s.weights)},
            {"B", s.replicates},
            {"reps", s.reps},
            {"eval_points", s.eval_points},
            {"seed", s.seed}}},
          {"levels", levels},
          {"completed", report.completed},
          {"failures", report.failures},
          {"failure_messages", report.failure_messages},
          {"invalid", report.invalid},
          {"low_precision", report.low_precision},
          {"mean_block_size", mean_of(report.chosen_m)},
          {"mean_dimension", mean_of(report.chosen_c)},
          {"median_lambda",
           [&] {
             if (report.chosen_lambda.empty()) return 0.0;
             std::vector<double> v = report.chosen_lambda;
             std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
             return v[v.size() / 2];
           }()}};
}

void write_table_csv(std::ostream& out, std::span<const SimulationReport> reports) {
  using RowKey = std::pair<std::string, std::string>;
  std::vector<RowKey> rows;
  std::vector<std::string> cols;
  std::map<std::pair<RowKey, std::string>, std::string> cells;
  for (const auto& rep : reports) {
    const RowKey row{std::string(to_string(rep.settings.weights)), std::string(to_string(rep.settings.basis))};
    if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    for (const auto& level : rep.levels) {
      std::ostringstream col;
      col << "n=" << rep.settings.dgp.n << " phi1=" << rep.settings.dgp.phi1 << " level=" << 1.0 - level.alpha;
      if (std::find(cols.begin(), cols.end(), col.str()) == cols.end()) cols.push_back(col.str());
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(3) << level.coverage << " (" << std::setprecision(2) << level.mean_width
           << ")";
      cells[{row, col.str()}] = cell.str();
    }
  }
  out << "weights,basis";
  for (const auto& c : cols) out << ',' << c;
  out << '\n';
  for (const auto& row : rows) {
    out << row.first << ',' << row.second;
    for (const auto& c : cols) {
      const auto it = cells.find({row, c});
      out << ',' << (it == cells.end() ? "" : it->second);
    }
    out << '\n';
  }
}

}  // namespace fjscb
