#include "fjscb_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fjscb/errors.hpp"
#include "fjscb/pipeline.hpp"
#include "fjscb/quadrature.hpp"
#include "fjscb/report.hpp"
#include "fjscb/simulate.hpp"

namespace fjscb::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct DataOptions {
  std::string curves;
  std::string responses;
  std::size_t lags = 0;
};

struct TuneOptions {
  std::string basis = "fourier";
  double cpv = 0.85;
  std::string lambda_grid;
  std::string m_grid;
  std::optional<double> lambda;
  std::vector<std::size_t> dims;
  std::optional<std::size_t> m;
};

struct BandOptions {
  std::size_t replicates = 1000;
  std::vector<double> alpha{0.05, 0.10};
  std::string weights = "unit";
  std::vector<std::size_t> group;
  std::uint64_t seed = 0;
  std::size_t eval_points = 201;
};

struct SimOptions {
  std::vector<std::size_t> n{400};
  std::vector<double> phi1{0.5};
  std::vector<std::string> basis{"fourier"};
  std::vector<std::string> weights{"unit"};
  std::size_t reps = 1000;
  std::string scenario = "a";
  std::size_t grid_size = 100;
  std::string d_mode = "auto";
  std::string synth_basis = "auto";
};

struct Common {
  std::string out = ".";
  std::size_t threads = 1;
};

double parse_number(const std::string& text, const std::string& what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(what + ": '" + text + "' is not a number");
  return v;
}

std::size_t parse_count(const std::string& text, const std::string& what) {
  std::size_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(what + ": '" + text + "' is not a non-negative integer");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return parts;
}

// a:b:n, log-spaced
std::vector<double> parse_lambda_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 3) throw ConfigError("--lambda-grid expects a:b:n, got '" + spec + "'");
  const double lo = parse_number(parts[0], "--lambda-grid");
  const double hi = parse_number(parts[1], "--lambda-grid");
  const std::size_t count = parse_count(parts[2], "--lambda-grid");
  if (!(lo > 0.0) || !(hi >= lo) || count == 0) throw ConfigError("--lambda-grid needs 0 < a <= b and n >= 1");
  return count == 1 ? std::vector<double>{lo} : log_grid(lo, hi, count);
}

std::vector<std::size_t> parse_m_grid(const std::string& spec) {
  const auto parts = split(spec, ':');
  if (parts.size() != 2) throw ConfigError("--m-grid expects lo:hi, got '" + spec + "'");
  const std::size_t lo = parse_count(parts[0], "--m-grid");
  const std::size_t hi = parse_count(parts[1], "--m-grid");
  if (lo == 0 || hi < lo) throw ConfigError("--m-grid needs 1 <= lo <= hi");
  std::vector<std::size_t> g;
  for (std::size_t m = lo; m <= hi; ++m) g.push_back(m);
  return g;
}

TuningConfig tuning_config(const TuneOptions& o) {
  TuningConfig t;
  t.cpv_threshold = o.cpv;
  if (!o.lambda_grid.empty()) t.lambda_grid = parse_lambda_grid(o.lambda_grid);
  if (!o.m_grid.empty()) t.m_grid = parse_m_grid(o.m_grid);
  if (!o.dims.empty()) t.fixed_dims = o.dims;
  t.fixed_lambda = o.lambda;
  t.fixed_m = o.m;
  t.validate();
  return t;
}

std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

fs::path prepare_out(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw ConfigError("cannot create output directory " + dir);
  const fs::path probe = p / ".fjscb_write_probe";
  {
    std::ofstream f(probe);
    if (!f) throw ConfigError("output directory " + dir + " is not writable");
  }
  fs::remove(probe, ec);
  return p;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot write " + path.string());
  return f;
}

FunctionalDataSet load_data(const DataOptions& o) {
  FunctionalDataSet data = load_curves(o.curves, o.responses);
  if (o.lags == 0) return data;
  if (data.p() != 1) throw ConfigError("--lags needs a single curve series, got " + std::to_string(data.p()) + " predictors");
  return make_lagged(data.grid, data.curves[0], data.responses, data.ids, o.lags);
}

json data_json(const DataOptions& o) { return {{"curves", o.curves}, {"responses", o.responses}, {"lags", o.lags}}; }

json tuning_json(const TuneOptions& o, const TuningConfig& t) {
  json j{{"basis", o.basis}, {"cpv", t.cpv_threshold}, {"lambda_grid", t.lambda_grid}, {"m_grid", t.m_grid}};
  j["lambda"] = t.fixed_lambda ? json(*t.fixed_lambda) : json(nullptr);
  j["dims"] = t.fixed_dims ? json(*t.fixed_dims) : json(nullptr);
  j["m"] = t.fixed_m ? json(*t.fixed_m) : json(nullptr);
  return j;
}

void add_data_options(CLI::App* cmd, DataOptions& o) {
  cmd->add_option("--curves", o.curves, "Wide curves CSV (id,t_1..t_G or id,pred,t_1..t_G)")->required();
  cmd->add_option("--responses", o.responses, "Responses CSV (id,y)")->required();
  cmd->add_option("--lags", o.lags, "Regress y_t on the K previous curves of a single series (0 = off)");
}

void add_tuning_options(CLI::App* cmd, TuneOptions& o) {
  cmd->add_option("--basis", o.basis, "Working basis")
      ->check(CLI::IsMember({"fourier", "legendre", "fpc"}))
      ->capture_default_str();
  cmd->add_option("--cpv", o.cpv, "Cumulative variance threshold for the truncation")->capture_default_str();
  cmd->add_option("--lambda-grid", o.lambda_grid, "GCV grid a:b:n, log-spaced");
  cmd->add_option("--m-grid", o.m_grid, "Block size candidates lo:hi");
  cmd->add_option("--lambda", o.lambda, "Fixed smoothing parameter (skips GCV)");
  cmd->add_option("--dims", o.dims, "Fixed truncation c_j per predictor (skips CPV)")->delimiter(',');
  cmd->add_option("--m", o.m, "Fixed block size (skips MV)");
}

void add_band_options(CLI::App* cmd, BandOptions& o) {
  cmd->add_option("--B", o.replicates, "Bootstrap replicates")->capture_default_str();
  cmd->add_option("--alpha", o.alpha, "Significance levels")->delimiter(',')->capture_default_str();
  cmd->add_option("--weights", o.weights, "Band weights")
      ->check(CLI::IsMember({"unit", "std"}))
      ->capture_default_str();
  cmd->add_option("--group", o.group, "1-based predictor indices for a group band")->delimiter(',');
  cmd->add_option("--seed", o.seed, "Master seed")->required();
  cmd->add_option("--eval-points", o.eval_points, "Evaluation grid size on [0,1]")->capture_default_str();
}

void add_common_options(CLI::App* cmd, Common& o) {
  cmd->add_option("--out", o.out, "Output directory")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
}

void write_beta_csv(const fs::path& path, const FittedModel& model, const std::vector<double>& grid) {
  const Eigen::MatrixXd beta = reconstruct_beta(model.fit, model.bases, grid);
  auto f = open_out(path);
  f << "j,t,beta_hat\n" << std::setprecision(17);
  for (Eigen::Index j = 0; j < beta.rows(); ++j) {
    for (std::size_t t = 0; t < grid.size(); ++t) f << j + 1 << ',' << grid[t] << ',' << beta(j, static_cast<Eigen::Index>(t)) << '\n';
  }
}

void write_fit_artifacts(const fs::path& out, const FittedModel& model, const FunctionalDataSet& data,
                         WorkingBasis basis, const std::vector<double>& grid) {
  write_json(out / "tuning_report.json", to_json(model.tuning));
  json summary = fit_summary_json(model.fit);
  summary["n"] = data.n();
  summary["p"] = data.p();
  summary["basis"] = to_string(basis);
  summary["block_size"] = model.tuning.block_size;
  write_json(out / "fit_summary.json", summary);
  write_beta_csv(out / "beta_curves.csv", model, grid);
}

std::string level_tag(double alpha) {
  std::ostringstream s;
  s << std::setprecision(6) << 100.0 * (1.0 - alpha);
  return s.str();
}

int cmd_fit(const DataOptions& d, const TuneOptions& t, const Common& c, std::size_t eval_points, std::ostream& out) {
  const TuningConfig tuning = tuning_config(t);
  const WorkingBasis basis = parse_working_basis(t.basis);
  if (eval_points < 2) throw ConfigError("--eval-points must be at least 2");
  const fs::path dir = prepare_out(c.out);
  const FunctionalDataSet data = load_data(d);
  const FittedModel model = fit_model(data, basis, tuning);
  write_fit_artifacts(dir, model, data, basis, uniform_grid(eval_points));
  json cfg{{"data", data_json(d)}, {"tuning", tuning_json(t, tuning)}, {"eval_points", eval_points}, {"out", c.out}};
  write_json(dir / "manifest.json", manifest("fit", cfg));
  out << "fit: n=" << data.n() << " p=" << data.p() << " lambda=" << model.tuning.lambda
      << " m=" << model.tuning.block_size << '\n';
  return kExitOk;
}

int cmd_tune(const DataOptions& d, const TuneOptions& t, const Common& c, std::ostream& out) {
  const TuningConfig tuning = tuning_config(t);
  const WorkingBasis basis = parse_working_basis(t.basis);
  const fs::path dir = prepare_out(c.out);
  const FunctionalDataSet data = load_data(d);
  const FittedModel model = fit_model(data, basis, tuning);
  write_json(dir / "tuning_report.json", to_json(model.tuning));
  write_json(dir / "manifest.json",
             manifest("tune", {{"data", data_json(d)}, {"tuning", tuning_json(t, tuning)}, {"out", c.out}}));
  out << "tune: lambda=" << model.tuning.lambda << " m=" << model.tuning.block_size << '\n';
  return kExitOk;
}

int cmd_band(const DataOptions& d, const TuneOptions& t, const BandOptions& b, const Common& c, std::ostream& out) {
  const TuningConfig tuning = tuning_config(t);
  const WorkingBasis basis = parse_working_basis(t.basis);
  BootstrapPlan plan;
  plan.replicates = b.replicates;
  plan.alpha_levels = b.alpha;
  plan.weight_mode = parse_weight_mode(b.weights);
  if (b.eval_points < 2) throw ConfigError("--eval-points must be at least 2");
  plan.eval_grid = uniform_grid(b.eval_points);
  plan.master_seed = b.seed;
  plan.threads = resolve_threads(c.threads);
  for (std::size_t g : b.group) {
    if (g == 0) throw ConfigError("--group indices are 1-based");
    plan.group.push_back(g - 1);
  }
  const fs::path dir = prepare_out(c.out);
  const FunctionalDataSet data = load_data(d);
  const FittedModel model = fit_model(data, basis, tuning);
  const BandSet band = band_model(model, plan);

  write_fit_artifacts(dir, model, data, basis, plan.eval_grid);
  for (std::size_t l = 0; l < band.levels.size(); ++l) {
    auto f = open_out(dir / ("band_" + level_tag(band.levels[l].alpha) + ".csv"));
    write_band_csv(f, band, l);
  }
  write_json(dir / "quantiles.json", quantile_summary_json(band));
  json cfg{{"data", data_json(d)},
           {"tuning", tuning_json(t, tuning)},
           {"bootstrap",
            {{"B", plan.replicates},
             {"alpha", plan.alpha_levels},
             {"weights", b.weights},
             {"group", b.group},
             {"seed", plan.master_seed},
             {"eval_points", b.eval_points},
             {"block_size", band.plan.block_size}}},
           {"threads", plan.threads},
           {"out", c.out}};
  write_json(dir / "manifest.json", manifest("band", cfg));
  for (const auto& level : band.levels) out << "band: level=" << 1.0 - level.alpha << " q_hat=" << level.q_hat << '\n';
  return kExitOk;
}

int cmd_simulate(const SimOptions& s, const TuneOptions& t, const BandOptions& b, const Common& c, std::ostream& out) {
  TuningConfig tuning = tuning_config(t);
  DgpConfig dgp;
  dgp.beta = parse_beta_scenario(s.scenario);
  dgp.grid_size = s.grid_size;

  std::vector<SimulationSettings> cells;
  for (const auto& w : s.weights) {
    for (const auto& basis : s.basis) {
      for (std::size_t n : s.n) {
        for (double phi : s.phi1) {
          SimulationSettings cell;
          cell.dgp = dgp;
          cell.dgp.n = n;
          cell.dgp.phi1 = phi;
          cell.basis = parse_working_basis(basis);
          pair_synthesis(cell.dgp, cell.basis);
          if (s.d_mode != "auto") cell.dgp.d_mode = s.d_mode == "diagonal" ? DMode::Diagonal : DMode::Tridiagonal;
          if (s.synth_basis != "auto") {
            cell.dgp.synth_basis = s.synth_basis == "legendre" ? BasisKind::Legendre : BasisKind::Fourier;
          }
          cell.weights = parse_weight_mode(w);
          cell.alpha_levels = b.alpha;
          cell.replicates = b.replicates;
          cell.eval_points = b.eval_points;
          cell.tuning = tuning;
          cell.reps = s.reps;
          cell.seed = b.seed;
          cell.threads = resolve_threads(c.threads);
          cell.validate();
          cells.push_back(cell);
        }
      }
    }
  }
  const fs::path dir = prepare_out(c.out);

  std::vector<SimulationReport> reports;
  json cell_json = json::array();
  for (const auto& cell : cells) {
    reports.push_back(run_monte_carlo(cell));
    const auto& r = reports.back();
    cell_json.push_back(to_json(r));
    out << "simulate: " << to_string(cell.weights) << ',' << to_string(cell.basis) << " n=" << cell.dgp.n
        << " phi1=" << cell.dgp.phi1;
    for (const auto& l : r.levels) out << " [" << 1.0 - l.alpha << ": " << l.coverage << " (" << l.mean_width << ")]";
    if (r.low_precision) out << " low-precision";
    if (r.invalid) out << " INVALID";
    out << '\n';
  }
  {
    auto f = open_out(dir / "report.csv");
    write_table_csv(f, reports);
  }
  write_json(dir / "report.json", {{"cells", cell_json}});
  json cfg{{"simulation",
            {{"n", s.n},
             {"phi1", s.phi1},
             {"basis", s.basis},
             {"weights", s.weights},
             {"reps", s.reps},
             {"scenario", s.scenario},
             {"grid_size", s.grid_size},
             {"d_mode", s.d_mode},
             {"synth_basis", s.synth_basis}}},
           {"tuning", tuning_json(t, tuning)},
           {"bootstrap", {{"B", b.replicates}, {"alpha", b.alpha}, {"seed", b.seed}, {"eval_points", b.eval_points}}},
           {"threads", resolve_threads(c.threads)},
           {"out", c.out}};
  write_json(dir / "manifest.json", manifest("simulate", cfg));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Penalized scalar-on-function regression with joint simultaneous confidence bands"};
  app.name(args.empty() ? "fjscb" : fs::path(args.front()).filename().string());
  app.set_config("--config", "", "TOML/INI file; keys go under [fit], [band], [tune] or [simulate]");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  DataOptions data;
  TuneOptions tune;
  BandOptions band;
  SimOptions sim;
  Common common;
  std::size_t fit_eval_points = 201;

  auto* fit = app.add_subcommand("fit", "Estimate and tune on CSV data");
  add_data_options(fit, data);
  add_tuning_options(fit, tune);
  add_common_options(fit, common);
  fit->add_option("--eval-points", fit_eval_points, "Evaluation grid size on [0,1]")->capture_default_str();

  auto* tune_cmd = app.add_subcommand("tune", "Report the tuning choices only");
  add_data_options(tune_cmd, data);
  add_tuning_options(tune_cmd, tune);
  add_common_options(tune_cmd, common);

  auto* band_cmd = app.add_subcommand("band", "Fit and build joint simultaneous confidence bands");
  add_data_options(band_cmd, data);
  add_tuning_options(band_cmd, tune);
  add_band_options(band_cmd, band);
  add_common_options(band_cmd, common);

  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo coverage of the bands");
  sim_cmd->add_option("--n", sim.n, "Sample sizes")->delimiter(',')->capture_default_str();
  sim_cmd->add_option("--phi1", sim.phi1, "FMA(1) coefficients")->delimiter(',')->capture_default_str();
  sim_cmd->add_option("--basis", sim.basis, "Working bases")
      ->delimiter(',')
      ->check(CLI::IsMember({"fourier", "legendre", "fpc"}))
      ->capture_default_str();
  sim_cmd->add_option("--weights", sim.weights, "Band weights")
      ->delimiter(',')
      ->check(CLI::IsMember({"unit", "std"}))
      ->capture_default_str();
  sim_cmd->add_option("--reps", sim.reps, "Monte Carlo replications")->capture_default_str();
  sim_cmd->add_option("--scenario", sim.scenario, "Coefficient scenario (a or zero)")->capture_default_str();
  sim_cmd->add_option("--grid-size", sim.grid_size, "Observation grid points")->capture_default_str();
  sim_cmd->add_option("--d-mode", sim.d_mode, "Mixing matrix")
      ->check(CLI::IsMember({"auto", "tridiagonal", "diagonal"}))
      ->capture_default_str();
  sim_cmd->add_option("--synth-basis", sim.synth_basis, "Basis the curves are synthesized in")
      ->check(CLI::IsMember({"auto", "fourier", "legendre"}))
      ->capture_default_str();
  sim_cmd->add_option("--cpv", tune.cpv, "Cumulative variance threshold")->capture_default_str();
  sim_cmd->add_option("--lambda-grid", tune.lambda_grid, "GCV grid a:b:n, log-spaced");
  sim_cmd->add_option("--m-grid", tune.m_grid, "Block size candidates lo:hi");
  sim_cmd->add_option("--lambda", tune.lambda, "Fixed smoothing parameter");
  sim_cmd->add_option("--dims", tune.dims, "Fixed truncation c_1")->delimiter(',');
  sim_cmd->add_option("--m", tune.m, "Fixed block size");
  sim_cmd->add_option("--B", band.replicates, "Bootstrap replicates")->capture_default_str();
  sim_cmd->add_option("--alpha", band.alpha, "Significance levels")->delimiter(',')->capture_default_str();
  sim_cmd->add_option("--seed", band.seed, "Master seed")->required();
  sim_cmd->add_option("--eval-points", band.eval_points, "Evaluation grid size on [0,1]")->capture_default_str();
  add_common_options(sim_cmd, common);

  for (auto* cmd : {fit, tune_cmd, band_cmd, sim_cmd}) cmd->configurable();

  try {
    std::vector<std::string> rest(args.rbegin(), args.rend());
    if (!rest.empty()) rest.pop_back();
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (fit->parsed()) return cmd_fit(data, tune, common, fit_eval_points, out);
    if (tune_cmd->parsed()) return cmd_tune(data, tune, common, out);
    if (band_cmd->parsed()) return cmd_band(data, tune, band, common, out);
    return cmd_simulate(sim, tune, band, common, out);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ParseError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitUsage;
  }
}

}  // namespace fjscb::cli
