// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Monte Carlo cells run at full size (500 replications, B = 500), so this
// takes about a minute on one core.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "fjscb/basis.hpp"
#include "fjscb/bootstrap.hpp"
#include "fjscb/estimator.hpp"
#include "fjscb/pipeline.hpp"
#include "fjscb/quadrature.hpp"
#include "fjscb/simulate.hpp"
#include "fjscb/tuning.hpp"
#include "oracles.hpp"

namespace {

using fjscb::BasisSet;
using fjscb::WeightMode;
using fjscb::WorkingBasis;

constexpr std::size_t kReps = 500;
constexpr std::size_t kB = 500;
constexpr std::uint64_t kSeed = 20240611;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::size_t worker_count() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---- Monte Carlo cells ------------------------------------------------------

struct Cell {
  double coverage = 0.0;
  double width = 0.0;
  double se = 0.0;
  bool invalid = false;
  std::size_t failures = 0;
};

using CellKey = std::tuple<WorkingBasis, WeightMode, std::size_t, double>;

Cell run_cell(WorkingBasis basis, WeightMode weights, std::size_t n, double phi1) {
  static std::map<CellKey, Cell> cache;
  const CellKey key{basis, weights, n, phi1};
  if (auto it = cache.find(key); it != cache.end()) return it->second;

  fjscb::SimulationSettings s;
  s.dgp.n = n;
  s.dgp.phi1 = phi1;
  fjscb::pair_synthesis(s.dgp, basis);
  s.basis = basis;
  s.weights = weights;
  s.replicates = kB;
  s.reps = kReps;
  s.seed = kSeed;
  s.threads = worker_count();
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = fjscb::run_monte_carlo(s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Cell c;
  c.coverage = r.levels.front().coverage;
  c.width = r.levels.front().mean_width;
  c.se = r.levels.front().se;
  c.invalid = r.invalid;
  c.failures = r.failures;
  std::printf("  cell %s/%s n=%zu phi1=%.1f: coverage %.3f (se %.3f), width %.3f, failures %zu [%.0fs]\n",
              std::string(fjscb::to_string(basis)).c_str(), std::string(fjscb::to_string(weights)).c_str(), n, phi1,
              c.coverage, c.se, c.width, c.failures, secs);
  std::fflush(stdout);
  cache.emplace(key, c);
  return c;
}

Verdict coverage_reproduction() {
  const Cell c = run_cell(WorkingBasis::Fourier, WeightMode::Unit, 400, 0.5);
  return {!c.invalid && std::abs(c.coverage - 0.943) <= 0.030,
          fmt("Fourier/unit n=400 phi1=0.5 95%%: coverage %.3f, target 0.943 +- 0.030", c.coverage)};
}

Verdict width_reproduction() {
  const Cell c = run_cell(WorkingBasis::Fourier, WeightMode::Unit, 400, 0.5);
  const Cell f = run_cell(WorkingBasis::Fpc, WeightMode::StdDriven, 400, 1.0);
  const bool width_ok = !c.invalid && std::abs(c.width - 1.46) <= 0.15;
  const bool fpc_ok = !f.invalid && std::abs(f.coverage - 0.924) <= 0.035;
  return {width_ok && fpc_ok, fmt("Fourier/unit width %.3f (target 1.46 +- 0.15); FPC/std phi1=1 coverage %.3f "
                                  "(target 0.924 +- 0.035)",
                                  c.width, f.coverage)};
}

Verdict width_ordering() {
  const Cell u = run_cell(WorkingBasis::Legendre, WeightMode::Unit, 400, 0.5);
  const Cell s = run_cell(WorkingBasis::Legendre, WeightMode::StdDriven, 400, 0.5);
  const double ratio = s.width / u.width;
  return {!u.invalid && !s.invalid && ratio < 0.7,
          fmt("Legendre n=400 width std %.3f / unit %.3f = %.3f (need < 0.7)", s.width, u.width, ratio)};
}

Verdict sample_size_trend() {
  int closer = 0;
  std::string detail;
  for (WorkingBasis b : {WorkingBasis::Fourier, WorkingBasis::Legendre}) {
    for (WeightMode w : {WeightMode::Unit, WeightMode::StdDriven}) {
      const Cell small = run_cell(b, w, 400, 0.5);
      const Cell large = run_cell(b, w, 800, 0.5);
      const bool better = std::abs(large.coverage - 0.95) < std::abs(small.coverage - 0.95);
      closer += better ? 1 : 0;
      detail += fmt("%s/%s %.3f->%.3f%s; ", std::string(fjscb::to_string(b)).c_str(),
                    std::string(fjscb::to_string(w)).c_str(), small.coverage, large.coverage, better ? "" : " (not closer)");
    }
  }
  return {closer >= 3, detail + fmt("%d of 4 closer at n=800 (need >= 3)", closer)};
}

// ---- Estimator -------------------------------------------------------------

Verdict estimator_oracle() {
  std::mt19937_64 gen(kSeed + 4);
  std::uniform_int_distribution<std::size_t> dim(1, 4);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t c = dim(gen);
    std::vector<std::size_t> dims;
    for (std::size_t left = c; left > 0;) {
      const std::size_t take = std::uniform_int_distribution<std::size_t>(1, left)(gen);
      dims.push_back(take);
      left -= take;
    }
    const std::size_t n = std::uniform_int_distribution<std::size_t>(c + 2, 12)(gen);
    fjscb::Design d = fjscb::oracle::random_design(gen, n, dims);
    std::vector<Eigen::MatrixXd> raw;
    for (std::size_t j = 0; j < dims.size(); ++j) {
      for (Eigen::Index k = 0; k < d.scales[j].size(); ++k) d.scales[j](k) = 0.5 + unif(gen);
      const BasisSet b = unif(gen) < 0.5 ? BasisSet::fourier(dims[j]) : BasisSet::legendre(dims[j]);
      raw.push_back(b.raw_penalty() / 1e4);
    }
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = normal(gen);
    const double lambda = std::pow(10.0, -4.0 + 4.0 * unif(gen));
    const Eigen::MatrixXd pen = fjscb::build_penalty(raw, d, lambda);
    const auto fit = fjscb::fit_penalized(d, y, pen, lambda);
    const auto bf = fjscb::oracle::brute_force_minimizer(d.x, y, pen);
    for (std::size_t k = 0; k < c; ++k) worst = std::max(worst, std::abs(fit.theta(static_cast<Eigen::Index>(k)) - bf[k]));
  }
  return {worst <= 1e-6, fmt("20 instances, max |theta - brute force| = %.2e (need <= 1e-6)", worst)};
}

// ---- Bootstrap ---------------------------------------------------------------

Eigen::MatrixXd random_matrix(std::mt19937_64& gen, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(gen);
  return m;
}

Verdict bootstrap_identity() {
  std::mt19937_64 gen(kSeed + 5);
  double worst = 0.0;
  std::size_t mismatched_sums = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = std::uniform_int_distribution<Eigen::Index>(5, 80)(gen);
    const auto c = std::uniform_int_distribution<Eigen::Index>(1, 8)(gen);
    const Eigen::MatrixXd z = random_matrix(gen, n, c);
    const Eigen::VectorXd u = random_matrix(gen, n, 1);
    const Eigen::VectorXd draw = fjscb::block_multiplier_draw(z, 1, u);
    Eigen::VectorXd direct = Eigen::VectorXd::Zero(c);
    for (Eigen::Index i = 0; i < n; ++i) direct += z.row(i).transpose() * u(i);
    direct /= std::sqrt(static_cast<double>(n));
    worst = std::max(worst, (draw - direct).cwiseAbs().maxCoeff());

    const auto m = std::uniform_int_distribution<std::size_t>(1, static_cast<std::size_t>(n))(gen);
    const fjscb::BlockMultiplier bm(z, m);
    for (std::size_t j = 0; j < bm.block_count(); ++j) {
      const Eigen::VectorXd naive = fjscb::oracle::naive_block_sum(z, j, m);
      if (bm.block_sums().row(static_cast<Eigen::Index>(j)).transpose() != naive) ++mismatched_sums;
    }
  }
  return {worst <= 1e-12 && mismatched_sums == 0,
          fmt("100 instances, m=1 max deviation %.2e (need <= 1e-12); block sums differing from naive: %zu", worst,
              mismatched_sums)};
}

// ---- Basis -------------------------------------------------------------------

Verdict basis_suite() {
  double gram = 0.0;
  for (std::size_t size = 1; size <= 30; ++size) {
    const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(size), static_cast<Eigen::Index>(size));
    gram = std::max(gram, (BasisSet::fourier(size).gram() - eye).cwiseAbs().maxCoeff());
    gram = std::max(gram, (BasisSet::legendre(size).gram() - eye).cwiseAbs().maxCoeff());
  }

  const Eigen::MatrixXd r = BasisSet::fourier(30).raw_penalty();
  double pen = 0.0;
  for (Eigen::Index k = 0; k < 30; ++k) {
    const double freq = static_cast<double>((k + 1) / 2);
    const double expect = std::pow(2.0 * std::numbers::pi * freq, 4);
    for (Eigen::Index l = 0; l < 30; ++l) {
      const double target = k == l ? expect : 0.0;
      pen = std::max(pen, std::abs(r(k, l) - target) / std::max(1.0, expect));
    }
  }

  std::mt19937_64 gen(kSeed + 6);
  std::uniform_real_distribution<double> unif(0.05, 0.95);
  const double h = 1e-4;
  double d2 = 0.0;
  for (const BasisSet& b : {BasisSet::fourier(15), BasisSet::legendre(15)}) {
    for (int trial = 0; trial < 100; ++trial) {
      const double t = unif(gen);
      const std::vector<double> pts{t - h, t, t + h};
      const std::vector<double> at{t};
      const Eigen::MatrixXd v = b.eval(pts);
      const Eigen::VectorXd exact = b.eval_d2(at).col(0);
      const double scale = std::max(1.0, exact.cwiseAbs().maxCoeff());
      for (Eigen::Index k = 0; k < exact.size(); ++k) {
        const double fd = (v(k, 0) - 2.0 * v(k, 1) + v(k, 2)) / (h * h);
        d2 = std::max(d2, std::abs(exact(k) - fd) / scale);
      }
    }
  }
  return {gram <= 1e-8 && pen <= 1e-8 && d2 <= 1e-4,
          fmt("gram error %.2e (<= 1e-8), Fourier penalty rel. error %.2e (<= 1e-8), d2 vs FD rel. %.2e (<= 1e-4)",
              gram, pen, d2)};
}

// ---- Properties ----------------------------------------------------------------

fjscb::FittedModel random_model(std::mt19937_64& gen, std::size_t p) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  fjscb::DgpConfig cfg;
  cfg.n = 60 + static_cast<std::size_t>(60 * unif(gen));
  cfg.phi1 = unif(gen);
  cfg.grid_size = 40;
  fjscb::FunctionalDataSet data = fjscb::simulate_dataset(cfg, gen()).data;
  for (std::size_t j = 1; j < p; ++j) data.curves.push_back(fjscb::simulate_dataset(cfg, gen()).data.curves[0]);
  fjscb::TuningConfig tuning;
  tuning.fixed_dims = std::vector<std::size_t>(p, 3 + static_cast<std::size_t>(3 * unif(gen)));
  tuning.fixed_lambda = std::pow(10.0, -9.0 + 5.0 * unif(gen));
  tuning.fixed_m = 1 + static_cast<std::size_t>(4 * unif(gen));
  const WorkingBasis basis = unif(gen) < 0.5 ? WorkingBasis::Fourier : WorkingBasis::Legendre;
  return fjscb::fit_model(data, basis, tuning);
}

Verdict property_suite() {
  constexpr int kTrials = 200;
  std::mt19937_64 gen(kSeed + 7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  int quantile_ok = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto b = std::uniform_int_distribution<std::size_t>(100, 2000)(gen);
    std::vector<double> dev(b);
    for (double& v : dev) v = std::abs(random_matrix(gen, 1, 1)(0, 0)) * (1.0 + unif(gen));
    std::vector<double> alphas(6);
    for (double& a : alphas) a = 0.001 + 0.4 * unif(gen);
    std::sort(alphas.begin(), alphas.end());
    bool ok = true;
    for (std::size_t i = 1; i < alphas.size(); ++i) {
      ok = ok && fjscb::bootstrap_quantile(dev, alphas[i - 1]) >= fjscb::bootstrap_quantile(dev, alphas[i]);
    }
    quantile_ok += ok ? 1 : 0;
  }

  int nesting_ok = 0;
  int group_ok = 0;
  int seed_ok = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    const std::size_t p = 2 + static_cast<std::size_t>(2 * unif(gen));
    const auto model = random_model(gen, p);
    fjscb::BootstrapPlan plan;
    plan.replicates = 100;
    plan.eval_grid = fjscb::uniform_grid(101);
    plan.master_seed = gen();
    plan.weight_mode = unif(gen) < 0.5 ? WeightMode::Unit : WeightMode::StdDriven;
    const double a1 = 0.01 + 0.2 * unif(gen);
    plan.alpha_levels = {a1, a1 + 0.01 + 0.2 * unif(gen)};
    const auto full = fjscb::band_model(model, plan);

    const auto& wide = full.levels[0];
    const auto& narrow = full.levels[1];
    nesting_ok += (wide.q_hat >= narrow.q_hat && (wide.lower.array() <= narrow.lower.array()).all() &&
                   (narrow.upper.array() <= wide.upper.array()).all())
                      ? 1
                      : 0;

    auto again = plan;
    again.threads = 2;
    const auto repeat = fjscb::band_model(model, again);
    seed_ok += (repeat.deviations == full.deviations && repeat.levels[0].lower == wide.lower &&
                repeat.levels[1].upper == narrow.upper)
                   ? 1
                   : 0;

    auto sub = plan;
    for (std::size_t j = 0; j < p; ++j) {
      if (unif(gen) < 0.5) sub.group.push_back(j);
    }
    if (sub.group.empty()) sub.group.push_back(0);
    const auto grouped = fjscb::band_model(model, sub);
    bool ok = grouped.predictors == sub.group;
    for (std::size_t l = 0; l < 2; ++l) ok = ok && grouped.levels[l].q_hat <= full.levels[l].q_hat;
    group_ok += ok ? 1 : 0;
  }

  int psd_ok = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    const auto n = std::uniform_int_distribution<Eigen::Index>(10, 200)(gen);
    const auto c = std::uniform_int_distribution<Eigen::Index>(1, 8)(gen);
    Eigen::MatrixXd z = random_matrix(gen, n, c);
    const double rho = unif(gen);
    for (Eigen::Index i = 1; i < n; ++i) z.row(i) += rho * z.row(i - 1);
    const auto m = std::uniform_int_distribution<std::size_t>(1, static_cast<std::size_t>(n / 2))(gen);
    const Eigen::MatrixXd xi = fjscb::block_covariance(z, m);
    const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(xi).eigenvalues().minCoeff();
    psd_ok += (xi == xi.transpose() && min_eig >= -1e-12 * std::max(1.0, xi.trace())) ? 1 : 0;
  }

  const bool pass = quantile_ok == kTrials && nesting_ok == kTrials && group_ok == kTrials && seed_ok == kTrials &&
                    psd_ok == kTrials;
  return {pass, fmt("quantile monotonicity %d/%d, nesting %d/%d, group monotonicity %d/%d, seed determinism %d/%d, "
                    "Xi PSD %d/%d",
                    quantile_ok, kTrials, nesting_ok, kTrials, group_ok, kTrials, seed_ok, kTrials, psd_ok, kTrials)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"estimator oracle equivalence", estimator_oracle},
      {"bootstrap identity", bootstrap_identity},
      {"basis suite", basis_suite},
      {"property suite", property_suite},
      {"coverage reproduction", coverage_reproduction},
      {"width reproduction", width_reproduction},
      {"std/unit width ordering", width_ordering},
      {"coverage trend in n", sample_size_trend},
  };
  // printed in criterion order
  const std::vector<int> number{4, 5, 6, 7, 1, 2, 3, 8};

  std::vector<std::pair<int, std::string>> lines;
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    const std::string line = fmt("%s criterion %d (%s): ", v.pass ? "PASS" : "FAIL", number[i], criteria[i].first) + v.detail;
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    lines.emplace_back(number[i], line);
  }
  std::sort(lines.begin(), lines.end());
  std::printf("\nsummary\n");
  for (const auto& [n, line] : lines) std::printf("%s\n", line.c_str());
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
