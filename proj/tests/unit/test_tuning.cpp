#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fjscb/errors.hpp"
#include "fjscb/simulate.hpp"
#include "fjscb/tuning.hpp"
#include "oracles.hpp"

namespace {

using fjscb::BasisSet;

TEST(Cpv, Examples) {
  const auto r = fjscb::select_dim_cpv(Eigen::Vector4d(4, 3, 2, 1), 0.85);
  EXPECT_EQ(r.d, 3u);
  EXPECT_EQ(r.c, 6u);
  const auto one = fjscb::select_dim_cpv(Eigen::Vector3d(2, 0, 0), 0.85);
  EXPECT_EQ(one.d, 1u);
  EXPECT_EQ(one.c, 2u);
  EXPECT_THROW((void)fjscb::select_dim_cpv(Eigen::Vector3d::Zero(), 0.85), fjscb::ConfigError);
}

TEST(Cpv, ExactBoundaryCountsAsReached) {
  // cumulative share 0.7 exactly at d=2
  EXPECT_EQ(fjscb::select_dim_cpv(Eigen::Vector4d(4, 3, 2, 1), 0.7).d, 2u);
}

TEST(Cpv, NonDecreasingInThreshold) {
  std::mt19937_64 gen(1);
  std::exponential_distribution<double> expo;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd ev(12);
    for (Eigen::Index k = 0; k < 12; ++k) ev(k) = expo(gen);
    std::sort(ev.data(), ev.data() + ev.size(), std::greater<>());
    std::size_t prev = 0;
    for (double thr = 0.05; thr < 0.999; thr += 0.05) {
      const std::size_t d = fjscb::select_dim_cpv(ev, thr).d;
      EXPECT_GE(d, prev);
      prev = d;
    }
  }
}

TEST(Cpv, DataOverloadUsesFpcSpectrum) {
  fjscb::DgpConfig cfg;
  cfg.n = 200;
  const auto sim = fjscb::simulate_dataset(cfg, 12);
  const auto data = fjscb::center(sim.data);
  const auto& master = fjscb::default_master_basis();
  const auto r = fjscb::select_dim_cpv(data, 0, master, 0.85);
  const auto fpc = fjscb::compute_fpc(data, 0, master, master.size());
  EXPECT_EQ(r.d, fjscb::select_dim_cpv(fpc.eigenvalues, 0.85).d);
  EXPECT_EQ(r.c, 2 * r.d);
}

TEST(Grids, DefaultsAndLogGrid) {
  const auto g = fjscb::default_lambda_grid();
  ASSERT_EQ(g.size(), 40u);
  EXPECT_DOUBLE_EQ(g.front(), 1e-14);
  EXPECT_DOUBLE_EQ(g.back(), 1e-2);
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
  const auto m = fjscb::default_m_grid(400);
  EXPECT_EQ(m.front(), 2u);
  EXPECT_EQ(m.back(), 15u);  // ceil(2 * 400^{1/3}) = ceil(14.74)
  EXPECT_GE(fjscb::default_m_grid(20).size(), 5u);
  EXPECT_LE(fjscb::default_m_grid(12).back(), 6u);
}

TEST(TuningConfigValidate, Rejects) {
  fjscb::TuningConfig c;
  c.cpv_threshold = 1.0;
  EXPECT_THROW(c.validate(), fjscb::ConfigError);
  c = {};
  c.lambda_grid = {1e-3, 1e-5};
  EXPECT_THROW(c.validate(), fjscb::ConfigError);
  c = {};
  c.m_grid = {2, 3, 4};
  EXPECT_THROW(c.validate(), fjscb::ConfigError);
  c.fixed_m = 3;
  EXPECT_NO_THROW(c.validate());
}

class GcvFixture : public ::testing::Test {
 protected:
  void SetUp() override {
    fjscb::DgpConfig cfg;
    cfg.n = 150;
    const auto sim = fjscb::simulate_dataset(cfg, 21);
    data = fjscb::center(sim.data);
    bases = {BasisSet::fourier(7)};
    const auto scores = fjscb::project_scores(data, bases, {7});
    design = fjscb::build_design(scores);
    raw = {bases[0].raw_penalty()};
  }
  fjscb::FunctionalDataSet data;
  std::vector<BasisSet> bases;
  fjscb::Design design;
  std::vector<Eigen::MatrixXd> raw;
};

TEST_F(GcvFixture, SingletonGrid) {
  EXPECT_DOUBLE_EQ(fjscb::select_lambda_gcv(design, data.responses, raw, {3e-6}).chosen, 3e-6);
}

TEST_F(GcvFixture, MatchesExhaustiveReevaluation) {
  const auto grid = fjscb::log_grid(1e-12, 1e-1, 23);
  const auto r = fjscb::select_lambda_gcv(design, data.responses, raw, grid);
  double best = std::numeric_limits<double>::infinity();
  double arg = 0.0;
  for (double l : grid) {
    const Eigen::MatrixXd pen = fjscb::build_penalty(raw, design, l);
    const double g = fjscb::oracle::dense_gcv(design.x, data.responses, pen);
    if (g < best) {
      best = g;
      arg = l;
    }
  }
  EXPECT_DOUBLE_EQ(r.chosen, arg);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Eigen::MatrixXd pen = fjscb::build_penalty(raw, design, grid[i]);
    EXPECT_NEAR(r.scores[i], fjscb::oracle::dense_gcv(design.x, data.responses, pen), 1e-10 * r.scores[i]);
  }
}

TEST_F(GcvFixture, DuplicateEntriesTieToSmaller) {
  // Two grid values so close that the fits are bitwise identical.
  const double a = 1e-6;
  const double b = std::nextafter(a, 1.0);
  const auto r = fjscb::select_lambda_gcv(design, data.responses, raw, {a, a, b});
  EXPECT_EQ(r.scores[0], r.scores[1]);
  EXPECT_DOUBLE_EQ(r.chosen, r.scores[2] < r.scores[0] ? b : a);
}

TEST_F(GcvFixture, UnionGridNeverWorse) {
  const auto g1 = fjscb::log_grid(1e-10, 1e-6, 5);
  const auto g2 = fjscb::log_grid(1e-5, 1e-1, 5);
  std::vector<double> both = g1;
  both.insert(both.end(), g2.begin(), g2.end());
  const auto r1 = fjscb::select_lambda_gcv(design, data.responses, raw, g1);
  const auto ru = fjscb::select_lambda_gcv(design, data.responses, raw, both);
  const double min1 = *std::min_element(r1.scores.begin(), r1.scores.end());
  const double minu = *std::min_element(ru.scores.begin(), ru.scores.end());
  EXPECT_LE(minu, min1);
}

TEST(Gcv, AllFailuresReported) {
  std::mt19937_64 gen(3);
  auto d = fjscb::oracle::random_design(gen, 4, {4});
  const std::vector<Eigen::MatrixXd> raw{Eigen::MatrixXd::Zero(4, 4)};
  try {
    (void)fjscb::select_lambda_gcv(d, Eigen::Vector4d(1, 2, 3, 4), raw, {1e-3, 1e-2});
    FAIL() << "expected NumericalError";
  } catch (const fjscb::NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("lambda="), std::string::npos);
  }
}

TEST(BlockCovariance, MatchesNaiveAndIsPsd) {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd z(30, 4);
    for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = normal(gen);
    for (std::size_t m : {1u, 3u, 7u, 30u}) {
      const Eigen::MatrixXd xi = fjscb::block_covariance(z, m);
      EXPECT_LE((xi - fjscb::oracle::naive_block_covariance(z, m)).cwiseAbs().maxCoeff(), 1e-12);
      EXPECT_LE((xi - xi.transpose()).cwiseAbs().maxCoeff(), 0.0);
      EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(xi).eigenvalues().minCoeff(), -1e-12);
    }
  }
}

TEST(BlockMv, HandComputedOneDimensional) {
  Eigen::MatrixXd z(8, 1);
  z << 0.5, -1.2, 0.3, 2.0, -0.7, 0.1, 1.1, -0.4;
  const std::vector<std::size_t> grid{1, 2, 3, 4, 5};
  const auto r = fjscb::select_block_mv(z, grid);
  std::vector<Eigen::MatrixXd> xi;
  for (std::size_t m : grid) xi.push_back(fjscb::oracle::naive_block_covariance(z, m));
  const auto l = fjscb::oracle::naive_volatility(xi);
  EXPECT_TRUE(std::isnan(r.volatility[0]));
  EXPECT_TRUE(std::isnan(r.volatility[4]));
  EXPECT_NEAR(r.volatility[2], l[2], 1e-12);
  EXPECT_EQ(r.chosen, 3u);
}

TEST(BlockMv, FlatVolatilityPicksSmallestInterior) {
  const std::vector<std::size_t> grid{1, 2, 3, 4, 5, 6, 7, 8};
  const std::vector<Eigen::MatrixXd> xi(grid.size(), Eigen::MatrixXd::Identity(2, 2));
  const auto r = fjscb::select_block_mv(grid, xi);
  EXPECT_EQ(r.chosen, 3u);
}

TEST(BlockMv, SpikePenalizesNeighbourhood) {
  const std::vector<std::size_t> grid{2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
  std::vector<Eigen::MatrixXd> xi(grid.size(), Eigen::MatrixXd::Identity(1, 1));
  xi[4](0, 0) = 10.0;  // m = 6
  const auto r = fjscb::select_block_mv(grid, xi);
  for (std::size_t m = 4; m <= 8; ++m) EXPECT_NE(r.chosen, m);
  EXPECT_EQ(r.chosen, 9u);
}

TEST(BlockMv, IidScoresNearlyFlat) {
  std::mt19937_64 gen(8);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd z(4000, 2);
  for (Eigen::Index i = 0; i < z.size(); ++i) z.data()[i] = normal(gen);
  const auto r = fjscb::select_block_mv(z, {1, 2, 3, 4, 5, 6, 7});
  for (std::size_t i = 2; i + 2 < r.volatility.size(); ++i) EXPECT_LT(r.volatility[i], 0.1);
}

TEST(BlockMv, TooFewCandidates) {
  EXPECT_THROW((void)fjscb::select_block_mv(Eigen::MatrixXd::Ones(10, 1), {1, 2, 3, 4}), fjscb::ConfigError);
}

TEST(TuningJson, Keys) {
  const auto j = fjscb::to_json(fjscb::MvResult{{1, 2, 3, 4, 5}, {NAN, NAN, 0.5, NAN, NAN}, 3});
  EXPECT_TRUE(j.contains("L_values"));
  EXPECT_TRUE(j["L_values"][0].is_null());
  const auto g = fjscb::to_json(fjscb::GcvResult{{1e-3}, {0.2}, {}, 1e-3});
  EXPECT_TRUE(g.contains("grid") && g.contains("scores") && g.contains("chosen"));
}

}  // namespace
