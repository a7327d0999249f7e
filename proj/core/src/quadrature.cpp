#include "fjscb/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "fjscb/errors.hpp"

namespace fjscb {

Quadrature gauss_legendre(std::size_t order) {
  if (order == 0) throw ConfigError("gauss_legendre: order must be positive");
  Quadrature q;
  q.nodes.resize(order);
  q.weights.resize(order);
  const auto n = static_cast<double>(order);
  const std::size_t half = (order + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    // Tricomi initial guess, refined by Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= order; ++k) {
        const auto kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    // map [-1,1] -> [0,1]
    q.nodes[i] = 0.5 * (1.0 - x);
    q.nodes[order - 1 - i] = 0.5 * (1.0 + x);
    q.weights[i] = 0.5 * w;
    q.weights[order - 1 - i] = 0.5 * w;
  }
  return q;
}

std::vector<double> trapezoid_weights(std::span<const double> grid) {
  std::vector<double> w(grid.size(), 0.0);
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    const double h = grid[g + 1] - grid[g];
    w[g] += 0.5 * h;
    w[g + 1] += 0.5 * h;
  }
  return w;
}

double trapezoid(std::span<const double> grid, std::span<const double> values) {
  double acc = 0.0;
  for (std::size_t g = 0; g + 1 < grid.size(); ++g) {
    acc += 0.5 * (grid[g + 1] - grid[g]) * (values[g] + values[g + 1]);
  }
  return acc;
}

std::vector<double> uniform_grid(std::size_t count) {
  if (count < 2) throw ConfigError("uniform_grid: need at least two points");
  std::vector<double> grid(count);
  const auto last = static_cast<double>(count - 1);
  for (std::size_t g = 0; g < count; ++g) grid[g] = static_cast<double>(g) / last;
  grid.back() = 1.0;
  return grid;
}

}  // namespace fjscb
