#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fjscb {

/// Gauss-Legendre rule mapped to [0, 1].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

/// Builds an `order`-point Gauss-Legendre rule on [0, 1], exact for
/// polynomials of degree 2*order - 1.
[[nodiscard]] Quadrature gauss_legendre(std::size_t order);

/// Composite trapezoid weights for an increasing (possibly non-uniform) grid.
[[nodiscard]] std::vector<double> trapezoid_weights(std::span<const double> grid);

/// Trapezoid integral of `values` sampled on `grid`.
[[nodiscard]] double trapezoid(std::span<const double> grid, std::span<const double> values);

/// `count` equispaced points from 0 to 1 inclusive.
[[nodiscard]] std::vector<double> uniform_grid(std::size_t count);

}  // namespace fjscb
