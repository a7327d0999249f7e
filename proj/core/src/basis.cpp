#include "fjscb/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fjscb/errors.hpp"

namespace fjscb {

namespace {

void check_points(std::span<const double> points) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double t = points[i];
    if (!(t >= 0.0 && t <= 1.0)) {
      throw DomainError("basis evaluation point " + std::to_string(i) + " = " + std::to_string(t) +
                        " lies outside [0,1]");
    }
  }
}

// Polynomial degree that the quadrature must integrate exactly for products of
// two family members. For trigonometric members we use the degree at which a
// polynomial resolves the highest frequency on [0,1].
std::size_t max_degree(BasisKind kind, std::size_t size) {
  switch (kind) {
    case BasisKind::Legendre:
      return size - 1;
    case BasisKind::Fourier: {
      const auto freq = static_cast<double>(size / 2);
      return static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi * freq));
    }
    case BasisKind::InMasterBasis:
      break;
  }
  return 0;
}

// Fills P_0..P_{count-1} of x along with first and second x-derivatives.
// Differentiated three-term recurrence; stable at x = +-1.
void legendre_table(double x, std::size_t count, double* p, double* dp, double* d2p) {
  if (count == 0) return;
  p[0] = 1.0;
  dp[0] = 0.0;
  d2p[0] = 0.0;
  if (count == 1) return;
  p[1] = x;
  dp[1] = 1.0;
  d2p[1] = 0.0;
  for (std::size_t k = 1; k + 1 < count; ++k) {
    const auto n = static_cast<double>(k);
    const double a = 2.0 * n + 1.0;
    p[k + 1] = (a * x * p[k] - n * p[k - 1]) / (n + 1.0);
    dp[k + 1] = (a * (p[k] + x * dp[k]) - n * dp[k - 1]) / (n + 1.0);
    d2p[k + 1] = (a * (2.0 * dp[k] + x * d2p[k]) - n * d2p[k - 1]) / (n + 1.0);
  }
}

enum class Derivative { None, Second };

Eigen::MatrixXd eval_primitive(BasisKind kind, std::size_t size, std::span<const double> points,
                               Derivative deriv) {
  Eigen::MatrixXd out(size, points.size());
  if (kind == BasisKind::Fourier) {
    const double root2 = std::numbers::sqrt2;
    for (std::size_t c = 0; c < points.size(); ++c) {
      const double t = points[c];
      out(0, c) = deriv == Derivative::None ? 1.0 : 0.0;
      for (std::size_t k = 1; k < size; ++k) {
        const auto m = static_cast<double>((k + 1) / 2);
        const double w = 2.0 * std::numbers::pi * m;
        const double v = (k % 2 == 1) ? root2 * std::cos(w * t) : root2 * std::sin(w * t);
        out(k, c) = deriv == Derivative::None ? v : -w * w * v;
      }
    }
    return out;
  }
  std::vector<double> p(size), dp(size), d2p(size);
  for (std::size_t c = 0; c < points.size(); ++c) {
    legendre_table(2.0 * points[c] - 1.0, size, p.data(), dp.data(), d2p.data());
    for (std::size_t k = 0; k < size; ++k) {
      const double norm = std::sqrt(2.0 * static_cast<double>(k) + 1.0);
      // d/dt = 2 d/dx
      out(k, c) = deriv == Derivative::None ? norm * p[k] : 4.0 * norm * d2p[k];
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(BasisKind kind) noexcept {
  switch (kind) {
    case BasisKind::Fourier:
      return "fourier";
    case BasisKind::Legendre:
      return "legendre";
    case BasisKind::InMasterBasis:
      return "in_master";
  }
  return "unknown";
}

BasisSet::BasisSet(BasisKind kind, std::size_t size) : kind_(kind), size_(size) {
  if (size == 0) throw ConfigError("basis size must be positive");
  if (kind != BasisKind::InMasterBasis) quad_ = gauss_legendre(2 * max_degree(kind, size) + 10);
}

BasisSet BasisSet::fourier(std::size_t size) { return BasisSet(BasisKind::Fourier, size); }

BasisSet BasisSet::legendre(std::size_t size) { return BasisSet(BasisKind::Legendre, size); }

BasisSet BasisSet::in_master(const BasisSet& master, Eigen::MatrixXd coeffs) {
  if (master.kind() == BasisKind::InMasterBasis) {
    throw ConfigError("in_master: master basis must be a primitive family");
  }
  if (static_cast<std::size_t>(coeffs.cols()) != master.size()) {
    throw ConfigError("in_master: coefficient columns (" + std::to_string(coeffs.cols()) +
                      ") must equal master size (" + std::to_string(master.size()) + ")");
  }
  const Eigen::MatrixXd gram = coeffs * coeffs.transpose();
  const double dev = (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff();
  if (dev > 1e-8) {
    throw ConfigError("in_master: coefficient rows are not orthonormal (max deviation " +
                      std::to_string(dev) + ")");
  }
  BasisSet b(BasisKind::InMasterBasis, static_cast<std::size_t>(coeffs.rows()));
  b.quad_ = master.quadrature();
  b.coeffs_ = std::move(coeffs);
  b.master_ = std::make_shared<const BasisSet>(master);
  return b;
}

Eigen::MatrixXd BasisSet::eval(std::span<const double> points) const {
  check_points(points);
  if (kind_ == BasisKind::InMasterBasis) return coeffs_ * master_->eval(points);
  return eval_primitive(kind_, size_, points, Derivative::None);
}

Eigen::MatrixXd BasisSet::eval_d2(std::span<const double> points) const {
  check_points(points);
  if (kind_ == BasisKind::InMasterBasis) return coeffs_ * master_->eval_d2(points);
  return eval_primitive(kind_, size_, points, Derivative::Second);
}

Eigen::MatrixXd BasisSet::raw_penalty(std::size_t count) const {
  if (count > size_) {
    throw ConfigError("raw_penalty: requested " + std::to_string(count) + " functions from a basis of size " +
                      std::to_string(size_));
  }
  const Eigen::MatrixXd d2 = eval_d2(quad_.nodes).topRows(static_cast<Eigen::Index>(count));
  const Eigen::Map<const Eigen::VectorXd> w(quad_.weights.data(), static_cast<Eigen::Index>(quad_.size()));
  Eigen::MatrixXd r = d2 * w.asDiagonal() * d2.transpose();
  return 0.5 * (r + r.transpose());
}

Eigen::MatrixXd BasisSet::gram() const {
  const Eigen::MatrixXd v = eval(quad_.nodes);
  const Eigen::Map<const Eigen::VectorXd> w(quad_.weights.data(), static_cast<Eigen::Index>(quad_.size()));
  return v * w.asDiagonal() * v.transpose();
}

BasisSet BasisSet::truncated(std::size_t count) const {
  if (count == 0 || count > size_) {
    throw ConfigError("truncated: count " + std::to_string(count) + " not in [1, " + std::to_string(size_) + "]");
  }
  if (kind_ == BasisKind::InMasterBasis) {
    return in_master(*master_, coeffs_.topRows(static_cast<Eigen::Index>(count)));
  }
  BasisSet b = *this;
  b.size_ = count;
  return b;
}

}  // namespace fjscb
