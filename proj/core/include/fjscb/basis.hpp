#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "fjscb/quadrature.hpp"

namespace fjscb {

enum class BasisKind { Fourier, Legendre, InMasterBasis };

[[nodiscard]] std::string_view to_string(BasisKind kind) noexcept;

/// Orthonormal family alpha_1..alpha_size on [0,1].
///
/// Fourier:  alpha_1 = 1, alpha_{2m} = sqrt(2) cos(2 pi m t), alpha_{2m+1} = sqrt(2) sin(2 pi m t).
/// Legendre: alpha_k = sqrt(2k-1) P_{k-1}(2t-1).
/// InMasterBasis: alpha_k = sum_l A(k,l) phi_l with phi an orthonormal master family
/// and A having orthonormal rows (used for estimated FPCs).
///
/// Function index k is 1-based in documentation; matrices are 0-based (row k-1).
/// Immutable once built, so concurrent reads are safe.
class BasisSet {
 public:
  [[nodiscard]] static BasisSet fourier(std::size_t size);
  [[nodiscard]] static BasisSet legendre(std::size_t size);
  /// `coeffs` is size x master.size(). Throws ConfigError if the rows are not
  /// orthonormal to 1e-8 or if `master` is itself an InMasterBasis.
  [[nodiscard]] static BasisSet in_master(const BasisSet& master, Eigen::MatrixXd coeffs);

  [[nodiscard]] BasisKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t size() const noexcept { return size_; }
  [[nodiscard]] const Quadrature& quadrature() const noexcept { return quad_; }
  /// Expansion coefficients over the master family; empty unless InMasterBasis.
  [[nodiscard]] const Eigen::MatrixXd& master_coeffs() const noexcept { return coeffs_; }
  [[nodiscard]] const BasisSet* master() const noexcept { return master_.get(); }

  /// size x |points| matrix of alpha_k(points[t]). Throws DomainError outside [0,1].
  [[nodiscard]] Eigen::MatrixXd eval(std::span<const double> points) const;
  /// size x |points| matrix of alpha_k''(points[t]).
  [[nodiscard]] Eigen::MatrixXd eval_d2(std::span<const double> points) const;

  /// R(k,l) = int_0^1 alpha_k'' alpha_l'' dt for k,l < count (count <= size()).
  [[nodiscard]] Eigen::MatrixXd raw_penalty(std::size_t count) const;
  [[nodiscard]] Eigen::MatrixXd raw_penalty() const { return raw_penalty(size_); }

  /// int_0^1 alpha_k alpha_l dt under the stored quadrature.
  [[nodiscard]] Eigen::MatrixXd gram() const;

  /// Leading `count` functions of this family (same kind, same quadrature rule).
  [[nodiscard]] BasisSet truncated(std::size_t count) const;

 private:
  BasisSet(BasisKind kind, std::size_t size);

  BasisKind kind_;
  std::size_t size_;
  Quadrature quad_;
  Eigen::MatrixXd coeffs_;
  std::shared_ptr<const BasisSet> master_;
};

}  // namespace fjscb
