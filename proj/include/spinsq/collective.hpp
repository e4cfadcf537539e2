#pragma once

// Collective angular momentum J_l = 1/2 sum_k sigma_l^(k) and its first and
// second moments.

#include <array>
#include <span>

#include <Eigen/Dense>

#include "spinsq/operator.hpp"

namespace spinsq {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

enum class Axis { x = 0, y = 1, z = 2 };
inline constexpr std::array<Axis, 3> kAxes{Axis::x, Axis::y, Axis::z};
char axis_name(Axis a);

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
  /// Throws ArgumentError when the length exceeds 1 + 1e-12.
  void validate() const;
};

/// First and second moments of the collective spin of n qubits.
///
///   j     = (<J_x>, <J_y>, <J_z>)
///   c     = 1/2 <J_k J_l + J_l J_k>          (correlation matrix)
///   gamma = c - j j^T                       (covariance matrix)
///   chi   = (n - 1) gamma + c
///
/// The diagonal of c is K = (<J_x^2>, <J_y^2>, <J_z^2>).
class CollectiveMoments {
 public:
  /// Builds from measured numbers; only the physical invariants are enforced.
  /// Tr c above n(n+2)/4 raises InconsistentMomentsError.
  static CollectiveMoments from_correlations(int n, const Vec3& j, const Mat3& c);
  /// Convenience for axis-diagonal data: c = diag(k2).
  static CollectiveMoments from_diagonal(int n, const Vec3& j, const Vec3& k2);

  int n() const { return n_; }
  const Vec3& j() const { return j_; }
  Vec3 k2() const { return c_.diagonal(); }
  Vec3 variances() const { return gamma_.diagonal(); }
  const Mat3& c() const { return c_; }
  const Mat3& gamma() const { return gamma_; }
  const Mat3& chi() const { return chi_; }

 private:
  CollectiveMoments(int n, const Vec3& j, const Mat3& c);
  int n_ = 0;
  Vec3 j_ = Vec3::Zero();
  Mat3 c_ = Mat3::Zero();
  Mat3 gamma_ = Mat3::Zero();
  Mat3 chi_ = Mat3::Zero();
};

/// 2x2 Pauli matrix.
Matrix pauli(Axis a);

ComplexOperator collective_operator(Axis a, int n);

/// J_a * m for an n-qubit matrix m, without forming J_a.
Matrix apply_collective(Axis a, int n, const Matrix& m);

CollectiveMoments moments(const DensityOperator& rho);

/// j -> O j, c -> O c O^T.
CollectiveMoments rotate_moments(const CollectiveMoments& m, const Mat3& o);

/// Average of the two-site reduced states rho_ij over ordered pairs i != j.
DensityOperator reduced_av2(const DensityOperator& rho);

/// 1/4 sum_{U in {1, X^n, Y^n, Z^n}} U rho U^dagger. Zeroes <J_l> and the
/// off-diagonal correlations while keeping every <J_l^2>.
DensityOperator twirl(const DensityOperator& rho);

/// Moments of the product state with the given single-qubit Bloch vectors,
/// from closed-form pair sums.
CollectiveMoments product_moments(std::span<const BlochVector> blochs);

}  // namespace spinsq
