#pragma once

// Dense complex-matrix substrate shared by every other module.
//
// Basis convention: site 0 is the slowest-varying tensor index, and for
// qubits |0> is spin-up (sigma_z |0> = +|0>).

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace spinsq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Largest number of qubits any operator may span. Default 12.
int max_qubits();
void set_max_qubits(int n);
/// Largest allowed Hilbert-space dimension, 2^max_qubits().
std::int64_t max_dimension();

class ComplexOperator {
 public:
  ComplexOperator() = default;
  ComplexOperator(Matrix entries, std::vector<int> local_dims);

  /// Qubit operator; the number of sites is inferred from the dimension.
  static ComplexOperator qubits(Matrix entries);
  static ComplexOperator identity(std::vector<int> local_dims);

  Eigen::Index dim() const { return entries_.rows(); }
  int sites() const { return static_cast<int>(local_dims_.size()); }
  const Matrix& matrix() const { return entries_; }
  const std::vector<int>& local_dims() const { return local_dims_; }
  bool is_qubit_system() const;

 private:
  Matrix entries_;
  std::vector<int> local_dims_;
};

/// Hermitian, unit-trace, positive semidefinite operator.
class DensityOperator {
 public:
  /// Validates: Hermitian to 1e-10, trace 1 to 1e-10, eigenvalues >= -1e-9.
  /// Tiny anti-Hermitian roundoff is removed.
  explicit DensityOperator(ComplexOperator op);

  /// Skips the positivity check. For states that are positive by construction
  /// (Gibbs states, convex mixtures of projectors).
  static DensityOperator trusted(ComplexOperator op);
  static DensityOperator pure(const Vector& psi, std::vector<int> local_dims);
  static DensityOperator maximally_mixed(std::vector<int> local_dims);

  const ComplexOperator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  const std::vector<int>& local_dims() const { return op_.local_dims(); }
  Eigen::Index dim() const { return op_.dim(); }
  int sites() const { return op_.sites(); }

 private:
  struct Unchecked {};
  DensityOperator(ComplexOperator op, Unchecked) : op_(std::move(op)) {}
  ComplexOperator op_;
};

/// A split of the sites into two non-empty parts. Canonical form keeps the
/// smaller side in side_a; on ties, the side holding the lowest site index.
class Bipartition {
 public:
  Bipartition(std::vector<int> side_a, int n_sites);
  /// Bit s of mask (from the least significant end) marks site s.
  static Bipartition from_mask(std::uint64_t mask, int n_sites);

  const std::vector<int>& side_a() const { return side_a_; }
  const std::vector<int>& side_b() const { return side_b_; }
  int sites() const { return n_sites_; }
  std::uint64_t mask() const;
  /// One-based site labels, e.g. "{2,5,8}|{1,3,4,6,7,9}".
  std::string to_string() const;

  friend bool operator==(const Bipartition& a, const Bipartition& b) {
    return a.n_sites_ == b.n_sites_ && a.side_a_ == b.side_a_;
  }

 private:
  std::vector<int> side_a_;
  std::vector<int> side_b_;
  int n_sites_ = 0;
};

/// All 2^(n-1) - 1 canonical bipartitions of n sites.
std::vector<Bipartition> all_bipartitions(int n_sites);

ComplexOperator kron(const ComplexOperator& a, const ComplexOperator& b);

/// Reduced state on `keep`, with the kept sites ordered as listed.
DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep);

/// Transposes the side_a factors.
ComplexOperator partial_transpose(const DensityOperator& rho, const Bipartition& part);
Matrix partial_transpose(const Matrix& m, const std::vector<int>& local_dims,
                         const Bipartition& part);

/// Realigned matrix R((i,j),(k,l)) = rho((i,k),(j,l)) with i,j on side_a and
/// k,l on side_b; shape dA^2 x dB^2.
Matrix realign(const DensityOperator& rho, const Bipartition& part);
Matrix realign(const Matrix& m, const std::vector<int>& local_dims, const Bipartition& part);

struct EigenDecomposition {
  Eigen::VectorXd values;  // ascending
  Matrix vectors;          // columns
};

EigenDecomposition herm_eig(const ComplexOperator& h);
Eigen::VectorXd herm_eigenvalues(const Matrix& h);

/// V f(Lambda) V^dagger.
ComplexOperator spectral_fn(const ComplexOperator& h, const std::function<double(double)>& f);

/// Sum of singular values.
double trace_norm(const Matrix& m);

/// 1/2 of the trace norm of the difference.
double trace_distance(const Matrix& a, const Matrix& b);

/// (m + m^dagger)/2, or ArgumentError if the anti-Hermitian part exceeds
/// 1e-10 relative to max(1, |m|_max).
Matrix hermitian_part(const Matrix& m);

/// True when every eigenvalue of the Hermitian matrix h exceeds -shift.
/// Decides by Cholesky, which is far cheaper than a full eigensolve.
bool is_positive_above(const Matrix& h, double shift);

}  // namespace spinsq
