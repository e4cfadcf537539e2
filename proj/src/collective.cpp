#include "spinsq/collective.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "spinsq/errors.hpp"

namespace spinsq {

namespace {

constexpr Complex kI{0.0, 1.0};

// Nonzero entry of sigma_a on `site` in row `row`: returns the column and
// writes the coefficient.
inline Eigen::Index pauli_entry(Axis a, int n, int site, Eigen::Index row, Complex& coeff) {
  const Eigen::Index bit = Eigen::Index{1} << (n - 1 - site);
  const bool one = (row & bit) != 0;
  switch (a) {
    case Axis::x:
      coeff = 1.0;
      return row ^ bit;
    case Axis::y:
      coeff = one ? kI : -kI;
      return row ^ bit;
    case Axis::z:
      coeff = one ? -1.0 : 1.0;
      return row;
  }
  return row;
}

int qubit_count(const DensityOperator& rho) {
  if (!rho.op().is_qubit_system()) throw ArgumentError("collective moments need a qubit system");
  return rho.sites();
}

void check_n(int n) {
  if (n < 1) throw ArgumentError("qubit count must be positive");
  if (n > max_qubits()) throw CapacityError("qubit count exceeds the configured cap");
}

// U rho U^dagger where U |x> = c(x) |perm(x)>.
template <typename Perm, typename Coeff>
Matrix conjugate_monomial(const Matrix& m, Perm perm, Coeff coeff) {
  const auto dim = m.rows();
  Matrix out(dim, dim);
  std::vector<Complex> c(dim);
  std::vector<Eigen::Index> p(dim);
  for (Eigen::Index x = 0; x < dim; ++x) {
    c[x] = coeff(x);
    p[x] = perm(x);
  }
  for (Eigen::Index y = 0; y < dim; ++y) {
    const Complex cy = std::conj(c[y]);
    for (Eigen::Index x = 0; x < dim; ++x) out(p[x], p[y]) = c[x] * cy * m(x, y);
  }
  return out;
}

}  // namespace

char axis_name(Axis a) { return "xyz"[static_cast<int>(a)]; }

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

void BlochVector::validate() const {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) ||
      x * x + y * y + z * z > 1.0 + 1e-12) {
    throw ArgumentError("Bloch vector longer than 1");
  }
}

// ---------------------------------------------------------------------------
// CollectiveMoments

CollectiveMoments::CollectiveMoments(int n, const Vec3& j, const Mat3& c)
    : n_(n), j_(j), c_(c) {
  gamma_ = c_ - j_ * j_.transpose();
  chi_ = (n_ - 1) * gamma_ + c_;
}

CollectiveMoments CollectiveMoments::from_correlations(int n, const Vec3& j, const Mat3& c) {
  if (n < 1) throw ArgumentError("qubit count must be positive");
  if (!j.allFinite() || !c.allFinite()) throw ArgumentError("moments must be finite");
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());
  if ((c - c.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ArgumentError("correlation matrix must be symmetric");
  }
  const double half = 0.5 * n;
  for (int l = 0; l < 3; ++l) {
    if (std::abs(j[l]) > half + 1e-9) throw ArgumentError("|<J_l>| exceeds N/2");
  }
  const Mat3 sym = 0.5 * (c + c.transpose());
  if (sym.trace() > 0.25 * n * (n + 2) + 1e-9) {
    throw InconsistentMomentsError("Tr C exceeds N(N+2)/4; no quantum state has these moments");
  }
  CollectiveMoments m(n, j, sym);
  Eigen::SelfAdjointEigenSolver<Mat3> es(m.gamma_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues()[0] < -1e-9 * scale) {
    throw ArgumentError("covariance matrix is not positive semidefinite");
  }
  return m;
}

CollectiveMoments CollectiveMoments::from_diagonal(int n, const Vec3& j, const Vec3& k2) {
  return from_correlations(n, j, k2.asDiagonal().toDenseMatrix());
}

// ---------------------------------------------------------------------------

Matrix pauli(Axis a) {
  Matrix p(2, 2);
  switch (a) {
    case Axis::x:
      p << 0, 1, 1, 0;
      break;
    case Axis::y:
      p << 0, -kI, kI, 0;
      break;
    case Axis::z:
      p << 1, 0, 0, -1;
      break;
  }
  return p;
}

ComplexOperator collective_operator(Axis a, int n) {
  check_n(n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix m = Matrix::Zero(dim, dim);
  Complex coeff;
  for (Eigen::Index row = 0; row < dim; ++row) {
    for (int s = 0; s < n; ++s) {
      const auto col = pauli_entry(a, n, s, row, coeff);
      m(row, col) += 0.5 * coeff;
    }
  }
  return ComplexOperator(std::move(m), std::vector<int>(n, 2));
}

Matrix apply_collective(Axis a, int n, const Matrix& m) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (m.rows() != dim) throw ArgumentError("matrix does not match the qubit count");
  Matrix out = Matrix::Zero(dim, m.cols());
  Complex coeff;
  for (Eigen::Index row = 0; row < dim; ++row) {
    for (int s = 0; s < n; ++s) {
      const auto src = pauli_entry(a, n, s, row, coeff);
      out.row(row) += (0.5 * coeff) * m.row(src);
    }
  }
  return out;
}

CollectiveMoments moments(const DensityOperator& rho) {
  const int n = qubit_count(rho);
  const Eigen::Index dim = rho.dim();
  const Matrix& r = rho.matrix();

  std::array<Matrix, 3> jr;  // J_l rho
  Vec3 j;
  for (Axis a : kAxes) {
    const int l = static_cast<int>(a);
    jr[l] = apply_collective(a, n, r);
    j[l] = jr[l].trace().real();
  }

  // Tr(J_k J_l rho) = sum_i (J_k)_{i,i'} (J_l rho)_{i',i}
  Mat3 c;
  Complex coeff;
  for (Axis ak : kAxes) {
    const int k = static_cast<int>(ak);
    for (int l = k; l < 3; ++l) {
      Complex acc = 0.0;
      for (Eigen::Index row = 0; row < dim; ++row) {
        for (int s = 0; s < n; ++s) {
          const auto col = pauli_entry(ak, n, s, row, coeff);
          acc += coeff * jr[l](col, row);
        }
      }
      c(k, l) = c(l, k) = 0.5 * acc.real();
    }
  }
  return CollectiveMoments::from_correlations(n, j, c);
}

CollectiveMoments rotate_moments(const CollectiveMoments& m, const Mat3& o) {
  if (!o.allFinite() || (o * o.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9) {
    throw ArgumentError("rotation matrix is not orthogonal");
  }
  return CollectiveMoments::from_correlations(m.n(), o * m.j(), o * m.c() * o.transpose());
}

DensityOperator reduced_av2(const DensityOperator& rho) {
  const int n = qubit_count(rho);
  if (n < 2) throw ArgumentError("average two-qubit state needs at least two qubits");
  Matrix swap = Matrix::Zero(4, 4);
  swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;

  Matrix acc = Matrix::Zero(4, 4);
  for (int a = 0; a < n; ++a) {
    for (int b = a + 1; b < n; ++b) {
      const std::array<int, 2> keep{a, b};
      const Matrix rab = partial_trace(rho, keep).matrix();
      acc += rab + swap * rab * swap;
    }
  }
  acc /= static_cast<double>(n) * (n - 1);
  return DensityOperator::trusted(ComplexOperator(std::move(acc), {2, 2}));
}

DensityOperator twirl(const DensityOperator& rho) {
  const int n = qubit_count(rho);
  const Eigen::Index all = (Eigen::Index{1} << n) - 1;
  const Matrix& r = rho.matrix();
  const Complex i_pow_n = std::pow(kI, n);
  auto parity = [](Eigen::Index x) {
    return (std::popcount(static_cast<std::uint64_t>(x)) & 1) ? -1.0 : 1.0;
  };
  auto flip = [all](Eigen::Index x) { return x ^ all; };
  auto same = [](Eigen::Index x) { return x; };

  Matrix out = r;
  out += conjugate_monomial(r, flip, [](Eigen::Index) { return Complex(1.0); });
  out += conjugate_monomial(r, flip, [&](Eigen::Index x) { return i_pow_n * parity(x); });
  out += conjugate_monomial(r, same, [&](Eigen::Index x) { return Complex(parity(x)); });
  out *= 0.25;
  return DensityOperator::trusted(ComplexOperator(std::move(out), rho.local_dims()));
}

CollectiveMoments product_moments(std::span<const BlochVector> blochs) {
  const int n = static_cast<int>(blochs.size());
  if (n < 1) throw ArgumentError("need at least one Bloch vector");
  Vec3 sum = Vec3::Zero();
  Mat3 self = Mat3::Zero();
  for (const BlochVector& b : blochs) {
    b.validate();
    const Vec3 r(b.x, b.y, b.z);
    sum += r;
    self += r * r.transpose();
  }
  // Same-site terms contribute delta_kl; distinct sites factorize.
  const Mat3 c = 0.25 * (n * Mat3::Identity() + sum * sum.transpose() - self);
  return CollectiveMoments::from_correlations(n, 0.5 * sum, c);
}

}  // namespace spinsq
