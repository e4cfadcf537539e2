#include "spinsq/operator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "spinsq/errors.hpp"

namespace spinsq {

namespace {

std::atomic<int> g_max_qubits{12};

constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kPositivityTol = 1e-9;

std::int64_t product(const std::vector<int>& dims) {
  std::int64_t p = 1;
  for (int d : dims) {
    p *= d;
    if (p > max_dimension()) {
      throw CapacityError("dimension exceeds the configured maximum of " +
                          std::to_string(max_dimension()));
    }
  }
  return p;
}

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

// Index bookkeeping for a split of the sites into an ordered list A and the
// remaining sites B (ascending). full[a * db + b] is the full basis index.
struct Split {
  Eigen::Index da = 1;
  Eigen::Index db = 1;
  std::vector<Eigen::Index> a_of;
  std::vector<Eigen::Index> b_of;
  std::vector<Eigen::Index> full;
};

Split make_split(const std::vector<int>& dims, const std::vector<int>& sites_a) {
  const int n = static_cast<int>(dims.size());
  std::vector<bool> in_a(n, false);
  for (int s : sites_a) {
    if (s < 0 || s >= n) throw ArgumentError("site index " + std::to_string(s) + " out of range");
    if (in_a[s]) throw ArgumentError("duplicate site index " + std::to_string(s));
    in_a[s] = true;
  }
  std::vector<int> sites_b;
  for (int s = 0; s < n; ++s) {
    if (!in_a[s]) sites_b.push_back(s);
  }

  std::vector<Eigen::Index> stride(n, 1);
  for (int s = n - 2; s >= 0; --s) stride[s] = stride[s + 1] * dims[s + 1];
  const Eigen::Index dim = n == 0 ? 1 : stride[0] * dims[0];

  Split sp;
  for (int s : sites_a) sp.da *= dims[s];
  for (int s : sites_b) sp.db *= dims[s];
  sp.a_of.resize(dim);
  sp.b_of.resize(dim);
  sp.full.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::Index a = 0;
    for (int s : sites_a) a = a * dims[s] + (i / stride[s]) % dims[s];
    Eigen::Index b = 0;
    for (int s : sites_b) b = b * dims[s] + (i / stride[s]) % dims[s];
    sp.a_of[i] = a;
    sp.b_of[i] = b;
    sp.full[a * sp.db + b] = i;
  }
  return sp;
}

void check_square(const Matrix& m) {
  if (m.rows() != m.cols()) throw ArgumentError("operator matrix must be square");
}

}  // namespace

int max_qubits() { return g_max_qubits.load(); }

void set_max_qubits(int n) {
  if (n < 1 || n > 30) throw ArgumentError("qubit cap must lie in [1, 30]");
  g_max_qubits.store(n);
}

std::int64_t max_dimension() { return std::int64_t{1} << max_qubits(); }

// ---------------------------------------------------------------------------
// ComplexOperator

ComplexOperator::ComplexOperator(Matrix entries, std::vector<int> local_dims)
    : entries_(std::move(entries)), local_dims_(std::move(local_dims)) {
  check_square(entries_);
  for (int d : local_dims_) {
    if (d < 1) throw ArgumentError("local dimensions must be positive");
  }
  if (product(local_dims_) != entries_.rows()) {
    throw ArgumentError("product of local dimensions does not match operator dimension");
  }
  if (!entries_.allFinite()) throw ArgumentError("operator has non-finite entries");
}

ComplexOperator ComplexOperator::qubits(Matrix entries) {
  check_square(entries);
  const auto dim = entries.rows();
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim || dim < 2) {
    throw ArgumentError("qubit operator dimension must be a power of two");
  }
  return ComplexOperator(std::move(entries), std::vector<int>(n, 2));
}

ComplexOperator ComplexOperator::identity(std::vector<int> local_dims) {
  const auto dim = product(local_dims);
  return ComplexOperator(Matrix::Identity(dim, dim), std::move(local_dims));
}

bool ComplexOperator::is_qubit_system() const {
  return std::all_of(local_dims_.begin(), local_dims_.end(), [](int d) { return d == 2; });
}

// ---------------------------------------------------------------------------
// DensityOperator

DensityOperator::DensityOperator(ComplexOperator op) {
  Matrix h = hermitian_part(op.matrix());
  const Complex tr = h.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol) {
    throw ArgumentError("density operator trace is not 1");
  }
  if (!is_positive_above(h, kPositivityTol)) {
    throw ArgumentError("density operator has eigenvalue below -1e-9");
  }
  op_ = ComplexOperator(std::move(h), op.local_dims());
}

DensityOperator DensityOperator::trusted(ComplexOperator op) {
  return DensityOperator(std::move(op), Unchecked{});
}

DensityOperator DensityOperator::pure(const Vector& psi, std::vector<int> local_dims) {
  const double norm = psi.norm();
  if (!(norm > 0.0)) throw ArgumentError("state vector has zero norm");
  const Vector v = psi / norm;
  return DensityOperator(ComplexOperator(v * v.adjoint(), std::move(local_dims)), Unchecked{});
}

DensityOperator DensityOperator::maximally_mixed(std::vector<int> local_dims) {
  const auto dim = product(local_dims);
  Matrix m = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  return DensityOperator(ComplexOperator(std::move(m), std::move(local_dims)), Unchecked{});
}

// ---------------------------------------------------------------------------
// Bipartition

Bipartition::Bipartition(std::vector<int> side_a, int n_sites) : n_sites_(n_sites) {
  if (n_sites < 2) throw ArgumentError("a bipartition needs at least two sites");
  std::sort(side_a.begin(), side_a.end());
  if (std::adjacent_find(side_a.begin(), side_a.end()) != side_a.end()) {
    throw ArgumentError("duplicate site in bipartition");
  }
  for (int s : side_a) {
    if (s < 0 || s >= n_sites) throw ArgumentError("bipartition site out of range");
  }
  if (side_a.empty() || static_cast<int>(side_a.size()) == n_sites) {
    throw ArgumentError("bipartition sides must both be non-empty");
  }
  std::vector<int> side_b;
  for (int s = 0; s < n_sites; ++s) {
    if (!std::binary_search(side_a.begin(), side_a.end(), s)) side_b.push_back(s);
  }
  const bool swap = side_b.size() < side_a.size() ||
                    (side_b.size() == side_a.size() && side_b.front() < side_a.front());
  if (swap) std::swap(side_a, side_b);
  side_a_ = std::move(side_a);
  side_b_ = std::move(side_b);
}

Bipartition Bipartition::from_mask(std::uint64_t mask, int n_sites) {
  std::vector<int> a;
  for (int s = 0; s < n_sites; ++s) {
    if (mask >> s & 1U) a.push_back(s);
  }
  return Bipartition(std::move(a), n_sites);
}

std::uint64_t Bipartition::mask() const {
  std::uint64_t m = 0;
  for (int s : side_a_) m |= std::uint64_t{1} << s;
  return m;
}

std::string Bipartition::to_string() const {
  std::ostringstream os;
  auto put = [&os](const std::vector<int>& side) {
    os << '{';
    for (std::size_t i = 0; i < side.size(); ++i) os << (i ? "," : "") << side[i] + 1;
    os << '}';
  };
  put(side_a_);
  os << '|';
  put(side_b_);
  return os.str();
}

std::vector<Bipartition> all_bipartitions(int n_sites) {
  if (n_sites < 2 || n_sites > 62) throw ArgumentError("bipartitions need 2..62 sites");
  std::vector<Bipartition> out;
  // Masks without the last site enumerate each unordered split exactly once.
  const std::uint64_t count = std::uint64_t{1} << (n_sites - 1);
  out.reserve(count - 1);
  for (std::uint64_t m = 1; m < count; ++m) out.push_back(Bipartition::from_mask(m, n_sites));
  return out;
}

// ---------------------------------------------------------------------------
// Tensor operations

ComplexOperator kron(const ComplexOperator& a, const ComplexOperator& b) {
  std::vector<int> dims = a.local_dims();
  dims.insert(dims.end(), b.local_dims().begin(), b.local_dims().end());
  const auto dim = product(dims);
  Matrix out(dim, dim);
  const auto db = b.dim();
  for (Eigen::Index i = 0; i < a.dim(); ++i) {
    for (Eigen::Index j = 0; j < a.dim(); ++j) {
      out.block(i * db, j * db, db, db) = a.matrix()(i, j) * b.matrix();
    }
  }
  return ComplexOperator(std::move(out), std::move(dims));
}

DensityOperator partial_trace(const DensityOperator& rho, std::span<const int> keep) {
  if (keep.empty()) throw ArgumentError("partial trace needs at least one kept site");
  const std::vector<int> sites(keep.begin(), keep.end());
  const Split sp = make_split(rho.local_dims(), sites);
  const Matrix& m = rho.matrix();
  Matrix out = Matrix::Zero(sp.da, sp.da);
  for (Eigen::Index e = 0; e < sp.db; ++e) {
    for (Eigen::Index j = 0; j < sp.da; ++j) {
      const auto fj = sp.full[j * sp.db + e];
      for (Eigen::Index i = 0; i < sp.da; ++i) {
        out(i, j) += m(sp.full[i * sp.db + e], fj);
      }
    }
  }
  std::vector<int> dims;
  dims.reserve(sites.size());
  for (int s : sites) dims.push_back(rho.local_dims()[s]);
  return DensityOperator::trusted(ComplexOperator(std::move(out), std::move(dims)));
}

Matrix partial_transpose(const Matrix& m, const std::vector<int>& local_dims,
                         const Bipartition& part) {
  if (part.sites() != static_cast<int>(local_dims.size())) {
    throw ArgumentError("bipartition does not match the number of sites");
  }
  const Split sp = make_split(local_dims, part.side_a());
  const auto dim = m.rows();
  Matrix out(dim, dim);
  for (Eigen::Index j = 0; j < dim; ++j) {
    const auto aj = sp.a_of[j];
    const auto bj = sp.b_of[j];
    for (Eigen::Index i = 0; i < dim; ++i) {
      out(sp.full[aj * sp.db + sp.b_of[i]], sp.full[sp.a_of[i] * sp.db + bj]) = m(i, j);
    }
  }
  return out;
}

ComplexOperator partial_transpose(const DensityOperator& rho, const Bipartition& part) {
  return ComplexOperator(partial_transpose(rho.matrix(), rho.local_dims(), part),
                         rho.local_dims());
}

Matrix realign(const Matrix& m, const std::vector<int>& local_dims, const Bipartition& part) {
  if (part.sites() != static_cast<int>(local_dims.size())) {
    throw ArgumentError("bipartition does not match the number of sites");
  }
  const Split sp = make_split(local_dims, part.side_a());
  Matrix out(sp.da * sp.da, sp.db * sp.db);
  for (Eigen::Index ai = 0; ai < sp.da; ++ai) {
    for (Eigen::Index aj = 0; aj < sp.da; ++aj) {
      for (Eigen::Index bk = 0; bk < sp.db; ++bk) {
        for (Eigen::Index bl = 0; bl < sp.db; ++bl) {
          out(ai * sp.da + aj, bk * sp.db + bl) =
              m(sp.full[ai * sp.db + bk], sp.full[aj * sp.db + bl]);
        }
      }
    }
  }
  return out;
}

Matrix realign(const DensityOperator& rho, const Bipartition& part) {
  return realign(rho.matrix(), rho.local_dims(), part);
}

// ---------------------------------------------------------------------------
// Spectral tools

Matrix hermitian_part(const Matrix& m) {
  check_square(m);
  const double asym = max_abs(m - m.adjoint());
  if (asym > kHermitianTol * std::max(1.0, max_abs(m))) {
    throw ArgumentError("operator is not Hermitian");
  }
  return (m + m.adjoint()) * 0.5;
}

EigenDecomposition herm_eig(const ComplexOperator& h) {
  const Matrix sym = hermitian_part(h.matrix());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXd herm_eigenvalues(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(h), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver failed");
  return solver.eigenvalues();
}

ComplexOperator spectral_fn(const ComplexOperator& h, const std::function<double(double)>& f) {
  const EigenDecomposition ed = herm_eig(h);
  Eigen::VectorXd fv(ed.values.size());
  for (Eigen::Index i = 0; i < fv.size(); ++i) {
    fv[i] = f(ed.values[i]);
    if (!std::isfinite(fv[i])) throw NumericError("spectral function is not finite on the spectrum");
  }
  Matrix out = ed.vectors * fv.cast<Complex>().asDiagonal() * ed.vectors.adjoint();
  return ComplexOperator(std::move(out), h.local_dims());
}

double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  // BDCSVD loses accuracy on degenerate spectra such as realigned Dicke states.
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues().sum();
}

double trace_distance(const Matrix& a, const Matrix& b) {
  return 0.5 * herm_eigenvalues(a - b).cwiseAbs().sum();
}

bool is_positive_above(const Matrix& h, double shift) {
  Matrix shifted = h;
  shifted.diagonal().array() += shift;
  Eigen::LLT<Matrix> llt(shifted);
  return llt.info() == Eigen::Success;
}

}  // namespace spinsq
