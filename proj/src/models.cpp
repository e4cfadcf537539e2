#include "spinsq/models.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "spinsq/errors.hpp"

namespace spinsq {

namespace {

constexpr Complex kI{0.0, 1.0};

// Adds coeff * (product of Paulis on the listed sites) to h. ops[s] is one of
// 'I', 'X', 'Y', 'Z'.
void add_pauli_string(Matrix& h, int n, double coeff, const std::string& ops) {
  const Eigen::Index dim = h.rows();
  for (Eigen::Index row = 0; row < dim; ++row) {
    Eigen::Index col = row;
    Complex c = coeff;
    for (int s = 0; s < n; ++s) {
      const Eigen::Index bit = Eigen::Index{1} << (n - 1 - s);
      const bool one = (row & bit) != 0;
      switch (ops[s]) {
        case 'I':
          break;
        case 'X':
          col ^= bit;
          break;
        case 'Y':
          col ^= bit;
          c *= one ? kI : -kI;
          break;
        case 'Z':
          if (one) c = -c;
          break;
        default:
          throw ArgumentError(std::string("unknown Pauli letter '") + ops[s] + "'");
      }
    }
    h(row, col) += c;
  }
}

std::string two_site(int n, int a, int b, char p) {
  std::string ops(n, 'I');
  ops[a] = p;
  ops[b] = p;
  return ops;
}

std::string one_site(int n, int a, char p) {
  std::string ops(n, 'I');
  ops[a] = p;
  return ops;
}

Matrix square(const ComplexOperator& op) { return op.matrix() * op.matrix(); }

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::heisenberg_chain:
      return "heisenberg_chain";
    case ModelKind::xy_chain:
      return "xy_chain";
    case ModelKind::heisenberg_complete:
      return "heisenberg_complete";
    case ModelKind::xy_complete:
      return "xy_complete";
    case ModelKind::lmg:
      return "lmg";
    case ModelKind::ising_transverse:
      return "ising_transverse";
    case ModelKind::nanotube:
      return "nanotube";
    case ModelKind::custom:
      return "custom";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& name) {
  for (ModelKind k : {ModelKind::heisenberg_chain, ModelKind::xy_chain,
                      ModelKind::heisenberg_complete, ModelKind::xy_complete, ModelKind::lmg,
                      ModelKind::ising_transverse, ModelKind::nanotube, ModelKind::custom}) {
    if (to_string(k) == name) return k;
  }
  throw ArgumentError("unknown model kind '" + name + "'");
}

double HamiltonianSpec::param(const std::string& name, double fallback) const {
  const auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

std::string HamiltonianSpec::label() const {
  std::ostringstream os;
  os << to_string(kind);
  if (!params.empty()) {
    os << '(';
    bool first = true;
    for (const auto& [k, v] : params) {
      os << (first ? "" : ",") << k << '=' << v;
      first = false;
    }
    os << ')';
  }
  return os.str();
}

void validate(const HamiltonianSpec& spec) {
  if (spec.n < 2) throw ArgumentError("models need at least two sites");
  if (spec.n > max_qubits()) throw CapacityError("model size exceeds the configured qubit cap");
  if (spec.kind == ModelKind::nanotube && spec.n != 9) {
    throw ArgumentError("the nanotube ring has exactly nine sites");
  }
  if (spec.kind == ModelKind::custom) {
    if (spec.terms.empty()) throw ArgumentError("custom model needs Pauli terms");
    for (const auto& t : spec.terms) {
      if (static_cast<int>(t.ops.size()) != spec.n) {
        throw ArgumentError("Pauli string length must equal n");
      }
      if (!std::isfinite(t.coeff)) throw ArgumentError("Pauli coefficient must be finite");
    }
  }
  for (const auto& [k, v] : spec.params) {
    if (!std::isfinite(v)) throw ArgumentError("model parameter " + k + " is not finite");
  }
}

ComplexOperator build_hamiltonian(const HamiltonianSpec& spec) {
  validate(spec);
  const int n = spec.n;
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix h = Matrix::Zero(dim, dim);

  switch (spec.kind) {
    case ModelKind::heisenberg_chain:
    case ModelKind::xy_chain: {
      const std::string axes = spec.kind == ModelKind::xy_chain ? "XY" : "XYZ";
      for (int k = 0; k < n; ++k) {
        for (char p : axes) add_pauli_string(h, n, 1.0, two_site(n, k, (k + 1) % n, p));
      }
      break;
    }
    case ModelKind::ising_transverse: {
      const double b = spec.param("B", 1.0);
      for (int k = 0; k < n; ++k) {
        add_pauli_string(h, n, 1.0, two_site(n, k, (k + 1) % n, 'Z'));
        add_pauli_string(h, n, b, one_site(n, k, 'X'));
      }
      break;
    }
    case ModelKind::heisenberg_complete:
      for (Axis a : kAxes) h += square(collective_operator(a, n));
      break;
    case ModelKind::xy_complete:
      h += square(collective_operator(Axis::x, n)) + square(collective_operator(Axis::y, n));
      break;
    case ModelKind::lmg: {
      const double lambda = spec.param("lambda", 1.0);
      const double gamma = spec.param("gamma", 1.0);
      const double field = spec.param("h", 0.0);
      h -= (lambda / n) * (square(collective_operator(Axis::x, n)) +
                           gamma * square(collective_operator(Axis::y, n)));
      h -= field * collective_operator(Axis::z, n).matrix();
      break;
    }
    case ModelKind::nanotube: {
      // One-based site k couples to k+1 with C1 and to k+2 with C2 when
      // k is in {2,3,5,6,8,9}.
      const double c1 = spec.param("C1", 200.0);
      const double c2 = spec.param("C2", 140.0);
      for (int k = 1; k <= 9; ++k) {
        const bool next_nearest = k % 3 != 1;
        for (char p : std::string("XYZ")) {
          add_pauli_string(h, n, c1 / 4.0, two_site(n, k - 1, k % 9, p));
          if (next_nearest) add_pauli_string(h, n, c2 / 4.0, two_site(n, k - 1, (k + 1) % 9, p));
        }
      }
      break;
    }
    case ModelKind::custom:
      for (const auto& t : spec.terms) add_pauli_string(h, n, t.coeff, t.ops);
      break;
  }
  return ComplexOperator(hermitian_part(h), std::vector<int>(n, 2));
}

// ---------------------------------------------------------------------------
// ThermalEnsemble

ThermalEnsemble::ThermalEnsemble(const ComplexOperator& h)
    : eig_(herm_eig(h)), local_dims_(h.local_dims()), qubits_(h.is_qubit_system()) {
  if (!qubits_) return;
  const int n = sites();
  const Matrix& v = eig_.vectors;
  std::array<Matrix, 3> jv;
  for (Axis a : kAxes) {
    const int l = static_cast<int>(a);
    jv[l] = apply_collective(a, n, v);
    first_[l] = (v.adjoint() * jv[l]).diagonal().real();
  }
  int idx = 0;
  for (int k = 0; k < 3; ++k) {
    for (int l = k; l < 3; ++l) {
      second_[idx++] = (jv[k].conjugate().cwiseProduct(jv[l])).colwise().sum().real().transpose();
    }
  }
}

Eigen::VectorXd ThermalEnsemble::weights(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ArgumentError("temperature must be finite and >= 0");
  const Eigen::VectorXd& e = eig_.values;
  const double emin = e[0];
  Eigen::VectorXd w(e.size());
  if (t == 0.0) {
    const double window = 1e-9 * std::max(1.0, e.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < e.size(); ++i) w[i] = e[i] - emin <= window ? 1.0 : 0.0;
  } else {
    w = (-(e.array() - emin) / t).exp().matrix();
  }
  return w / w.sum();
}

DensityOperator ThermalEnsemble::state(double t) const {
  const Eigen::VectorXd w = weights(t);
  const double cutoff = 1e-17 * w.maxCoeff();
  Eigen::Index keep = 0;
  // Eigenvalues ascend, so weights descend; trailing negligible weights are dropped.
  while (keep < w.size() && w[keep] > cutoff) ++keep;
  const Matrix b = eig_.vectors.leftCols(keep) *
                   w.head(keep).cwiseSqrt().cast<Complex>().asDiagonal();
  Matrix rho = b * b.adjoint();
  return DensityOperator::trusted(ComplexOperator(std::move(rho), local_dims_));
}

CollectiveMoments ThermalEnsemble::moments(double t) const {
  if (!qubits_) throw ArgumentError("collective moments need a qubit system");
  const Eigen::VectorXd w = weights(t);
  Vec3 j;
  for (int l = 0; l < 3; ++l) j[l] = w.dot(first_[l]);
  Mat3 c;
  int idx = 0;
  for (int k = 0; k < 3; ++k) {
    for (int l = k; l < 3; ++l) c(k, l) = c(l, k) = w.dot(second_[idx++]);
  }
  return CollectiveMoments::from_correlations(sites(), j, c);
}

DensityOperator thermal_state(const ComplexOperator& h, double t) {
  if (!(t >= 0.0)) throw ArgumentError("temperature must be >= 0");
  return ThermalEnsemble(h).state(t);
}

// ---------------------------------------------------------------------------
// Named states

Vector dicke_vector(int n, int m) {
  if (n < 1 || n > max_qubits()) throw ArgumentError("Dicke state size out of range");
  if (m < 0 || m > n) throw ArgumentError("Dicke excitation number must lie in [0, n]");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Vector psi = Vector::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (std::popcount(static_cast<std::uint64_t>(i)) == m) psi[i] = 1.0;
  }
  return psi.normalized();
}

DensityOperator dicke_state(int n, int m) {
  return DensityOperator::pure(dicke_vector(n, m), std::vector<int>(n, 2));
}

DensityOperator product_state(std::span<const BlochVector> blochs) {
  if (blochs.empty()) throw ArgumentError("product state needs at least one qubit");
  if (static_cast<int>(blochs.size()) > max_qubits()) {
    throw CapacityError("product state exceeds the configured qubit cap");
  }
  ComplexOperator acc;
  bool first = true;
  for (const BlochVector& b : blochs) {
    b.validate();
    Matrix q = 0.5 * (Matrix::Identity(2, 2) + b.x * pauli(Axis::x) + b.y * pauli(Axis::y) +
                      b.z * pauli(Axis::z));
    ComplexOperator single(std::move(q), {2});
    acc = first ? single : kron(acc, single);
    first = false;
  }
  return DensityOperator::trusted(acc);
}

DensityOperator detection_example_state(ExampleState which) {
  constexpr int n = 8;
  const Matrix jx = collective_operator(Axis::x, n).matrix();
  const Matrix jy = collective_operator(Axis::y, n).matrix();
  const Matrix jz = collective_operator(Axis::z, n).matrix();
  Matrix h;
  double t = 0.0;
  switch (which) {
    case ExampleState::squeezed_8c:
      h = 7.0 * jz * jz - jx * jx - jy * jy;
      t = 3.0;
      break;
    case ExampleState::original_sq:
      h = 2.0 * jx * jx - jz;
      t = 0.3;
      break;
  }
  return thermal_state(ComplexOperator(std::move(h), std::vector<int>(n, 2)), t);
}

Eigen::VectorXi permute_sites_index_map(const std::vector<int>& perm) {
  const int n = static_cast<int>(perm.size());
  const int dim = 1 << n;
  Eigen::VectorXi map(dim);
  for (int i = 0; i < dim; ++i) {
    int j = 0;
    for (int s = 0; s < n; ++s) {
      if (i >> (n - 1 - s) & 1) j |= 1 << (n - 1 - perm[s]);
    }
    map[i] = j;
  }
  return map;
}

}  // namespace spinsq
