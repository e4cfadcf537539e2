#pragma once

// Spin Hamiltonians, named states and thermal states.

#include <array>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spinsq/collective.hpp"
#include "spinsq/operator.hpp"

namespace spinsq {

enum class ModelKind {
  heisenberg_chain,     // sum_k sigma^(k) . sigma^(k+1), periodic
  xy_chain,             // sum_k xx + yy on (k, k+1), periodic
  heisenberg_complete,  // J_x^2 + J_y^2 + J_z^2
  xy_complete,          // J_x^2 + J_y^2
  lmg,                  // -(lambda/N)(J_x^2 + gamma J_y^2) - h J_z
  ising_transverse,     // sum_k zz on (k, k+1) + B sum_k sigma_x, periodic
  nanotube,             // nine-site ring, C1/4 nearest and C2^k/4 next-nearest
  custom,               // weighted Pauli strings
};

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& name);

/// One weighted Pauli string, e.g. {0.5, "XXI"}; letters I, X, Y, Z per site.
struct PauliTerm {
  double coeff = 0.0;
  std::string ops;
};

struct HamiltonianSpec {
  ModelKind kind = ModelKind::heisenberg_chain;
  int n = 2;
  /// lmg: lambda, gamma, h. ising_transverse: B. nanotube: C1, C2.
  std::map<std::string, double> params;
  std::vector<PauliTerm> terms;  // custom only

  double param(const std::string& name, double fallback) const;
  /// Short human label, e.g. "ising_transverse(B=0.5)".
  std::string label() const;
};

/// Throws ArgumentError for an invalid spec.
void validate(const HamiltonianSpec& spec);

ComplexOperator build_hamiltonian(const HamiltonianSpec& spec);

/// Gibbs family exp(-H/T)/Z of one Hamiltonian, diagonalized once.
class ThermalEnsemble {
 public:
  explicit ThermalEnsemble(const ComplexOperator& h);

  const EigenDecomposition& spectrum() const { return eig_; }
  const std::vector<int>& local_dims() const { return local_dims_; }
  int sites() const { return static_cast<int>(local_dims_.size()); }

  /// Normalized Boltzmann weights over the eigenbasis. t = 0 gives uniform
  /// weight on the eigenspace within 1e-9 of the lowest eigenvalue.
  Eigen::VectorXd weights(double t) const;
  DensityOperator state(double t) const;
  /// Collective moments at temperature t straight from the eigenbasis.
  CollectiveMoments moments(double t) const;

 private:
  EigenDecomposition eig_;
  std::vector<int> local_dims_;
  bool qubits_ = false;
  // <v_i|J_l|v_i> and <v_i|(J_k J_l + J_l J_k)/2|v_i> for every eigenvector.
  std::array<Eigen::VectorXd, 3> first_;
  std::array<Eigen::VectorXd, 6> second_;
};

/// exp(-h/t)/Z for t > 0; normalized ground-space projector for t = 0.
DensityOperator thermal_state(const ComplexOperator& h, double t);

/// Symmetric Dicke state with m qubits in |1> (spin down).
DensityOperator dicke_state(int n, int m);
Vector dicke_vector(int n, int m);

/// Tensor product of (I + r . sigma)/2.
DensityOperator product_state(std::span<const BlochVector> blochs);

enum class ExampleState {
  squeezed_8c,   // exp(-(7 J_z^2 - J_x^2 - J_y^2)/T), N = 8, T = 3
  original_sq,   // exp(-(2 J_x^2 - J_z)/T),          N = 8, T = 0.3
};

DensityOperator detection_example_state(ExampleState which);

/// Site permutation p as a basis-index map: site s moves to p[s].
Eigen::VectorXi permute_sites_index_map(const std::vector<int>& perm);

}  // namespace spinsq
