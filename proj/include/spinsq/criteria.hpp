#pragma once

// Entanglement inequalities on collective spin moments.
//
// Every criterion is reported as a signed margin: positive on the satisfied
// side, negative when violated. A report is `violated` when its margin is
// below -tol (tol defaults to 1e-9). Violation of any criterion except the
// all-states bounds (OSSI-8a, INV-26a, EIG-28a, AV2-45a) certifies
// entanglement; the KCL family certifies two-qubit entanglement.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spinsq/collective.hpp"

namespace spinsq {

inline constexpr double kDefaultTol = 1e-9;

enum class CriterionStatus { applicable, not_applicable };

struct CriterionReport {
  std::string criterion_id;
  double margin = 0.0;
  bool violated = false;
  CriterionStatus status = CriterionStatus::applicable;
  /// Rotation or axis permutation the margin was evaluated in. Rows are the
  /// measurement axes in (k, l, m) order.
  std::optional<Mat3> axes;
};

/// OSSI family: 8a, 8b, then 8c and 8d for m = x, y, z.
/// Throws InconsistentMomentsError if 8a is violated.
std::vector<CriterionReport> evaluate_ossi(const CollectiveMoments& m, double tol = kDefaultTol);

/// Frame-independent form via Tr C, Tr gamma and the extreme eigenvalues of chi.
std::vector<CriterionReport> evaluate_invariant_ossi(const CollectiveMoments& m,
                                                     double tol = kDefaultTol);

/// Same inequalities written with the eigenvalues of chi and |J|^2. Margins of
/// a and b are N times those of the invariant form; c and d coincide.
std::vector<CriterionReport> evaluate_eigenspace_ossi(const CollectiveMoments& m,
                                                      double tol = kDefaultTol);

/// Original squeezing criterion Var(J_m)/(<J_k>^2+<J_l>^2) >= 1/N, over the
/// three choices of squeezed axis m (most violated one reported; not
/// applicable when the mean spin vanishes), and its frame-free form
/// lambda_min(chi) >= |J|^2.
std::pair<CriterionReport, CriterionReport> original_squeezing(const CollectiveMoments& m,
                                                               double tol = kDefaultTol);

/// Two-qubit entanglement criterion: three axis choices, the rotation
/// invariant lambda_max form, and the symmetric-state forms (the latter two
/// are not applicable unless Tr C = N(N+2)/4).
std::vector<CriterionReport> kcl(const CollectiveMoments& m, double tol = kDefaultTol);

/// <J_k^2> + <J_l^2> <= N(N+1)/4 (most violated pair) and its invariant form.
std::pair<CriterionReport, CriterionReport> dicke_criterion(const CollectiveMoments& m,
                                                            double tol = kDefaultTol);

/// OSSI family rewritten on the average two-qubit state of an
/// n-qubit parent. Margins of a, b and c are N(N-1)/4 times smaller than
/// evaluate_ossi's; those of d are N(N-1)^2/4 times smaller.
std::vector<CriterionReport> av2_forms(const DensityOperator& rho_av2, int n,
                                       double tol = kDefaultTol);

struct UnentangledBound {
  /// floor(2 * sum Var), clamped to [0, N]. Every decomposition has a
  /// component in which at least N - m_max spins are entangled.
  int m_max = 0;
  /// m_max == 0: not a mixture of states with an unentangled spin.
  bool no_unentangled_spin = false;
};

UnentangledBound unentangled_bound(const CollectiveMoments& m);

/// Orthogonal O whose rows are eigenvectors of chi in ascending eigenvalue
/// order, so O chi O^T is diagonal. Degenerate eigenspaces are spanned by
/// Gram-Schmidt on the coordinate axes.
Mat3 optimal_directions(const CollectiveMoments& m);

/// Every moment-based report: OSSI, INV, EIG, ORIG, KCL, DICKE.
std::vector<CriterionReport> evaluate_all(const CollectiveMoments& m, double tol = kDefaultTol);

/// evaluate_all on the state's moments plus the AV2 forms.
std::vector<CriterionReport> evaluate_all(const DensityOperator& rho, double tol = kDefaultTol);

/// First report whose id equals `id` or starts with `id` followed by '('.
/// For a family prefix such as "OSSI-8c" the most violated member is returned.
std::optional<CriterionReport> find_criterion(const std::vector<CriterionReport>& reports,
                                              const std::string& id);

/// True if any report certifies entanglement.
bool any_violated(const std::vector<CriterionReport>& reports);

}  // namespace spinsq
