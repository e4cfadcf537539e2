#pragma once

// Geometry of the separable region for fixed mean spin J: an eight-facet
// polytope either in K = (<J_x^2>, <J_y^2>, <J_z^2>) space or in the space of
// the three eigenvalues of chi.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinsq/collective.hpp"

namespace spinsq {

enum class PolytopeSpace { k_space, eigen_space };

std::string to_string(PolytopeSpace space);
PolytopeSpace polytope_space_from_string(const std::string& name);

/// Half-space normal . x <= offset. margin(x) = offset - normal . x.
struct Facet {
  std::string label;  // "8a", "8b", "8c(x)" ... (eigen space: "28a" ...)
  Vec3 normal = Vec3::Zero();
  double offset = 0.0;

  double margin(const Vec3& x) const { return offset - normal.dot(x); }
};

struct Vertex {
  std::string label;  // "A_x" ... "B_z" or "a_x" ... "b_z"
  Vec3 point = Vec3::Zero();
};

struct PolytopeGeometry {
  PolytopeSpace space = PolytopeSpace::k_space;
  int n = 0;
  Vec3 j = Vec3::Zero();
  std::vector<Vertex> vertices;  // A_x, A_y, A_z, B_x, B_y, B_z
  std::vector<Facet> facets;     // a, b, c(x), c(y), c(z), d(x), d(y), d(z)

  /// Labels of the facets satisfied with equality (within tol) at `x`.
  std::vector<std::string> active_facets(const Vec3& x, double tol = 1e-9) const;
  /// Triangular faces as vertex-index triples, one per facet, wound
  /// counter-clockwise seen from outside.
  std::vector<std::array<int, 3>> faces(double tol = 1e-9) const;
};

PolytopeGeometry vertices_k_space(int n, const Vec3& j);
PolytopeGeometry vertices_eigen_space(int n, const Vec3& j);
PolytopeGeometry polytope(PolytopeSpace space, int n, const Vec3& j);

struct Membership {
  bool inside = true;
  std::vector<std::pair<std::string, double>> violated_facets;  // label, margin
};

Membership membership(const Vec3& point, PolytopeSpace space, int n, const Vec3& j,
                      double tol = 1e-9);

/// p |psi+><psi+|^N + (1-p) |psi-><psi-|^N with Bloch vectors
/// (+-c, <J_l>/J, <J_m>/J) in the (axis, l, m) frame; its K is A_axis.
DensityOperator construct_vertex_state_A(int n, const Vec3& j, Axis axis);

struct VertexStateB {
  DensityOperator state;
  bool exact = false;
  /// <J_axis^2> of the state minus the B_axis coordinate.
  double deviation = 0.0;
};

/// |psi+>^M |psi->^(N-M) when M = N p is an integer, otherwise the two-term
/// mixture bracketing M, whose <J_axis^2> is off by c^2 (eps - eps^2) <= 1/4.
VertexStateB construct_vertex_state_B(int n, const Vec3& j, Axis axis);

enum class SamplingLaw {
  uniform,  // every qubit an independent uniformly random pure state
  aligned,  // random axis u; M ~ U{0..N} qubits along +u, the rest along -u
};

struct SamplingOptions {
  int mixing_components = 4;     // components per mixture ~ U{1..mixing_components}
  SamplingLaw law = SamplingLaw::uniform;
  bool flip_symmetric = false;   // mix every component with its global spin flip
  std::optional<double> j_filter;  // keep samples with |J| <= j_filter
};

struct SeparableSample {
  Vec3 k2 = Vec3::Zero();
  Vec3 j = Vec3::Zero();
};

/// K-space points of random separable states. Sample i depends only on
/// (seed, i), so any index range can be regenerated independently.
std::vector<SeparableSample> sample_separable(int n, std::int64_t count, std::uint64_t seed,
                                              const SamplingOptions& options = {});

/// Sample `index` of the stream for `seed` (before any j filter).
SeparableSample separable_sample_at(int n, std::uint64_t seed, std::int64_t index,
                                    const SamplingOptions& options = {});

}  // namespace spinsq
