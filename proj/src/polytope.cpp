#include "spinsq/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "spinsq/errors.hpp"
#include "spinsq/models.hpp"

namespace spinsq {

namespace {

constexpr double kVertexTol = 1e-9;

std::array<int, 2> others(int m) {
  switch (m) {
    case 0:
      return {1, 2};
    case 1:
      return {0, 2};
    default:
      return {0, 1};
  }
}

void check_mean_spin(int n, const Vec3& j) {
  if (n < 1) throw ArgumentError("qubit count must be positive");
  if (!j.allFinite() || j.norm() > 0.5 * n + 1e-9) throw ArgumentError("|J| exceeds N/2");
}

Vec3 unit(int axis) { return Vec3::Unit(axis); }

// Two single-qubit Bloch vectors (+-c, <J_l>/J, <J_m>/J) in the frame of
// `axis`, plus the weight of the + state.
struct VertexFactors {
  BlochVector plus;
  BlochVector minus;
  double c = 0.0;
  double p = 0.5;
};

VertexFactors vertex_factors(int n, const Vec3& j, Axis axis) {
  check_mean_spin(n, j);
  const int a = static_cast<int>(axis);
  const auto [k, l] = others(a);
  const double big_j = 0.5 * n;
  const double c2 = 1.0 - (j[k] * j[k] + j[l] * j[l]) / (big_j * big_j);
  if (c2 < -1e-12) throw ArgumentError("transverse mean spin too large: c is imaginary");
  VertexFactors f;
  f.c = std::sqrt(std::max(0.0, c2));
  if (f.c > 1e-12) {
    f.p = 0.5 * (1.0 + j[a] / (big_j * f.c));
  } else {
    f.c = 0.0;
    f.p = 0.5;
  }
  if (f.p < -1e-12 || f.p > 1.0 + 1e-12) {
    throw ArgumentError("mean spin along the vertex axis cannot be reached (p outside [0, 1])");
  }
  f.p = std::clamp(f.p, 0.0, 1.0);
  Vec3 plus;
  Vec3 minus;
  plus[a] = f.c;
  minus[a] = -f.c;
  plus[k] = minus[k] = j[k] / big_j;
  plus[l] = minus[l] = j[l] / big_j;
  f.plus = {plus[0], plus[1], plus[2]};
  f.minus = {minus[0], minus[1], minus[2]};
  return f;
}

DensityOperator split_product(int n, int plus_count, const VertexFactors& f) {
  std::vector<BlochVector> b(n, f.minus);
  std::fill(b.begin(), b.begin() + plus_count, f.plus);
  return product_state(b);
}

DensityOperator mix(double p, const DensityOperator& a, const DensityOperator& b) {
  return DensityOperator::trusted(
      ComplexOperator(p * a.matrix() + (1.0 - p) * b.matrix(), a.local_dims()));
}

// splitmix64 over a counter: sample i draws from its own stream.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t index)
      : state_(mix(seed ^ mix(index + 0x9E3779B97F4A7C15ULL))) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  std::uint64_t state_;
};

Vec3 random_direction(CounterRng& rng) {
  const double z = 2.0 * rng.uniform() - 1.0;
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {r * std::cos(phi), r * std::sin(phi), z};
}

}  // namespace

std::string to_string(PolytopeSpace space) {
  return space == PolytopeSpace::k_space ? "k-space" : "eigen-space";
}

PolytopeSpace polytope_space_from_string(const std::string& name) {
  if (name == "k-space" || name == "k") return PolytopeSpace::k_space;
  if (name == "eigen-space" || name == "eigen") return PolytopeSpace::eigen_space;
  throw ArgumentError("unknown polytope space '" + name + "'");
}

std::vector<std::string> PolytopeGeometry::active_facets(const Vec3& x, double tol) const {
  std::vector<std::string> out;
  for (const Facet& f : facets) {
    if (std::abs(f.margin(x)) <= tol) out.push_back(f.label);
  }
  return out;
}

std::vector<std::array<int, 3>> PolytopeGeometry::faces(double tol) const {
  std::vector<std::array<int, 3>> out;
  for (const Facet& f : facets) {
    std::vector<int> idx;
    for (int v = 0; v < static_cast<int>(vertices.size()); ++v) {
      if (std::abs(f.margin(vertices[v].point)) > tol) continue;
      const bool dup = std::any_of(idx.begin(), idx.end(), [&](int w) {
        return (vertices[w].point - vertices[v].point).norm() <= tol;
      });
      if (!dup) idx.push_back(v);
    }
    if (idx.size() < 3) continue;
    Vec3 centroid = Vec3::Zero();
    for (int v : idx) centroid += vertices[v].point;
    centroid /= static_cast<double>(idx.size());
    const Vec3 normal = f.normal.normalized();
    const Vec3 u = (vertices[idx[0]].point - centroid).normalized();
    const Vec3 w = normal.cross(u);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      const Vec3 da = vertices[a].point - centroid;
      const Vec3 db = vertices[b].point - centroid;
      return std::atan2(da.dot(w), da.dot(u)) < std::atan2(db.dot(w), db.dot(u));
    });
    for (std::size_t t = 1; t + 1 < idx.size(); ++t) out.push_back({idx[0], idx[t], idx[t + 1]});
  }
  return out;
}

PolytopeGeometry vertices_k_space(int n, const Vec3& j) {
  check_mean_spin(n, j);
  const double nn = n;
  const double kappa = (nn - 1) / nn;
  const Vec3 j2 = j.cwiseProduct(j);

  PolytopeGeometry g;
  g.space = PolytopeSpace::k_space;
  g.n = n;
  g.j = j;
  for (const char* prefix : {"A_", "B_"}) {
    for (int a = 0; a < 3; ++a) {
      const auto [k, l] = others(a);
      Vec3 p;
      p[k] = nn / 4 + kappa * j2[k];
      p[l] = nn / 4 + kappa * j2[l];
      p[a] = prefix[0] == 'A' ? nn * nn / 4 - kappa * (j2[k] + j2[l])
                              : j2[a] + (j2[k] + j2[l]) / nn;
      g.vertices.push_back({std::string(prefix) + "xyz"[a], p});
    }
  }

  const Vec3 ones = Vec3::Ones();
  g.facets.push_back({"8a", ones, nn * (nn + 2) / 4});
  g.facets.push_back({"8b", -ones, -(nn / 2 + j2.sum())});
  for (int m = 0; m < 3; ++m) {
    const auto [k, l] = others(m);
    g.facets.push_back({std::string("8c(") + "xyz"[m] + ")",
                        unit(k) + unit(l) - (nn - 1) * unit(m), nn / 2 - (nn - 1) * j2[m]});
  }
  for (int m = 0; m < 3; ++m) {
    const auto [k, l] = others(m);
    g.facets.push_back({std::string("8d(") + "xyz"[m] + ")",
                        unit(m) - (nn - 1) * (unit(k) + unit(l)),
                        -nn * (nn - 2) / 4 - (nn - 1) * (j2[k] + j2[l])});
  }
  return g;
}

PolytopeGeometry vertices_eigen_space(int n, const Vec3& j) {
  check_mean_spin(n, j);
  const double nn = n;
  const double jj = j.squaredNorm();

  PolytopeGeometry g;
  g.space = PolytopeSpace::eigen_space;
  g.n = n;
  g.j = j;
  for (const char* prefix : {"a_", "b_"}) {
    for (int a = 0; a < 3; ++a) {
      Vec3 p = Vec3::Constant(nn * nn / 4);
      p[a] = prefix[0] == 'a' ? nn * nn * nn / 4 - (nn - 1) * jj : jj;
      g.vertices.push_back({std::string(prefix) + "xyz"[a], p});
    }
  }

  const Vec3 ones = Vec3::Ones();
  g.facets.push_back({"28a", ones, nn * nn * (nn + 2) / 4 - (nn - 1) * jj});
  g.facets.push_back({"28b", -ones, -(nn * nn / 2 + jj)});
  for (int m = 0; m < 3; ++m) {
    g.facets.push_back({std::string("28c(") + "xyz"[m] + ")", ones / nn - unit(m),
                        nn / 2 - (nn - 1) / nn * jj});
  }
  for (int m = 0; m < 3; ++m) {
    g.facets.push_back({std::string("28d(") + "xyz"[m] + ")", unit(m) - (nn - 1) / nn * ones,
                        -(nn - 1) / nn * jj - nn * (nn - 2) / 4});
  }
  return g;
}

PolytopeGeometry polytope(PolytopeSpace space, int n, const Vec3& j) {
  return space == PolytopeSpace::k_space ? vertices_k_space(n, j) : vertices_eigen_space(n, j);
}

Membership membership(const Vec3& point, PolytopeSpace space, int n, const Vec3& j, double tol) {
  const PolytopeGeometry g = polytope(space, n, j);
  Membership out;
  for (const Facet& f : g.facets) {
    const double m = f.margin(point);
    if (m < -tol) {
      out.inside = false;
      out.violated_facets.emplace_back(f.label, m);
    }
  }
  return out;
}

DensityOperator construct_vertex_state_A(int n, const Vec3& j, Axis axis) {
  const VertexFactors f = vertex_factors(n, j, axis);
  return mix(f.p, split_product(n, n, f), split_product(n, 0, f));
}

VertexStateB construct_vertex_state_B(int n, const Vec3& j, Axis axis) {
  const VertexFactors f = vertex_factors(n, j, axis);
  const double big_m = n * f.p;
  const double rounded = std::round(big_m);
  const int a = static_cast<int>(axis);
  const double target = vertices_k_space(n, j).vertices[3 + a].point[a];

  auto finish = [&](DensityOperator state) {
    VertexStateB out{std::move(state), false, 0.0};
    out.deviation = moments(out.state).k2()[a] - target;
    out.exact = std::abs(out.deviation) <= kVertexTol;
    return out;
  };

  if (std::abs(big_m - rounded) <= kVertexTol) {
    return finish(split_product(n, static_cast<int>(rounded), f));
  }
  const int m = static_cast<int>(std::floor(big_m));
  const double eps = big_m - m;
  return finish(mix(1.0 - eps, split_product(n, m, f), split_product(n, m + 1, f)));
}

SeparableSample separable_sample_at(int n, std::uint64_t seed, std::int64_t index,
                                    const SamplingOptions& options) {
  if (n < 1) throw ArgumentError("qubit count must be positive");
  if (options.mixing_components < 1) throw ArgumentError("mixing_components must be >= 1");
  CounterRng rng(seed, static_cast<std::uint64_t>(index));
  const int components = rng.integer(1, options.mixing_components);

  std::vector<double> weights(components);
  for (double& w : weights) w = -std::log(1.0 - rng.uniform());  // flat simplex
  double total = 0.0;
  for (double w : weights) total += w;

  Vec3 j = Vec3::Zero();
  Mat3 c = Mat3::Zero();
  std::vector<BlochVector> blochs(n);
  for (int comp = 0; comp < components; ++comp) {
    if (options.law == SamplingLaw::uniform) {
      for (auto& b : blochs) {
        const Vec3 d = random_direction(rng);
        b = {d[0], d[1], d[2]};
      }
    } else {
      const Vec3 d = random_direction(rng);
      const int plus = rng.integer(0, n);
      for (int q = 0; q < n; ++q) {
        const double s = q < plus ? 1.0 : -1.0;
        blochs[q] = {s * d[0], s * d[1], s * d[2]};
      }
    }
    const CollectiveMoments cm = product_moments(blochs);
    const double w = weights[comp] / total;
    c += w * cm.c();
    if (!options.flip_symmetric) j += w * cm.j();
  }
  return {c.diagonal(), j};
}

std::vector<SeparableSample> sample_separable(int n, std::int64_t count, std::uint64_t seed,
                                              const SamplingOptions& options) {
  if (count < 1) throw ArgumentError("sample count must be >= 1");
  std::vector<SeparableSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    SeparableSample s = separable_sample_at(n, seed, i, options);
    if (options.j_filter && s.j.norm() > *options.j_filter) continue;
    out.push_back(s);
  }
  return out;
}

}  // namespace spinsq
