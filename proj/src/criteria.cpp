#include "spinsq/criteria.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "spinsq/errors.hpp"

namespace spinsq {

namespace {

// (k, l) complement of m, in ascending order.
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

std::string triple_label(int m) {
  const auto [k, l] = others(m);
  std::string s = "(";
  s += "xyz"[k];
  s += ',';
  s += "xyz"[l];
  s += ',';
  s += "xyz"[m];
  s += ')';
  return s;
}

Mat3 permutation_rows(int k, int l, int m) {
  Mat3 p = Mat3::Zero();
  p(0, k) = p(1, l) = p(2, m) = 1.0;
  return p;
}

Mat3 triple_axes(int m) {
  const auto [k, l] = others(m);
  return permutation_rows(k, l, m);
}

CriterionReport make(std::string id, double margin, double tol) {
  CriterionReport r;
  r.criterion_id = std::move(id);
  r.margin = margin;
  r.violated = margin < -tol;
  return r;
}

CriterionReport not_applicable(std::string id) {
  CriterionReport r;
  r.criterion_id = std::move(id);
  r.margin = std::numeric_limits<double>::quiet_NaN();
  r.status = CriterionStatus::not_applicable;
  return r;
}

// The all-states bound is reported but never flagged; its violation means the
// input cannot come from a quantum state.
CriterionReport all_states_bound(std::string id, double margin, double tol) {
  if (margin < -tol) {
    throw InconsistentMomentsError(id + " violated: moments are not those of any quantum state");
  }
  return make(std::move(id), margin, tol);
}

struct ChiSpectrum {
  double min = 0.0;
  double max = 0.0;
};

ChiSpectrum chi_spectrum(const CollectiveMoments& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(m.chi(), Eigen::EigenvaluesOnly);
  return {es.eigenvalues()[0], es.eigenvalues()[2]};
}

bool symmetric_subspace(const CollectiveMoments& m) {
  const double n = m.n();
  const double full = 0.25 * n * (n + 2);
  return std::abs(m.c().trace() - full) <= 1e-9 * std::max(1.0, n * n);
}

}  // namespace

std::vector<CriterionReport> evaluate_ossi(const CollectiveMoments& m, double tol) {
  const double n = m.n();
  const Vec3 k2 = m.k2();
  const Vec3 var = m.variances();
  std::vector<CriterionReport> out;
  out.reserve(8);
  out.push_back(all_states_bound("OSSI-8a", 0.25 * n * (n + 2) - k2.sum(), tol));
  out.push_back(make("OSSI-8b", var.sum() - 0.5 * n, tol));
  for (int mi = 0; mi < 3; ++mi) {
    const auto [k, l] = others(mi);
    auto r = make("OSSI-8c" + triple_label(mi),
                  (n - 1) * var[mi] - k2[k] - k2[l] + 0.5 * n, tol);
    r.axes = triple_axes(mi);
    out.push_back(std::move(r));
  }
  for (int mi = 0; mi < 3; ++mi) {
    const auto [k, l] = others(mi);
    auto r = make("OSSI-8d" + triple_label(mi),
                  (n - 1) * (var[k] + var[l]) - k2[mi] - 0.25 * n * (n - 2), tol);
    r.axes = triple_axes(mi);
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<CriterionReport> evaluate_invariant_ossi(const CollectiveMoments& m, double tol) {
  const double n = m.n();
  const double tr_c = m.c().trace();
  const double tr_g = m.gamma().trace();
  const ChiSpectrum ev = chi_spectrum(m);
  const Mat3 o = optimal_directions(m);
  std::vector<CriterionReport> out;
  out.push_back(all_states_bound("INV-26a", 0.25 * n * (n + 2) - tr_c, tol));
  out.push_back(make("INV-26b", tr_g - 0.5 * n, tol));
  out.push_back(make("INV-26c", ev.min - tr_c + 0.5 * n, tol));
  out.push_back(make("INV-26d", (n - 1) * tr_g - 0.25 * n * (n - 2) - ev.max, tol));
  for (auto& r : out) r.axes = o;
  return out;
}

std::vector<CriterionReport> evaluate_eigenspace_ossi(const CollectiveMoments& m, double tol) {
  const double n = m.n();
  const double tr_x = m.chi().trace();
  const double j2 = m.j().squaredNorm();
  const ChiSpectrum ev = chi_spectrum(m);
  const Mat3 o = optimal_directions(m);
  std::vector<CriterionReport> out;
  out.push_back(
      all_states_bound("EIG-28a", 0.25 * n * n * (n + 2) - (n - 1) * j2 - tr_x, tol));
  out.push_back(make("EIG-28b", tr_x - 0.5 * n * n - j2, tol));
  out.push_back(make("EIG-28c", ev.min - tr_x / n - (n - 1) / n * j2 + 0.5 * n, tol));
  out.push_back(make("EIG-28d",
                     (n - 1) / n * tr_x - (n - 1) / n * j2 - 0.25 * n * (n - 2) - ev.max, tol));
  for (auto& r : out) r.axes = o;
  return out;
}

std::pair<CriterionReport, CriterionReport> original_squeezing(const CollectiveMoments& m,
                                                               double tol) {
  const double n = m.n();
  const Vec3& j = m.j();
  const Vec3 var = m.variances();

  CriterionReport eq3 = not_applicable("ORIG-3");
  for (int mi = 0; mi < 3; ++mi) {
    const auto [k, l] = others(mi);
    const double transverse = j[k] * j[k] + j[l] * j[l];
    if (transverse <= 1e-12) continue;
    const double margin = var[mi] / transverse - 1.0 / n;
    if (eq3.status == CriterionStatus::not_applicable || margin < eq3.margin) {
      eq3 = make("ORIG-3", margin, tol);
      eq3.axes = triple_axes(mi);
    }
  }

  auto eq31 = make("ORIG-31", chi_spectrum(m).min - j.squaredNorm(), tol);
  eq31.axes = optimal_directions(m);
  return {eq3, eq31};
}

std::vector<CriterionReport> kcl(const CollectiveMoments& m, double tol) {
  const double n = m.n();
  const Vec3 k2 = m.k2();
  const Vec3& j = m.j();
  const double tr_c = m.c().trace();
  std::vector<CriterionReport> out;

  for (int mi = 2; mi >= 0; --mi) {
    const auto [k, l] = others(mi);
    const double lhs = k2[k] + k2[l] - 0.5 * n;
    const double rhs = k2[mi] + 0.25 * n * (n - 2);
    auto r = make("KCL-34" + triple_label(mi),
                  rhs * rhs - lhs * lhs - (n - 1) * (n - 1) * j[mi] * j[mi], tol);
    r.axes = triple_axes(mi);
    out.push_back(std::move(r));
  }

  {
    const Mat3 mat = (0.5 * n * n + 1.0 - 2.0 * tr_c) * m.c() - (n - 1) * (n - 1) * m.gamma();
    Eigen::SelfAdjointEigenSolver<Mat3> es(mat, Eigen::EigenvaluesOnly);
    const double a = 0.25 * n * (n - 2);
    const double s = tr_c - 0.5 * n;
    out.push_back(make("KCL-37", a * a - s * s - es.eigenvalues()[2], tol));
  }

  if (symmetric_subspace(m)) {
    const Vec3 var = m.variances();
    double best = std::numeric_limits<double>::infinity();
    int best_axis = 0;
    for (int a = 0; a < 3; ++a) {
      const double margin = 4.0 * var[a] / n - 1.0 + 4.0 * j[a] * j[a] / (n * n);
      if (margin < best) {
        best = margin;
        best_axis = a;
      }
    }
    auto r38 = make("KCLSYM-38", best, tol);
    r38.axes = triple_axes(best_axis);
    out.push_back(std::move(r38));
    auto r40 = make("KCLSYM-40", chi_spectrum(m).min - 0.25 * n * n, tol);
    r40.axes = optimal_directions(m);
    out.push_back(std::move(r40));
  } else {
    out.push_back(not_applicable("KCLSYM-38"));
    out.push_back(not_applicable("KCLSYM-40"));
  }
  return out;
}

std::pair<CriterionReport, CriterionReport> dicke_criterion(const CollectiveMoments& m,
                                                            double tol) {
  const double n = m.n();
  const Vec3 k2 = m.k2();
  const double bound = 0.25 * n * (n + 1);
  int worst = 2;
  for (int mi = 0; mi < 3; ++mi) {
    const auto [k, l] = others(mi);
    const auto [wk, wl] = others(worst);
    if (k2[k] + k2[l] > k2[wk] + k2[wl]) worst = mi;
  }
  const auto [k, l] = others(worst);
  auto r41 = make("DICKE-41", bound - k2[k] - k2[l], tol);
  r41.axes = triple_axes(worst);

  Eigen::SelfAdjointEigenSolver<Mat3> es(m.c(), Eigen::EigenvaluesOnly);
  auto r42 = make("DICKE-42", es.eigenvalues()[0] - m.c().trace() + bound, tol);
  return {r41, r42};
}

std::vector<CriterionReport> av2_forms(const DensityOperator& rho_av2, int n, double tol) {
  if (rho_av2.dim() != 4 || !rho_av2.op().is_qubit_system()) {
    throw ArgumentError("average two-qubit state must be a two-qubit operator");
  }
  if (n < 2) throw ArgumentError("parent system needs at least two qubits");
  const Matrix id = Matrix::Identity(2, 2);
  Vec3 s;
  Vec3 corr;
  for (Axis a : kAxes) {
    const int i = static_cast<int>(a);
    const Matrix p = pauli(a);
    s[i] = (rho_av2.matrix() * kron(ComplexOperator(p, {2}), ComplexOperator(id, {2})).matrix())
               .trace()
               .real();
    corr[i] = (rho_av2.matrix() * kron(ComplexOperator(p, {2}), ComplexOperator(p, {2})).matrix())
                  .trace()
                  .real();
  }
  const double nn = n;
  const double sigma = corr.sum();
  const double ratio = nn / (nn - 1);
  std::vector<CriterionReport> out;
  out.push_back(make("AV2-45a", 1.0 - sigma, tol));
  out.back().violated = false;  // holds for every quantum state
  out.push_back(make("AV2-45b", sigma + 1.0 / (nn - 1) - ratio * s.squaredNorm(), tol));
  for (int mi = 0; mi < 3; ++mi) {
    auto r = make("AV2-45c" + triple_label(mi),
                  1.0 + nn * (corr[mi] - s[mi] * s[mi]) - sigma, tol);
    r.axes = triple_axes(mi);
    out.push_back(std::move(r));
  }
  for (int mi = 0; mi < 3; ++mi) {
    const auto [k, l] = others(mi);
    auto r = make("AV2-45d" + triple_label(mi),
                  sigma + 1.0 / (nn - 1) - ratio * (s[k] * s[k] + s[l] * s[l]) - ratio * corr[mi],
                  tol);
    r.axes = triple_axes(mi);
    out.push_back(std::move(r));
  }
  return out;
}

UnentangledBound unentangled_bound(const CollectiveMoments& m) {
  const double twice = 2.0 * m.variances().sum();
  int bound = static_cast<int>(std::floor(twice + 1e-9));
  bound = std::clamp(bound, 0, m.n());
  return {bound, bound == 0};
}

Mat3 optimal_directions(const CollectiveMoments& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(m.chi());
  const Vec3 vals = es.eigenvalues();
  const Mat3 vecs = es.eigenvectors();
  const double tol = 1e-9 * std::max(1.0, vals.cwiseAbs().maxCoeff());

  Mat3 rows = Mat3::Zero();
  int start = 0;
  while (start < 3) {
    int end = start + 1;
    while (end < 3 && vals[end] - vals[end - 1] <= tol) ++end;
    const int size = end - start;
    if (size == 1) {
      Vec3 v = vecs.col(start);
      Eigen::Index arg = 0;
      v.cwiseAbs().maxCoeff(&arg);
      if (v[arg] < 0) v = -v;
      rows.row(start) = v.transpose();
    } else {
      // Project coordinate axes onto the eigenspace, then orthonormalize.
      const Eigen::MatrixXd basis = vecs.middleCols(start, size);
      const Mat3 proj = basis * basis.transpose();
      int filled = 0;
      for (int axis = 0; axis < 3 && filled < size; ++axis) {
        Vec3 w = proj.col(axis);
        for (int p = 0; p < filled; ++p) {
          const Vec3 prev = rows.row(start + p).transpose();
          w -= prev.dot(w) * prev;
        }
        if (w.norm() > 1e-6) {
          rows.row(start + filled) = w.normalized().transpose();
          ++filled;
        }
      }
    }
    start = end;
  }
  return rows;
}

std::vector<CriterionReport> evaluate_all(const CollectiveMoments& m, double tol) {
  std::vector<CriterionReport> out = evaluate_ossi(m, tol);
  for (auto& r : evaluate_invariant_ossi(m, tol)) out.push_back(std::move(r));
  for (auto& r : evaluate_eigenspace_ossi(m, tol)) out.push_back(std::move(r));
  auto [eq3, eq31] = original_squeezing(m, tol);
  out.push_back(std::move(eq3));
  out.push_back(std::move(eq31));
  for (auto& r : kcl(m, tol)) out.push_back(std::move(r));
  auto [d41, d42] = dicke_criterion(m, tol);
  out.push_back(std::move(d41));
  out.push_back(std::move(d42));
  return out;
}

std::vector<CriterionReport> evaluate_all(const DensityOperator& rho, double tol) {
  std::vector<CriterionReport> out = evaluate_all(moments(rho), tol);
  if (rho.sites() >= 2) {
    for (auto& r : av2_forms(reduced_av2(rho), rho.sites(), tol)) out.push_back(std::move(r));
  }
  return out;
}

std::optional<CriterionReport> find_criterion(const std::vector<CriterionReport>& reports,
                                              const std::string& id) {
  std::optional<CriterionReport> best;
  for (const auto& r : reports) {
    const bool exact = r.criterion_id == id;
    const bool member = r.criterion_id.size() > id.size() &&
                        r.criterion_id.compare(0, id.size(), id) == 0 &&
                        r.criterion_id[id.size()] == '(';
    if (!exact && !member) continue;
    if (exact) return r;
    if (r.status == CriterionStatus::not_applicable) {
      if (!best) best = r;
      continue;
    }
    if (!best || best->status == CriterionStatus::not_applicable || r.margin < best->margin) {
      best = r;
    }
  }
  return best;
}

bool any_violated(const std::vector<CriterionReport>& reports) {
  return std::any_of(reports.begin(), reports.end(),
                     [](const CriterionReport& r) { return r.violated; });
}

}  // namespace spinsq
