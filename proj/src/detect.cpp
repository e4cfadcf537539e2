#include "spinsq/detect.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "spinsq/errors.hpp"

namespace spinsq {

namespace {

// Runs fn(i) for i in [0, count) on up to `jobs` threads. fn returns false to
// ask the remaining workers to stop early.
template <class Fn>
void parallel_for(int count, int jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (int i = 0; i < count; ++i) {
      if (!fn(i)) return;
    }
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    while (!stop.load()) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        if (!fn(i)) stop = true;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        stop = true;
      }
    }
  };
  std::vector<std::thread> pool;
  const int workers = std::min(jobs, count);
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

std::vector<std::vector<int>> candidate_permutations(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> p(n);
  for (int d = 1; d < n; ++d) {
    for (int s = 0; s < n; ++s) p[s] = (s + d) % n;
    out.push_back(p);
  }
  for (int d = 0; d < n; ++d) {
    for (int s = 0; s < n; ++s) p[s] = ((d - s) % n + n) % n;
    out.push_back(p);
  }
  for (int i = 0; i + 1 < n; ++i) {
    std::iota(p.begin(), p.end(), 0);
    std::swap(p[i], p[i + 1]);
    out.push_back(p);
  }
  return out;
}

bool invariant_under(const Matrix& m, const Eigen::VectorXi& map) {
  const double tol = 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff());
  const Eigen::Index dim = m.rows();
  for (Eigen::Index j = 0; j < dim; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) {
      if (std::abs(m(map[i], map[j]) - m(i, j)) > tol) return false;
    }
  }
  return true;
}

// Masks keep site n-1 on side b, so every bipartition has one key in
// [1, 2^(n-1) - 1].
std::uint64_t canonical_key(std::uint64_t mask, int n) {
  const std::uint64_t full = (std::uint64_t{1} << n) - 1;
  return (mask >> (n - 1) & 1) ? full ^ mask : mask;
}

std::uint64_t permute_mask(std::uint64_t mask, const std::vector<int>& perm) {
  std::uint64_t out = 0;
  for (std::size_t s = 0; s < perm.size(); ++s) {
    if (mask >> s & 1) out |= std::uint64_t{1} << perm[s];
  }
  return out;
}

void require_bipartite(const DensityOperator& rho) {
  if (rho.sites() < 2) throw ArgumentError("bipartitions need at least two sites");
  if (rho.sites() > max_qubits()) throw CapacityError("state exceeds the configured qubit cap");
}

double min_pt_eigenvalue(const DensityOperator& rho, const Bipartition& part) {
  return herm_eigenvalues(partial_transpose(rho.matrix(), rho.local_dims(), part))[0];
}

double ccnr_value(const DensityOperator& rho, const Bipartition& part) {
  return trace_norm(realign(rho.matrix(), rho.local_dims(), part)) - 1.0;
}

bool is_npt(const DensityOperator& rho, const Bipartition& part) {
  return !is_positive_above(partial_transpose(rho.matrix(), rho.local_dims(), part), kDetectTol);
}

// Extremum of a per-bipartition witness; ties go to the earlier representative.
DetectorVerdict extremal_verdict(const std::string& id, const DensityOperator& rho,
                                 const DetectOptions& options, bool minimize,
                                 double (*witness)(const DensityOperator&, const Bipartition&)) {
  require_bipartite(rho);
  const auto reps = bipartition_representatives(rho, options.use_symmetry);
  std::vector<double> values(reps.size());
  parallel_for(static_cast<int>(reps.size()), options.jobs, [&](int i) {
    values[i] = witness(rho, reps[i]);
    return true;
  });
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (minimize ? values[i] < values[best] : values[i] > values[best]) best = i;
  }
  DetectorVerdict v;
  v.detector_id = id;
  v.witness_value = values[best];
  v.detected = minimize ? values[best] < -kDetectTol : values[best] > kDetectTol;
  v.bipartition = reps[best];
  return v;
}

// PPT verdict restricted to the NPT bipartitions: Cholesky screens every
// representative and only the failures get an eigensolve.
std::optional<Bipartition> most_npt_bipartition(const DensityOperator& rho,
                                                const DetectOptions& options) {
  const auto reps = bipartition_representatives(rho, options.use_symmetry);
  std::vector<double> values(reps.size(), std::numeric_limits<double>::infinity());
  parallel_for(static_cast<int>(reps.size()), options.jobs, [&](int i) {
    if (is_npt(rho, reps[i])) values[i] = min_pt_eigenvalue(rho, reps[i]);
    return true;
  });
  const auto it = std::min_element(values.begin(), values.end());
  if (it == values.end() || !std::isfinite(*it)) return std::nullopt;
  return reps[static_cast<std::size_t>(it - values.begin())];
}

const std::set<std::string>& known_criterion_ids() {
  static const std::set<std::string> ids = [] {
    std::set<std::string> out;
    const auto reports = evaluate_all(DensityOperator::maximally_mixed({2, 2, 2}));
    for (const auto& r : reports) {
      out.insert(r.criterion_id);
      const auto paren = r.criterion_id.find('(');
      if (paren != std::string::npos) out.insert(r.criterion_id.substr(0, paren));
    }
    return out;
  }();
  return ids;
}

bool needs_state(const std::string& id) { return id.rfind("AV2-", 0) == 0; }

CriterionReport criterion_at(const std::string& id, const ThermalEnsemble& ensemble, double t) {
  const auto reports = needs_state(id) ? evaluate_all(ensemble.state(t))
                                       : evaluate_all(ensemble.moments(t));
  auto found = find_criterion(reports, id);
  if (!found) throw ArgumentError("unknown detector '" + id + "'");
  return *found;
}

}  // namespace

std::vector<Bipartition> bipartition_representatives(const DensityOperator& rho,
                                                     bool use_symmetry) {
  require_bipartite(rho);
  const int n = rho.sites();
  const std::uint64_t count = std::uint64_t{1} << (n - 1);
  std::vector<std::vector<int>> symmetries;
  if (use_symmetry && rho.op().is_qubit_system()) {
    for (auto& p : candidate_permutations(n)) {
      if (invariant_under(rho.matrix(), permute_sites_index_map(p))) symmetries.push_back(p);
    }
  }
  UnionFind uf(count);
  for (const auto& p : symmetries) {
    for (std::uint64_t mask = 1; mask < count; ++mask) {
      uf.unite(mask, canonical_key(permute_mask(mask, p), n));
    }
  }
  std::vector<Bipartition> out;
  for (std::uint64_t mask = 1; mask < count; ++mask) {
    if (uf.find(mask) == mask) out.push_back(Bipartition::from_mask(mask, n));
  }
  return out;
}

DetectorVerdict ppt_any(const DensityOperator& rho, const DetectOptions& options) {
  return extremal_verdict(kPptAny, rho, options, true, &min_pt_eigenvalue);
}

DetectorVerdict ccnr_any(const DensityOperator& rho, const DetectOptions& options) {
  return extremal_verdict(kCcnrAny, rho, options, false, &ccnr_value);
}

bool npt_detected(const DensityOperator& rho, const DetectOptions& options) {
  require_bipartite(rho);
  const auto reps = bipartition_representatives(rho, options.use_symmetry);
  std::atomic<bool> found{false};
  parallel_for(static_cast<int>(reps.size()), options.jobs, [&](int i) {
    if (found.load()) return false;
    if (is_npt(rho, reps[i])) {
      found = true;
      return false;
    }
    return true;
  });
  return found.load();
}

void validate_detector_id(const std::string& id) {
  if (id == kPptAny || id == kCcnrAny) return;
  if (!known_criterion_ids().contains(id)) throw ArgumentError("unknown detector '" + id + "'");
}

bool detector_fires(const std::string& detector_id, const ThermalEnsemble& ensemble, double t,
                    const DetectOptions& options) {
  if (detector_id == kPptAny) return npt_detected(ensemble.state(t), options);
  if (detector_id == kCcnrAny) return ccnr_any(ensemble.state(t), options).detected;
  validate_detector_id(detector_id);
  return criterion_at(detector_id, ensemble, t).violated;
}

DetectorVerdict detector_verdict(const std::string& detector_id, const ThermalEnsemble& ensemble,
                                 double t, const DetectOptions& options) {
  if (detector_id == kPptAny) return ppt_any(ensemble.state(t), options);
  if (detector_id == kCcnrAny) return ccnr_any(ensemble.state(t), options);
  validate_detector_id(detector_id);
  const CriterionReport r = criterion_at(detector_id, ensemble, t);
  return {r.criterion_id, r.violated, r.margin, std::nullopt};
}

std::string to_string(TcStatus status) {
  switch (status) {
    case TcStatus::found:
      return "found";
    case TcStatus::none_found:
      return "none_found";
    case TcStatus::fires_at_t_max:
      return "fires_at_t_max";
  }
  return "unknown";
}

double default_t_max(const HamiltonianSpec& model) {
  switch (model.kind) {
    case ModelKind::heisenberg_chain:
      return 12.0;
    case ModelKind::xy_chain:
      return 7.0;
    case ModelKind::heisenberg_complete:
      return std::max(18.0, 2.0 * model.n);
    case ModelKind::xy_complete:
      return std::max(10.0, 1.2 * model.n);
    case ModelKind::lmg:
      return 4.0 + model.n;
    case ModelKind::ising_transverse:
      return 2.5 + 1.25 * std::abs(model.param("B", 1.0));
    case ModelKind::nanotube:
      return 730.0;
    case ModelKind::custom:
      return 10.0;
  }
  return 10.0;
}

std::vector<double> scan_grid(double t_max) {
  std::vector<double> grid(kScanPoints);
  for (int i = 0; i < kScanPoints; ++i) {
    grid[i] = t_max * std::pow(10.0, -3.0 + 3.0 * i / (kScanPoints - 1));
  }
  grid.back() = t_max;
  return grid;
}

CriticalTemperature critical_temperature(const ThermalEnsemble& ensemble,
                                         const HamiltonianSpec& model,
                                         const std::string& detector_id, double t_max, double tol,
                                         const DetectOptions& options) {
  validate_detector_id(detector_id);
  if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ArgumentError("t_max must be positive");
  if (!(tol > 0.0)) throw ArgumentError("tolerance must be positive");

  CriticalTemperature out;
  out.model = model;
  out.detector_id = detector_id;

  const auto grid = scan_grid(t_max);
  // Temperatures run concurrently; each detector call stays serial.
  DetectOptions inner = options;
  inner.jobs = 1;
  std::vector<char> fires(grid.size(), 0);
  parallel_for(static_cast<int>(grid.size()), options.jobs, [&](int i) {
    fires[i] = detector_fires(detector_id, ensemble, grid[i], inner);
    return true;
  });

  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    if (fires[i] && !fires[i + 1]) out.transitions.emplace_back(grid[i], grid[i + 1]);
  }
  const auto last_fire = std::find(fires.rbegin(), fires.rend(), 1);
  if (last_fire == fires.rend()) {
    out.status = TcStatus::none_found;
    return out;
  }
  const std::size_t k = static_cast<std::size_t>(fires.rend() - last_fire) - 1;
  if (k + 1 == grid.size()) {
    out.status = TcStatus::fires_at_t_max;
    out.t_c = out.bracket_lo = out.bracket_hi = t_max;
    return out;
  }
  out.status = TcStatus::found;
  out.scan_validated = out.transitions.size() == 1 &&
                       std::all_of(fires.begin(), fires.begin() + k + 1, [](char f) { return f; });

  double lo = grid[k];
  double hi = grid[k + 1];
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (detector_fires(detector_id, ensemble, mid, options) ? lo : hi) = mid;
  }
  out.bracket_lo = lo;
  out.bracket_hi = hi;
  out.t_c = 0.5 * (lo + hi);

  if (detector_id == kPptAny) {
    out.bipartition = most_npt_bipartition(ensemble.state(lo), options);
  } else if (detector_id == kCcnrAny) {
    out.bipartition = ccnr_any(ensemble.state(lo), options).bipartition;
  }
  return out;
}

CriticalTemperature critical_temperature(const HamiltonianSpec& model,
                                         const std::string& detector_id,
                                         std::optional<double> t_max, double tol,
                                         const DetectOptions& options) {
  validate_detector_id(detector_id);
  const ThermalEnsemble ensemble(build_hamiltonian(model));
  return critical_temperature(ensemble, model, detector_id, t_max.value_or(default_t_max(model)),
                              tol, options);
}

std::vector<TcCell> table2_cells(int n_min, int n_max) {
  if (n_min < 2 || n_max < n_min) throw ArgumentError("invalid size range");
  struct Row {
    ModelKind kind;
    std::map<std::string, double> params;
    const char* ssi;
  };
  const std::vector<Row> rows = {
      {ModelKind::heisenberg_chain, {}, "OSSI-8b"},
      {ModelKind::xy_chain, {}, "OSSI-8b"},
      {ModelKind::heisenberg_complete, {}, "OSSI-8b"},
      {ModelKind::xy_complete, {}, "OSSI-8b"},
      {ModelKind::ising_transverse, {{"B", 0.5}}, "OSSI-8c"},
      {ModelKind::ising_transverse, {{"B", 1.0}}, "OSSI-8c"},
      {ModelKind::ising_transverse, {{"B", 2.0}}, "OSSI-8c"},
  };
  std::vector<TcCell> cells;
  for (const Row& row : rows) {
    for (const char* detector : {row.ssi, kPptAny}) {
      for (int n = n_min; n <= n_max; ++n) {
        HamiltonianSpec spec;
        spec.kind = row.kind;
        spec.n = n;
        spec.params = row.params;
        cells.push_back({spec, detector});
      }
    }
  }
  return cells;
}

std::vector<TcCellResult> solve_cells(const std::vector<TcCell>& cells, double tol,
                                      const DetectOptions& options) {
  std::vector<TcCellResult> out(cells.size());
  DetectOptions inner = options;
  inner.jobs = 1;
  parallel_for(static_cast<int>(cells.size()), options.jobs, [&](int i) {
    out[i].tc.model = cells[i].model;
    out[i].tc.detector_id = cells[i].detector_id;
    try {
      out[i].tc = critical_temperature(cells[i].model, cells[i].detector_id, std::nullopt, tol, inner);
    } catch (const std::exception& e) {
      out[i].error = e.what();
    }
    return true;
  });
  return out;
}

std::vector<BoundWindowPoint> bound_window(const HamiltonianSpec& model,
                                           const std::vector<double>& t_grid,
                                           const DetectOptions& options) {
  const ThermalEnsemble ensemble(build_hamiltonian(model));
  std::vector<BoundWindowPoint> out(t_grid.size());
  DetectOptions inner = options;
  inner.jobs = 1;
  parallel_for(static_cast<int>(t_grid.size()), options.jobs, [&](int i) {
    const double t = t_grid[i];
    out[i].t = t;
    out[i].fully_ppt = !npt_detected(ensemble.state(t), inner);
    out[i].ssi_detected = any_violated(evaluate_ossi(ensemble.moments(t)));
    return true;
  });
  return out;
}

NanotubeReport nanotube_report(double tol, const DetectOptions& options) {
  HamiltonianSpec model;
  model.kind = ModelKind::nanotube;
  model.n = 9;
  const ThermalEnsemble ensemble(build_hamiltonian(model));
  const double t_max = default_t_max(model);

  NanotubeReport r;
  r.ossi_8b = critical_temperature(ensemble, model, "OSSI-8b", t_max, tol, options);
  r.ossi_8d = critical_temperature(ensemble, model, "OSSI-8d", t_max, tol, options);
  r.ppt = critical_temperature(ensemble, model, kPptAny, t_max, tol, options);

  r.ossi_8a_silent = true;
  r.ossi_8c_silent = true;
  for (double t : scan_grid(t_max)) {
    try {
      if (criterion_at("OSSI-8a", ensemble, t).violated) r.ossi_8a_silent = false;
    } catch (const InconsistentMomentsError&) {
      r.ossi_8a_silent = false;
    }
    if (criterion_at("OSSI-8c", ensemble, t).violated) r.ossi_8c_silent = false;
  }
  r.bound_window = {r.ppt.t_c, r.ossi_8b.t_c};
  return r;
}

}  // namespace spinsq
