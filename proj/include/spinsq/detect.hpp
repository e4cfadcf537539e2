#pragma once

// State-level detectors and the critical-temperature solver.
//
// Detector ids: "PPT-any", "CCNR-any", or any criterion id or family prefix
// understood by find_criterion (e.g. "OSSI-8b", "OSSI-8c").

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spinsq/criteria.hpp"
#include "spinsq/models.hpp"
#include "spinsq/operator.hpp"

namespace spinsq {

inline constexpr double kDetectTol = 1e-9;
inline constexpr const char* kPptAny = "PPT-any";
inline constexpr const char* kCcnrAny = "CCNR-any";

struct DetectOptions {
  /// Evaluate one bipartition per orbit of the site permutations that leave
  /// the state invariant. The verdict and witness do not depend on it.
  bool use_symmetry = true;
  /// Worker threads; 1 runs everything on the calling thread.
  int jobs = 1;
};

struct DetectorVerdict {
  std::string detector_id;
  bool detected = false;
  /// PPT: min over bipartitions of lambda_min(PT). CCNR: max over
  /// bipartitions of |R|_1 - 1. Criteria: the margin.
  double witness_value = 0.0;
  /// The bipartition attaining the witness (PPT, CCNR only).
  std::optional<Bipartition> bipartition;
};

DetectorVerdict ppt_any(const DensityOperator& rho, const DetectOptions& options = {});
DetectorVerdict ccnr_any(const DensityOperator& rho, const DetectOptions& options = {});

/// Same decision as ppt_any(rho).detected, stopping at the first NPT
/// bipartition and deciding each one by Cholesky instead of an eigensolve.
bool npt_detected(const DensityOperator& rho, const DetectOptions& options = {});

/// Canonical bipartitions, one per orbit of the verified site symmetries of
/// rho (all of them when use_symmetry is false).
std::vector<Bipartition> bipartition_representatives(const DensityOperator& rho,
                                                     bool use_symmetry = true);

/// Throws ArgumentError for an unknown detector id.
void validate_detector_id(const std::string& id);

/// Whether the detector certifies entanglement of the Gibbs state at t.
bool detector_fires(const std::string& detector_id, const ThermalEnsemble& ensemble, double t,
                    const DetectOptions& options = {});

/// Full verdict (witness and bipartition) of the Gibbs state at t.
DetectorVerdict detector_verdict(const std::string& detector_id, const ThermalEnsemble& ensemble,
                                 double t, const DetectOptions& options = {});

enum class TcStatus {
  found,
  none_found,      // no scan point fires
  fires_at_t_max,  // the detector still fires at t_max
};

std::string to_string(TcStatus status);

struct CriticalTemperature {
  HamiltonianSpec model;
  std::string detector_id;
  TcStatus status = TcStatus::none_found;
  double t_c = 0.0;  // bracket midpoint
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  /// True when the scan shows exactly one detected -> undetected transition.
  bool scan_validated = false;
  /// Every scan-level detected -> undetected bracket, in ascending t.
  std::vector<std::pair<double, double>> transitions;
  /// PPT and CCNR: the bipartition whose witness is extremal at bracket_lo.
  std::optional<Bipartition> bipartition;
};

inline constexpr int kScanPoints = 64;
inline constexpr double kDefaultTcTol = 1e-3;

/// 2x the largest critical temperature expected for the model family.
double default_t_max(const HamiltonianSpec& model);

/// Scans kScanPoints log-spaced temperatures in [t_max/1000, t_max], then
/// bisects [highest firing point, next point] down to width tol.
CriticalTemperature critical_temperature(const HamiltonianSpec& model,
                                         const std::string& detector_id,
                                         std::optional<double> t_max = std::nullopt,
                                         double tol = kDefaultTcTol,
                                         const DetectOptions& options = {});

CriticalTemperature critical_temperature(const ThermalEnsemble& ensemble,
                                         const HamiltonianSpec& model,
                                         const std::string& detector_id, double t_max,
                                         double tol = kDefaultTcTol,
                                         const DetectOptions& options = {});

/// The scan grid used by critical_temperature.
std::vector<double> scan_grid(double t_max);

struct TcCell {
  HamiltonianSpec model;
  std::string detector_id;
};

struct TcCellResult {
  CriticalTemperature tc;
  std::optional<std::string> error;  // set when the cell threw
};

/// The critical-temperature table grid, row by row: Heisenberg chain, XY
/// chain, Heisenberg and XY on the complete graph (OSSI-8b), transverse Ising
/// chain with B = 0.5, 1, 2 (OSSI-8c); each row for n in [n_min, n_max], first
/// with the spin squeezing detector and then with PPT-any.
std::vector<TcCell> table2_cells(int n_min = 3, int n_max = 9);

/// Solves every cell with default t_max, cells spread over options.jobs
/// threads. Results keep the order of `cells`; a failing cell does not stop
/// the others.
std::vector<TcCellResult> solve_cells(const std::vector<TcCell>& cells, double tol = kDefaultTcTol,
                                      const DetectOptions& options = {});

struct BoundWindowPoint {
  double t = 0.0;
  bool fully_ppt = false;
  bool ssi_detected = false;  // some OSSI inequality violated

  bool bound_entangled() const { return fully_ppt && ssi_detected; }
};

std::vector<BoundWindowPoint> bound_window(const HamiltonianSpec& model,
                                           const std::vector<double>& t_grid,
                                           const DetectOptions& options = {});

struct NanotubeReport {
  CriticalTemperature ossi_8b;
  CriticalTemperature ossi_8d;
  CriticalTemperature ppt;
  bool ossi_8a_silent = false;  // over the whole scan grid
  bool ossi_8c_silent = false;
  /// Temperatures where the state is fully PPT yet violates OSSI-8b.
  std::pair<double, double> bound_window;
};

NanotubeReport nanotube_report(double tol = kDefaultTcTol, const DetectOptions& options = {});

}  // namespace spinsq
