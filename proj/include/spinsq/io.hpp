#pragma once

// File formats shared by the CLI and the tests.
//
//   qstate-json   {"n_sites", "local_dims", "re": [[..]], "im": [[..]]}, row-major
//   moments-json  {"n", "j": [3], "c": [[3x3]]}; k2, gamma and chi are written
//                 for reading convenience and recomputed on load
//   report-json   [{"criterion_id", "margin", "violated", "status", "axes"?}]
//   polytope-json {"space", "n", "j", "vertices": {label: [3]},
//                  "facets": {label: {"normal": [3], "offset"}}}
//   model-json    {"kind", "n", "params": {}, "terms"?: [{"coeff", "ops"}]}
//
// Qubit basis: |0> is sigma_z = +1, |1> is sigma_z = -1, site 0 is the most
// significant tensor index.

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "spinsq/criteria.hpp"
#include "spinsq/detect.hpp"
#include "spinsq/models.hpp"
#include "spinsq/polytope.hpp"

namespace spinsq {

using Json = nlohmann::json;

/// %.17g, so every double survives a text round trip.
std::string format_double(double x);

Json qstate_json(const DensityOperator& rho);
/// Validates the operator as a density matrix.
DensityOperator read_qstate(const Json& j);

Json moments_json(const CollectiveMoments& m);
CollectiveMoments read_moments(const Json& j);

Json report_json(const std::vector<CriterionReport>& reports);

Json polytope_json(const PolytopeGeometry& g);
/// Wavefront OBJ: the six vertices and the triangulated facets.
std::string polytope_obj(const PolytopeGeometry& g);

Json model_json(const HamiltonianSpec& spec);
HamiltonianSpec read_model(const Json& j);

Json critical_temperature_json(const CriticalTemperature& tc);
/// "model,n,detector,t_c,bracket_lo,bracket_hi,scan_validated"
std::string critical_temperature_csv_header();
/// Fields are empty for t_c and the bracket when no detection was found.
std::string critical_temperature_csv_row(const CriticalTemperature& tc);

/// Throws ArgumentError if the file is unreadable or not JSON.
Json read_json_file(const std::string& path);
/// Writes to `path`, or stdout when path is empty or "-".
void write_text(const std::string& path, const std::string& text);

}  // namespace spinsq
