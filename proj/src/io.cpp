#include "spinsq/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spinsq/errors.hpp"

namespace spinsq {

namespace {

Json vec3_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

Json mat3_json(const Mat3& m) {
  Json rows = Json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(vec3_json(m.row(r).transpose()));
  return rows;
}

Vec3 read_vec3(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ArgumentError(std::string(what) + " must have 3 entries");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

Mat3 read_mat3(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw ArgumentError(std::string(what) + " must be 3x3");
  Mat3 m;
  for (int r = 0; r < 3; ++r) m.row(r) = read_vec3(j[r], what).transpose();
  return m;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ArgumentError(std::string("missing field '") + key + "'");
  }
  return j.at(key);
}

// Converts nlohmann type errors into ArgumentError.
template <class Fn>
auto parse(const char* what, Fn&& fn) {
  try {
    return fn();
  } catch (const Json::exception& e) {
    throw ArgumentError(std::string("malformed ") + what + ": " + e.what());
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

Json qstate_json(const DensityOperator& rho) {
  const Matrix& m = rho.matrix();
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json rr = Json::array();
    Json ri = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ri.push_back(m(r, c).imag());
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ri));
  }
  return {{"n_sites", rho.sites()}, {"local_dims", rho.local_dims()}, {"re", re}, {"im", im}};
}

DensityOperator read_qstate(const Json& j) {
  return parse("qstate-json", [&] {
    const int n_sites = field(j, "n_sites").get<int>();
    auto dims = field(j, "local_dims").get<std::vector<int>>();
    if (static_cast<int>(dims.size()) != n_sites) {
      throw ArgumentError("local_dims length differs from n_sites");
    }
    const Json& re = field(j, "re");
    const Json& im = field(j, "im");
    const std::size_t dim = re.size();
    if (im.size() != dim) throw ArgumentError("re and im differ in shape");
    Matrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r) {
      if (re[r].size() != dim || im[r].size() != dim) throw ArgumentError("matrix is not square");
      for (std::size_t c = 0; c < dim; ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            Complex(re[r][c].get<double>(), im[r][c].get<double>());
      }
    }
    return DensityOperator(ComplexOperator(std::move(m), std::move(dims)));
  });
}

Json moments_json(const CollectiveMoments& m) {
  return {{"n", m.n()},
          {"j", vec3_json(m.j())},
          {"c", mat3_json(m.c())},
          {"k2", vec3_json(m.k2())},
          {"gamma", mat3_json(m.gamma())},
          {"chi", mat3_json(m.chi())}};
}

CollectiveMoments read_moments(const Json& j) {
  return parse("moments-json", [&] {
    return CollectiveMoments::from_correlations(field(j, "n").get<int>(),
                                                read_vec3(field(j, "j"), "j"),
                                                read_mat3(field(j, "c"), "c"));
  });
}

Json report_json(const std::vector<CriterionReport>& reports) {
  Json out = Json::array();
  for (const auto& r : reports) {
    Json e = {{"criterion_id", r.criterion_id},
              {"margin", r.margin},
              {"violated", r.violated},
              {"status", r.status == CriterionStatus::applicable ? "applicable" : "not_applicable"}};
    if (r.axes) e["axes"] = mat3_json(*r.axes);
    out.push_back(std::move(e));
  }
  return out;
}

Json polytope_json(const PolytopeGeometry& g) {
  Json vertices = Json::object();
  for (const auto& v : g.vertices) vertices[v.label] = vec3_json(v.point);
  Json facets = Json::object();
  for (const auto& f : g.facets) facets[f.label] = {{"normal", vec3_json(f.normal)}, {"offset", f.offset}};
  return {{"space", to_string(g.space)},
          {"n", g.n},
          {"j", vec3_json(g.j)},
          {"vertices", vertices},
          {"facets", facets}};
}

std::string polytope_obj(const PolytopeGeometry& g) {
  std::ostringstream os;
  os << "# " << to_string(g.space) << " n=" << g.n << '\n';
  for (const auto& v : g.vertices) {
    os << "v " << format_double(v.point[0]) << ' ' << format_double(v.point[1]) << ' '
       << format_double(v.point[2]) << '\n';
  }
  for (const auto& f : g.faces()) os << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
  return os.str();
}

Json model_json(const HamiltonianSpec& spec) {
  Json out = {{"kind", to_string(spec.kind)}, {"n", spec.n}, {"params", spec.params}};
  if (!spec.terms.empty()) {
    Json terms = Json::array();
    for (const auto& t : spec.terms) terms.push_back({{"coeff", t.coeff}, {"ops", t.ops}});
    out["terms"] = terms;
  }
  return out;
}

HamiltonianSpec read_model(const Json& j) {
  return parse("model-json", [&] {
    HamiltonianSpec spec;
    spec.kind = model_kind_from_string(field(j, "kind").get<std::string>());
    spec.n = field(j, "n").get<int>();
    if (j.contains("params")) spec.params = j.at("params").get<std::map<std::string, double>>();
    if (j.contains("terms")) {
      for (const auto& t : j.at("terms")) {
        spec.terms.push_back({field(t, "coeff").get<double>(), field(t, "ops").get<std::string>()});
      }
    }
    validate(spec);
    return spec;
  });
}

Json critical_temperature_json(const CriticalTemperature& tc) {
  Json out = {{"model", model_json(tc.model)},
              {"detector", tc.detector_id},
              {"status", to_string(tc.status)},
              {"scan_validated", tc.scan_validated}};
  if (tc.status != TcStatus::none_found) {
    out["t_c"] = tc.t_c;
    out["bracket"] = {tc.bracket_lo, tc.bracket_hi};
  }
  Json transitions = Json::array();
  for (const auto& [lo, hi] : tc.transitions) transitions.push_back({lo, hi});
  out["transitions"] = transitions;
  if (tc.bipartition) out["bipartition"] = tc.bipartition->to_string();
  return out;
}

std::string critical_temperature_csv_header() {
  return "model,n,detector,t_c,bracket_lo,bracket_hi,scan_validated";
}

std::string critical_temperature_csv_row(const CriticalTemperature& tc) {
  std::ostringstream os;
  os << csv_field(tc.model.label()) << ',' << tc.model.n << ',' << csv_field(tc.detector_id) << ',';
  if (tc.status == TcStatus::none_found) {
    os << ",,";
  } else {
    os << format_double(tc.t_c) << ',' << format_double(tc.bracket_lo) << ','
       << format_double(tc.bracket_hi);
  }
  os << ',' << (tc.scan_validated ? "true" : "false");
  return os.str();
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot read '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ArgumentError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ArgumentError("write to '" + path + "' failed");
}

}  // namespace spinsq
