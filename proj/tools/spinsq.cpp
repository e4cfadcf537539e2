// spinsq: command-line front end.
//
// Exit codes: 0 success, 2 argument error, 3 numeric or capacity error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinsq/detect.hpp"
#include "spinsq/errors.hpp"
#include "spinsq/io.hpp"
#include "spinsq/polytope.hpp"

using namespace spinsq;

namespace {

constexpr int kExitArgument = 2;
constexpr int kExitNumeric = 3;

struct ModelArgs {
  std::string model;
  int n = 0;
  std::vector<std::string> params;
};

void add_model_flags(CLI::App* cmd, ModelArgs& m) {
  cmd->add_option("--model", m.model, "model-json file or model kind")->required();
  cmd->add_option("--n", m.n, "number of sites (with a model kind)");
  cmd->add_option("--param", m.params, "model parameter name=value, repeatable");
}

HamiltonianSpec resolve_model(const ModelArgs& m) {
  if (std::filesystem::exists(m.model)) {
    HamiltonianSpec spec = read_model(read_json_file(m.model));
    if (m.n != 0 && m.n != spec.n) throw ArgumentError("--n disagrees with the model file");
    return spec;
  }
  HamiltonianSpec spec;
  spec.kind = model_kind_from_string(m.model);
  spec.n = m.n != 0 ? m.n : (spec.kind == ModelKind::nanotube ? 9 : 0);
  if (spec.n == 0) throw ArgumentError("--n is required with a model kind");
  for (const auto& p : m.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos || eq == 0) throw ArgumentError("--param expects name=value");
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(p.substr(eq + 1), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != p.size() - eq - 1) throw ArgumentError("bad --param value '" + p + "'");
    spec.params[p.substr(0, eq)] = value;
  }
  validate(spec);
  return spec;
}

std::string human(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string tc_output(const std::vector<CriticalTemperature>& rows, const std::string& format) {
  if (format == "json") {
    Json out = Json::array();
    for (const auto& tc : rows) out.push_back(critical_temperature_json(tc));
    return dump(out);
  }
  std::string text = critical_temperature_csv_header() + "\n";
  for (const auto& tc : rows) text += critical_temperature_csv_row(tc) + "\n";
  return text;
}

void check_format(const std::string& format, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed) {
    if (format == a) return;
  }
  throw ArgumentError("unsupported --format '" + format + "'");
}

void apply_capacity_env() {
  const char* env = std::getenv("SPINSQ_MAX_QUBITS");
  if (env == nullptr) return;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == env || *end != '\0') throw ArgumentError("SPINSQ_MAX_QUBITS must be an integer");
  set_max_qubits(static_cast<int>(v));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spin squeezing entanglement detection"};
  app.require_subcommand(1);

  std::string input;
  std::string out;
  std::string format;
  std::string detector;
  double tol = kDefaultTcTol;
  double crit_tol = kDefaultTol;
  std::optional<double> t_max;
  double t_min = 0.0;
  int steps = 50;
  int jobs = 1;
  std::uint64_t seed = 0;
  ModelArgs model;

  auto* moments_cmd = app.add_subcommand("moments", "qstate-json to moments-json");
  moments_cmd->add_option("input", input, "qstate-json file")->required();
  moments_cmd->add_option("--out", out, "output file (default stdout)");

  auto* check_cmd = app.add_subcommand("check", "evaluate every criterion");
  check_cmd->add_option("input", input, "qstate-json or moments-json file")->required();
  check_cmd->add_option("--tol", crit_tol, "violation tolerance");
  check_cmd->add_option("--out", out, "output file (default stdout)");

  auto* tc_cmd = app.add_subcommand("tc", "critical temperature of one detector");
  add_model_flags(tc_cmd, model);
  tc_cmd->add_option("--detector", detector, "PPT-any, CCNR-any or a criterion id")->required();
  tc_cmd->add_option("--tol", tol, "bisection width");
  tc_cmd->add_option("--tmax", t_max, "upper end of the scan");
  tc_cmd->add_option("--format", format, "csv or json (default csv)");
  tc_cmd->add_option("--out", out, "output file (default stdout)");
  tc_cmd->add_option("--jobs", jobs, "worker threads");

  std::optional<int> table_n;
  auto* table_cmd = app.add_subcommand("table2", "critical-temperature table for all model families");
  table_cmd->add_option("--n", table_n, "restrict to one size (default 3..9)");
  table_cmd->add_option("--tol", tol, "bisection width");
  table_cmd->add_option("--format", format, "csv or json (default csv)");
  table_cmd->add_option("--out", out, "output file (default stdout)");
  table_cmd->add_option("--jobs", jobs, "worker threads");

  auto* bound_cmd = app.add_subcommand("bound-scan", "fully-PPT and squeezing verdicts on a grid");
  add_model_flags(bound_cmd, model);
  bound_cmd->add_option("--tmin", t_min, "lowest temperature")->required();
  bound_cmd->add_option("--tmax", t_max, "highest temperature")->required();
  bound_cmd->add_option("--steps", steps, "number of grid points")->check(CLI::PositiveNumber);
  bound_cmd->add_option("--format", format, "csv or json (default csv)");
  bound_cmd->add_option("--out", out, "output file (default stdout)");
  bound_cmd->add_option("--jobs", jobs, "worker threads");

  int poly_n = 0;
  std::vector<double> mean_spin{0.0, 0.0, 0.0};
  std::string space = "k-space";
  auto* poly_cmd = app.add_subcommand("polytope", "separable-region polytope");
  poly_cmd->add_option("--n", poly_n, "number of qubits")->required();
  poly_cmd->add_option("--j", mean_spin, "mean spin Jx Jy Jz")->expected(3);
  poly_cmd->add_option("--space", space, "k-space or eigen-space");
  poly_cmd->add_option("--format", format, "json or obj (default json)");
  poly_cmd->add_option("--out", out, "output file (default stdout)");

  std::int64_t count = 1000;
  std::string law = "uniform";
  int components = 4;
  bool flip = false;
  std::optional<double> j_filter;
  auto* sample_cmd = app.add_subcommand("sample", "K-space points of random separable states");
  sample_cmd->add_option("--n", poly_n, "number of qubits")->required();
  sample_cmd->add_option("--count", count, "number of samples");
  sample_cmd->add_option("--seed", seed, "stream seed");
  sample_cmd->add_option("--law", law, "uniform or aligned");
  sample_cmd->add_option("--components", components, "largest mixture size");
  sample_cmd->add_flag("--flip-symmetric", flip, "mix each component with its spin flip");
  sample_cmd->add_option("--j-filter", j_filter, "keep samples with |J| <= value");
  sample_cmd->add_option("--format", format, "csv");
  sample_cmd->add_option("--out", out, "output file (default stdout)");

  auto* nano_cmd = app.add_subcommand("nanotube", "critical temperatures of the nine-site ring");
  nano_cmd->add_option("--tol", tol, "bisection width");
  nano_cmd->add_option("--format", format, "json or text (default json)");
  nano_cmd->add_option("--out", out, "output file (default stdout)");
  nano_cmd->add_option("--jobs", jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitArgument;
  }

  try {
    apply_capacity_env();
    if (jobs < 1) throw ArgumentError("--jobs must be >= 1");
    DetectOptions options;
    options.jobs = jobs;

    if (*moments_cmd) {
      write_text(out, dump(moments_json(moments(read_qstate(read_json_file(input))))));
    } else if (*check_cmd) {
      const Json j = read_json_file(input);
      const auto reports = j.contains("re") ? evaluate_all(read_qstate(j), crit_tol)
                                            : evaluate_all(read_moments(j), crit_tol);
      write_text(out, dump(report_json(reports)));
    } else if (*tc_cmd) {
      if (format.empty()) format = "csv";
      check_format(format, {"csv", "json"});
      const HamiltonianSpec spec = resolve_model(model);
      write_text(out, tc_output({critical_temperature(spec, detector, t_max, tol, options)}, format));
    } else if (*table_cmd) {
      if (format.empty()) format = "csv";
      check_format(format, {"csv", "json"});
      const auto results = solve_cells(table2_cells(table_n.value_or(3), table_n.value_or(9)), tol, options);
      std::vector<CriticalTemperature> rows;
      bool failed = false;
      for (const auto& r : results) {
        if (r.error) {
          failed = true;
          std::cerr << "cell " << r.tc.model.label() << " n=" << r.tc.model.n << ' '
                    << r.tc.detector_id << " failed: " << *r.error << '\n';
        }
        rows.push_back(r.tc);
      }
      write_text(out, tc_output(rows, format));
      if (failed) return kExitNumeric;
    } else if (*bound_cmd) {
      if (format.empty()) format = "csv";
      check_format(format, {"csv", "json"});
      if (!(t_min > 0.0) || !(*t_max >= t_min)) throw ArgumentError("need 0 < tmin <= tmax");
      const HamiltonianSpec spec = resolve_model(model);
      std::vector<double> grid(steps);
      for (int i = 0; i < steps; ++i) {
        grid[i] = steps == 1 ? t_min : t_min + (*t_max - t_min) * i / (steps - 1);
      }
      const auto points = bound_window(spec, grid, options);
      std::string text;
      if (format == "json") {
        Json arr = Json::array();
        for (const auto& p : points) {
          arr.push_back({{"t", p.t},
                         {"fully_ppt", p.fully_ppt},
                         {"ssi_detected", p.ssi_detected},
                         {"bound_entangled", p.bound_entangled()}});
        }
        text = dump({{"model", model_json(spec)}, {"points", arr}});
      } else {
        text = "t,fully_ppt,ssi_detected,bound_entangled\n";
        for (const auto& p : points) {
          text += format_double(p.t) + ',' + (p.fully_ppt ? "true" : "false") + ',' +
                  (p.ssi_detected ? "true" : "false") + ',' +
                  (p.bound_entangled() ? "true" : "false") + '\n';
        }
      }
      write_text(out, text);
    } else if (*poly_cmd) {
      if (format.empty()) format = "json";
      check_format(format, {"json", "obj"});
      const auto g = polytope(polytope_space_from_string(space), poly_n,
                              Vec3(mean_spin[0], mean_spin[1], mean_spin[2]));
      write_text(out, format == "obj" ? polytope_obj(g) : dump(polytope_json(g)));
    } else if (*sample_cmd) {
      if (format.empty()) format = "csv";
      check_format(format, {"csv"});
      SamplingOptions so;
      so.mixing_components = components;
      if (law == "uniform") {
        so.law = SamplingLaw::uniform;
      } else if (law == "aligned") {
        so.law = SamplingLaw::aligned;
      } else {
        throw ArgumentError("unknown --law '" + law + "'");
      }
      so.flip_symmetric = flip;
      so.j_filter = j_filter;
      const auto samples = sample_separable(poly_n, count, seed, so);
      std::ostringstream os;
      os << "k2x,k2y,k2z,jx,jy,jz\n";
      for (const auto& s : samples) {
        os << format_double(s.k2[0]) << ',' << format_double(s.k2[1]) << ','
           << format_double(s.k2[2]) << ',' << format_double(s.j[0]) << ','
           << format_double(s.j[1]) << ',' << format_double(s.j[2]) << '\n';
      }
      write_text(out, os.str());
    } else if (*nano_cmd) {
      if (format.empty()) format = "json";
      check_format(format, {"json", "text"});
      const NanotubeReport r = nanotube_report(tol, options);
      if (format == "json") {
        write_text(out, dump({{"ossi_8b", critical_temperature_json(r.ossi_8b)},
                              {"ossi_8d", critical_temperature_json(r.ossi_8d)},
                              {"ppt", critical_temperature_json(r.ppt)},
                              {"ossi_8a_silent", r.ossi_8a_silent},
                              {"ossi_8c_silent", r.ossi_8c_silent},
                              {"bound_window", {r.bound_window.first, r.bound_window.second}}}));
      } else {
        std::ostringstream os;
        os << "T_c OSSI-8b: " << human(r.ossi_8b.t_c) << " K\n"
           << "T_c OSSI-8d: " << human(r.ossi_8d.t_c) << " K\n"
           << "T_c PPT:    " << human(r.ppt.t_c) << " K";
        if (r.ppt.bipartition) os << "  split " << r.ppt.bipartition->to_string();
        os << "\nOSSI-8a silent: " << (r.ossi_8a_silent ? "yes" : "no")
           << "\nOSSI-8c silent: " << (r.ossi_8c_silent ? "yes" : "no")
           << "\nfully PPT yet OSSI-8b violated for " << human(r.bound_window.first) << " K < T < "
           << human(r.bound_window.second) << " K\n";
        write_text(out, os.str());
      }
    }
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitArgument;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
