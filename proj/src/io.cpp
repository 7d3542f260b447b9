#include "swstab/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace swstab {

using nlohmann::json;

namespace {

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open for reading");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
  return doc;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
  if (!out) throw ParseError(path + ": cannot open for writing");
  out << text;
  if (!out) throw ParseError(path + ": write failed");
}

const json& field(const json& doc, const char* key, const std::string& path) {
  const auto it = doc.find(key);
  if (it == doc.end()) throw ParseError(path + ": missing field '" + key + "'");
  return *it;
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ParseError(where + ": expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ParseError(where + ": expected an integer");
  return v.get<int>();
}

}  // namespace

std::string format_full(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_sci12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.11e", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Family files
// ---------------------------------------------------------------------------

SwitchedFamily read_family(const std::string& path) {
  const json doc = load_json(path);
  SwitchedFamily fam;
  fam.dimension = integer(field(doc, "dimension", path), path + ": dimension");
  const json& subs = field(doc, "subsystems", path);
  if (!subs.is_array()) throw ParseError(path + ": 'subsystems' must be an array");
  for (const auto& s : subs) {
    Subsystem sub;
    sub.id = integer(field(s, "id", path), path + ": subsystem id");
    const std::string cls = field(s, "class", path).get<std::string>();
    if (cls == "stable")
      sub.declared = SubsystemClass::Stable;
    else if (cls == "unstable")
      sub.declared = SubsystemClass::Unstable;
    else
      throw ParseError(path + ": subsystem class must be 'stable' or 'unstable'");
    const json& mat = field(s, "matrix", path);
    const int d = fam.dimension;
    if (!mat.is_array() || mat.size() != static_cast<std::size_t>(d) * d)
      throw ParseError(path + ": subsystem matrix must hold dimension^2 numbers (row-major)");
    sub.A.resize(d, d);
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        sub.A(r, c) = number(mat[static_cast<std::size_t>(r) * d + c], path + ": matrix entry");
    fam.subsystems.push_back(std::move(sub));
  }
  const json& edges = field(doc, "edges", path);
  if (!edges.is_array()) throw ParseError(path + ": 'edges' must be an array");
  std::vector<std::pair<int, int>> pairs;
  for (const auto& e : edges) {
    if (!e.is_array() || e.size() != 2) throw ParseError(path + ": edge must be a pair [i, j]");
    pairs.emplace_back(integer(e[0], path + ": edge"), integer(e[1], path + ": edge"));
  }
  fam.graph = make_graph(std::move(pairs));
  return fam;
}

void write_family(const SwitchedFamily& family, const std::string& path) {
  std::ostringstream out;
  out << "{\n  \"dimension\": " << family.dimension << ",\n  \"subsystems\": [\n";
  for (std::size_t k = 0; k < family.subsystems.size(); ++k) {
    const auto& sub = family.subsystems[k];
    out << "    {\"id\": " << sub.id << ", \"class\": \""
        << (sub.declared == SubsystemClass::Stable ? "stable" : "unstable")
        << "\", \"matrix\": [";
    for (int r = 0; r < sub.A.rows(); ++r)
      for (int c = 0; c < sub.A.cols(); ++c) {
        if (r + c > 0) out << ", ";
        out << format_full(sub.A(r, c));
      }
    out << "]}" << (k + 1 < family.subsystems.size() ? "," : "") << "\n";
  }
  out << "  ],\n  \"edges\": [";
  for (std::size_t k = 0; k < family.graph.edges.size(); ++k) {
    if (k > 0) out << ", ";
    out << "[" << family.graph.edges[k].first << ", " << family.graph.edges[k].second << "]";
  }
  out << "]\n}\n";
  write_text(path, out.str());
}

// ---------------------------------------------------------------------------
// Certificate files
// ---------------------------------------------------------------------------

CertificateSet read_certificates(const std::string& path) {
  const json doc = load_json(path);
  CertificateSet set;
  const json& certs = field(doc, "certs", path);
  if (!certs.is_array()) throw ParseError(path + ": 'certs' must be an array");
  for (const auto& c : certs) {
    QuadraticCertificate cert;
    cert.id = integer(field(c, "id", path), path + ": cert id");
    cert.lambda = number(field(c, "lambda", path), path + ": lambda");
    const json& mat = field(c, "P", path);
    if (!mat.is_array()) throw ParseError(path + ": 'P' must be an array (row-major)");
    const auto dd = mat.size();
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(dd))));
    if (static_cast<std::size_t>(d) * d != dd)
      throw ParseError(path + ": 'P' length is not a perfect square");
    cert.P.resize(d, d);
    for (int r = 0; r < d; ++r)
      for (int c2 = 0; c2 < d; ++c2)
        cert.P(r, c2) = number(mat[static_cast<std::size_t>(r) * d + c2], path + ": P entry");
    set.certs.push_back(std::move(cert));
  }
  const json& mus = field(doc, "mu", path);
  if (!mus.is_array()) throw ParseError(path + ": 'mu' must be an array");
  for (const auto& m : mus) {
    const int from = integer(field(m, "from", path), path + ": mu.from");
    const int to = integer(field(m, "to", path), path + ": mu.to");
    set.mu[{from, to}] = number(field(m, "value", path), path + ": mu.value");
  }
  return set;
}

void write_certificates(const CertificateSet& set, const std::string& path) {
  std::ostringstream out;
  out << "{\n  \"certs\": [\n";
  for (std::size_t k = 0; k < set.certs.size(); ++k) {
    const auto& c = set.certs[k];
    out << "    {\"id\": " << c.id << ", \"lambda\": " << format_full(c.lambda)
        << ", \"P\": [";
    for (int r = 0; r < c.P.rows(); ++r)
      for (int c2 = 0; c2 < c.P.cols(); ++c2) {
        if (r + c2 > 0) out << ", ";
        out << format_full(c.P(r, c2));
      }
    out << "]}" << (k + 1 < set.certs.size() ? "," : "") << "\n";
  }
  out << "  ],\n  \"mu\": [\n";
  std::size_t k = 0;
  for (const auto& [edge, value] : set.mu) {
    out << "    {\"from\": " << edge.first << ", \"to\": " << edge.second
        << ", \"value\": " << format_full(value) << "}"
        << (++k < set.mu.size() ? "," : "") << "\n";
  }
  out << "  ]\n}\n";
  write_text(path, out.str());
}

// ---------------------------------------------------------------------------
// Signal files
// ---------------------------------------------------------------------------

SwitchingSignal read_signal(const std::string& path, double min_holding) {
  const json doc = load_json(path);
  const json& taus = field(doc, "taus", path);
  const json& modes = field(doc, "modes", path);
  if (!taus.is_array() || !modes.is_array())
    throw ParseError(path + ": 'taus' and 'modes' must be arrays");
  std::vector<double> tv;
  std::vector<SubsystemId> mv;
  for (const auto& t : taus) tv.push_back(number(t, path + ": taus entry"));
  for (const auto& m : modes) mv.push_back(integer(m, path + ": modes entry"));
  const double horizon = number(field(doc, "horizon", path), path + ": horizon");
  try {
    return make_signal(std::move(tv), std::move(mv), horizon, min_holding);
  } catch (const std::invalid_argument& e) {
    throw ParseError(path + ": " + e.what());
  }
}

void write_signal(const SwitchingSignal& sig, const std::string& path) {
  std::ostringstream out;
  out << "{\n  \"taus\": [";
  for (std::size_t k = 0; k < sig.taus.size(); ++k) {
    if (k > 0) out << ", ";
    out << format_full(sig.taus[k]);
  }
  out << "],\n  \"modes\": [";
  for (std::size_t k = 0; k < sig.modes.size(); ++k) {
    if (k > 0) out << ", ";
    out << sig.modes[k];
  }
  out << "],\n  \"horizon\": " << format_full(sig.horizon) << "\n}\n";
  write_text(path, out.str());
}

// ---------------------------------------------------------------------------
// Generator specs
// ---------------------------------------------------------------------------

GeneratorSpec read_generator_spec(const std::string& path) {
  const json doc = load_json(path);
  GeneratorSpec spec;
  spec.cls = field(doc, "class", path).get<std::string>();
  spec.horizon = doc.value("horizon", 0.0);
  spec.seed = doc.value("seed", std::uint64_t{1});
  if (doc.contains("params")) {
    for (const auto& [key, val] : doc["params"].items())
      spec.params[key] = number(val, path + ": params." + key);
  }
  auto mode_map = [&](const char* key, std::map<int, double>& dst) {
    if (!doc.contains(key)) return;
    for (const auto& [mode, val] : doc[key].items())
      dst[std::stoi(mode)] = number(val, path + std::string(": ") + key);
  };
  mode_map("N0_j", spec.n0_j);
  mode_map("tau_a_j", spec.tau_a_j);
  return spec;
}

void write_generator_spec(const GeneratorSpec& spec, const std::string& path) {
  std::ostringstream out;
  out << "{\n  \"class\": \"" << spec.cls << "\",\n  \"horizon\": "
      << format_full(spec.horizon) << ",\n  \"seed\": " << spec.seed << ",\n  \"params\": {";
  std::size_t k = 0;
  for (const auto& [key, val] : spec.params) {
    out << (k++ ? ", " : "") << "\"" << key << "\": " << format_full(val);
  }
  out << "}";
  auto mode_map = [&out](const char* key, const std::map<int, double>& src) {
    if (src.empty()) return;
    out << ",\n  \"" << key << "\": {";
    std::size_t i = 0;
    for (const auto& [mode, val] : src)
      out << (i++ ? ", " : "") << "\"" << mode << "\": " << format_full(val);
    out << "}";
  };
  mode_map("N0_j", spec.n0_j);
  mode_map("tau_a_j", spec.tau_a_j);
  out << "\n}\n";
  write_text(path, out.str());
}

// ---------------------------------------------------------------------------
// Reports and CSV traces (12 significant digits, comma separator, LF)
// ---------------------------------------------------------------------------

std::string report_to_json(const CriterionReport& report) {
  std::ostringstream out;
  out << "{\n  \"criterion\": \"" << report.criterion << "\",\n  \"satisfied\": "
      << (report.satisfied ? "true" : "false") << ",\n  \"margin\": "
      << format_sci12(report.margin) << ",\n  \"witness\": ";
  if (report.witness) {
    out << "{";
    if (report.witness->s) out << "\"s\": " << format_sci12(*report.witness->s) << ", ";
    out << "\"t\": " << format_sci12(report.witness->t) << "}";
  } else {
    out << "null";
  }
  out << ",\n  \"parameters\": {";
  std::size_t k = 0;
  for (const auto& [key, val] : report.parameters)
    out << (k++ ? ", " : "") << "\"" << key << "\": " << format_sci12(val);
  out << "},\n  \"estimator\": ";
  if (report.estimator)
    out << "{\"window\": " << format_sci12(report.estimator->window)
        << ", \"samples\": " << report.estimator->samples << "}";
  else
    out << "null";
  out << "\n}\n";
  return out.str();
}

void write_report(const CriterionReport& report, const std::string& path) {
  write_text(path, report_to_json(report));
}

void write_psi_trace_csv(const SwitchingSignal& sig, const CertificateSet& certs,
                         const TransitionGraph& graph, std::span<const double> times,
                         const std::string& path) {
  std::ostringstream out;
  out << "t,psi,Psi\n";
  const auto psis = psi_trace(sig, certs, times);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double density =
        times[k] > 0.0 ? composite_density(sig, certs, graph, times[k]) : 0.0;
    out << format_sci12(times[k]) << "," << format_sci12(psis[k]) << ","
        << format_sci12(density) << "\n";
  }
  write_text(path, out.str());
}

void write_stats_csv(const SwitchingSignal& sig, const TransitionGraph& graph, int n_modes,
                     std::span<const double> times, const std::string& path) {
  std::ostringstream out;
  out << "t,N,nu";
  for (int j = 1; j <= n_modes; ++j) out << ",eta_" << j;
  for (const auto& [i, j] : graph.edges) out << ",rho_" << i << "_" << j;
  out << "\n";
  for (const double t : times) {
    const SignalStats st = stats_at(sig, t, graph);
    out << format_sci12(t) << "," << st.switches << "," << format_sci12(st.nu);
    for (int j = 1; j <= n_modes; ++j) {
      const auto it = st.eta.find(j);
      out << "," << format_sci12(it != st.eta.end() ? it->second : 0.0);
    }
    for (const auto& edge : graph.edges) {
      const auto it = st.rho.find(edge);
      out << "," << format_sci12(it != st.rho.end() ? it->second : 0.0);
    }
    out << "\n";
  }
  write_text(path, out.str());
}

void write_trajectory_csv(const Trajectory& traj, const SwitchingSignal& sig,
                          const CertificateSet& certs, const std::string& path) {
  std::ostringstream out;
  const int d = traj.states.empty() ? 0 : static_cast<int>(traj.states.front().size());
  out << "t,mode";
  for (int i = 1; i <= d; ++i) out << ",x_" << i;
  out << ",V,psi,bound\n";
  const auto psis = psi_trace(sig, certs, traj.times);
  const double v0 = traj.V.empty() ? 0.0 : traj.V.front();
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    out << format_sci12(traj.times[k]) << "," << traj.mode[k];
    for (int i = 0; i < d; ++i) out << "," << format_sci12(traj.states[k][i]);
    out << "," << format_sci12(traj.V.empty() ? 0.0 : traj.V[k]) << ","
        << format_sci12(psis[k]) << "," << format_sci12(std::exp(psis[k]) * v0) << "\n";
  }
  write_text(path, out.str());
}

}  // namespace swstab
