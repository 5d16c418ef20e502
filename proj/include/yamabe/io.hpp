#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "yamabe/curvature.hpp"
#include "yamabe/flow.hpp"
#include "yamabe/obstruction.hpp"
#include "yamabe/solver.hpp"
#include "yamabe/surface.hpp"

namespace yamabe {

using ordered_json = nlohmann::ordered_json;

/// Shortest decimal string that parses back to exactly the same double, with
/// a 17-significant-digit fallback.
inline std::string format_double(double value) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  if (res.ec == std::errc{}) return std::string(buf, res.ptr);
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return std::string(buf);
}

/// FNV-1a 64-bit digest of the raw input bytes, as 16 lowercase hex digits.
/// Reports embed it so a result can be matched to the exact input file.
inline std::string input_digest(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  static const char* hex = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  if (in.bad()) throw IoError("read failure on '" + path.string() + "'");
  return os.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failure on '" + path.string() + "'");
}

inline std::size_t line_of_byte(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') ++line;
  }
  return line;
}

inline ordered_json parse_json(const std::string& text, const char* what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SyntaxError(std::string(what) + ", line " +
                      std::to_string(line_of_byte(text, e.byte)) + ": " + e.what());
  }
}

inline const ordered_json& require_field(const ordered_json& j, const char* name) {
  auto it = j.find(name);
  if (it == j.end()) throw SyntaxError(std::string("missing field '") + name + "'");
  return *it;
}

inline ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json arr = ordered_json::array();
  for (long i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace detail

/// Parses the surface format: a JSON object with format_version (1),
/// vertex_count, faces (vertex triples) and edge_lengths (rows [i, j, length]
/// with i < j, exactly one row per edge of the face complex).
inline std::pair<Triangulation, PLMetric> parse_surface_file(const std::string& text) {
  const ordered_json j = detail::parse_json(text, "surface file");
  if (!j.is_object()) throw SyntaxError("surface file: top level must be an object");

  const auto& version = detail::require_field(j, "format_version");
  if (!version.is_number_integer() || version.get<int>() != 1) {
    throw SyntaxError("field 'format_version': only version 1 is supported");
  }
  const auto& vc = detail::require_field(j, "vertex_count");
  if (!vc.is_number_integer() || vc.get<long>() <= 0) {
    throw SyntaxError("field 'vertex_count': expected a positive integer");
  }
  const int vertex_count = vc.get<int>();

  const auto& jfaces = detail::require_field(j, "faces");
  if (!jfaces.is_array() || jfaces.empty()) {
    throw SyntaxError("field 'faces': expected a nonempty array");
  }
  std::vector<std::array<int, 3>> faces;
  faces.reserve(jfaces.size());
  for (std::size_t f = 0; f < jfaces.size(); ++f) {
    const auto& row = jfaces[f];
    if (!row.is_array() || row.size() != 3 || !row[0].is_number_integer() ||
        !row[1].is_number_integer() || !row[2].is_number_integer()) {
      throw SyntaxError("field 'faces[" + std::to_string(f) + "]': expected three vertex indices");
    }
    faces.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<int>()});
  }

  const auto& jlengths = detail::require_field(j, "edge_lengths");
  if (!jlengths.is_array()) throw SyntaxError("field 'edge_lengths': expected an array");
  std::map<EdgeKey, double> given;
  for (std::size_t r = 0; r < jlengths.size(); ++r) {
    const auto& row = jlengths[r];
    const std::string where = "field 'edge_lengths[" + std::to_string(r) + "]'";
    if (!row.is_array() || row.size() != 3 || !row[0].is_number_integer() ||
        !row[1].is_number_integer() || !row[2].is_number()) {
      throw SyntaxError(where + ": expected [i, j, length]");
    }
    const EdgeKey e{row[0].get<int>(), row[1].get<int>()};
    if (e.first >= e.second) throw SyntaxError(where + ": edge must satisfy i < j");
    const double length = row[2].get<double>();
    if (!(length > 0.0) || !std::isfinite(length)) throw NonPositiveLength(e, length);
    if (!given.emplace(e, length).second) throw ExtraEdgeLength(e);
  }

  Triangulation tri(std::move(faces), vertex_count);

  std::vector<double> lengths(tri.edge_count());
  for (int e = 0; e < tri.edge_count(); ++e) {
    const auto it = given.find(tri.edges()[e]);
    if (it == given.end()) throw MissingEdgeLength(tri.edges()[e]);
    lengths[e] = it->second;
    given.erase(it);
  }
  if (!given.empty()) throw ExtraEdgeLength(given.begin()->first);

  PLMetric metric(tri, std::move(lengths));
  return {std::move(tri), std::move(metric)};
}

inline std::pair<Triangulation, PLMetric> parse_surface_file(std::istream& in) {
  std::ostringstream os;
  os << in.rdbuf();
  return parse_surface_file(os.str());
}

inline std::pair<Triangulation, PLMetric> read_surface_file(const std::filesystem::path& path) {
  return parse_surface_file(detail::read_file(path));
}

/// Canonical serialization: faces and edges in their canonical orders, one
/// row per line, floats in shortest round-trip form. parse -> write -> parse
/// is the identity and equal inputs produce byte-equal files.
inline std::string write_surface_file(const Triangulation& tri, const PLMetric& metric) {
  std::string out = "{\n  \"format_version\": 1,\n  \"vertex_count\": ";
  out += std::to_string(tri.vertex_count());
  out += ",\n  \"faces\": [\n";
  for (int f = 0; f < tri.face_count(); ++f) {
    const auto& [a, b, c] = tri.faces()[f];
    out += "    [" + std::to_string(a) + ", " + std::to_string(b) + ", " + std::to_string(c) +
           (f + 1 < tri.face_count() ? "],\n" : "]\n");
  }
  out += "  ],\n  \"edge_lengths\": [\n";
  for (int e = 0; e < tri.edge_count(); ++e) {
    const auto& [a, b] = tri.edges()[e];
    out += "    [" + std::to_string(a) + ", " + std::to_string(b) + ", " +
           format_double(metric.length(e)) + (e + 1 < tri.edge_count() ? "],\n" : "]\n");
  }
  out += "  ]\n}\n";
  return out;
}

/// Loads a JSON array of exactly n reals (conformal factors, curvature
/// targets).
inline Eigen::VectorXd load_vector_file(const std::filesystem::path& path, long n) {
  const std::string text = detail::read_file(path);
  const ordered_json j = detail::parse_json(text, "vector file");
  if (!j.is_array()) throw SyntaxError("vector file: expected a JSON array of numbers");
  if (static_cast<long>(j.size()) != n) throw DimensionMismatch(n, static_cast<long>(j.size()));
  Eigen::VectorXd v(n);
  for (long i = 0; i < n; ++i) {
    if (!j[i].is_number()) {
      throw SyntaxError("vector file: entry " + std::to_string(i) + " is not a number");
    }
    v[i] = j[i].get<double>();
  }
  return v;
}

/// Loads a prescribed curvature target and validates it against Gauss-Bonnet.
inline TargetCurvature load_target_file(const Triangulation& tri,
                                        const std::filesystem::path& path) {
  TargetCurvature target = TargetCurvature::prescribed(load_vector_file(path, tri.vertex_count()));
  validate_target(tri, target);
  return target;
}

// ---------------------------------------------------------------------------
// Reports. Field order is fixed and floats print in shortest round-trip form
// (the JSON dumper's native behavior), so identical inputs give identical
// bytes.

inline ordered_json report_json(const FlowResult& r, const std::string& digest) {
  ordered_json j;
  j["report"] = "flow";
  j["input_digest"] = digest;
  j["status"] = r.status == FlowStatus::Converged ? "converged" : "max_steps_reached";
  j["steps"] = r.trace.back().step;
  j["time"] = r.trace.back().time;
  j["residual_final"] = r.residual_final;
  j["energy_final"] = r.trace.back().energy;
  j["sum_u_final"] = r.u_final.sum();
  j["u_final"] = detail::vector_json(r.u_final);
  if (r.decay) {
    j["decay"] = ordered_json{{"rate", r.decay->rate}, {"r_squared", r.decay->r_squared}};
  } else {
    j["decay"] = nullptr;
  }
  return j;
}

inline ordered_json report_json(const SolveResult& r, const std::string& digest) {
  ordered_json j;
  j["report"] = "solve";
  j["input_digest"] = digest;
  switch (r.status) {
    case SolveStatus::Converged: j["status"] = "converged"; break;
    case SolveStatus::MaxIters: j["status"] = "max_iters_reached"; break;
    case SolveStatus::LineSearchStall: j["status"] = "line_search_stall"; break;
  }
  j["iters"] = r.iters;
  j["grad_norm_final"] = r.grad_norm_final;
  j["sum_u"] = r.u_star.sum();
  j["u_star"] = detail::vector_json(r.u_star);
  ordered_json kinds = ordered_json::array();
  for (StepKind k : r.step_kinds) kinds.push_back(k == StepKind::Newton ? "newton" : "gradient");
  j["step_kinds"] = std::move(kinds);
  return j;
}

inline ordered_json report_json(const ObstructionReport& r, const std::string& digest) {
  ordered_json j;
  j["report"] = "obstruction";
  j["input_digest"] = digest;
  j["passes"] = r.passes;
  j["global_ratio"] = ordered_json{{"num", r.global_ratio.first}, {"den", r.global_ratio.second}};
  j["worst_ratio"] = ordered_json{{"num", r.worst_ratio.first}, {"den", r.worst_ratio.second}};
  j["worst_subset"] = r.worst_subset;
  j["subsets_checked"] = r.subsets_checked;
  return j;
}

inline ordered_json report_json(const Triangulation& tri, const CurvatureVector& k,
                                const std::string& digest) {
  ordered_json j;
  j["report"] = "curvature";
  j["input_digest"] = digest;
  j["vertex_count"] = tri.vertex_count();
  j["average_curvature"] = average_curvature(tri);
  const double defect =
      k.sum() - 2.0 * std::numbers::pi * tri.euler_characteristic();
  j["gauss_bonnet_defect"] = defect;
  j["curvatures"] = detail::vector_json(k);
  return j;
}

inline std::string render_report(const ordered_json& report) { return report.dump(2) + "\n"; }

inline void write_report(const ordered_json& report, const std::filesystem::path& path) {
  detail::write_file(path, render_report(report));
}

inline void write_report(const FlowResult& r, const std::string& digest,
                         const std::filesystem::path& path) {
  write_report(report_json(r, digest), path);
}

inline void write_report(const SolveResult& r, const std::string& digest,
                         const std::filesystem::path& path) {
  write_report(report_json(r, digest), path);
}

inline void write_report(const ObstructionReport& r, const std::string& digest,
                         const std::filesystem::path& path) {
  write_report(report_json(r, digest), path);
}

inline void write_report(const Triangulation& tri, const CurvatureVector& k,
                         const std::string& digest, const std::filesystem::path& path) {
  write_report(report_json(tri, k, digest), path);
}

/// Trace serialization: one CSV header line, then one row per trace entry.
inline std::string trace_csv(const std::vector<TraceEntry>& trace) {
  std::string out = "step,time,energy,residual_inf,min_face_margin\n";
  for (const auto& e : trace) {
    out += std::to_string(e.step);
    out += ',';
    out += format_double(e.time);
    out += ',';
    out += format_double(e.energy);
    out += ',';
    out += format_double(e.residual_inf);
    out += ',';
    out += format_double(e.min_face_margin);
    out += '\n';
  }
  return out;
}

inline void write_trace_csv(const std::vector<TraceEntry>& trace,
                            const std::filesystem::path& path) {
  detail::write_file(path, trace_csv(trace));
}

}  // namespace yamabe
