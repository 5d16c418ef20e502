#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "yamabe/errors.hpp"

namespace yamabe {

/// Per-vertex logarithmic scale factors u. Entry i rescales every edge
/// incident to vertex i by exp(u[i]/2).
using ConformalFactor = Eigen::VectorXd;

namespace detail {

inline std::uint64_t edge_key64(int a, int b) {
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

inline void require_size(const Eigen::VectorXd& v, long expected) {
  if (v.size() != expected) throw DimensionMismatch(expected, v.size());
}

}  // namespace detail

/// Combinatorics of a closed triangulated surface.
///
/// Vertices are 0-based indices. Faces are stored as ascending triples and the
/// face list itself is sorted lexicographically, so two builds from the same
/// face set are identical. Edges are the ascending pairs, listed in
/// lexicographic order; an edge's position in that list is its edge id.
/// Incidence (faces around each vertex, edge opposite each face corner) is
/// derived once at build time. Instances are immutable.
class Triangulation {
public:
  /// Validates and canonicalizes a face list. Requires a closed manifold:
  /// every edge in exactly two faces and every vertex link a single cycle.
  Triangulation(std::vector<std::array<int, 3>> faces, int vertex_count) {
    if (vertex_count <= 0) throw InvalidInput("vertex_count must be positive");
    if (faces.empty()) throw InvalidInput("face list is empty");
    n_vertices_ = vertex_count;

    for (auto& f : faces) {
      for (int v : f) {
        if (v < 0 || v >= vertex_count) throw IndexOutOfRange(v, vertex_count);
      }
      std::sort(f.begin(), f.end());
      if (f[0] == f[1] || f[1] == f[2]) {
        throw DegenerateFace("face {" + std::to_string(f[0]) + "," + std::to_string(f[1]) +
                             "," + std::to_string(f[2]) + "} repeats a vertex");
      }
    }
    std::sort(faces.begin(), faces.end());
    for (std::size_t i = 1; i < faces.size(); ++i) {
      if (faces[i] == faces[i - 1]) {
        throw DuplicateFace("face {" + std::to_string(faces[i][0]) + "," +
                            std::to_string(faces[i][1]) + "," + std::to_string(faces[i][2]) +
                            "} listed more than once");
      }
    }
    faces_ = std::move(faces);

    // Canonical edge list with per-edge face counts.
    std::set<EdgeKey> edge_set;
    for (const auto& f : faces_) {
      edge_set.insert({f[0], f[1]});
      edge_set.insert({f[0], f[2]});
      edge_set.insert({f[1], f[2]});
    }
    edges_.assign(edge_set.begin(), edge_set.end());
    edge_index_.reserve(edges_.size() * 2);
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      edge_index_[detail::edge_key64(edges_[e].first, edges_[e].second)] = static_cast<int>(e);
    }

    std::vector<int> edge_face_count(edges_.size(), 0);
    face_edges_.resize(faces_.size());
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      const auto& [a, b, c] = faces_[f];
      // Edge opposite each corner, in corner order (a, b, c).
      face_edges_[f] = {edge_index(b, c), edge_index(a, c), edge_index(a, b)};
      for (int e : face_edges_[f]) ++edge_face_count[e];
    }
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      if (edge_face_count[e] != 2) throw EdgeNotTwoFaces(edges_[e], edge_face_count[e]);
    }

    faces_at_vertex_.resize(n_vertices_);
    for (std::size_t f = 0; f < faces_.size(); ++f) {
      for (int v : faces_[f]) faces_at_vertex_[v].push_back(static_cast<int>(f));
    }
    for (int v = 0; v < n_vertices_; ++v) check_vertex_link(v);

    euler_char_ = n_vertices_ - static_cast<int>(edges_.size()) + static_cast<int>(faces_.size());
  }

  int vertex_count() const { return n_vertices_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int face_count() const { return static_cast<int>(faces_.size()); }
  int euler_characteristic() const { return euler_char_; }

  const std::vector<std::array<int, 3>>& faces() const { return faces_; }
  const std::vector<EdgeKey>& edges() const { return edges_; }

  /// Edge ids opposite the three corners of face f, in corner order.
  const std::array<int, 3>& face_edges(int f) const { return face_edges_[f]; }

  /// Ids of the faces incident to vertex v.
  const std::vector<int>& faces_at(int v) const { return faces_at_vertex_[v]; }

  int vertex_degree(int v) const { return static_cast<int>(faces_at_vertex_[v].size()); }

  int edge_index(int a, int b) const {
    if (a > b) std::swap(a, b);
    auto it = edge_index_.find(detail::edge_key64(a, b));
    return it == edge_index_.end() ? -1 : it->second;
  }

private:
  void check_vertex_link(int v) const {
    const auto& incident = faces_at_vertex_[v];
    if (incident.size() < 3) throw BadVertexLink(v);
    // Each incident face {v,a,b} contributes link edge {a,b}. The link is a
    // single cycle iff every link vertex has degree 2 and one walk visits all
    // link edges.
    std::unordered_map<int, std::array<int, 2>> adj;  // link vertex -> 2 neighbors
    std::unordered_map<int, int> deg;
    for (int f : incident) {
      int a = -1, b = -1;
      for (int w : faces_[f]) {
        if (w == v) continue;
        (a < 0 ? a : b) = w;
      }
      for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
        int d = deg[x]++;
        if (d >= 2) throw BadVertexLink(v);
        adj[x][d] = y;
      }
    }
    for (const auto& [w, d] : deg) {
      (void)w;
      if (d != 2) throw BadVertexLink(v);
    }
    // Walk the cycle from an arbitrary start.
    const int start = adj.begin()->first;
    int prev = start, cur = adj[start][0];
    std::size_t visited = 1;
    while (cur != start) {
      const auto& nb = adj[cur];
      int next = (nb[0] == prev) ? nb[1] : nb[0];
      prev = cur;
      cur = next;
      ++visited;
      if (visited > adj.size()) throw BadVertexLink(v);
    }
    if (visited != adj.size() || adj.size() != incident.size()) throw BadVertexLink(v);
  }

  int n_vertices_ = 0;
  int euler_char_ = 0;
  std::vector<std::array<int, 3>> faces_;
  std::vector<EdgeKey> edges_;
  std::vector<std::array<int, 3>> face_edges_;
  std::vector<std::vector<int>> faces_at_vertex_;
  std::unordered_map<std::uint64_t, int> edge_index_;
};

inline Triangulation build_triangulation(std::vector<std::array<int, 3>> faces,
                                         int vertex_count) {
  return Triangulation(std::move(faces), vertex_count);
}

/// Positive edge lengths satisfying every per-face triangle inequality,
/// indexed by the canonical edge order of the Triangulation it was built
/// against.
class PLMetric {
public:
  PLMetric(const Triangulation& tri, std::vector<double> edge_lengths)
      : lengths_(std::move(edge_lengths)) {
    if (static_cast<int>(lengths_.size()) != tri.edge_count()) {
      throw DimensionMismatch(tri.edge_count(), static_cast<long>(lengths_.size()));
    }
    for (std::size_t e = 0; e < lengths_.size(); ++e) {
      if (!(lengths_[e] > 0.0) || !std::isfinite(lengths_[e])) {
        throw NonPositiveLength(tri.edges()[e], lengths_[e]);
      }
    }
    for (int f = 0; f < tri.face_count(); ++f) {
      const auto& fe = tri.face_edges(f);
      const double s0 = lengths_[fe[0]], s1 = lengths_[fe[1]], s2 = lengths_[fe[2]];
      const double longest = std::max({s0, s1, s2});
      const double margin = (s0 + s1 + s2) - 2.0 * longest;
      if (!(margin > 0.0)) throw TriangleInequalityViolation(f, margin);
    }
  }

  double length(int edge_id) const { return lengths_[edge_id]; }
  const std::vector<double>& lengths() const { return lengths_; }

private:
  std::vector<double> lengths_;
};

/// Rescales every edge {i,j} to exp(u_i/2) exp(u_j/2) d_ij. The result is a
/// raw positive length assignment; triangle inequalities are not checked and
/// may fail.
inline std::vector<double> conformal_scale(const Triangulation& tri, const PLMetric& metric,
                                           const ConformalFactor& u) {
  detail::require_size(u, tri.vertex_count());
  std::vector<double> out(tri.edge_count());
  for (int e = 0; e < tri.edge_count(); ++e) {
    const auto& [i, j] = tri.edges()[e];
    out[e] = std::exp(0.5 * (u[i] + u[j])) * metric.length(e);
  }
  return out;
}

struct DomainViolation {
  int face;          ///< face id
  int longest_edge;  ///< edge id of the longest side of that face
  double margin;     ///< (sum of the two shorter sides) - longest, <= 0 here
};

/// Result of the conformal-domain membership test.
struct DomainReport {
  bool in_domain = false;
  std::vector<DomainViolation> violations;
  double min_margin = 0.0;  ///< smallest margin over all faces (any sign)
};

/// Checks whether u*d is again a valid metric: every face of the rescaled
/// lengths must satisfy strict triangle inequalities. All violating faces are
/// reported with their margins; min_margin covers every face.
inline DomainReport in_conformal_domain(const Triangulation& tri, const PLMetric& metric,
                                        const ConformalFactor& u) {
  const std::vector<double> scaled = conformal_scale(tri, metric, u);
  DomainReport report;
  report.min_margin = std::numeric_limits<double>::infinity();
  for (int f = 0; f < tri.face_count(); ++f) {
    const auto& fe = tri.face_edges(f);
    int longest = fe[0];
    for (int k = 1; k < 3; ++k) {
      if (scaled[fe[k]] > scaled[longest]) longest = fe[k];
    }
    double others = 0.0;
    for (int e : fe) {
      if (e != longest) others += scaled[e];
    }
    const double margin = others - scaled[longest];
    report.min_margin = std::min(report.min_margin, margin);
    if (!(margin > 0.0)) report.violations.push_back({f, longest, margin});
  }
  report.in_domain = report.violations.empty();
  return report;
}

}  // namespace yamabe
