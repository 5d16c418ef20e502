#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace yamabe {

/// Canonical edge key: (min vertex, max vertex).
using EdgeKey = std::pair<int, int>;

/// Base class of all errors thrown by this library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A precondition on plain inputs (sizes, parameter ranges) was violated.
class InvalidInput : public Error {
public:
  explicit InvalidInput(const std::string& what) : Error(what) {}
};

class IndexOutOfRange : public Error {
public:
  IndexOutOfRange(int index, int vertex_count)
      : Error(make_what(index, vertex_count)), index(index), vertex_count(vertex_count) {}
  int index;
  int vertex_count;

private:
  static std::string make_what(int index, int n) {
    std::ostringstream os;
    os << "vertex index " << index << " out of range [0, " << n << ")";
    return os.str();
  }
};

class DuplicateFace : public Error {
public:
  explicit DuplicateFace(const std::string& what) : Error(what) {}
};

/// A face references the same vertex more than once.
class DegenerateFace : public Error {
public:
  explicit DegenerateFace(const std::string& what) : Error(what) {}
};

class EdgeNotTwoFaces : public Error {
public:
  EdgeNotTwoFaces(EdgeKey edge, int count)
      : Error(make_what(edge, count)), edge(edge), count(count) {}
  EdgeKey edge;
  int count;

private:
  static std::string make_what(EdgeKey e, int c) {
    std::ostringstream os;
    os << "edge {" << e.first << "," << e.second << "} belongs to " << c
       << " faces; a closed surface requires exactly 2";
    return os.str();
  }
};

class BadVertexLink : public Error {
public:
  explicit BadVertexLink(int vertex)
      : Error("link of vertex " + std::to_string(vertex) + " is not a single cycle"),
        vertex(vertex) {}
  int vertex;
};

class DimensionMismatch : public Error {
public:
  DimensionMismatch(long expected, long got)
      : Error("expected vector of length " + std::to_string(expected) + ", got " +
              std::to_string(got)),
        expected(expected), got(got) {}
  long expected;
  long got;
};

class NonPositiveLength : public Error {
public:
  explicit NonPositiveLength(double value)
      : Error("length must be strictly positive, got " + std::to_string(value)),
        value(value), edge{-1, -1} {}
  NonPositiveLength(EdgeKey edge, double value)
      : Error(make_what(edge, value)), value(value), edge(edge) {}
  double value;
  EdgeKey edge;

private:
  static std::string make_what(EdgeKey e, double v) {
    std::ostringstream os;
    os << "edge {" << e.first << "," << e.second << "} has non-positive length " << v;
    return os.str();
  }
};

class NonFiniteValue : public Error {
public:
  explicit NonFiniteValue(const std::string& what) : Error(what) {}
};

/// Prescribed curvature target whose total violates the Gauss-Bonnet identity.
class TargetGaussBonnetViolation : public Error {
public:
  TargetGaussBonnetViolation(double sum, double expected)
      : Error(make_what(sum, expected)), sum(sum), expected(expected) {}
  double sum;
  double expected;

private:
  static std::string make_what(double s, double e) {
    std::ostringstream os;
    os << "target curvature sums to " << s << " but Gauss-Bonnet requires " << e;
    return os.str();
  }
};

/// A triangle inequality fails (or nearly fails) where a strictly
/// non-degenerate metric is required.
class TriangleInequalityViolation : public Error {
public:
  TriangleInequalityViolation(int face, double margin)
      : Error(make_what(face, margin)), face(face), margin(margin) {}
  int face;
  double margin;

private:
  static std::string make_what(int f, double m) {
    std::ostringstream os;
    os << "face " << f << " violates the triangle inequality (margin " << m << ")";
    return os.str();
  }
};

/// The factor leaves the region where the energy is twice differentiable.
class OutsideDomain : public Error {
public:
  explicit OutsideDomain(double min_margin)
      : Error("Hessian undefined: minimum face margin " + std::to_string(min_margin) +
              " is not strictly positive enough"),
        min_margin(min_margin) {}
  double min_margin;
};

class TooManyVertices : public Error {
public:
  explicit TooManyVertices(int n)
      : Error("subset enumeration supports at most 22 vertices, got " + std::to_string(n)),
        vertex_count(n) {}
  int vertex_count;
};

class InsufficientTrace : public Error {
public:
  explicit InsufficientTrace(const std::string& what) : Error(what) {}
};

class SyntaxError : public Error {
public:
  explicit SyntaxError(const std::string& what) : Error(what) {}
};

class MissingEdgeLength : public Error {
public:
  explicit MissingEdgeLength(EdgeKey edge)
      : Error("no length given for edge {" + std::to_string(edge.first) + "," +
              std::to_string(edge.second) + "}"),
        edge(edge) {}
  EdgeKey edge;
};

class ExtraEdgeLength : public Error {
public:
  explicit ExtraEdgeLength(EdgeKey edge)
      : Error("length given for edge {" + std::to_string(edge.first) + "," +
              std::to_string(edge.second) + "} which is not an edge of the surface (or is repeated)"),
        edge(edge) {}
  EdgeKey edge;
};

class IoError : public Error {
public:
  explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace yamabe
