#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "yamabe/errors.hpp"

namespace yamabe {

/// Inner angles of a generalized Euclidean triangle. angles[i] faces side i.
/// When one side is at least the sum of the other two the triangle is
/// degenerate: the angle facing that side is pi, the other two are 0.
struct GeneralizedAngles {
  std::array<double, 3> angles;
  bool degenerate;
};

/// Inner angles from side lengths, extended continuously to all positive
/// triples. Sides are normalized by the longest before any trig evaluation,
/// so the result is scale-free. Angles come from the half-angle form
///   theta_i = 2 atan2(sqrt(t_j t_k), sqrt(t_i p)),
/// t_i = x_j + x_k - x_i, p = x_1 + x_2 + x_3, which stays accurate for
/// needle triangles where acos of the law of cosines does not.
inline GeneralizedAngles extended_angles(double x1, double x2, double x3) {
  constexpr double pi = std::numbers::pi;
  const std::array<double, 3> x{x1, x2, x3};
  for (double v : x) {
    if (std::isnan(v) || std::isinf(v)) throw NonFiniteValue("side length is not finite");
    if (!(v > 0.0)) throw NonPositiveLength(v);
  }

  const double m = std::max({x1, x2, x3});
  std::array<double, 3> y{x1 / m, x2 / m, x3 / m};

  std::array<double, 3> t;
  for (int i = 0; i < 3; ++i) t[i] = y[(i + 1) % 3] + y[(i + 2) % 3] - y[i];

  for (int i = 0; i < 3; ++i) {
    if (t[i] <= 0.0) {
      // x_i >= x_j + x_k: side i is too long. At most one t can be <= 0.
      GeneralizedAngles ga{{0.0, 0.0, 0.0}, true};
      ga.angles[i] = pi;
      return ga;
    }
  }

  // Summing the normalized sides in sorted order keeps the perimeter (and so
  // every angle) bitwise identical under permutation of the inputs.
  std::array<double, 3> ys = y;
  std::sort(ys.begin(), ys.end());
  const double p = (ys[0] + ys[1]) + ys[2];

  GeneralizedAngles ga{{0.0, 0.0, 0.0}, false};
  for (int i = 0; i < 3; ++i) {
    const double tj = t[(i + 1) % 3];
    const double tk = t[(i + 2) % 3];
    ga.angles[i] = 2.0 * std::atan2(std::sqrt(tj * tk), std::sqrt(t[i] * p));
  }
  return ga;
}

}  // namespace yamabe
