#pragma once

#include <cstdint>
#include <vector>

#include "yamabe/surface.hpp"

namespace yamabe {

/// Largest vertex count accepted by the subset enumeration.
inline constexpr int kObstructionVertexLimit = 22;

/// Outcome of the combinatorial existence test for constant-curvature
/// metrics. Ratios are exact integer pairs; passes holds iff every proper
/// nonempty vertex subset I satisfies |F_I| / |I| > |F| / |V| strictly,
/// where F_I is the set of faces meeting I.
struct ObstructionReport {
  bool passes = false;
  std::pair<std::uint64_t, std::uint64_t> global_ratio;  ///< (|F|, |V|)
  std::vector<int> worst_subset;                         ///< minimizer of |F_I| / |I|
  std::pair<std::uint64_t, std::uint64_t> worst_ratio;   ///< (|F_I|, |I|) at the minimizer
  std::uint64_t subsets_checked = 0;
};

namespace detail {

inline std::vector<int> subset_vertices(std::uint32_t mask) {
  std::vector<int> out;
  for (int v = 0; mask != 0; ++v, mask >>= 1) {
    if (mask & 1u) out.push_back(v);
  }
  return out;
}

}  // namespace detail

/// Brute-force check of the subset condition over all 2^N - 2 proper
/// nonempty vertex subsets, with faces held as vertex bitmasks. All ratio
/// comparisons cross-multiply in 64-bit integers, so there is no
/// floating-point tie ambiguity; among subsets attaining the minimal ratio
/// the lexicographically smallest vertex list is reported.
inline ObstructionReport check_luo_condition(const Triangulation& tri) {
  const int n = tri.vertex_count();
  if (n > kObstructionVertexLimit) throw TooManyVertices(n);

  std::vector<std::uint32_t> face_masks;
  face_masks.reserve(tri.face_count());
  for (const auto& f : tri.faces()) {
    face_masks.push_back((1u << f[0]) | (1u << f[1]) | (1u << f[2]));
  }

  const std::uint64_t total_faces = static_cast<std::uint64_t>(tri.face_count());
  const std::uint64_t total_vertices = static_cast<std::uint64_t>(n);

  ObstructionReport report;
  report.global_ratio = {total_faces, total_vertices};
  report.subsets_checked = (std::uint64_t{1} << n) - 2;

  std::uint64_t best_num = 0, best_den = 0;  // empty until first subset
  std::uint32_t best_mask = 0;
  bool passes = true;

  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
  for (std::uint32_t mask = 1; mask < full; ++mask) {
    std::uint64_t touched = 0;
    for (std::uint32_t fm : face_masks) {
      touched += (fm & mask) != 0;
    }
    const std::uint64_t size = static_cast<std::uint64_t>(__builtin_popcount(mask));

    // touched / size <= total_faces / total_vertices fails the condition.
    if (touched * total_vertices <= total_faces * size) passes = false;

    if (best_den == 0) {
      best_num = touched;
      best_den = size;
      best_mask = mask;
      continue;
    }
    const std::uint64_t lhs = touched * best_den;
    const std::uint64_t rhs = best_num * size;
    if (lhs < rhs ||
        (lhs == rhs &&
         detail::subset_vertices(mask) < detail::subset_vertices(best_mask))) {
      best_num = touched;
      best_den = size;
      best_mask = mask;
    }
  }

  report.passes = passes;
  report.worst_subset = detail::subset_vertices(best_mask);
  report.worst_ratio = {best_num, best_den};
  return report;
}

}  // namespace yamabe
