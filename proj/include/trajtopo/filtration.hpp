#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "trajtopo/slack.hpp"

namespace trajtopo {

// Simplices carry at most kMaxSimplexVertices vertices, i.e. homology is
// computable up to dimension kMaxSimplexVertices - 2.
inline constexpr int kMaxSimplexVertices = 5;

struct FilteredSimplex {
  double value = 0.0; // max pairwise dissimilarity over the vertex set
  std::int8_t dim = 0;
  std::array<std::int32_t, kMaxSimplexVertices> v{}; // sorted ascending

  int vertex_count() const { return dim + 1; }
};

// (value, dim, lexicographic vertices) — a valid filtration order: faces
// have smaller value or, at equal value, smaller dimension.
bool simplex_order_less(const FilteredSimplex& a, const FilteredSimplex& b);

struct Filtration {
  int vertex_count = 0;
  int max_dim = 0;   // top homology dimension requested
  double r_max = 0.0;
  std::vector<FilteredSimplex> simplices; // sorted by simplex_order_less

  // One simplex per line, `value dim v0 v1 ...`, ascending filtration order.
  void write_text(std::ostream& os) const;
};

// All cliques of the r_max-thresholded graph up to dimension max_dim + 1
// (one above the top homology dimension), each at the max of its pairwise
// dissimilarities. Throws ResourceError when the simplex count exceeds
// `budget`. The input need not be metric, only symmetric with zero diagonal.
Filtration build_vr_filtration(const DissimilarityMatrix& D, int max_dim,
                               double r_max,
                               std::size_t budget = 50'000'000);

// Connectivity-based default cutoff: 1.5x the largest edge of a minimum
// spanning tree of D, so component merging is fully visible with headroom
// for higher-dimensional features to close.
double default_r_max(const DissimilarityMatrix& D);

}  // namespace trajtopo
