#include "trajtopo/filtration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "trajtopo/errors.hpp"

namespace trajtopo {

bool simplex_order_less(const FilteredSimplex& a, const FilteredSimplex& b) {
  if (a.value != b.value) return a.value < b.value;
  if (a.dim != b.dim) return a.dim < b.dim;
  for (int i = 0; i <= a.dim; ++i) {
    if (a.v[i] != b.v[i]) return a.v[i] < b.v[i];
  }
  return false;
}

void Filtration::write_text(std::ostream& os) const {
  char buf[40];
  for (const auto& s : simplices) {
    std::snprintf(buf, sizeof buf, "%.17g", s.value);
    os << buf << ' ' << static_cast<int>(s.dim);
    for (int i = 0; i <= s.dim; ++i) os << ' ' << s.v[i];
    os << '\n';
  }
}

namespace {

struct CliqueBuilder {
  const DissimilarityMatrix& D;
  const std::vector<std::vector<std::int32_t>>& neighbors; // sorted, > self
  int top_dim;
  std::size_t budget;
  std::vector<FilteredSimplex>& out;

  void emit(const FilteredSimplex& s) {
    if (out.size() >= budget) {
      throw ResourceError(
          "simplex budget exceeded while building the Vietoris-Rips "
          "filtration; lower r_max, max_dim, or the point count");
    }
    out.push_back(s);
  }

  // Extend `s` (whose last vertex is `last`) by common neighbors from the
  // candidate list; candidates are already adjacent to every earlier vertex.
  void expand(FilteredSimplex s, const std::vector<std::int32_t>& candidates) {
    if (s.dim >= top_dim) return;
    int last = s.v[s.dim];
    std::vector<std::int32_t> next;
    for (std::int32_t w : candidates) {
      if (w <= last) continue;
      // Candidates are adjacent to every vertex of s, so ext is a clique;
      // its value is the max of s's value and the new vertex's edges.
      double vw = s.value;
      for (int q = 0; q <= s.dim; ++q) vw = std::max(vw, D.at(s.v[q], w));
      FilteredSimplex ext = s;
      ext.dim = s.dim + 1;
      ext.v[ext.dim] = w;
      ext.value = vw;
      emit(ext);
      if (ext.dim < top_dim) {
        next.clear();
        const auto& nw = neighbors[w];
        std::set_intersection(candidates.begin(), candidates.end(),
                              nw.begin(), nw.end(), std::back_inserter(next));
        expand(ext, next);
      }
    }
  }
};

}  // namespace

Filtration build_vr_filtration(const DissimilarityMatrix& D, int max_dim,
                               double r_max, std::size_t budget) {
  if (max_dim < 0) throw ConfigError("max_dim must be >= 0");
  if (max_dim + 2 > kMaxSimplexVertices)
    throw ConfigError("max_dim larger than supported simplex size");
  if (!(r_max > 0.0)) throw ConfigError("r_max must be > 0");
  const int n = D.size;
  if (n < 1) throw InputError("empty dissimilarity matrix");

  Filtration f;
  f.vertex_count = n;
  f.max_dim = max_dim;
  f.r_max = r_max;
  const int top_dim = max_dim + 1;

  // Thresholded adjacency, upward neighbors only.
  std::vector<std::vector<std::int32_t>> neighbors(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (D.at(i, j) <= r_max) neighbors[i].push_back(j);
    }
  }

  CliqueBuilder builder{D, neighbors, top_dim, budget, f.simplices};
  for (int i = 0; i < n; ++i) {
    FilteredSimplex vert;
    vert.value = 0.0;
    vert.dim = 0;
    vert.v[0] = i;
    builder.emit(vert);
    builder.expand(vert, neighbors[i]);
  }

  std::sort(f.simplices.begin(), f.simplices.end(), simplex_order_less);
  return f;
}

double default_r_max(const DissimilarityMatrix& D) {
  const int n = D.size;
  if (n < 2) throw InputError("default r_max needs at least two points");
  // Prim's algorithm on the dense matrix; track the largest tree edge.
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<char> in_tree(n, 0);
  best[0] = 0.0;
  double max_edge = 0.0;
  for (int it = 0; it < n; ++it) {
    int u = -1;
    for (int i = 0; i < n; ++i) {
      if (!in_tree[i] && (u < 0 || best[i] < best[u])) u = i;
    }
    in_tree[u] = 1;
    max_edge = std::max(max_edge, best[u]);
    for (int w = 0; w < n; ++w) {
      if (!in_tree[w]) best[w] = std::min(best[w], D.at(u, w));
    }
  }
  return 1.5 * max_edge;
}

}  // namespace trajtopo
