#include "trajtopo/persistence.hpp"

#include <algorithm>
#include <cstdint>

#include "trajtopo/errors.hpp"

namespace trajtopo {

namespace {

// Vertex sets packed 16 bits per vertex (ascending), which caps the vertex
// count at 65536; desk-scale N is a few hundred. Facet lookups then binary
// search a contiguous per-dimension (key, position) table instead of
// chasing simplex records through an index indirection.
using PackedVerts = std::uint64_t;

PackedVerts pack_verts(const std::int32_t* v, int count) {
  PackedVerts key = 0;
  for (int i = 0; i < count; ++i)
    key = (key << 16) | static_cast<PackedVerts>(v[i]);
  return key;
}

struct DimTable {
  std::vector<std::pair<PackedVerts, std::int32_t>> entries; // sorted by key

  std::int32_t find(PackedVerts key) const {
    auto it = std::lower_bound(
        entries.begin(), entries.end(), key,
        [](const std::pair<PackedVerts, std::int32_t>& e, PackedVerts k) {
          return e.first < k;
        });
    if (it == entries.end() || it->first != key)
      throw InputError("filtration is not face-closed");
    return it->second;
  }
};

// Append-only storage for reduced columns; avoids one heap allocation per
// column (most columns in a Vietoris-Rips reduction stay short-lived).
struct ColumnPool {
  std::vector<std::int32_t> data;
  std::vector<std::pair<std::size_t, std::int32_t>> span; // offset, length

  explicit ColumnPool(std::size_t columns) : span(columns, {0, -1}) {}

  void store(std::int32_t j, const std::vector<std::int32_t>& col) {
    span[j] = {data.size(), static_cast<std::int32_t>(col.size())};
    data.insert(data.end(), col.begin(), col.end());
  }
  const std::int32_t* begin(std::int32_t j) const {
    return data.data() + span[j].first;
  }
  const std::int32_t* end(std::int32_t j) const {
    return begin(j) + span[j].second;
  }
};

}  // namespace

std::vector<int> PersistenceDiagram::betti_at_infinity() const {
  std::vector<int> b(max_dim + 1, 0);
  for (const auto& p : pairs) {
    if (p.infinite() && p.dim <= max_dim) ++b[p.dim];
  }
  return b;
}

PersistenceDiagram compute_persistence(const Filtration& filt) {
  const auto& S = filt.simplices;
  const std::size_t m = S.size();
  const int top_dim = filt.max_dim + 1;
  if (filt.vertex_count > 65536)
    throw ResourceError("persistence supports at most 65536 vertices");

  PersistenceDiagram diag;
  diag.max_dim = filt.max_dim;
  diag.r_max = filt.r_max;
  diag.simplex_counts.assign(top_dim + 1, 0);
  diag.unpaired_counts.assign(top_dim + 1, 0);

  std::vector<DimTable> tables(top_dim + 1);
  std::vector<std::vector<std::int32_t>> cols_by_dim(top_dim + 1);
  for (std::size_t j = 0; j < m; ++j) {
    int d = S[j].dim;
    if (d > top_dim) throw InputError("simplex above filtration top dimension");
    ++diag.simplex_counts[d];
    if (d >= 1) cols_by_dim[d].push_back(static_cast<std::int32_t>(j));
    if (d < top_dim)
      tables[d].entries.emplace_back(pack_verts(S[j].v.data(), d + 1),
                                     static_cast<std::int32_t>(j));
  }
  for (auto& t : tables)
    std::sort(t.entries.begin(), t.entries.end());

  // pivot_for_row[i] = index of the reduced column whose low is i.
  std::vector<std::int32_t> pivot_for_row(m, -1);
  std::vector<std::uint8_t> cleared(m, 0);
  std::vector<std::uint8_t> is_death(m, 0);
  ColumnPool pool(m);

  std::vector<std::int32_t> col, tmp;
  std::int32_t facet_verts[kMaxSimplexVertices];
  for (int d = top_dim; d >= 1; --d) {
    const DimTable& faces = tables[d - 1];
    for (std::int32_t j : cols_by_dim[d]) {
      if (cleared[j]) continue; // known positive: it is the pivot row of a
                                // reduced (d+1)-column
      col.clear();
      for (int drop = 0; drop <= d; ++drop) {
        int k = 0;
        for (int i = 0; i <= d; ++i) {
          if (i != drop) facet_verts[k++] = S[j].v[i];
        }
        col.push_back(faces.find(pack_verts(facet_verts, d)));
      }
      std::sort(col.begin(), col.end());
      while (!col.empty()) {
        std::int32_t low = col.back();
        std::int32_t p = pivot_for_row[low];
        if (p < 0) break;
        tmp.clear();
        std::set_symmetric_difference(col.begin(), col.end(), pool.begin(p),
                                      pool.end(p), std::back_inserter(tmp));
        col.swap(tmp);
      }
      if (!col.empty()) {
        std::int32_t low = col.back();
        pivot_for_row[low] = j;
        cleared[low] = 1;
        is_death[j] = 1;
        pool.store(j, col);
        if (S[low].value != S[j].value) {
          diag.pairs.push_back({S[low].dim, S[low].value, S[j].value});
        }
      }
    }
  }

  for (std::size_t i = 0; i < m; ++i) {
    if (is_death[i] || pivot_for_row[i] >= 0) continue;
    ++diag.unpaired_counts[S[i].dim];
    if (S[i].dim <= filt.max_dim)
      diag.pairs.push_back({S[i].dim, S[i].value, kInfiniteDeath});
  }

  std::sort(diag.pairs.begin(), diag.pairs.end(),
            [](const PersistencePair& a, const PersistencePair& b) {
              if (a.dim != b.dim) return a.dim < b.dim;
              if (a.birth != b.birth) return a.birth < b.birth;
              return a.death < b.death;
            });
  return diag;
}

BettiSummary betti_summary(const PersistenceDiagram& diagram, double rho) {
  if (diagram.pairs.empty())
    throw InputError("betti summary of an empty diagram");
  if (!(rho > 0.0 && rho < 1.0))
    throw ConfigError("significance rho must lie in (0, 1)");

  double scale = 0.0;
  for (const auto& p : diagram.pairs) {
    if (!p.infinite()) scale = std::max(scale, p.death);
  }

  BettiSummary s;
  s.rho = rho;
  s.scale = scale;
  s.betti.assign(diagram.max_dim + 1, 0);
  for (const auto& p : diagram.pairs) {
    if (p.dim > diagram.max_dim) continue;
    if (p.infinite() || p.persistence() >= rho * scale) ++s.betti[p.dim];
  }
  return s;
}

}  // namespace trajtopo
