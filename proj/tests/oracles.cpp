#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>

namespace oracles {

using trajtopo::FilteredSimplex;
using trajtopo::Filtration;
using trajtopo::PersistencePair;

namespace {

std::vector<int> simplex_key(const FilteredSimplex& s) {
  std::vector<int> key(s.v.begin(), s.v.begin() + s.vertex_count());
  return key;
}

// Facet columns via map lookup of each vertex-deleted subset.
std::vector<std::size_t> boundary_of(
    const FilteredSimplex& s,
    const std::map<std::vector<int>, std::size_t>& index_of) {
  std::vector<std::size_t> col;
  if (s.dim == 0) return col;
  std::vector<int> key = simplex_key(s);
  for (int drop = 0; drop < s.vertex_count(); ++drop) {
    std::vector<int> face;
    for (int i = 0; i < s.vertex_count(); ++i)
      if (i != drop) face.push_back(key[i]);
    auto it = index_of.find(face);
    if (it == index_of.end()) throw std::logic_error("missing face in filtration");
    col.push_back(it->second);
  }
  std::sort(col.begin(), col.end());
  return col;
}

// Symmetric difference of two sorted index lists (GF(2) column addition).
std::vector<std::size_t> add_columns(const std::vector<std::size_t>& a,
                                     const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(out));
  return out;
}

}  // namespace

std::vector<PersistencePair> reduce_plain(const Filtration& filt) {
  const auto& sx = filt.simplices;
  std::size_t m = sx.size();

  std::map<std::vector<int>, std::size_t> index_of;
  for (std::size_t i = 0; i < m; ++i) index_of[simplex_key(sx[i])] = i;

  std::vector<std::vector<std::size_t>> cols(m);
  std::vector<std::size_t> pivot_owner(m, m);  // row -> column with that low
  std::vector<char> is_destroyer(m, 0);
  std::vector<std::size_t> killed_by(m, m);

  for (std::size_t j = 0; j < m; ++j) {
    cols[j] = boundary_of(sx[j], index_of);
    while (!cols[j].empty() && pivot_owner[cols[j].back()] != m)
      cols[j] = add_columns(cols[j], cols[pivot_owner[cols[j].back()]]);
    if (!cols[j].empty()) {
      std::size_t low = cols[j].back();
      pivot_owner[low] = j;
      is_destroyer[j] = 1;
      killed_by[low] = j;
    }
  }

  std::vector<PersistencePair> pairs;
  for (std::size_t i = 0; i < m; ++i) {
    if (is_destroyer[i]) continue;  // creators only
    PersistencePair p;
    p.dim = sx[i].dim;
    p.birth = sx[i].value;
    if (killed_by[i] != m) {
      p.death = sx[killed_by[i]].value;
      if (p.death == p.birth) continue;
    } else if (sx[i].dim > filt.max_dim) {
      continue;  // truncation artifact above the requested range
    }
    pairs.push_back(p);
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  });
  return pairs;
}

namespace {

// Kuhn's augmenting-path matching on the standard bottleneck graph: each
// side holds the real bars of one diagram plus one diagonal slot per bar of
// the other; edges are costs <= thr.
bool feasible(const std::vector<std::array<double, 2>>& A,
              const std::vector<std::array<double, 2>>& B, double thr) {
  std::size_t na = A.size(), nb = B.size();
  std::size_t total = na + nb;  // left: A bars then diag copies for B
  auto diag = [](const std::array<double, 2>& p) {
    return (p[1] - p[0]) / 2.0;
  };
  auto cost = [&](std::size_t l, std::size_t r) {
    bool lreal = l < na, rreal = r < nb;
    if (lreal && rreal)
      return std::max(std::abs(A[l][0] - B[r][0]), std::abs(A[l][1] - B[r][1]));
    if (lreal) return diag(A[l]);     // A bar to its diagonal
    if (rreal) return diag(B[r]);     // B bar to its diagonal
    return 0.0;                       // diagonal to diagonal
  };

  std::vector<std::size_t> match_r(total, total);
  std::vector<char> used;
  std::function<bool(std::size_t)> try_l = [&](std::size_t l) -> bool {
    for (std::size_t r = 0; r < total; ++r) {
      if (used[r] || cost(l, r) > thr) continue;
      used[r] = 1;
      if (match_r[r] == total || try_l(match_r[r])) {
        match_r[r] = l;
        return true;
      }
    }
    return false;
  };
  for (std::size_t l = 0; l < total; ++l) {
    used.assign(total, 0);
    if (!try_l(l)) return false;
  }
  return true;
}

}  // namespace

double bottleneck_finite(const std::vector<PersistencePair>& a,
                         const std::vector<PersistencePair>& b) {
  std::vector<std::array<double, 2>> A, B;
  for (const auto& p : a)
    if (!p.infinite()) A.push_back({p.birth, p.death});
  for (const auto& p : b)
    if (!p.infinite()) B.push_back({p.birth, p.death});

  std::vector<double> cand{0.0};
  for (const auto& p : A) cand.push_back((p[1] - p[0]) / 2.0);
  for (const auto& p : B) cand.push_back((p[1] - p[0]) / 2.0);
  for (const auto& p : A)
    for (const auto& q : B)
      cand.push_back(std::max(std::abs(p[0] - q[0]), std::abs(p[1] - q[1])));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());

  std::size_t lo = 0, hi = cand.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (feasible(A, B, cand[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return cand[lo];
}

std::array<double, 2> torus_gradient_fd(const trajtopo::TorusField& field,
                                        double theta, double phi) {
  auto f = [&](double th, double ph) {
    double acc = 0.0;
    int k = field.degree;
    for (int i = 0; i <= k; ++i) {
      for (int j = 0; j <= k; ++j) {
        int idx = i * (k + 1) + j;
        acc += field.amplitude[idx] *
               std::cos((i + 1) * th + field.phase_theta[idx]) *
               std::cos((j + 1) * ph + field.phase_phi[idx]);
      }
    }
    return acc;
  };
  const double h = 1e-6;
  double ft = (f(theta + h, phi) - f(theta - h, phi)) / (2.0 * h);
  double fp = (f(theta, phi + h) - f(theta, phi - h)) / (2.0 * h);
  double w = trajtopo::kTorusMajorRadius +
             trajtopo::kTorusMinorRadius * std::cos(phi);
  return {ft / (w * w),
          fp / (trajtopo::kTorusMinorRadius * trajtopo::kTorusMinorRadius)};
}

}  // namespace oracles
