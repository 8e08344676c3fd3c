#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <vector>

#include "oracles.hpp"
#include "trajtopo/errors.hpp"
#include "trajtopo/filtration.hpp"
#include "trajtopo/persistence.hpp"
#include "trajtopo/rng.hpp"

using namespace trajtopo;

namespace {

DissimilarityMatrix matrix_from(int n, const std::vector<double>& upper) {
  DissimilarityMatrix D;
  D.size = n;
  D.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
  std::size_t k = 0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) D.at(i, j) = D.at(j, i) = upper[k++];
  return D;
}

DissimilarityMatrix random_matrix(int n, Rng& rng, double lo = 0.05) {
  std::vector<double> upper;
  for (int i = 0; i < n * (n - 1) / 2; ++i) upper.push_back(lo + rng.uniform());
  return matrix_from(n, upper);
}

FilteredSimplex simplex(double value, std::initializer_list<int> vs) {
  FilteredSimplex s;
  s.value = value;
  s.dim = static_cast<std::int8_t>(vs.size() - 1);
  int i = 0;
  for (int v : vs) s.v[i++] = v;
  return s;
}

using Bar = std::tuple<int, double, double>;

std::vector<Bar> bars_of(const std::vector<PersistencePair>& pairs) {
  std::vector<Bar> out;
  for (const auto& p : pairs) out.emplace_back(p.dim, p.birth, p.death);
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Bar> bars_of(const PersistenceDiagram& d) {
  return bars_of(d.pairs);
}

DissimilarityMatrix circle_matrix(int n) {
  DissimilarityMatrix D;
  D.size = n;
  D.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double ang = M_PI * std::abs(i - j) / n;
      D.at(i, j) = 2.0 * std::sin(ang);
    }
  return D;
}

}  // namespace

TEST_CASE("triangle boundary carries a circle") {
  Filtration f;
  f.vertex_count = 3;
  f.max_dim = 1;
  f.r_max = 2.0;
  for (int i = 0; i < 3; ++i) f.simplices.push_back(simplex(0.0, {i}));
  f.simplices.push_back(simplex(1.0, {0, 1}));
  f.simplices.push_back(simplex(1.0, {0, 2}));
  f.simplices.push_back(simplex(1.0, {1, 2}));
  std::sort(f.simplices.begin(), f.simplices.end(), simplex_order_less);

  PersistenceDiagram d = compute_persistence(f);
  auto bars = bars_of(d);
  std::vector<Bar> expect{{0, 0.0, 1.0},
                          {0, 0.0, 1.0},
                          {0, 0.0, kInfiniteDeath},
                          {1, 1.0, kInfiniteDeath}};
  std::sort(expect.begin(), expect.end());
  CHECK(bars == expect);

  SUBCASE("filling the triangle closes the loop") {
    f.simplices.push_back(simplex(2.0, {0, 1, 2}));
    std::sort(f.simplices.begin(), f.simplices.end(), simplex_order_less);
    PersistenceDiagram filled = compute_persistence(f);
    bool found = false;
    for (const auto& p : filled.pairs)
      if (p.dim == 1) {
        CHECK(p.birth == doctest::Approx(1.0));
        CHECK(p.death == doctest::Approx(2.0));
        found = true;
      }
    CHECK(found);
  }
}

TEST_CASE("twenty points on a circle leave one dominant loop") {
  DissimilarityMatrix D = circle_matrix(20);
  Filtration f = build_vr_filtration(D, 2, 2.1);
  PersistenceDiagram d = compute_persistence(f);

  std::vector<double> h1;
  for (const auto& p : d.pairs)
    if (p.dim == 1 && !p.infinite()) h1.push_back(p.persistence());
  std::sort(h1.rbegin(), h1.rend());
  REQUIRE(h1.size() >= 1);
  if (h1.size() > 1) CHECK(h1[0] >= 5.0 * h1[1]);

  BettiSummary s = betti_summary(d, 0.3);
  REQUIRE(s.betti.size() == 3);
  CHECK(s.betti[0] == 1);
  CHECK(s.betti[1] == 1);
  CHECK(s.betti[2] == 0);

  // Same multiset from the plain no-clearing reduction.
  CHECK(bars_of(d) == bars_of(oracles::reduce_plain(f)));
}

TEST_CASE("clearing agrees with plain reduction on random filtrations") {
  Rng rng(501);
  for (int trial = 0; trial < 10; ++trial) {
    int n = 8 + static_cast<int>(rng.next_u64() % 10);
    DissimilarityMatrix D = random_matrix(n, rng);
    Filtration f = build_vr_filtration(D, 2, 0.8);
    PersistenceDiagram fast = compute_persistence(f);
    CHECK(bars_of(fast) == bars_of(oracles::reduce_plain(f)));
  }
}

TEST_CASE("vertex relabeling preserves the diagram multiset") {
  Rng rng(42);
  const int n = 12;
  // Coarse values force plenty of filtration ties.
  std::vector<double> upper;
  for (int i = 0; i < n * (n - 1) / 2; ++i)
    upper.push_back(0.1 * (1 + static_cast<int>(rng.next_u64() % 8)));
  DissimilarityMatrix D = matrix_from(n, upper);

  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  for (int i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.next_u64() % (i + 1)]);
  DissimilarityMatrix P;
  P.size = n;
  P.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) P.at(perm[i], perm[j]) = D.at(i, j);

  PersistenceDiagram a = compute_persistence(build_vr_filtration(D, 2, 0.7));
  PersistenceDiagram b = compute_persistence(build_vr_filtration(P, 2, 0.7));
  CHECK(bars_of(a) == bars_of(b));
}

TEST_CASE("euler characteristic balances creators and destroyers") {
  Rng rng(77);
  DissimilarityMatrix D = random_matrix(15, rng);
  Filtration f = build_vr_filtration(D, 2, 0.9);
  PersistenceDiagram d = compute_persistence(f);
  REQUIRE(d.simplex_counts.size() == d.unpaired_counts.size());
  long lhs = 0, rhs = 0;
  for (std::size_t k = 0; k < d.simplex_counts.size(); ++k) {
    long sign = (k % 2 == 0) ? 1 : -1;
    lhs += sign * static_cast<long>(d.simplex_counts[k]);
    rhs += sign * static_cast<long>(d.unpaired_counts[k]);
  }
  CHECK(lhs == rhs);
}

TEST_CASE("H0 starts with one bar per point") {
  Rng rng(7);
  const int n = 18;
  DissimilarityMatrix D = random_matrix(n, rng, 0.2);
  Filtration f = build_vr_filtration(D, 1, 2.0);
  PersistenceDiagram d = compute_persistence(f);
  int h0 = 0;
  for (const auto& p : d.pairs)
    if (p.dim == 0) {
      CHECK(p.birth == 0.0);
      ++h0;
    }
  CHECK(h0 == n);  // n - 1 merge deaths plus the surviving component
  CHECK(d.betti_at_infinity()[0] == 1);
}

TEST_CASE("small perturbations move diagrams by at most eta") {
  Rng rng(90);
  const double eta = 1e-3;
  for (int trial = 0; trial < 3; ++trial) {
    DissimilarityMatrix D = random_matrix(30, rng);
    DissimilarityMatrix E = D;
    for (int i = 0; i < 30; ++i)
      for (int j = i + 1; j < 30; ++j) {
        double bump = rng.uniform(-eta, eta);
        E.at(i, j) = E.at(j, i) = std::max(0.0, D.at(i, j) + bump);
      }
    // Complete complexes on both sides so no bar crosses the cutoff.
    double r_max = 0.0;
    for (double v : D.entries) r_max = std::max(r_max, v);
    r_max += 1.0;
    PersistenceDiagram a = compute_persistence(build_vr_filtration(D, 1, r_max));
    PersistenceDiagram b = compute_persistence(build_vr_filtration(E, 1, r_max));
    for (int dim = 0; dim <= 1; ++dim) {
      std::vector<PersistencePair> pa, pb;
      for (const auto& p : a.pairs)
        if (p.dim == dim) pa.push_back(p);
      for (const auto& p : b.pairs)
        if (p.dim == dim) pb.push_back(p);
      CHECK(oracles::bottleneck_finite(pa, pb) <= eta + 1e-12);
    }
  }
}

TEST_CASE("betti summary thresholds against the diagram scale") {
  PersistenceDiagram d;
  d.max_dim = 2;
  d.pairs.push_back({0, 0.0, kInfiniteDeath});
  BettiSummary only_inf = betti_summary(d, 0.3);
  CHECK(only_inf.betti == std::vector<int>{1, 0, 0});

  d.pairs.push_back({1, 0.1, 0.9});
  d.pairs.push_back({1, 0.4, 0.45});
  d.pairs.push_back({0, 0.0, 0.05});
  BettiSummary s = betti_summary(d, 0.3);
  CHECK(s.scale == doctest::Approx(0.9));
  CHECK(s.betti[1] == 1);  // 0.8 >= 0.27, 0.05 misses
  CHECK(s.rho == 0.3);
}

TEST_CASE("betti summary rejects bad inputs") {
  PersistenceDiagram empty;
  empty.max_dim = 2;
  CHECK_THROWS_AS(betti_summary(empty, 0.3), InputError);

  PersistenceDiagram d;
  d.max_dim = 1;
  d.pairs.push_back({0, 0.0, kInfiniteDeath});
  CHECK_THROWS_AS(betti_summary(d, 0.0), ConfigError);
  CHECK_THROWS_AS(betti_summary(d, 1.0), ConfigError);
}

TEST_CASE("non face-closed input is rejected") {
  Filtration f;
  f.vertex_count = 2;
  f.max_dim = 1;
  f.r_max = 1.0;
  f.simplices.push_back(simplex(0.5, {0, 1}));  // edge without its vertices
  CHECK_THROWS_AS(compute_persistence(f), InputError);
}
