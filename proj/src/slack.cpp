#include "trajtopo/slack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <thread>

#include "trajtopo/errors.hpp"

namespace trajtopo {

namespace {

void check_compatible(const ObservationSeries& a, const ObservationSeries& b) {
  if (a.dim != b.dim)
    throw InputError("series dimension mismatch in match profile");
  if (a.length() != b.length())
    throw InputError("series length mismatch in match profile");
  if (a.length() < 1) throw InputError("empty series in match profile");
}

// Pairwise per-step Euclidean distances, row-major n x n.
std::vector<double> step_distances(const ObservationSeries& a,
                                   const ObservationSeries& b) {
  int n = a.length();
  int d = a.dim;
  std::vector<double> dist(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i) {
    const double* pa = a.step(i);
    double* row = dist.data() + static_cast<std::size_t>(i) * n;
    for (int j = 0; j < n; ++j) {
      const double* pb = b.step(j);
      double s = 0.0;
      for (int c = 0; c < d; ++c) {
        double diff = pa[c] - pb[c];
        s += diff * diff;
      }
      row[j] = std::sqrt(s);
    }
  }
  return dist;
}

// Suffix minima: a run of length L+1 contains runs of length L, so the
// minimal eps at length L is the minimum of the recorded values at all
// lengths >= L.
MatchProfile monotonize(std::vector<double> raw) {
  for (int l = static_cast<int>(raw.size()) - 2; l >= 0; --l)
    raw[l] = std::min(raw[l], raw[l + 1]);
  MatchProfile p;
  p.eps = std::move(raw);
  return p;
}

}  // namespace

double MatchProfile::min_eps(int run_length) const {
  if (run_length < 1 || run_length > length())
    throw InputError("run length out of range in match profile");
  return eps[run_length - 1];
}

MatchProfile match_profile(const ObservationSeries& a,
                           const ObservationSeries& b) {
  check_compatible(a, b);
  const int n = a.length();
  const std::vector<double> dist = step_distances(a, b);

  // Cells sorted ascending by distance, ties by linear index (i, j).
  std::vector<int32_t> order(dist.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&dist](int32_t x, int32_t y) {
    if (dist[x] != dist[y]) return dist[x] < dist[y];
    return x < y;
  });

  // run_len[c] > 0 exactly when c is the endpoint of a maximal diagonal run
  // of active cells; interior cells may hold stale values but are never read
  // again (their diagonal neighbours are already active).
  std::vector<int32_t> run_len(dist.size(), 0);
  std::vector<double> raw(n, std::numeric_limits<double>::infinity());

  for (int32_t cell : order) {
    const int i = cell / n;
    const int j = cell % n;
    const int32_t up = (i > 0 && j > 0) ? run_len[cell - n - 1] : 0;
    const int32_t down = (i + 1 < n && j + 1 < n) ? run_len[cell + n + 1] : 0;
    const int32_t len = up + 1 + down;
    run_len[cell - static_cast<std::size_t>(up) * (n + 1)] = len;
    run_len[cell + static_cast<std::size_t>(down) * (n + 1)] = len;
    double v = dist[cell];
    if (v < raw[len - 1]) raw[len - 1] = v;
  }
  return monotonize(std::move(raw));
}

MatchProfile match_profile_bruteforce(const ObservationSeries& a,
                                      const ObservationSeries& b) {
  check_compatible(a, b);
  const int n = a.length();
  if (n > 200)
    throw InputError("brute-force match profile limited to n <= 200");
  const std::vector<double> dist = step_distances(a, b);

  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double running_max = 0.0;
      int span = std::min(n - i, n - j);
      for (int m = 0; m < span; ++m) {
        running_max = std::max(running_max,
                               dist[static_cast<std::size_t>(i + m) * n + j + m]);
        if (running_max < best[m]) best[m] = running_max;
      }
    }
  }
  MatchProfile p;
  p.eps = std::move(best);
  return p;
}

double slack_distance(const MatchProfile& profile, int t) {
  int n = profile.length();
  if (t < 0 || t > n - 1) throw InputError("slack t out of range [0, n-1]");
  return profile.min_eps(n - t);
}

void DissimilarityMatrix::write_csv(std::ostream& os) const {
  char buf[40];
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", at(i, j));
      if (j) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

const MatchProfile& PairProfiles::profile(int i, int j) const {
  if (i == j) throw InputError("diagonal has no pair profile");
  if (i > j) std::swap(i, j);
  // Row-major upper triangle: offset of row i is i*N - i*(i+1)/2.
  std::size_t off = static_cast<std::size_t>(i) * size -
                    static_cast<std::size_t>(i) * (i + 1) / 2;
  return upper[off + (j - i - 1)];
}

PairProfiles compute_profiles(const std::vector<ObservationSeries>& series,
                              int threads) {
  int n_series = static_cast<int>(series.size());
  if (n_series < 1) throw InputError("no series given");
  PairProfiles out;
  out.size = n_series;
  out.series_length = series[0].length();
  std::size_t pairs =
      static_cast<std::size_t>(n_series) * (n_series - 1) / 2;
  out.upper.resize(pairs);

  auto pair_at = [n_series](std::size_t k) {
    // Invert the row-major triangle offset.
    int i = 0;
    std::size_t row_end = static_cast<std::size_t>(n_series) - 1;
    while (k >= row_end) {
      k -= row_end;
      ++i;
      row_end = static_cast<std::size_t>(n_series) - 1 - i;
    }
    return std::pair<int, int>(i, i + 1 + static_cast<int>(k));
  };

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      auto [i, j] = pair_at(k);
      out.upper[k] = match_profile(series[i], series[j]);
    }
  };

  int nt = std::max(1, threads);
  if (nt == 1 || pairs < 64) {
    work(0, pairs);
  } else {
    std::vector<std::thread> pool;
    std::size_t chunk = (pairs + nt - 1) / nt;
    for (int w = 0; w < nt; ++w) {
      std::size_t b = std::min(pairs, w * chunk);
      std::size_t e = std::min(pairs, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return out;
}

DissimilarityMatrix matrix_at_slack(const PairProfiles& profiles, int t) {
  DissimilarityMatrix m;
  m.size = profiles.size;
  m.slack = t;
  m.series_length = profiles.series_length;
  m.entries.assign(static_cast<std::size_t>(m.size) * m.size, 0.0);
  for (int i = 0; i < m.size; ++i) {
    for (int j = i + 1; j < m.size; ++j) {
      double v = slack_distance(profiles.profile(i, j), t);
      m.at(i, j) = v;
      m.at(j, i) = v;
    }
  }
  return m;
}

DissimilarityMatrix dissimilarity_matrix(
    const std::vector<ObservationSeries>& series, int t, int threads) {
  PairProfiles profiles = compute_profiles(series, threads);
  return matrix_at_slack(profiles, t);
}

}  // namespace trajtopo
