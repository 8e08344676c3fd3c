#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "trajtopo/observation.hpp"

namespace trajtopo {

// Full matching-substring distance curve for one series pair: for every run
// length L in 1..n, the smallest eps such that the two series contain equal
// offsets-free contiguous runs of length L whose stepwise Euclidean
// distances are all <= eps. Monotone nondecreasing in L.
struct MatchProfile {
  std::vector<double> eps; // eps[L-1] = minimal sup distance at run length L

  int length() const { return static_cast<int>(eps.size()); }
  // 1-based by run length.
  double min_eps(int run_length) const;
};

// Sorted-activation run-merging computation of the match profile:
// activate cells of the pairwise distance matrix in ascending value order,
// maintain maximal diagonal runs of active cells with endpoint bookkeeping,
// record the activation value whenever a run of a given length first forms,
// then take suffix minima so eps is monotone in L. O(n^2 log n) time,
// O(n^2) space.
MatchProfile match_profile(const ObservationSeries& a,
                           const ObservationSeries& b);

// Direct evaluation of the defining min-max over all (offset_a, offset_b,
// length) triples. O(n^3); guarded to n <= 200. Verification oracle.
MatchProfile match_profile_bruteforce(const ObservationSeries& a,
                                      const ObservationSeries& b);

// Distance at slack t: minimal eps admitting a common run of length n - t.
double slack_distance(const MatchProfile& profile, int t);

struct DissimilarityMatrix {
  int size = 0;          // N
  int slack = 0;         // t
  int series_length = 0; // n
  std::vector<double> entries; // N*N row-major, symmetric, zero diagonal

  double at(int i, int j) const {
    return entries[static_cast<std::size_t>(i) * size + j];
  }
  double& at(int i, int j) {
    return entries[static_cast<std::size_t>(i) * size + j];
  }

  // N rows of N comma-separated values, no header.
  void write_csv(std::ostream& os) const;
};

// Upper-triangle match profiles for a series collection; profiles do not
// depend on the slack, so sweeps over t reuse them.
struct PairProfiles {
  int size = 0;          // N
  int series_length = 0; // n
  std::vector<MatchProfile> upper; // pair (i, j), i < j, row-major

  const MatchProfile& profile(int i, int j) const;
};

PairProfiles compute_profiles(const std::vector<ObservationSeries>& series,
                              int threads = 1);

DissimilarityMatrix matrix_at_slack(const PairProfiles& profiles, int t);

// Pairwise slack distances at slack t; each unordered pair computed once.
DissimilarityMatrix dissimilarity_matrix(
    const std::vector<ObservationSeries>& series, int t, int threads = 1);

}  // namespace trajtopo
