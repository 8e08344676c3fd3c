#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "trajtopo/filtration.hpp"

namespace trajtopo {

inline constexpr double kInfiniteDeath =
    std::numeric_limits<double>::infinity();

struct PersistencePair {
  int dim = 0;
  double birth = 0.0;
  double death = kInfiniteDeath;

  bool infinite() const { return death == kInfiniteDeath; }
  double persistence() const { return death - birth; }
};

struct PersistenceDiagram {
  int max_dim = 0;
  double r_max = 0.0;
  // Zero-persistence pairs dropped; sorted by (dim, birth, death).
  std::vector<PersistencePair> pairs;

  // Reduction bookkeeping over all built dimensions (0 .. max_dim + 1),
  // kept for Euler-characteristic consistency checks: every simplex is
  // either a creator (paired birth, zero-length or not, or unpaired) or a
  // destroyer.
  std::vector<std::size_t> simplex_counts;  // per dimension
  std::vector<std::size_t> unpaired_counts; // per dimension

  std::vector<int> betti_at_infinity() const; // infinite bars per dim
};

// Boundary-matrix column reduction over the two-element field with the
// clearing (twist) optimization: dimensions processed top-down, and the
// pivot row of every reduced column is cleared before its own dimension is
// visited. Infinite bars above max_dim are truncation artifacts and are not
// reported as pairs (they still show up in unpaired_counts).
PersistenceDiagram compute_persistence(const Filtration& filt);

struct BettiSummary {
  std::vector<int> betti; // significant bars per dimension, 0..max_dim
  double rho = 0.0;       // threshold rule: persistence >= rho * scale
  double scale = 0.0;     // max finite death in the diagram
};

// A bar is significant iff it is infinite or its persistence is at least
// rho times the largest finite death in the diagram.
BettiSummary betti_summary(const PersistenceDiagram& diagram,
                           double rho = 0.3);

}  // namespace trajtopo
