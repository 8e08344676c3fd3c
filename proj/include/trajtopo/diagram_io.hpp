#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "trajtopo/persistence.hpp"
#include "trajtopo/slack.hpp"

namespace trajtopo {

// Provenance recorded into every exported artifact.
struct RunMeta {
  std::string experiment;
  std::string system;
  int N = 0;
  int n = 0;
  int t = 0;
  std::uint64_t seed = 0;
  double r_max = 0.0;
};

// {"meta": {...}, "pairs": [{"dim", "birth", "death"}]}, death null = infinite.
void write_diagram_json(std::ostream& os, const PersistenceDiagram& diagram,
                        const RunMeta& meta);

// Header `dim,birth,death`; death printed as `inf` for infinite bars.
void write_diagram_csv(std::ostream& os, const PersistenceDiagram& diagram);

// Square birth/death axes with a diagonal reference line, one marker shape
// per dimension, infinite bars on a top band, legend included.
void write_diagram_svg(std::ostream& os, const PersistenceDiagram& diagram,
                       const RunMeta& meta);

// Matrix with metadata wrapper: {"N", "n", "t", "system", "seed", "matrix"}.
void write_matrix_json(std::ostream& os, const DissimilarityMatrix& m,
                       const RunMeta& meta);

}  // namespace trajtopo
