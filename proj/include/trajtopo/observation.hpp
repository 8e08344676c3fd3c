#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "trajtopo/dynamics.hpp"

namespace trajtopo {

enum class ObservationKind { Identity, RandomLinear, RandomPoly3 };

std::string to_string(ObservationKind kind);
ObservationKind observation_kind_from_string(const std::string& name);

// Affine pre-transform applied to ambient states before polynomial
// observation; fit from the experiment's state bounding box so that cubed
// coordinates stay O(1).
struct StateStandardization {
  std::array<double, 3> center{0.0, 0.0, 0.0};
  std::array<double, 3> scale{1.0, 1.0, 1.0};
  StateVec apply(const StateVec& x) const {
    return {(x[0] - center[0]) / scale[0], (x[1] - center[1]) / scale[1],
            (x[2] - center[2]) / scale[2]};
  }
};

StateStandardization fit_standardization(
    const std::vector<StateTrajectory>& trajectories);

struct ObservationSpec {
  ObservationKind kind = ObservationKind::Identity;
  std::uint64_t seed = 0;       // coefficient draws
  double noise_sigma = 0.0;     // additive Gaussian noise on observed values
  std::uint64_t noise_seed = 0;
  StateStandardization standardization; // used by RandomPoly3 only

  int output_dim() const {
    return kind == ObservationKind::Identity ? 3 : 1;
  }
};

// One trajectory's observed values: length-n sequence of R^d vectors,
// stored row-major.
struct ObservationSeries {
  int dim = 0;
  std::vector<double> data; // n * dim
  int source_index = -1;

  int length() const {
    return dim == 0 ? 0 : static_cast<int>(data.size()) / dim;
  }
  const double* step(int i) const { return data.data() + static_cast<std::size_t>(i) * dim; }
  double* step(int i) { return data.data() + static_cast<std::size_t>(i) * dim; }
};

// Number of monomials x^a y^b z^c with a+b+c <= 3.
inline constexpr int kPoly3Terms = 20;

// Realized observation function g: R^3 -> R^d with coefficients drawn once
// from the spec's seed.
class Observer {
 public:
  explicit Observer(const ObservationSpec& spec);

  // Forced-coefficient constructors for tests.
  static Observer linear(const std::array<double, 3>& coeffs);
  static Observer poly3(const std::array<double, kPoly3Terms>& coeffs,
                        const StateStandardization& std = {});

  const ObservationSpec& spec() const { return spec_; }
  int output_dim() const { return spec_.output_dim(); }

  // Observe a single ambient state.
  void apply(const StateVec& x, double* out) const;

  // Observe a whole trajectory; trajectory index feeds the per-trajectory
  // noise stream and is recorded in the series metadata.
  ObservationSeries observe(const StateTrajectory& traj, int traj_index) const;

 private:
  Observer() = default;
  ObservationSpec spec_;
  std::array<double, 3> linear_{0.0, 0.0, 0.0};
  std::array<double, kPoly3Terms> poly_{};
};

}  // namespace trajtopo
