#include "trajtopo/observation.hpp"

#include <cmath>

#include "trajtopo/errors.hpp"
#include "trajtopo/rng.hpp"

namespace trajtopo {

std::string to_string(ObservationKind kind) {
  switch (kind) {
    case ObservationKind::Identity: return "identity";
    case ObservationKind::RandomLinear: return "linear";
    case ObservationKind::RandomPoly3: return "poly3";
  }
  throw ConfigError("unknown observation kind");
}

ObservationKind observation_kind_from_string(const std::string& name) {
  if (name == "identity") return ObservationKind::Identity;
  if (name == "linear") return ObservationKind::RandomLinear;
  if (name == "poly3") return ObservationKind::RandomPoly3;
  throw ConfigError("unknown observation kind: " + name);
}

StateStandardization fit_standardization(
    const std::vector<StateTrajectory>& trajectories) {
  StateStandardization s;
  if (trajectories.empty()) return s;
  StateVec lo = trajectories[0].states.at(0);
  StateVec hi = lo;
  for (const auto& traj : trajectories) {
    for (const auto& x : traj.states) {
      for (int c = 0; c < 3; ++c) {
        lo[c] = std::min(lo[c], x[c]);
        hi[c] = std::max(hi[c], x[c]);
      }
    }
  }
  for (int c = 0; c < 3; ++c) {
    s.center[c] = 0.5 * (lo[c] + hi[c]);
    double half = 0.5 * (hi[c] - lo[c]);
    s.scale[c] = half > 0.0 ? half : 1.0;
  }
  return s;
}

Observer::Observer(const ObservationSpec& spec) : spec_(spec) {
  Rng rng(spec_.seed);
  switch (spec_.kind) {
    case ObservationKind::Identity:
      break;
    case ObservationKind::RandomLinear:
      for (auto& b : linear_) b = rng.gauss();
      break;
    case ObservationKind::RandomPoly3:
      for (auto& c : poly_) c = rng.gauss();
      break;
  }
}

Observer Observer::linear(const std::array<double, 3>& coeffs) {
  Observer o;
  o.spec_.kind = ObservationKind::RandomLinear;
  o.linear_ = coeffs;
  return o;
}

Observer Observer::poly3(const std::array<double, kPoly3Terms>& coeffs,
                         const StateStandardization& std) {
  Observer o;
  o.spec_.kind = ObservationKind::RandomPoly3;
  o.spec_.standardization = std;
  o.poly_ = coeffs;
  return o;
}

void Observer::apply(const StateVec& x, double* out) const {
  switch (spec_.kind) {
    case ObservationKind::Identity:
      out[0] = x[0];
      out[1] = x[1];
      out[2] = x[2];
      return;
    case ObservationKind::RandomLinear:
      out[0] = linear_[0] * x[0] + linear_[1] * x[1] + linear_[2] * x[2];
      return;
    case ObservationKind::RandomPoly3: {
      StateVec u = spec_.standardization.apply(x);
      // All monomials u^a v^b w^c with a+b+c <= 3, (a, b, c) lexicographic.
      double acc = 0.0;
      int idx = 0;
      double ua = 1.0;
      for (int a = 0; a <= 3; ++a) {
        double vb = 1.0;
        for (int b = 0; a + b <= 3; ++b) {
          double wc = 1.0;
          for (int c = 0; a + b + c <= 3; ++c) {
            acc += poly_[idx++] * ua * vb * wc;
            wc *= u[2];
          }
          vb *= u[1];
        }
        ua *= u[0];
      }
      out[0] = acc;
      return;
    }
  }
  throw ConfigError("unknown observation kind");
}

ObservationSeries Observer::observe(const StateTrajectory& traj,
                                    int traj_index) const {
  int n = traj.length();
  int d = output_dim();
  ObservationSeries series;
  series.dim = d;
  series.source_index = traj_index;
  series.data.resize(static_cast<std::size_t>(n) * d);
  for (int i = 0; i < n; ++i) apply(traj.states[i], series.step(i));
  if (spec_.noise_sigma > 0.0) {
    Rng noise(derive_seed(spec_.noise_seed, "observation-noise",
                          static_cast<std::uint64_t>(traj_index)));
    for (auto& v : series.data) v += spec_.noise_sigma * noise.gauss();
  }
  for (double v : series.data) {
    if (!std::isfinite(v)) throw InputError("non-finite observation value");
  }
  return series;
}

}  // namespace trajtopo
