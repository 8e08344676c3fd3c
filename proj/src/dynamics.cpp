#include "trajtopo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "trajtopo/errors.hpp"
#include "trajtopo/rng.hpp"

namespace trajtopo {

std::string to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::SphereHeightGradient: return "sphere";
    case SystemKind::TorusFourierGradient: return "torus";
    case SystemKind::Lorenz: return "lorenz";
  }
  throw ConfigError("unknown system kind");
}

SystemKind system_kind_from_string(const std::string& name) {
  if (name == "sphere") return SystemKind::SphereHeightGradient;
  if (name == "torus") return SystemKind::TorusFourierGradient;
  if (name == "lorenz") return SystemKind::Lorenz;
  throw ConfigError("unknown system kind: " + name);
}

TorusField TorusField::random(int degree, std::uint64_t seed) {
  if (degree < 0) throw ConfigError("torus Fourier degree must be >= 0");
  TorusField f;
  f.degree = degree;
  int m = (degree + 1) * (degree + 1);
  f.amplitude.resize(m);
  f.phase_theta.resize(m);
  f.phase_phi.resize(m);
  Rng rng(seed);
  for (int i = 0; i < m; ++i) f.amplitude[i] = rng.gauss();
  for (int i = 0; i < m; ++i) f.phase_theta[i] = rng.uniform(0.0, 2.0 * M_PI);
  for (int i = 0; i < m; ++i) f.phase_phi[i] = rng.uniform(0.0, 2.0 * M_PI);
  return f;
}

double TorusField::potential(double theta, double phi) const {
  double f = 0.0;
  int k = degree;
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j <= k; ++j) {
      int idx = i * (k + 1) + j;
      f += amplitude[idx] * std::cos((i + 1) * theta + phase_theta[idx]) *
           std::cos((j + 1) * phi + phase_phi[idx]);
    }
  }
  return f;
}

std::array<double, 2> TorusField::chart_derivatives(double theta,
                                                    double phi) const {
  double ft = 0.0, fp = 0.0;
  int k = degree;
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j <= k; ++j) {
      int idx = i * (k + 1) + j;
      double ct = std::cos((i + 1) * theta + phase_theta[idx]);
      double st = std::sin((i + 1) * theta + phase_theta[idx]);
      double cp = std::cos((j + 1) * phi + phase_phi[idx]);
      double sp = std::sin((j + 1) * phi + phase_phi[idx]);
      ft += amplitude[idx] * -(i + 1) * st * cp;
      fp += amplitude[idx] * ct * -(j + 1) * sp;
    }
  }
  return {ft, fp};
}

std::vector<double> SamplingSpec::times() const {
  validate();
  std::vector<double> ts(n);
  double d = step();
  double center = (n - 1) / 2.0;
  // Centered form keeps the middle sample of an odd-length window at
  // exactly t = 0, where the integration anchors.
  for (int i = 0; i < n; ++i) ts[i] = (i - center) * d;
  return ts;
}

void SamplingSpec::validate() const {
  if (n < 2) throw ConfigError("sampling requires n >= 2");
  if (!(half_window > 0.0)) throw ConfigError("sampling half-window T must be > 0");
  if (substeps < 1) throw ConfigError("sampling substeps must be >= 1");
}

System::System(const SystemSpec& spec) : spec_(spec) {
  if (spec_.kind == SystemKind::TorusFourierGradient) {
    field_ = TorusField::random(spec_.fourier_degree, spec_.field_seed);
  }
}

int System::chart_dim() const {
  return spec_.kind == SystemKind::Lorenz ? 3 : 2;
}

const TorusField& System::torus_field() const {
  if (spec_.kind != SystemKind::TorusFourierGradient)
    throw ConfigError("torus field requested for a non-torus system");
  return field_;
}

StateVec System::vector_field(const StateVec& x) const {
  switch (spec_.kind) {
    case SystemKind::SphereHeightGradient: {
      // Chart (u, v): u polar angle from the north pole, v azimuth.
      // Height h = cos u, metric du^2 + sin^2(u) dv^2, so grad h = (-sin u, 0):
      // ascent flows along meridians toward the north pole.
      return {-std::sin(x[0]), 0.0, 0.0};
    }
    case SystemKind::TorusFourierGradient: {
      // Metric from the embedding: (R + r cos phi)^2 dtheta^2 + r^2 dphi^2.
      auto d = field_.chart_derivatives(x[0], x[1]);
      double w = kTorusMajorRadius + kTorusMinorRadius * std::cos(x[1]);
      return {d[0] / (w * w),
              d[1] / (kTorusMinorRadius * kTorusMinorRadius), 0.0};
    }
    case SystemKind::Lorenz: {
      const auto& p = spec_.lorenz;
      return {p.sigma * (x[1] - x[0]),
              x[0] * (p.rho - x[2]) - x[1],
              x[0] * x[1] - p.beta * x[2]};
    }
  }
  throw ConfigError("unknown system kind");
}

StateVec System::embed(const StateVec& x) const {
  switch (spec_.kind) {
    case SystemKind::SphereHeightGradient: {
      double su = std::sin(x[0]), cu = std::cos(x[0]);
      return {su * std::cos(x[1]), su * std::sin(x[1]), cu};
    }
    case SystemKind::TorusFourierGradient: {
      double w = kTorusMajorRadius + kTorusMinorRadius * std::cos(x[1]);
      return {w * std::cos(x[0]), w * std::sin(x[0]),
              kTorusMinorRadius * std::sin(x[1])};
    }
    case SystemKind::Lorenz:
      return x;
  }
  throw ConfigError("unknown system kind");
}

namespace {

StateVec axpy(const StateVec& x, double a, const StateVec& y) {
  return {x[0] + a * y[0], x[1] + a * y[1], x[2] + a * y[2]};
}

StateVec rk4_step(const System& sys, const StateVec& x, double h) {
  StateVec k1 = sys.vector_field(x);
  StateVec k2 = sys.vector_field(axpy(x, 0.5 * h, k1));
  StateVec k3 = sys.vector_field(axpy(x, 0.5 * h, k2));
  StateVec k4 = sys.vector_field(axpy(x, h, k3));
  StateVec out;
  for (int i = 0; i < 3; ++i)
    out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

bool finite(const StateVec& x) {
  return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]);
}

// Fixed default seed point for the Lorenz long run. Any on-attractor point
// works topologically; this one was picked so that the segment clouds of the
// stock sampling presets sit well away from degenerate foldovers.
constexpr StateVec kLorenzDefaultStart{3.577, 2.932, 22.540};

}  // namespace

// Advance from `x` over a signed interval `dt` using `steps` equal RK4 steps.
StateVec advance(const System& sys, StateVec x, double dt, int steps,
                 double t_start) {
  double h = dt / steps;
  for (int i = 0; i < steps; ++i) {
    x = rk4_step(sys, x, h);
    if (!finite(x)) {
      char buf[96];
      std::snprintf(buf, sizeof buf,
                    "integration blew up near t=%.6g", t_start + (i + 1) * h);
      throw IntegrationError(buf, t_start + (i + 1) * h);
    }
  }
  return x;
}

StateTrajectory integrate(const System& sys, const StateVec& x0,
                          const SamplingSpec& sampling) {
  sampling.validate();
  std::vector<double> ts = sampling.times();
  int n = sampling.n;
  std::vector<StateVec> chart(n);

  // x0 is the state at time 0, the window midpoint. March backward to the
  // earliest sample and forward to the latest; each leg between consecutive
  // sample times gets `substeps` internal RK4 steps.
  int mid = 0;
  while (mid + 1 < n && ts[mid + 1] <= 0.0) ++mid;
  StateVec cur = advance(sys, x0, ts[mid], sampling.substeps, 0.0);
  chart[mid] = cur;
  for (int i = mid - 1; i >= 0; --i) {
    cur = advance(sys, cur, ts[i] - ts[i + 1], sampling.substeps, ts[i + 1]);
    chart[i] = cur;
  }
  cur = chart[mid];
  for (int i = mid + 1; i < n; ++i) {
    cur = advance(sys, cur, ts[i] - ts[i - 1], sampling.substeps, ts[i - 1]);
    chart[i] = cur;
  }

  StateTrajectory traj;
  traj.times = std::move(ts);
  traj.states.resize(n);
  for (int i = 0; i < n; ++i) traj.states[i] = sys.embed(chart[i]);
  return traj;
}

std::vector<StateVec> sample_initial_conditions(const System& sys,
                                                const SamplingSpec& sampling,
                                                int count,
                                                std::uint64_t seed) {
  if (count < 1) throw ConfigError("initial condition count must be >= 1");
  sampling.validate();
  std::vector<StateVec> out;
  out.reserve(count);
  Rng rng(seed);

  switch (sys.spec().kind) {
    case SystemKind::SphereHeightGradient: {
      // Area-correct: cos(polar angle) uniform on [-1, 1].
      for (int i = 0; i < count; ++i) {
        double cu = rng.uniform(-1.0, 1.0);
        double v = rng.uniform(0.0, 2.0 * M_PI);
        out.push_back({std::acos(cu), v, 0.0});
      }
      break;
    }
    case SystemKind::TorusFourierGradient: {
      for (int i = 0; i < count; ++i) {
        double theta = rng.uniform(0.0, 2.0 * M_PI);
        double phi = rng.uniform(0.0, 2.0 * M_PI);
        out.push_back({theta, phi, 0.0});
      }
      break;
    }
    case SystemKind::Lorenz: {
      // One long run split into `count` segments of length 2T each, always
      // from the same fixed on-attractor point, so the segment cloud is a
      // deterministic function of the sampling spec alone. Returned states
      // are segment midpoints, so that windows integrated around them tile
      // the long run as consecutive segments.
      StateVec x = kLorenzDefaultStart;
      double h = sampling.step() / sampling.substeps;
      const double transient = 10.0;
      int burn = static_cast<int>(std::ceil(transient / h));
      x = advance(sys, x, burn * h, burn, -transient);
      double half = sampling.half_window;
      int half_steps = std::max(1, static_cast<int>(std::llround(half / h)));
      for (int i = 0; i < count; ++i) {
        x = advance(sys, x, half, half_steps, 2.0 * i * half);
        out.push_back(x);
        x = advance(sys, x, half, half_steps, (2.0 * i + 1.0) * half);
      }
      break;
    }
  }
  return out;
}

}  // namespace trajtopo
