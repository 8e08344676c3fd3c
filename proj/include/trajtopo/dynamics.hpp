#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace trajtopo {

// Chart/ambient state. Sphere and torus use the first two components
// (intrinsic angles); Lorenz and all ambient states use three.
using StateVec = std::array<double, 3>;

enum class SystemKind { SphereHeightGradient, TorusFourierGradient, Lorenz };

std::string to_string(SystemKind kind);
SystemKind system_kind_from_string(const std::string& name);

struct LorenzParams {
  double sigma = 10.0;
  double rho = 28.0;
  double beta = 8.0 / 3.0;
};

struct SystemSpec {
  SystemKind kind = SystemKind::Lorenz;
  LorenzParams lorenz;
  int fourier_degree = 2;       // torus potential degree k
  std::uint64_t field_seed = 0; // torus Fourier coefficient seed
};

// Random trigonometric potential on the torus chart (theta, phi):
//   f = sum_{i,j<=k} a_ij cos((i+1)theta + p_ij) cos((j+1)phi + q_ij)
// with standard normal amplitudes and uniform phases.
struct TorusField {
  int degree = 2;
  std::vector<double> amplitude;    // (k+1)^2, row-major
  std::vector<double> phase_theta;
  std::vector<double> phase_phi;

  static TorusField random(int degree, std::uint64_t seed);
  double potential(double theta, double phi) const;
  // (df/dtheta, df/dphi) in chart coordinates.
  std::array<double, 2> chart_derivatives(double theta, double phi) const;
};

// Torus embedding radii. 2:1 keeps the surface free of self-intersections.
inline constexpr double kTorusMajorRadius = 2.0;
inline constexpr double kTorusMinorRadius = 1.0;

struct SamplingSpec {
  int n = 25;                // samples per trajectory, >= 2
  double half_window = 0.25; // T: samples cover [-T, T]
  int substeps = 10;         // internal RK4 steps per sample interval

  // Uniform sample interval; for odd n = 2k+1 this is T/k.
  double step() const { return 2.0 * half_window / (n - 1); }
  std::vector<double> times() const;
  void validate() const;
};

struct StateTrajectory {
  std::vector<StateVec> states; // ambient R^3 coordinates
  std::vector<double> times;
  int length() const { return static_cast<int>(states.size()); }
};

// A realized system: vector field in intrinsic chart coordinates plus the
// chart -> ambient embedding. Torus Fourier coefficients are drawn once at
// construction from the spec's field seed.
class System {
 public:
  explicit System(const SystemSpec& spec);

  const SystemSpec& spec() const { return spec_; }
  int chart_dim() const;

  // Time derivative at a chart point. Sphere/torus flows are Riemannian
  // gradients (ascent) of the height / Fourier potential in the metric
  // induced by the standard embedding.
  StateVec vector_field(const StateVec& x) const;

  // Chart point -> ambient R^3.
  StateVec embed(const StateVec& x) const;

  const TorusField& torus_field() const;

 private:
  SystemSpec spec_;
  TorusField field_; // torus only
};

// `steps` classical RK4 steps covering `dt` of flow time (dt may be
// negative); `t_start` is only used to label blowup errors.
StateVec advance(const System& sys, StateVec x, double dt, int steps,
                 double t_start);

// Fixed-step classical RK4 over the sampling grid: x0 is the state at time
// zero, the midpoint of the window, which covers [-T, T] of flow time.
// Throws IntegrationError if the state leaves the finite range.
StateTrajectory integrate(const System& sys, const StateVec& x0,
                          const SamplingSpec& sampling);

// Initial conditions for `count` trajectories, given as window midpoints.
// Sphere: area-uniform draws; torus: uniform on the (theta, phi) chart;
// Lorenz: midpoint states of `count` consecutive segments of one long
// attractor run started from a fixed default point (the sampling spec fixes
// the segment length 2T and the integrator step), after discarding a
// 10 time-unit transient. The seed only affects the sphere/torus draws.
std::vector<StateVec> sample_initial_conditions(const System& sys,
                                                const SamplingSpec& sampling,
                                                int count, std::uint64_t seed);

}  // namespace trajtopo
