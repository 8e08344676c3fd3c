#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trajtopo/diagram_io.hpp"
#include "trajtopo/dynamics.hpp"
#include "trajtopo/observation.hpp"
#include "trajtopo/persistence.hpp"
#include "trajtopo/slack.hpp"

namespace trajtopo {

// Artifact formats written by a run; the report JSON is always written.
enum class ArtifactFormat { Json = 1, Csv = 2, Svg = 4, All = 7 };

struct ExperimentConfig {
  std::string name = "custom";
  SystemSpec system;
  SamplingSpec sampling;
  ObservationKind observation = ObservationKind::Identity;
  double noise_sigma = 0.0;
  int n_trajectories = 100;
  int slack = 0;         // t
  double rho = 0.3;      // significance threshold
  int max_dim = 2;
  std::uint64_t seed = 1;
  std::optional<double> r_max;
  std::size_t simplex_budget = 50'000'000;
  int threads = 1;
  std::string output_dir; // empty: in-memory run, no artifacts
  int formats = static_cast<int>(ArtifactFormat::All);
  bool dump_filtration = false;
  // Expected significant-Betti signature per dimension; dimensions not
  // listed are unconstrained. Empty map: no signature declared.
  std::map<int, int> expected_betti;

  void validate() const;

  // Flat JSON document; unknown keys are rejected.
  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

struct StageTimings {
  double simulate_ms = 0.0;
  double observe_ms = 0.0;
  double distances_ms = 0.0;
  double filtration_ms = 0.0;
  double persistence_ms = 0.0;
  double total_ms = 0.0;
};

struct RunReport {
  ExperimentConfig config;
  StageTimings timings;
  std::size_t filtration_size = 0;
  double r_max_used = 0.0;
  PersistenceDiagram diagram;
  BettiSummary betti;
  bool signature_declared = false;
  bool signature_match = false;
  std::map<std::string, std::string> artifacts; // kind -> path

  std::string to_json_text() const;
};

// Full pipeline: simulate -> observe -> distances -> filtration ->
// persistence -> summary. Writes artifacts into config.output_dir when set;
// partially written artifacts are removed if a stage fails.
RunReport run_experiment(const ExperimentConfig& config);

// Fixed-slack slices over t: trajectories and match profiles are computed
// once and reused (profiles are slack-independent). Artifacts per t go to
// <output_dir>/t_<t>/.
std::vector<RunReport> sweep(const ExperimentConfig& config,
                             const std::vector<int>& t_values);

struct ReplicateReport {
  std::vector<std::uint64_t> seeds;
  int matches = 0;
  double fraction = 0.0;
  std::vector<RunReport> runs;
};

// Per-seed runs; reports the fraction whose significant Betti numbers match
// the declared expected signature. Artifacts per seed go to
// <output_dir>/seed_<seed>/.
ReplicateReport replicate(const ExperimentConfig& config,
                          const std::vector<std::uint64_t>& seeds);

bool signature_matches(const BettiSummary& summary,
                       const std::map<int, int>& expected);

struct Preset {
  std::string name;
  std::string description;
  int paper_n_trajectories = 0; // figure-scale N
  int desk_n_trajectories = 0;  // suggested fast-run N
  ExperimentConfig config;      // paper scale
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

// Lower-level stages shared by the CLI subcommands.
struct SimulationResult {
  std::vector<StateTrajectory> trajectories;
};
SimulationResult simulate_stage(const ExperimentConfig& config);
std::vector<ObservationSeries> observe_stage(
    const ExperimentConfig& config,
    const std::vector<StateTrajectory>& trajectories);

RunMeta make_meta(const ExperimentConfig& config, double r_max);

}  // namespace trajtopo
