#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "trajtopo/errors.hpp"
#include "trajtopo/pipeline.hpp"

namespace fs = std::filesystem;
using namespace trajtopo;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitSignature = 3;

struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::optional<std::uint64_t> seed;
  std::optional<int> slack;
  std::optional<double> r_max;
  std::optional<double> rho;
  std::optional<int> threads;
  std::optional<int> n_trajectories;
  std::optional<int> n_samples;
  std::optional<double> half_window;
  std::optional<double> noise_sigma;
  std::optional<int> max_dim;
  std::string out;
  std::string format = "all";
  bool dump_filtration = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  auto* cfg = cmd->add_option("--config", o.config_path,
                              "Experiment config JSON file");
  auto* pre = cmd->add_option("--preset", o.preset, "Named preset");
  cfg->excludes(pre);
  cmd->add_option("--seed", o.seed, "Master RNG seed");
  cmd->add_option("--slack,-t", o.slack, "Slack t (0 <= t <= n-1)");
  cmd->add_option("--r-max", o.r_max, "Filtration cutoff override");
  cmd->add_option("--rho", o.rho, "Significance threshold in (0,1)");
  cmd->add_option("--threads", o.threads,
                  "Worker threads (0 = hardware concurrency)");
  cmd->add_option("--n-trajectories,-N", o.n_trajectories,
                  "Trajectory count override");
  cmd->add_option("--n-samples,-n", o.n_samples, "Samples per trajectory");
  cmd->add_option("--half-window,-T", o.half_window,
                  "Sampling half window (samples cover [-T, T])");
  cmd->add_option("--noise", o.noise_sigma, "Observation noise sigma");
  cmd->add_option("--max-dim", o.max_dim, "Top homology dimension");
  cmd->add_option("--out", o.out, "Output directory for artifacts");
  cmd->add_option("--format", o.format, "Artifact formats")
      ->check(CLI::IsMember({"json", "csv", "svg", "all"}));
  cmd->add_flag("--dump-filtration", o.dump_filtration,
                "Also write the filtration as text");
}

int parse_format(const std::string& f) {
  if (f == "json") return static_cast<int>(ArtifactFormat::Json);
  if (f == "csv") return static_cast<int>(ArtifactFormat::Csv);
  if (f == "svg") return static_cast<int>(ArtifactFormat::Svg);
  return static_cast<int>(ArtifactFormat::All);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig resolve_config(const CommonOpts& o) {
  ExperimentConfig cfg;
  if (!o.preset.empty()) cfg = find_preset(o.preset).config;
  if (!o.config_path.empty())
    cfg = ExperimentConfig::from_json_text(read_file(o.config_path));
  if (o.seed) cfg.seed = *o.seed;
  if (o.slack) cfg.slack = *o.slack;
  if (o.r_max) cfg.r_max = *o.r_max;
  if (o.rho) cfg.rho = *o.rho;
  if (o.threads) cfg.threads = *o.threads;
  if (o.n_trajectories) cfg.n_trajectories = *o.n_trajectories;
  if (o.n_samples) cfg.sampling.n = *o.n_samples;
  if (o.half_window) cfg.sampling.half_window = *o.half_window;
  if (o.noise_sigma) cfg.noise_sigma = *o.noise_sigma;
  if (o.max_dim) cfg.max_dim = *o.max_dim;
  if (!o.out.empty()) cfg.output_dir = o.out;
  cfg.formats = parse_format(o.format);
  if (o.dump_filtration) cfg.dump_filtration = true;
  cfg.validate();
  return cfg;
}

std::string betti_string(const std::vector<int>& betti) {
  std::string s = "[";
  for (std::size_t i = 0; i < betti.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(betti[i]);
  }
  return s + "]";
}

void require_out(const CommonOpts& o) {
  if (o.out.empty()) throw ConfigError("--out directory is required");
}

void print_run_summary(const RunReport& r) {
  std::printf("experiment %s: N=%d n=%d t=%d seed=%llu\n",
              r.config.name.c_str(), r.config.n_trajectories,
              r.config.sampling.n, r.config.slack,
              static_cast<unsigned long long>(r.config.seed));
  std::printf("  r_max=%.6g  simplices=%zu  betti=%s\n", r.r_max_used,
              r.filtration_size, betti_string(r.betti.betti).c_str());
  if (r.signature_declared)
    std::printf("  signature: %s\n", r.signature_match ? "match" : "MISMATCH");
  std::printf(
      "  timings ms: simulate=%.1f observe=%.1f distances=%.1f "
      "filtration=%.1f persistence=%.1f total=%.1f\n",
      r.timings.simulate_ms, r.timings.observe_ms, r.timings.distances_ms,
      r.timings.filtration_ms, r.timings.persistence_ms, r.timings.total_ms);
  for (const auto& [kind, path] : r.artifacts)
    std::printf("  wrote %s: %s\n", kind.c_str(), path.c_str());
}

int cmd_simulate(const CommonOpts& o) {
  require_out(o);
  ExperimentConfig cfg = resolve_config(o);
  SimulationResult sim = simulate_stage(cfg);
  fs::create_directories(o.out);
  char buf[64];
  for (std::size_t i = 0; i < sim.trajectories.size(); ++i) {
    const StateTrajectory& traj = sim.trajectories[i];
    std::ofstream os(fs::path(o.out) / ("trajectory_" + std::to_string(i) +
                                        ".csv"));
    for (int s = 0; s < traj.length(); ++s) {
      std::snprintf(buf, sizeof(buf), "%.17g", traj.times[s]);
      os << buf;
      for (double x : traj.states[s]) {
        std::snprintf(buf, sizeof(buf), ",%.17g", x);
        os << buf;
      }
      os << "\n";
    }
  }
  std::printf("wrote %zu trajectories (%d steps each) to %s\n",
              sim.trajectories.size(), cfg.sampling.n, o.out.c_str());
  return kExitOk;
}

int cmd_observe(const CommonOpts& o) {
  require_out(o);
  ExperimentConfig cfg = resolve_config(o);
  SimulationResult sim = simulate_stage(cfg);
  std::vector<ObservationSeries> series = observe_stage(cfg, sim.trajectories);
  fs::create_directories(o.out);
  char buf[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    const ObservationSeries& s = series[i];
    std::ofstream os(fs::path(o.out) /
                     ("series_" + std::to_string(i) + ".csv"));
    for (int r = 0; r < s.length(); ++r) {
      const double* row = s.step(r);
      for (int c = 0; c < s.dim; ++c) {
        std::snprintf(buf, sizeof(buf), c ? ",%.17g" : "%.17g", row[c]);
        os << buf;
      }
      os << "\n";
    }
  }
  std::printf("wrote %zu observation series (n=%d, d=%d) to %s\n",
              series.size(), cfg.sampling.n,
              series.empty() ? 0 : series[0].dim, o.out.c_str());
  return kExitOk;
}

int cmd_distances(const CommonOpts& o) {
  require_out(o);
  ExperimentConfig cfg = resolve_config(o);
  SimulationResult sim = simulate_stage(cfg);
  std::vector<ObservationSeries> series = observe_stage(cfg, sim.trajectories);
  DissimilarityMatrix matrix =
      dissimilarity_matrix(series, cfg.slack, cfg.threads);
  fs::create_directories(o.out);
  const int formats = parse_format(o.format);
  if (formats & static_cast<int>(ArtifactFormat::Csv)) {
    std::ofstream os(fs::path(o.out) / "distances.csv");
    matrix.write_csv(os);
    std::printf("wrote %s\n", (fs::path(o.out) / "distances.csv").c_str());
  }
  if (formats & static_cast<int>(ArtifactFormat::Json)) {
    std::ofstream os(fs::path(o.out) / "distances.json");
    write_matrix_json(os, matrix, make_meta(cfg, 0.0));
    std::printf("wrote %s\n", (fs::path(o.out) / "distances.json").c_str());
  }
  std::printf("distance matrix: N=%d n=%d t=%d\n", matrix.size,
              matrix.series_length, matrix.slack);
  return kExitOk;
}

DissimilarityMatrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open matrix file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InputError("matrix file has a non-numeric cell: " + cell);
      }
    }
    rows.push_back(std::move(row));
  }
  const int n = static_cast<int>(rows.size());
  if (n < 2) throw InputError("matrix file needs at least 2 rows");
  DissimilarityMatrix m;
  m.size = n;
  m.entries.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(rows[i].size()) != n)
      throw InputError("matrix file is not square");
    for (int j = 0; j < n; ++j) m.at(i, j) = rows[i][j];
  }
  for (int i = 0; i < n; ++i) {
    if (m.at(i, i) != 0.0) throw InputError("matrix diagonal must be zero");
    for (int j = i + 1; j < n; ++j)
      if (m.at(i, j) != m.at(j, i))
        throw InputError("matrix must be symmetric");
  }
  return m;
}

int cmd_persist(const CommonOpts& o, const std::string& matrix_path) {
  ExperimentConfig cfg = resolve_config(o);
  DissimilarityMatrix matrix = read_matrix_csv(matrix_path);
  matrix.slack = cfg.slack;
  const double r_max =
      cfg.r_max.has_value() ? *cfg.r_max : default_r_max(matrix);
  Filtration filt =
      build_vr_filtration(matrix, cfg.max_dim, r_max, cfg.simplex_budget);
  PersistenceDiagram diagram = compute_persistence(filt);
  BettiSummary betti = betti_summary(diagram, cfg.rho);
  std::printf("N=%d r_max=%.6g simplices=%zu betti=%s\n", matrix.size, r_max,
              filt.simplices.size(), betti_string(betti.betti).c_str());
  if (!o.out.empty()) {
    fs::create_directories(o.out);
    RunMeta meta = make_meta(cfg, r_max);
    meta.experiment = "persist";
    meta.system = "external";
    meta.N = matrix.size;
    const int formats = parse_format(o.format);
    auto emit = [&](const char* name, auto writer) {
      fs::path p = fs::path(o.out) / name;
      std::ofstream os(p);
      writer(os);
      std::printf("wrote %s\n", p.c_str());
    };
    if (formats & static_cast<int>(ArtifactFormat::Json))
      emit("diagram.json",
           [&](std::ostream& os) { write_diagram_json(os, diagram, meta); });
    if (formats & static_cast<int>(ArtifactFormat::Csv))
      emit("diagram.csv",
           [&](std::ostream& os) { write_diagram_csv(os, diagram); });
    if (formats & static_cast<int>(ArtifactFormat::Svg))
      emit("diagram.svg",
           [&](std::ostream& os) { write_diagram_svg(os, diagram, meta); });
    if (o.dump_filtration)
      emit("filtration.txt", [&](std::ostream& os) { filt.write_text(os); });
  }
  return kExitOk;
}

int cmd_run(const CommonOpts& o) {
  ExperimentConfig cfg = resolve_config(o);
  RunReport report = run_experiment(cfg);
  print_run_summary(report);
  return kExitOk;
}

int cmd_sweep(const CommonOpts& o, const std::vector<int>& t_values) {
  ExperimentConfig cfg = resolve_config(o);
  std::vector<RunReport> reports = sweep(cfg, t_values);
  for (const RunReport& r : reports)
    std::printf("t=%d  r_max=%.6g  simplices=%zu  betti=%s\n", r.config.slack,
                r.r_max_used, r.filtration_size,
                betti_string(r.betti.betti).c_str());
  return kExitOk;
}

int cmd_replicate(const CommonOpts& o, std::vector<std::uint64_t> seeds,
                  std::optional<double> expect) {
  ExperimentConfig cfg = resolve_config(o);
  if (seeds.empty())
    for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
  ReplicateReport rep = replicate(cfg, seeds);
  for (const RunReport& r : rep.runs)
    std::printf("seed=%llu  betti=%s  %s\n",
                static_cast<unsigned long long>(r.config.seed),
                betti_string(r.betti.betti).c_str(),
                r.signature_match ? "match" : "mismatch");
  std::printf("matched %d/%zu seeds (fraction %.3f)\n", rep.matches,
              rep.seeds.size(), rep.fraction);
  if (expect && rep.fraction < *expect) {
    std::fprintf(stderr, "expected fraction >= %.3f, got %.3f\n", *expect,
                 rep.fraction);
    return kExitSignature;
  }
  return kExitOk;
}

int cmd_presets_list() {
  std::printf("%-14s %-18s %-12s %7s %7s %4s %4s %6s  %s\n", "name", "system",
              "observation", "N", "N-desk", "n", "t", "T", "expected betti");
  for (const Preset& p : presets()) {
    std::string expected;
    for (const auto& [dim, count] : p.config.expected_betti) {
      if (!expected.empty()) expected += " ";
      expected += "b" + std::to_string(dim) + "=" + std::to_string(count);
    }
    std::printf("%-14s %-18s %-12s %7d %7d %4d %4d %6g  %s\n", p.name.c_str(),
                to_string(p.config.system.kind).c_str(),
                to_string(p.config.observation).c_str(),
                p.paper_n_trajectories, p.desk_n_trajectories,
                p.config.sampling.n, p.config.slack,
                p.config.sampling.half_window, expected.c_str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "trajtopo: recover Betti numbers of a hidden state space from "
      "observed trajectories"};
  app.require_subcommand(1);

  CommonOpts opts;
  std::string matrix_path;
  std::vector<int> t_values;
  std::vector<std::uint64_t> seeds;
  std::optional<double> expect;

  auto* sim = app.add_subcommand("simulate", "Integrate trajectories, write CSV");
  add_common(sim, opts);

  auto* obs = app.add_subcommand("observe", "Simulate and observe, write CSV");
  add_common(obs, opts);

  auto* dist = app.add_subcommand("distances",
                                  "Pairwise slack dissimilarity matrix");
  add_common(dist, opts);

  auto* per = app.add_subcommand("persist",
                                 "Distance matrix CSV -> persistence diagram");
  add_common(per, opts);
  per->add_option("--matrix", matrix_path, "Distance matrix CSV file")
      ->required();

  auto* run = app.add_subcommand("run", "Full pipeline");
  add_common(run, opts);

  auto* swp = app.add_subcommand("sweep", "Runs over several slack values");
  add_common(swp, opts);
  swp->add_option("--t-values", t_values, "Slack values")
      ->required()
      ->delimiter(',');

  auto* rep = app.add_subcommand("replicate", "Per-seed runs and match rate");
  add_common(rep, opts);
  rep->add_option("--seeds", seeds, "Seed list (default 1..10)")
      ->delimiter(',');
  rep->add_option("--expect", expect,
                  "Fail (exit 3) when match fraction is below this");

  auto* pre = app.add_subcommand("presets", "Preset inspection");
  auto* pre_list = pre->add_subcommand("list", "List presets");
  pre->require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sim->parsed()) return cmd_simulate(opts);
    if (obs->parsed()) return cmd_observe(opts);
    if (dist->parsed()) return cmd_distances(opts);
    if (per->parsed()) return cmd_persist(opts, matrix_path);
    if (run->parsed()) return cmd_run(opts);
    if (swp->parsed()) return cmd_sweep(opts, t_values);
    if (rep->parsed()) return cmd_replicate(opts, seeds, expect);
    if (pre_list->parsed()) return cmd_presets_list();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return kExitUsage;
}
