#include "trajtopo/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include <json.hpp>

#include "trajtopo/errors.hpp"
#include "trajtopo/filtration.hpp"
#include "trajtopo/rng.hpp"

namespace fs = std::filesystem;

namespace trajtopo {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start)
      .count();
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["name"] = c.name;
  j["system"] = to_string(c.system.kind);
  j["lorenz_sigma"] = c.system.lorenz.sigma;
  j["lorenz_rho"] = c.system.lorenz.rho;
  j["lorenz_beta"] = c.system.lorenz.beta;
  j["fourier_degree"] = c.system.fourier_degree;
  j["n_trajectories"] = c.n_trajectories;
  j["n_samples"] = c.sampling.n;
  j["half_window"] = c.sampling.half_window;
  j["substeps"] = c.sampling.substeps;
  j["observation"] = to_string(c.observation);
  j["noise_sigma"] = c.noise_sigma;
  j["slack"] = c.slack;
  j["significance_rho"] = c.rho;
  j["max_dim"] = c.max_dim;
  j["seed"] = c.seed;
  if (c.r_max.has_value()) {
    j["r_max"] = *c.r_max;
  } else {
    j["r_max"] = nullptr;
  }
  j["simplex_budget"] = c.simplex_budget;
  j["threads"] = c.threads;
  j["output_dir"] = c.output_dir;
  j["dump_filtration"] = c.dump_filtration;
  nlohmann::ordered_json exp = nlohmann::ordered_json::object();
  for (const auto& [dim, count] : c.expected_betti)
    exp[std::to_string(dim)] = count;
  j["expected_betti"] = std::move(exp);
  return j;
}

}  // namespace

void ExperimentConfig::validate() const {
  sampling.validate();
  if (n_trajectories < 2) throw ConfigError("n_trajectories must be >= 2");
  if (slack < 0 || slack > sampling.n - 1)
    throw ConfigError("slack t must satisfy 0 <= t <= n-1");
  if (!(rho > 0.0 && rho < 1.0))
    throw ConfigError("significance rho must lie in (0, 1)");
  if (max_dim < 0 || max_dim + 2 > kMaxSimplexVertices)
    throw ConfigError("max_dim out of supported range");
  if (r_max.has_value() && !(*r_max > 0.0))
    throw ConfigError("r_max override must be > 0");
  if (noise_sigma < 0.0) throw ConfigError("noise_sigma must be >= 0");
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");

  static const std::vector<std::string> known = {
      "name",          "system",       "lorenz_sigma",  "lorenz_rho",
      "lorenz_beta",   "fourier_degree", "n_trajectories", "n_samples",
      "half_window",   "substeps",     "observation",   "noise_sigma",
      "slack",         "significance_rho", "max_dim",   "seed",
      "r_max",         "simplex_budget", "threads",     "output_dir",
      "dump_filtration", "expected_betti"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end())
      throw ConfigError("unknown config key: " + it.key());
  }

  ExperimentConfig c;
  auto get = [&j](const char* key, auto& field) {
    if (j.contains(key) && !j[key].is_null()) field = j[key];
  };
  get("name", c.name);
  if (j.contains("system"))
    c.system.kind = system_kind_from_string(j["system"].get<std::string>());
  get("lorenz_sigma", c.system.lorenz.sigma);
  get("lorenz_rho", c.system.lorenz.rho);
  get("lorenz_beta", c.system.lorenz.beta);
  get("fourier_degree", c.system.fourier_degree);
  get("n_trajectories", c.n_trajectories);
  get("n_samples", c.sampling.n);
  get("half_window", c.sampling.half_window);
  get("substeps", c.sampling.substeps);
  if (j.contains("observation"))
    c.observation =
        observation_kind_from_string(j["observation"].get<std::string>());
  get("noise_sigma", c.noise_sigma);
  get("slack", c.slack);
  get("significance_rho", c.rho);
  get("max_dim", c.max_dim);
  get("seed", c.seed);
  if (j.contains("r_max") && !j["r_max"].is_null())
    c.r_max = j["r_max"].get<double>();
  get("simplex_budget", c.simplex_budget);
  get("threads", c.threads);
  get("output_dir", c.output_dir);
  get("dump_filtration", c.dump_filtration);
  if (j.contains("expected_betti")) {
    if (!j["expected_betti"].is_object())
      throw ConfigError("expected_betti must map dimension to count");
    for (auto it = j["expected_betti"].begin(); it != j["expected_betti"].end();
         ++it) {
      c.expected_betti[std::stoi(it.key())] = it.value().get<int>();
    }
  }
  return c;
}

std::string ExperimentConfig::to_json_text() const {
  return config_to_json(*this).dump(2) + "\n";
}

std::string RunReport::to_json_text() const {
  nlohmann::ordered_json j;
  j["config"] = config_to_json(config);
  j["timings_ms"] = {{"simulate", timings.simulate_ms},
                     {"observe", timings.observe_ms},
                     {"distances", timings.distances_ms},
                     {"filtration", timings.filtration_ms},
                     {"persistence", timings.persistence_ms},
                     {"total", timings.total_ms}};
  j["filtration_size"] = filtration_size;
  j["r_max_used"] = r_max_used;
  j["betti"] = betti.betti;
  j["significance"] = {{"rho", betti.rho}, {"scale", betti.scale}};
  if (signature_declared) j["signature_match"] = signature_match;
  nlohmann::ordered_json arts = nlohmann::ordered_json::object();
  for (const auto& [kind, path] : artifacts) arts[kind] = path;
  j["artifacts"] = std::move(arts);
  return j.dump(2) + "\n";
}

bool signature_matches(const BettiSummary& summary,
                       const std::map<int, int>& expected) {
  for (const auto& [dim, count] : expected) {
    int got = (dim >= 0 && dim < static_cast<int>(summary.betti.size()))
                  ? summary.betti[dim]
                  : 0;
    if (got != count) return false;
  }
  return true;
}

SimulationResult simulate_stage(const ExperimentConfig& config) {
  SystemSpec spec = config.system;
  if (spec.kind == SystemKind::TorusFourierGradient)
    spec.field_seed = derive_seed(config.seed, "torus-field");
  System sys(spec);

  auto ics = sample_initial_conditions(
      sys, config.sampling, config.n_trajectories,
      derive_seed(config.seed, "initial-conditions"));

  SimulationResult result;
  result.trajectories.resize(ics.size());
  int nt = config.threads > 0
               ? config.threads
               : static_cast<int>(std::thread::hardware_concurrency());
  nt = std::max(1, nt);
  if (nt == 1 || ics.size() < 16) {
    for (std::size_t i = 0; i < ics.size(); ++i)
      result.trajectories[i] = integrate(sys, ics[i], config.sampling);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> failures(nt);
    std::size_t chunk = (ics.size() + nt - 1) / nt;
    for (int w = 0; w < nt; ++w) {
      std::size_t b = std::min(ics.size(), w * chunk);
      std::size_t e = std::min(ics.size(), b + chunk);
      if (b >= e) continue;
      pool.emplace_back([&, w, b, e] {
        try {
          for (std::size_t i = b; i < e; ++i)
            result.trajectories[i] = integrate(sys, ics[i], config.sampling);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& f : failures) {
      if (f) std::rethrow_exception(f);
    }
  }
  return result;
}

std::vector<ObservationSeries> observe_stage(
    const ExperimentConfig& config,
    const std::vector<StateTrajectory>& trajectories) {
  ObservationSpec spec;
  spec.kind = config.observation;
  spec.seed = derive_seed(config.seed, "observation");
  spec.noise_sigma = config.noise_sigma;
  spec.noise_seed = derive_seed(config.seed, "noise");
  if (spec.kind == ObservationKind::RandomPoly3)
    spec.standardization = fit_standardization(trajectories);

  Observer obs(spec);
  std::vector<ObservationSeries> series(trajectories.size());
  for (std::size_t i = 0; i < trajectories.size(); ++i)
    series[i] = obs.observe(trajectories[i], static_cast<int>(i));
  return series;
}

RunMeta make_meta(const ExperimentConfig& config, double r_max) {
  RunMeta meta;
  meta.experiment = config.name;
  meta.system = to_string(config.system.kind);
  meta.N = config.n_trajectories;
  meta.n = config.sampling.n;
  meta.t = config.slack;
  meta.seed = config.seed;
  meta.r_max = r_max;
  return meta;
}

namespace {

// Tracks files written by one run so that a failure can remove partial
// output.
class ArtifactWriter {
 public:
  explicit ArtifactWriter(const std::string& dir) : dir_(dir) {
    if (!dir_.empty()) fs::create_directories(dir_);
  }

  bool enabled() const { return !dir_.empty(); }

  template <typename WriteFn>
  std::string write(const std::string& filename, WriteFn&& fn) {
    fs::path path = fs::path(dir_) / filename;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ResourceError("cannot open " + path.string());
    fn(os);
    os.flush();
    if (!os) throw ResourceError("failed writing " + path.string());
    written_.push_back(path);
    return path.string();
  }

  void discard_all() {
    std::error_code ec;
    for (const auto& p : written_) fs::remove(p, ec);
    written_.clear();
  }

 private:
  std::string dir_;
  std::vector<fs::path> written_;
};

template <typename Fn>
auto run_stage(const char* stage, double& slot, Fn&& fn) {
  auto start = Clock::now();
  try {
    auto result = fn();
    slot = ms_since(start);
    return result;
  } catch (IntegrationError&) {
    throw;
  } catch (ResourceError& e) {
    throw ResourceError(std::string(stage) + ": " + e.what());
  } catch (ConfigError& e) {
    throw ConfigError(std::string(stage) + ": " + e.what());
  } catch (InputError& e) {
    throw InputError(std::string(stage) + ": " + e.what());
  }
}

RunReport run_with_data(const ExperimentConfig& config,
                        const DissimilarityMatrix& matrix,
                        StageTimings timings, Clock::time_point t0) {
  RunReport report;
  report.config = config;
  report.timings = timings;

  double r_max = config.r_max.has_value()
                     ? *config.r_max
                     : run_stage("filtration", report.timings.filtration_ms,
                                 [&] { return default_r_max(matrix); });

  Filtration filt;
  {
    auto start = Clock::now();
    try {
      filt = build_vr_filtration(matrix, config.max_dim, r_max,
                                 config.simplex_budget);
    } catch (ResourceError& e) {
      throw ResourceError(std::string("filtration: ") + e.what());
    }
    report.timings.filtration_ms += ms_since(start);
  }
  report.filtration_size = filt.simplices.size();
  report.r_max_used = r_max;

  report.diagram = run_stage("persistence", report.timings.persistence_ms,
                             [&] { return compute_persistence(filt); });
  report.betti = betti_summary(report.diagram, config.rho);
  report.signature_declared = !config.expected_betti.empty();
  if (report.signature_declared)
    report.signature_match =
        signature_matches(report.betti, config.expected_betti);

  // Artifacts.
  ArtifactWriter writer(config.output_dir);
  if (writer.enabled()) {
    try {
      RunMeta meta = make_meta(config, r_max);
      int fmt = config.formats;
      if (fmt & static_cast<int>(ArtifactFormat::Csv)) {
        report.artifacts["matrix_csv"] =
            writer.write("matrix.csv", [&](std::ostream& os) {
              matrix.write_csv(os);
            });
        report.artifacts["diagram_csv"] =
            writer.write("diagram.csv", [&](std::ostream& os) {
              write_diagram_csv(os, report.diagram);
            });
      }
      if (fmt & static_cast<int>(ArtifactFormat::Json)) {
        report.artifacts["matrix_json"] =
            writer.write("matrix.json", [&](std::ostream& os) {
              write_matrix_json(os, matrix, meta);
            });
        report.artifacts["diagram_json"] =
            writer.write("diagram.json", [&](std::ostream& os) {
              write_diagram_json(os, report.diagram, meta);
            });
      }
      if (fmt & static_cast<int>(ArtifactFormat::Svg)) {
        report.artifacts["diagram_svg"] =
            writer.write("diagram.svg", [&](std::ostream& os) {
              write_diagram_svg(os, report.diagram, meta);
            });
      }
      if (config.dump_filtration) {
        report.artifacts["filtration"] =
            writer.write("filtration.txt", [&](std::ostream& os) {
              filt.write_text(os);
            });
      }
      report.timings.total_ms = ms_since(t0);
      report.artifacts["report"] =
          writer.write("report.json", [&](std::ostream& os) {
            os << report.to_json_text();
          });
    } catch (...) {
      writer.discard_all();
      throw;
    }
  }
  report.timings.total_ms = ms_since(t0);
  return report;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  auto t0 = Clock::now();
  StageTimings timings;

  auto sim = run_stage("simulate", timings.simulate_ms,
                       [&] { return simulate_stage(config); });
  auto series = run_stage("observe", timings.observe_ms, [&] {
    return observe_stage(config, sim.trajectories);
  });
  auto matrix = run_stage("distances", timings.distances_ms, [&] {
    int nt = config.threads > 0
                 ? config.threads
                 : static_cast<int>(std::thread::hardware_concurrency());
    return dissimilarity_matrix(series, config.slack, std::max(1, nt));
  });
  return run_with_data(config, matrix, timings, t0);
}

std::vector<RunReport> sweep(const ExperimentConfig& config,
                             const std::vector<int>& t_values) {
  config.validate();
  for (int t : t_values) {
    if (t < 0 || t > config.sampling.n - 1)
      throw ConfigError("sweep slack value out of range: " + std::to_string(t));
  }

  auto t0 = Clock::now();
  StageTimings shared;
  auto sim = run_stage("simulate", shared.simulate_ms,
                       [&] { return simulate_stage(config); });
  auto series = run_stage("observe", shared.observe_ms, [&] {
    return observe_stage(config, sim.trajectories);
  });
  auto profiles = run_stage("distances", shared.distances_ms, [&] {
    int nt = config.threads > 0
                 ? config.threads
                 : static_cast<int>(std::thread::hardware_concurrency());
    return compute_profiles(series, std::max(1, nt));
  });

  std::vector<RunReport> reports;
  reports.reserve(t_values.size());
  for (int t : t_values) {
    ExperimentConfig sub = config;
    sub.slack = t;
    if (!config.output_dir.empty()) {
      sub.output_dir =
          (fs::path(config.output_dir) / ("t_" + std::to_string(t))).string();
    }
    StageTimings timings = shared;
    auto matrix = matrix_at_slack(profiles, t);
    reports.push_back(run_with_data(sub, matrix, timings, t0));
  }
  return reports;
}

ReplicateReport replicate(const ExperimentConfig& config,
                          const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw InputError("replicate requires at least one seed");
  if (config.expected_betti.empty())
    throw ConfigError("replicate requires an expected Betti signature");

  ReplicateReport agg;
  agg.seeds = seeds;
  for (std::uint64_t s : seeds) {
    ExperimentConfig sub = config;
    sub.seed = s;
    if (!config.output_dir.empty()) {
      sub.output_dir =
          (fs::path(config.output_dir) / ("seed_" + std::to_string(s)))
              .string();
    }
    RunReport r = run_experiment(sub);
    if (r.signature_match) ++agg.matches;
    agg.runs.push_back(std::move(r));
  }
  agg.fraction = static_cast<double>(agg.matches) /
                 static_cast<double>(seeds.size());

  if (!config.output_dir.empty()) {
    fs::create_directories(config.output_dir);
    nlohmann::ordered_json j;
    j["seeds"] = agg.seeds;
    j["matches"] = agg.matches;
    j["total"] = agg.seeds.size();
    j["fraction"] = agg.fraction;
    auto per_seed = nlohmann::ordered_json::array();
    for (const auto& r : agg.runs) {
      per_seed.push_back({{"seed", r.config.seed},
                          {"betti", r.betti.betti},
                          {"match", r.signature_match}});
    }
    j["per_seed"] = std::move(per_seed);
    std::ofstream os(fs::path(config.output_dir) / "replicate.json",
                     std::ios::binary);
    os << j.dump(2) << '\n';
  }
  return agg;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table = [] {
    std::vector<Preset> v;

    auto base = [](SystemKind kind, int N, int n, int t, double T,
                   ObservationKind obs) {
      ExperimentConfig c;
      c.system.kind = kind;
      c.n_trajectories = N;
      c.sampling.n = n;
      c.sampling.half_window = T;
      c.slack = t;
      c.observation = obs;
      return c;
    };

    {
      Preset p;
      p.name = "sphere-height";
      p.description =
          "gradient flow of the height function on the 2-sphere; embedding "
          "observations; expects spherical homology";
      p.paper_n_trajectories = 400;
      p.desk_n_trajectories = 200;
      p.config = base(SystemKind::SphereHeightGradient, 400, 15, 10, 1.5,
                      ObservationKind::Identity);
      // Fixed radius: the adaptive scale overshoots once the cloud thickens
      // near the poles and the 2-cycle gets coned off before it forms.
      p.config.r_max = 1.15;
      p.config.expected_betti = {{0, 1}, {1, 0}, {2, 1}};
      p.config.name = p.name;
      v.push_back(std::move(p));
    }
    {
      Preset p;
      p.name = "torus-fourier";
      p.description =
          "gradient flow of a random trigonometric potential on the 2-torus; "
          "embedding observations; expects torus homology";
      p.paper_n_trajectories = 400;
      p.desk_n_trajectories = 250;
      p.config = base(SystemKind::TorusFourierGradient, 400, 25, 3, 2.5,
                      ObservationKind::Identity);
      p.config.expected_betti = {{0, 1}, {1, 2}, {2, 1}};
      p.config.name = p.name;
      v.push_back(std::move(p));
    }
    {
      Preset p;
      p.name = "torus-scalar";
      p.description =
          "torus gradient flow observed through a random scalar linear "
          "functional of the embedding";
      p.paper_n_trajectories = 650;
      p.desk_n_trajectories = 300;
      p.config = base(SystemKind::TorusFourierGradient, 650, 25, 1, 2.5,
                      ObservationKind::RandomLinear);
      p.config.expected_betti = {{0, 1}, {1, 2}, {2, 1}};
      p.config.name = p.name;
      v.push_back(std::move(p));
    }
    {
      Preset p;
      p.name = "lorenz-short";
      p.description =
          "Lorenz attractor, short windows; expects the homology of a wedge "
          "of two circles";
      p.paper_n_trajectories = 100;
      p.desk_n_trajectories = 100;
      p.config = base(SystemKind::Lorenz, 100, 25, 20, 0.25,
                      ObservationKind::Identity);
      // Short segments leave the two lobes sparsely covered; the radius has
      // to reach across the gaps so both loops close up and then die inside
      // the window, and the threshold sits between the loop pair and the
      // connector noise.
      p.config.r_max = 2.8;
      p.config.rho = 0.65;
      p.config.expected_betti = {{0, 1}, {1, 2}};
      p.config.name = p.name;
      v.push_back(std::move(p));
    }
    {
      Preset p;
      p.name = "lorenz-poly";
      p.description =
          "Lorenz attractor observed through a random scalar cubic "
          "polynomial";
      p.paper_n_trajectories = 150;
      p.desk_n_trajectories = 150;
      p.config = base(SystemKind::Lorenz, 150, 25, 10, 0.25,
                      ObservationKind::RandomPoly3);
      // Scalar cubics fold the attractor unevenly; a tight fixed radius keeps
      // the folded sheets from bridging, and the threshold is tuned to the
      // persistence gap that survives across observation draws.
      p.config.r_max = 0.85;
      p.config.rho = 0.376;
      p.config.expected_betti = {{1, 2}};
      p.config.name = p.name;
      v.push_back(std::move(p));
    }
    {
      Preset p;
      p.name = "lorenz-long";
      p.description =
          "Lorenz attractor, doubled windows crossing the branch line twice; "
          "expects four independent loops";
      p.paper_n_trajectories = 100;
      p.desk_n_trajectories = 100;
      p.config = base(SystemKind::Lorenz, 100, 25, 20, 0.5,
                      ObservationKind::Identity);
      // Doubled windows separate the four loop classes cleanly; they stay
      // open at the adaptive radius, so the threshold only has to shut out
      // finite clutter.
      p.config.rho = 0.75;
      p.config.expected_betti = {{1, 4}};
      p.config.name = p.name;
      v.push_back(std::move(p));
    }
    return v;
  }();
  return table;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  throw ConfigError("unknown preset: " + name +
                    " (see `trajtopo presets list`)");
}

}  // namespace trajtopo
