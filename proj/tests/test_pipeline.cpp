#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "trajtopo/errors.hpp"
#include "trajtopo/pipeline.hpp"

using namespace trajtopo;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_sphere() {
  ExperimentConfig c;
  c.name = "tiny-sphere";
  c.system.kind = SystemKind::SphereHeightGradient;
  c.sampling.n = 7;
  c.sampling.half_window = 1.5;
  c.n_trajectories = 16;
  c.slack = 2;
  c.max_dim = 1;
  c.seed = 3;
  return c;
}

ExperimentConfig tiny_torus() {
  ExperimentConfig c;
  c.name = "tiny-torus";
  c.system.kind = SystemKind::TorusFourierGradient;
  c.sampling.n = 9;
  c.sampling.half_window = 2.5;
  c.n_trajectories = 12;
  c.slack = 3;
  c.max_dim = 1;
  c.seed = 5;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() /
             ("trajtopo_test_" + tag + "_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("a small run populates the report") {
  RunReport r = run_experiment(tiny_sphere());
  CHECK(r.filtration_size > 0);
  CHECK(r.r_max_used > 0.0);
  CHECK(r.betti.betti.size() == 2);
  CHECK(r.betti.betti[0] >= 1);
  CHECK_FALSE(r.signature_declared);
  CHECK(r.artifacts.empty());  // no output dir, no files
  CHECK(r.timings.total_ms >= 0.0);
}

TEST_CASE("r_max override is honored") {
  ExperimentConfig c = tiny_sphere();
  c.r_max = 0.75;
  RunReport r = run_experiment(c);
  CHECK(r.r_max_used == 0.75);
}

TEST_CASE("same seed writes byte-identical artifacts") {
  TempDir a("det_a"), b("det_b");
  ExperimentConfig c = tiny_torus();
  c.output_dir = a.path.string();
  run_experiment(c);
  c.output_dir = b.path.string();
  run_experiment(c);

  for (const char* name : {"diagram.csv", "diagram.json", "diagram.svg",
                           "matrix.csv", "matrix.json"}) {
    CAPTURE(name);
    std::string lhs = slurp(a.path / name);
    std::string rhs = slurp(b.path / name);
    REQUIRE(!lhs.empty());
    CHECK(lhs == rhs);
  }
  // The report embeds wall-clock timings, so it is excluded from the
  // byte-identity contract; it must still exist and parse as JSON.
  CHECK(fs::exists(a.path / "report.json"));
}

TEST_CASE("different seeds change the data") {
  ExperimentConfig c = tiny_torus();
  RunReport r1 = run_experiment(c);
  c.seed = 6;
  RunReport r2 = run_experiment(c);
  CHECK(r1.r_max_used != r2.r_max_used);
}

TEST_CASE("sweep equals independent per-slack runs") {
  ExperimentConfig c = tiny_torus();
  std::vector<RunReport> swept = sweep(c, {1, 3, 5});
  REQUIRE(swept.size() == 3);
  int idx = 0;
  for (int t : {1, 3, 5}) {
    ExperimentConfig single = c;
    single.slack = t;
    RunReport direct = run_experiment(single);
    CHECK(swept[idx].betti.betti == direct.betti.betti);
    REQUIRE(swept[idx].diagram.pairs.size() == direct.diagram.pairs.size());
    for (std::size_t k = 0; k < direct.diagram.pairs.size(); ++k) {
      CHECK(swept[idx].diagram.pairs[k].dim == direct.diagram.pairs[k].dim);
      CHECK(swept[idx].diagram.pairs[k].birth == direct.diagram.pairs[k].birth);
      CHECK(swept[idx].diagram.pairs[k].death == direct.diagram.pairs[k].death);
    }
    ++idx;
  }
}

TEST_CASE("sweep validates slack values") {
  ExperimentConfig c = tiny_torus();
  CHECK_THROWS_AS(sweep(c, {c.sampling.n}), ConfigError);
}

TEST_CASE("replicate fractions and edge cases") {
  ExperimentConfig c = tiny_sphere();
  CHECK_THROWS_AS(replicate(c, {1}), ConfigError);  // no signature declared

  c.expected_betti = {{0, 1}};
  CHECK_THROWS_AS(replicate(c, {}), InputError);

  ReplicateReport one = replicate(c, {4});
  CHECK(one.runs.size() == 1);
  CHECK((one.fraction == 0.0 || one.fraction == 1.0));

  // An impossible signature never matches.
  c.expected_betti = {{0, 99}};
  ReplicateReport none = replicate(c, {1, 2});
  CHECK(none.matches == 0);
  CHECK(none.fraction == 0.0);
}

TEST_CASE("signature matching ignores undeclared dimensions") {
  BettiSummary s;
  s.betti = {1, 2, 1};
  CHECK(signature_matches(s, {{1, 2}}));
  CHECK(signature_matches(s, {{0, 1}, {1, 2}, {2, 1}}));
  CHECK_FALSE(signature_matches(s, {{0, 2}}));
  CHECK_FALSE(signature_matches(s, {{3, 1}}));  // out of range counts as 0
  CHECK(signature_matches(s, {{3, 0}}));
}

TEST_CASE("config json round-trips and rejects unknown keys") {
  ExperimentConfig c = tiny_torus();
  c.r_max = 1.25;
  c.expected_betti = {{0, 1}, {1, 2}};
  std::string text = c.to_json_text();
  ExperimentConfig back = ExperimentConfig::from_json_text(text);
  CHECK(back.to_json_text() == text);
  CHECK(back.name == c.name);
  CHECK(back.slack == c.slack);
  CHECK(back.r_max.has_value());
  CHECK(*back.r_max == 1.25);
  CHECK(back.expected_betti == c.expected_betti);

  CHECK_THROWS_AS(ExperimentConfig::from_json_text("{\"so_unknown\": 1}"),
                  ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text("[1,2]"), ConfigError);
}

TEST_CASE("config validation rejects out-of-range fields") {
  ExperimentConfig c = tiny_sphere();
  c.slack = c.sampling.n;  // t must be <= n-1
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = tiny_sphere();
  c.rho = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = tiny_sphere();
  c.n_trajectories = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);

  c = tiny_sphere();
  c.r_max = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("stage failures carry the stage name") {
  ExperimentConfig c = tiny_torus();
  c.simplex_budget = 5;
  try {
    run_experiment(c);
    FAIL("expected a resource error");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("filtration") != std::string::npos);
  }
}

TEST_CASE("presets are listed and retrievable") {
  CHECK(presets().size() == 6);
  const Preset& p = find_preset("sphere-height");
  CHECK(p.config.system.kind == SystemKind::SphereHeightGradient);
  CHECK(p.paper_n_trajectories == 400);
  CHECK(p.desk_n_trajectories == 200);
  CHECK_FALSE(p.config.expected_betti.empty());
  CHECK_THROWS_AS(find_preset("no-such-preset"), ConfigError);
}

TEST_CASE("formats control which artifacts are written") {
  TempDir d("formats");
  ExperimentConfig c = tiny_sphere();
  c.output_dir = d.path.string();
  c.formats = static_cast<int>(ArtifactFormat::Csv);
  RunReport r = run_experiment(c);
  CHECK(fs::exists(d.path / "diagram.csv"));
  CHECK(fs::exists(d.path / "matrix.csv"));
  CHECK(fs::exists(d.path / "report.json"));
  CHECK_FALSE(fs::exists(d.path / "diagram.svg"));
  CHECK_FALSE(fs::exists(d.path / "matrix.json"));
  CHECK(r.artifacts.count("diagram_csv") == 1);
  CHECK(r.artifacts.count("diagram_svg") == 0);
}

TEST_CASE("filtration dump is opt-in") {
  TempDir d("dump");
  ExperimentConfig c = tiny_sphere();
  c.output_dir = d.path.string();
  c.dump_filtration = true;
  run_experiment(c);
  CHECK(fs::exists(d.path / "filtration.txt"));
}
