#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "groupmix/cli.hpp"

using namespace groupmix;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("groupmix-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run_with_config(const std::string& config_path, const std::string& out) {
  cli::CliOptions opts;
  opts.config_path = config_path;
  opts.out_override = out;
  std::ostringstream log;
  return cli::run_config(opts, log);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("malformed config: exit 2 and no output file") {
  TempDir tmp;
  const std::string cfg = tmp.file("bad.json");
  {
    std::ofstream out(cfg);
    out << "{ not json";
  }
  const std::string out_base = tmp.file("out");
  REQUIRE(run_with_config(cfg, out_base) == cli::kExitConfigInvalid);
  REQUIRE_FALSE(fs::exists(out_base + ".csv"));
  REQUIRE_FALSE(fs::exists(out_base + ".json"));
}

TEST_CASE("unknown fields and commands are rejected") {
  TempDir tmp;
  const std::string cfg = tmp.file("cfg.json");
  {
    std::ofstream out(cfg);
    out << R"({"command": "walk-verify", "seed": 1, "parameters": {"suite": "a5-counterexample"}, "bogus": 1})";
  }
  REQUIRE(run_with_config(cfg, tmp.file("o1")) == cli::kExitConfigInvalid);
  {
    std::ofstream out(cfg);
    out << R"({"command": "fly-to-the-moon", "seed": 1, "parameters": {}})";
  }
  REQUIRE(run_with_config(cfg, tmp.file("o2")) == cli::kExitConfigInvalid);
}

TEST_CASE("cap violations exit with code 3") {
  TempDir tmp;
  const std::string cfg = tmp.file("census.json");
  {
    std::ofstream out(cfg);
    out << R"({"command": "depth-census", "seed": 1, "parameters":
      {"n": 30, "a": 2, "groups": [[2]], "partition": "singletons", "deltas": [0.2]}})";
  }
  REQUIRE(run_with_config(cfg, tmp.file("o")) == cli::kExitCapExceeded);
}

TEST_CASE("a5 config runs clean and reruns byte-identically") {
  TempDir tmp;
  const std::string cfg = std::string(GROUPMIX_CONFIG_DIR) + "/a5-counterexample.json";
  const std::string out1 = tmp.file("r1"), out2 = tmp.file("r2");
  REQUIRE(run_with_config(cfg, out1) == cli::kExitOk);
  REQUIRE(run_with_config(cfg, out2) == cli::kExitOk);
  const std::string csv1 = slurp(out1 + ".csv");
  REQUIRE(csv1 == slurp(out2 + ".csv"));
  REQUIRE(csv1.rfind("experiment_id,statistic_name,value,stderr,"
                     "reference_value,bound,pass\n", 0) == 0);
  REQUIRE(csv1.find("prob_maps_3_to_4,0,") != std::string::npos);
  // Sidecar carries provenance.
  Json sidecar = load_json_file(out1 + ".json");
  REQUIRE(sidecar.contains("git_hash"));
  REQUIRE(sidecar.at("seed").get<std::uint64_t>() == 20240901ULL);
  REQUIRE(sidecar.at("all_pass").get<bool>());
}

TEST_CASE("explicit walk-verify instance") {
  TempDir tmp;
  const std::string cfg = tmp.file("walk.json");
  {
    std::ofstream out(cfg);
    // D8 with the rotation chain; odd/even steps as in the worked example.
    out << R"({
      "command": "walk-verify",
      "seed": 7,
      "parameters": {
        "group": "dihedral:4",
        "chain": [[0, 1, 2, 3], [0, 1, 2, 3, 4, 5, 6, 7]],
        "steps": [
          {"uniform_on": [0, 1]},
          {"weights": [0.7, 0, 0, 0, 0.3, 0, 0, 0]},
          {"uniform_on": [0, 1]},
          {"weights": [0.7, 0, 0, 0, 0.3, 0, 0, 0]}
        ]
      }
    })";
  }
  const std::string out_base = tmp.file("walk-out");
  REQUIRE(run_with_config(cfg, out_base) == cli::kExitOk);
  Json sidecar = load_json_file(out_base + ".json");
  REQUIRE(sidecar.at("feasible").get<bool>());
  REQUIRE(sidecar.at("levels").size() == 2);
}

TEST_CASE("greedy chain request works through the config path") {
  TempDir tmp;
  const std::string cfg = tmp.file("greedy.json");
  {
    std::ofstream out(cfg);
    out << R"({
      "command": "walk-verify",
      "seed": 7,
      "parameters": {
        "group": "quaternion",
        "chain": "greedy",
        "steps": [{"uniform_on": [0, 1, 2, 3]}, {"uniform_on": [0, 4]}]
      }
    })";
  }
  REQUIRE(run_with_config(cfg, tmp.file("g")) == cli::kExitOk);
}

TEST_CASE("builtin manifest entries resolve to loadable configs") {
  const std::string dir = GROUPMIX_CONFIG_DIR;
  for (const auto& e : cli::builtin_experiments()) {
    const std::string path = dir + "/" + e.file;
    INFO(path);
    Json config = load_json_file(path);
    REQUIRE(config.contains("command"));
    REQUIRE(config.contains("parameters"));
    REQUIRE(config.contains("seed"));
    REQUIRE_FALSE(e.description.empty());
  }
  // The manifest includes the named acceptance experiments.
  bool has_a5 = false, has_dihedral = false;
  for (const auto& e : cli::builtin_experiments()) {
    has_a5 = has_a5 || e.name == "a5-counterexample";
    has_dihedral = has_dihedral || e.name == "dihedral-golden";
  }
  REQUIRE(has_a5);
  REQUIRE(has_dihedral);
}

TEST_CASE("lattice cache round-trips through the environment directory") {
  TempDir tmp;
  ::setenv("GROUPMIX_CACHE_DIR", tmp.path.string().c_str(), 1);
  auto g = FiniteGroup::dihedral(4);
  SubgroupLattice first = cli::cached_subgroup_lattice(g);
  bool wrote = false;
  for (const auto& entry : fs::directory_iterator(tmp.path))
    wrote = wrote || entry.path().extension() == ".json";
  REQUIRE(wrote);
  SubgroupLattice second = cli::cached_subgroup_lattice(g);
  REQUIRE(second.size() == first.size());
  for (std::size_t i = 0; i < first.size(); ++i)
    REQUIRE(second.subgroups[i].elements == first.subgroups[i].elements);
  ::unsetenv("GROUPMIX_CACHE_DIR");
}

TEST_CASE("measure and group parsing errors") {
  auto z4 = FiniteGroup::cyclic(4);
  REQUIRE_THROWS_AS(measure_from_json(Json{{"weights", {0.5, 0.5}}}, z4),
                    ConfigInvalidError);
  REQUIRE_THROWS_AS(measure_from_json(Json{{"dirac", 9}}, z4), ConfigInvalidError);
  REQUIRE_THROWS_AS(group_from_json(Json("flurble")), ConfigInvalidError);
  REQUIRE(group_from_json(Json("cyclic:6"))->order() == 6);
  REQUIRE(group_from_json(Json::array({2, 3}))->order() == 6);
}
