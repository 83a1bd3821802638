#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mylab/error.hpp"
#include "mylab/experiments.hpp"

namespace ex = mylab::experiments;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Registry, ListsAllExperiments) {
  std::vector<std::string> names;
  for (const auto& e : ex::registry()) names.push_back(e.name);
  for (const char* want : {"my-convergence", "my-generator", "conditional-law", "pitman-discrete",
                           "tree-samelaw", "supq-limit", "spherical-limit", "toda-identity",
                           "hoogenboom-det"}) {
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
  }
  EXPECT_EQ(ex::info("toda-identity").name, "toda-identity");
}

TEST(Run, RejectsBadInput) {
  ex::ExperimentConfig c;
  c.name = "no-such-experiment";
  EXPECT_THROW(ex::run(c), mylab::UnknownExperiment);
  EXPECT_THROW(ex::info("no-such-experiment"), mylab::UnknownExperiment);
  c.name = "pitman-discrete";
  c.tolerances["bogus"] = 1.0;
  EXPECT_THROW(ex::run(c), mylab::ConfigError);
}

TEST(Run, SmallPitmanPasses) {
  ex::ExperimentConfig c;
  c.name = "pitman-discrete";
  c.n = 10;
  const auto r = ex::run(c);
  EXPECT_TRUE(r.passed());
  EXPECT_FALSE(r.checks.empty());
  EXPECT_FALSE(r.exact_laws.empty());
  for (const auto& ch : r.checks) {
    ASSERT_FALSE(ch.provenance.empty());
    EXPECT_EQ(ch.provenance.front().first, "seed");
  }
  const auto json = ex::report_json(r);
  EXPECT_NE(json.find("\"experiment\": \"pitman-discrete\""), std::string::npos);
}

TEST(Run, ArtifactsAreByteIdenticalAcrossRuns) {
  const auto base = std::filesystem::temp_directory_path() / "mylab_determinism";
  std::filesystem::remove_all(base);
  ex::ExperimentConfig c;
  c.name = "my-convergence";
  c.n_paths = 500;
  c.seeds = 3;
  c.dt = 0.01;
  c.q = 1000;
  c.out_dir = base / "a";
  ex::write_artifacts(c, ex::run(c));
  c.out_dir = base / "b";
  c.workers = 1;
  ex::write_artifacts(c, ex::run(c));
  for (const char* f : {"moment.csv", "shared_noise.csv", "path_seed0.csv"}) {
    const auto a = slurp(base / "a" / "my-convergence" / f);
    EXPECT_FALSE(a.empty()) << f;
    EXPECT_EQ(a, slurp(base / "b" / "my-convergence" / f)) << f;
  }
  EXPECT_TRUE(std::filesystem::exists(base / "a" / "my-convergence" / "report.json"));
  std::filesystem::remove_all(base);
}
