#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mylab/io.hpp"
#include "mylab/stats.hpp"

namespace mylab::experiments {

/// Parameters left empty fall back to the experiment's defaults, which are
/// sized for the acceptance suite.
struct ExperimentConfig {
  std::string name;
  std::optional<int> q;
  std::optional<int> p;
  std::optional<int> n;
  std::optional<int> seeds;
  std::optional<double> horizon;
  std::optional<double> dt;
  std::optional<double> lambda;
  std::optional<std::size_t> n_paths;
  std::uint64_t seed = 20240611;
  std::map<std::string, double> tolerances;
  std::filesystem::path out_dir = "mylab-out";
  unsigned workers = 0;
};

struct Check {
  std::string name;
  int criterion = 0;
  bool passed = false;
  double value = 0.0;
  double bound = 0.0;
  std::string detail;
  io::Provenance provenance;
};

struct NamedTable {
  std::string file;
  io::Table table;
};

struct ExactLaw {
  std::string label;
  std::map<std::string, std::string> masses;
};

struct ExperimentResult {
  std::string experiment;
  io::Provenance provenance;
  std::vector<Check> checks;
  std::vector<stats::TestReport> reports;
  std::vector<NamedTable> tables;
  std::vector<ExactLaw> exact_laws;
  double seconds = 0.0;

  bool passed() const;
};

struct ExperimentInfo {
  std::string name;
  std::string summary;
  std::vector<std::string> csv_columns;
  std::vector<std::string> tolerance_keys;
};

const std::vector<ExperimentInfo>& registry();
const ExperimentInfo& info(const std::string& name);

/// Runs one experiment. Throws UnknownExperiment or ConfigError on bad input.
ExperimentResult run(const ExperimentConfig& config);

std::string report_json(const ExperimentResult& result);

/// Writes <out_dir>/<experiment>/report.json and one CSV per table.
void write_artifacts(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace mylab::experiments
