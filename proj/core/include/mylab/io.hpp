#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "mylab/matrixproc.hpp"
#include "mylab/paths.hpp"

namespace mylab::io {

using Provenance = std::vector<std::pair<std::string, std::string>>;

/// Shortest round-trip decimal form; deterministic across runs.
std::string format_double(double x);

/// Text table written as CSV. Provenance entries become leading `# key=value` lines.
class Table {
 public:
  explicit Table(std::vector<std::string> columns);

  void add_row(std::vector<std::string> cells);
  void add_row(const std::vector<double>& values);

  const std::vector<std::string>& columns() const noexcept { return columns_; }
  const std::vector<std::vector<std::string>>& rows() const noexcept { return rows_; }

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

void write_csv(const std::filesystem::path& file, const Table& table,
               const Provenance& provenance = {});

/// Columns t,value.
Table path_table(const paths::ScalarPath& path);

/// Columns replica,t,value.
Table long_path_table(const std::vector<paths::ScalarPath>& replicas);

/// Columns t,r_1..r_p.
Table radial_table(const std::vector<double>& times,
                   const std::vector<matrixproc::RadialVector>& radial);

void write_text(const std::filesystem::path& file, const std::string& contents);

}  // namespace mylab::io
