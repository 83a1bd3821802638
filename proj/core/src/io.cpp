#include "mylab/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace mylab::io {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

Table::Table(std::vector<std::string> columns) : columns_(std::move(columns)) {
  if (columns_.empty()) throw std::invalid_argument("Table: no columns");
}

void Table::add_row(std::vector<std::string> cells) {
  if (cells.size() != columns_.size()) throw std::invalid_argument("Table: row width mismatch");
  rows_.push_back(std::move(cells));
}

void Table::add_row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(format_double(v));
  add_row(std::move(cells));
}

namespace {

std::ofstream open_out(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + file.string() + " for writing");
  return out;
}

void write_line(std::ofstream& out, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out << ',';
    out << cells[i];
  }
  out << '\n';
}

}  // namespace

void write_csv(const std::filesystem::path& file, const Table& table,
               const Provenance& provenance) {
  std::ofstream out = open_out(file);
  for (const auto& [k, v] : provenance) out << "# " << k << '=' << v << '\n';
  write_line(out, table.columns());
  for (const auto& row : table.rows()) write_line(out, row);
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

Table path_table(const paths::ScalarPath& path) {
  Table t({"t", "value"});
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    t.add_row(std::vector<double>{path.grid.time(k), path.values[k]});
  }
  return t;
}

Table long_path_table(const std::vector<paths::ScalarPath>& replicas) {
  Table t({"replica", "t", "value"});
  for (std::size_t r = 0; r < replicas.size(); ++r) {
    const auto& p = replicas[r];
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      t.add_row({std::to_string(r), format_double(p.grid.time(k)), format_double(p.values[k])});
    }
  }
  return t;
}

Table radial_table(const std::vector<double>& times,
                   const std::vector<matrixproc::RadialVector>& radial) {
  if (times.size() != radial.size() || radial.empty()) {
    throw std::invalid_argument("radial_table: size mismatch");
  }
  std::vector<std::string> cols{"t"};
  for (std::size_t i = 0; i < radial.front().size(); ++i) cols.push_back("r_" + std::to_string(i + 1));
  Table t(cols);
  for (std::size_t k = 0; k < times.size(); ++k) {
    std::vector<double> row{times[k]};
    for (double v : radial[k].values()) row.push_back(v);
    t.add_row(row);
  }
  return t;
}

void write_text(const std::filesystem::path& file, const std::string& contents) {
  std::ofstream out = open_out(file);
  out << contents;
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

}  // namespace mylab::io
