#pragma once

#include "lmcf/immersion.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace lmcf {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// 17 significant digits, '.' separator; non-finite values print as nan / inf / -inf.
std::string format_double(double x);

// Writes to a sibling temporary file and renames it over `path`, creating parent directories.
void atomic_write(const std::filesystem::path& path, const std::string& content);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  void add_row(const std::vector<double>& values);
  void add_row(const std::vector<std::string>& cells);
  std::string str() const;
  size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::string> rows_;
};

// Immersion CSV: a '#' metadata line with the grid and signature, a header, then one row per
// sample with its parameter coordinates and ambient position.
std::string immersion_csv(const VertexImmersion& im);
void write_immersion_csv(const std::filesystem::path& path, const VertexImmersion& im);
VertexImmersion read_immersion_csv(const std::filesystem::path& path);

}  // namespace lmcf
