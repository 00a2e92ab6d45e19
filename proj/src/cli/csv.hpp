#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace loschmidt::cli {

struct CsvData {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  std::optional<std::size_t> column(const std::string& name) const;
};

// Skips '#' lines; the first other line is the header. Every cell must be
// numeric. Throws ConfigError naming the file and line otherwise.
CsvData read_csv(std::istream& in, const std::string& name);

}  // namespace loschmidt::cli
