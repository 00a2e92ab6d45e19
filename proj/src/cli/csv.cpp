#include "csv.hpp"

#include <array>
#include <charconv>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "loschmidt/cli.hpp"

namespace loschmidt::cli {

std::string format_number(double v) {
  if (v == 0.0) return "0";  // also folds -0
  std::array<char, 32> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), p);
}

void write_csv(std::ostream& os, const Output& output, unsigned threads) {
  os << "# loschmidt " << output.command << "\n";
  os << "# version=" << LOSCHMIDT_VERSION << "\n";
  os << "# threads=" << threads << "\n";
  os << "#@ command=" << output.command << "\n";
  for (const auto& [k, v] : output.settings) os << "#@ " << k << "=" << v << "\n";
  for (const auto& n : output.table.notes) os << "#" << n << "\n";
  const auto& cols = output.table.columns;
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (const auto& row : output.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << "\n";
  }
}

std::optional<std::size_t> CsvData::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  return std::nullopt;
}

CsvData read_csv(std::istream& in, const std::string& name) {
  CsvData out;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!header) {
      out.columns = cells;
      header = true;
      continue;
    }
    if (cells.size() != out.columns.size())
      throw ConfigError(name + ":" + std::to_string(lineno) + ": expected " + std::to_string(out.columns.size()) +
                        " cells, found " + std::to_string(cells.size()));
    std::vector<double> row(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& c = cells[i];
      auto [p, ec] = std::from_chars(c.data(), c.data() + c.size(), row[i]);
      if (ec == std::errc::result_out_of_range) {
        // subnormal or overflowing cells: take strtod's rounding
        char* end = nullptr;
        row[i] = std::strtod(c.c_str(), &end);
        p = end;
        ec = std::errc();
      }
      if (ec != std::errc() || p != c.data() + c.size())
        throw ConfigError(name + ":" + std::to_string(lineno) + ": '" + c + "' is not a number");
    }
    out.rows.push_back(std::move(row));
  }
  if (!header) throw ConfigError(name + ": no header line");
  return out;
}

}  // namespace loschmidt::cli
