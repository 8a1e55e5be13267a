#pragma once

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace finjj {

/// Observable columns tabulated against a grid, by default of offset charge.
struct SweepTable {
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  std::string grid_name = "n_g";
  std::vector<double> grid;
  std::vector<std::pair<std::string, std::vector<double>>> columns;

  void add_column(std::string name, std::vector<double> values);
  bool has_column(const std::string& name) const;
  const std::vector<double>& column(const std::string& name) const;

  // Throws DomainError unless every column matches the grid length and the
  // grid is strictly increasing.
  void validate() const;
};

/// CSV with a `# key = value` meta preamble, a header row starting with the
/// grid name, CRLF line ends and 17 significant digits.
void write_csv(std::ostream& out, const SweepTable& table);
SweepTable read_csv(std::istream& in);

/// {"meta": {...}, "grid": [...], "columns": {"E0": [...], ...}}, plus
/// "grid_name" when it is not n_g. NaN is written as null.
std::string to_json(const SweepTable& table, int indent = -1);
SweepTable from_json(const std::string& text);

}  // namespace finjj
