#include "finjj/sweep_table.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "finjj/errors.hpp"

namespace finjj {

void SweepTable::add_column(std::string name, std::vector<double> values) {
  if (has_column(name)) throw DomainError("SweepTable: duplicate column " + name);
  columns.emplace_back(std::move(name), std::move(values));
}

bool SweepTable::has_column(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.first == name) return true;
  }
  return false;
}

const std::vector<double>& SweepTable::column(const std::string& name) const {
  for (const auto& c : columns) {
    if (c.first == name) return c.second;
  }
  throw DomainError("SweepTable: no column named " + name);
}

void SweepTable::validate() const {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("SweepTable: grid is not strictly increasing");
  }
  for (const auto& [name, values] : columns) {
    if (values.size() != grid.size()) {
      throw DomainError("SweepTable: column " + name + " has " + std::to_string(values.size()) +
                        " entries for a grid of " + std::to_string(grid.size()));
    }
  }
}

namespace {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw DomainError("CSV: not a number: '" + s + "'");
  return x;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += ch;
    }
  }
  out.push_back(std::move(field));
  return out;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

void write_csv(std::ostream& out, const SweepTable& table) {
  table.validate();
  for (const auto& [key, value] : table.meta.items()) {
    out << "# " << key << " = " << value.dump() << "\r\n";
  }
  out << quote_if_needed(table.grid_name);
  for (const auto& c : table.columns) out << ',' << quote_if_needed(c.first);
  out << "\r\n";
  for (std::size_t i = 0; i < table.grid.size(); ++i) {
    out << format_double(table.grid[i]);
    for (const auto& c : table.columns) out << ',' << format_double(c.second[i]);
    out << "\r\n";
  }
}

SweepTable read_csv(std::istream& in) {
  SweepTable table;
  std::string line;
  bool have_header = false;
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos && eq > 2) {
        const std::string key = line.substr(2, eq - 2);
        try {
          table.meta[key] = nlohmann::ordered_json::parse(line.substr(eq + 3));
        } catch (const nlohmann::json::exception&) {
          table.meta[key] = line.substr(eq + 3);
        }
      }
      continue;
    }
    const auto fields = split_fields(line);
    if (!have_header) {
      if (fields.size() < 1 || fields.front().empty()) throw DomainError("CSV: empty header row");
      table.grid_name = fields.front();
      names.assign(fields.begin() + 1, fields.end());
      values.resize(names.size());
      have_header = true;
      continue;
    }
    if (fields.size() != names.size() + 1) throw DomainError("CSV: row width does not match header");
    table.grid.push_back(parse_double(fields[0]));
    for (std::size_t c = 0; c < names.size(); ++c) values[c].push_back(parse_double(fields[c + 1]));
  }
  if (!have_header) throw DomainError("CSV: missing header row");
  for (std::size_t c = 0; c < names.size(); ++c) table.add_column(names[c], std::move(values[c]));
  table.validate();
  return table;
}

namespace {

nlohmann::ordered_json number_array(const std::vector<double>& v) {
  auto a = nlohmann::ordered_json::array();
  for (double x : v) {
    if (std::isfinite(x)) {
      a.push_back(x);
    } else {
      a.push_back(nullptr);
    }
  }
  return a;
}

std::vector<double> read_array(const nlohmann::ordered_json& a) {
  std::vector<double> v;
  v.reserve(a.size());
  for (const auto& x : a) v.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
  return v;
}

}  // namespace

std::string to_json(const SweepTable& table, int indent) {
  table.validate();
  nlohmann::ordered_json j;
  j["meta"] = table.meta;
  if (table.grid_name != "n_g") j["grid_name"] = table.grid_name;
  j["grid"] = number_array(table.grid);
  auto cols = nlohmann::ordered_json::object();
  for (const auto& [name, values] : table.columns) cols[name] = number_array(values);
  j["columns"] = std::move(cols);
  return j.dump(indent);
}

SweepTable from_json(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("grid") || !j.contains("columns")) {
    throw DomainError("JSON: expected an object with grid and columns");
  }
  SweepTable table;
  if (j.contains("meta")) table.meta = j["meta"];
  if (j.contains("grid_name")) table.grid_name = j["grid_name"].get<std::string>();
  table.grid = read_array(j["grid"]);
  for (const auto& [name, values] : j["columns"].items()) table.add_column(name, read_array(values));
  table.validate();
  return table;
}

}  // namespace finjj
