#pragma once

// Column-ordered result tables written as CSV or JSON.

#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "ringqfi/errors.hpp"

namespace ringqfi {

using Cell = std::variant<double, long long, bool, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw DomainError("row width does not match the header");
    rows.push_back(std::move(row));
  }

  const Cell& at(std::size_t row, const std::string& column) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
      if (columns[i] == column) return rows.at(row)[i];
    throw DomainError("no column '" + column + "'");
  }

  double number(std::size_t row, const std::string& column) const { return std::get<double>(at(row, column)); }
};

enum class OutputFormat { csv, json };

namespace detail {

inline std::string csv_cell(const Cell& c) {
  struct {
    std::string operator()(double v) const {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      return buf;
    }
    std::string operator()(long long v) const { return std::to_string(v); }
    std::string operator()(bool v) const { return v ? "true" : "false"; }
    std::string operator()(const std::string& v) const {
      if (v.find_first_of(",\"\n") == std::string::npos) return v;
      std::string q = "\"";
      for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      return q + "\"";
    }
  } visit;
  return std::visit(visit, c);
}

}  // namespace detail

inline void write_csv(std::ostream& out, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << detail::csv_cell(row[i]);
    out << '\n';
  }
}

inline nlohmann::ordered_json to_json(const Table& t) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t i = 0; i < row.size(); ++i)
      std::visit([&](const auto& v) { obj[t.columns[i]] = v; }, row[i]);
    arr.push_back(std::move(obj));
  }
  return arr;
}

inline void write_table(std::ostream& out, const Table& t, OutputFormat fmt) {
  if (fmt == OutputFormat::csv) {
    write_csv(out, t);
  } else {
    out << to_json(t).dump(2) << '\n';
  }
}

}  // namespace ringqfi
