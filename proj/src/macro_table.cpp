#include "ipw/macro_table.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include "ipw/errors.hpp"

namespace ipw {

Quarter Quarter::parse(const std::string& text) {
  auto fail = [&] {
    throw Error(ErrorCode::bad_data, "unparsable date '" + text + "'");
  };
  int year = 0, sub = 0;
  char sep = 0;
  std::istringstream in(text);
  if (!(in >> year)) fail();
  if (!(in >> sep)) fail();
  if (sep == 'Q' || sep == 'q') {
    if (!(in >> sub) || sub < 1 || sub > 4) fail();
    return Quarter{year, sub};
  }
  if (sep == '-') {
    int month = 0, day = 0;
    char dash = 0;
    if (!(in >> month >> dash >> day) || dash != '-') fail();
    if (month < 1 || month > 12) fail();
    return Quarter{year, (month - 1) / 3 + 1};
  }
  fail();
  return {};
}

bool MacroTable::has_column(const std::string& name) const {
  return std::find(names.begin(), names.end(), name) != names.end();
}

const std::vector<double>& MacroTable::col(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return columns[i];
  throw Error(ErrorCode::bad_data, "unknown column '" + name + "'");
}

void MacroTable::add_column(const std::string& name,
                            std::vector<double> values) {
  if (has_column(name))
    throw Error(ErrorCode::bad_data, "duplicate column '" + name + "'");
  names.push_back(name);
  columns.push_back(std::move(values));
}

void MacroTable::validate() const {
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (columns[c].size() != dates.size())
      throw Error(ErrorCode::bad_data,
                  "column '" + names[c] + "' has " +
                      std::to_string(columns[c].size()) + " values for " +
                      std::to_string(dates.size()) + " dates");
    for (std::size_t r = 0; r < columns[c].size(); ++r)
      if (!std::isfinite(columns[c][r]))
        throw Error(ErrorCode::bad_data,
                    "non-finite value at (" + std::to_string(r) + ", " +
                        names[c] + ")");
  }
  for (std::size_t r = 1; r < dates.size(); ++r) {
    if (dates[r] <= dates[r - 1])
      throw Error(ErrorCode::bad_data,
                  "dates not increasing at row " + std::to_string(r) + " (" +
                      dates[r].str() + ")");
    if (dates[r] != dates[r - 1].next())
      throw Error(ErrorCode::bad_data,
                  "gap in quarters: expected " + dates[r - 1].next().str() +
                      ", found " + dates[r].str());
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) {
    // trim whitespace and CR
    auto b = field.find_first_not_of(" \t\r");
    auto e = field.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

MacroTable load_csv(const std::string& path, const std::string& date_col) {
  std::ifstream in(path);
  if (!in)
    throw Error(ErrorCode::data_not_found, "cannot open '" + path + "'");

  std::string line;
  if (!std::getline(in, line))
    throw Error(ErrorCode::bad_data, "empty file '" + path + "'");
  const auto header = split_csv_line(line);

  std::size_t date_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == date_col) date_idx = i;
  if (date_idx == header.size())
    throw Error(ErrorCode::bad_data,
                "missing column '" + date_col + "' in '" + path + "'");

  MacroTable table;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (i != date_idx) {
      table.names.push_back(header[i]);
      table.columns.emplace_back();
    }

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw Error(ErrorCode::bad_data,
                  "row " + std::to_string(row) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    std::size_t c = 0;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i == date_idx) {
        table.dates.push_back(Quarter::parse(fields[i]));
        continue;
      }
      const char* s = fields[i].c_str();
      char* end = nullptr;
      double v = std::strtod(s, &end);
      if (end == s || *end != '\0' || !std::isfinite(v))
        throw Error(ErrorCode::bad_data,
                    "non-finite value at (" + std::to_string(row) + ", " +
                        table.names[c] + ")");
      table.columns[c].push_back(v);
      ++c;
    }
    ++row;
  }

  // rows sorted by date before the gap check
  std::vector<std::size_t> order(table.rows());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.dates[a] < table.dates[b];
  });
  MacroTable sorted;
  sorted.names = table.names;
  sorted.columns.resize(table.columns.size());
  for (std::size_t r : order) {
    sorted.dates.push_back(table.dates[r]);
    for (std::size_t c = 0; c < table.columns.size(); ++c)
      sorted.columns[c].push_back(table.columns[c][r]);
  }

  sorted.validate();
  return sorted;
}

void write_csv(const MacroTable& table, const std::string& path,
               const std::string& date_col) {
  std::ofstream out(path);
  if (!out)
    throw Error(ErrorCode::data_not_found, "cannot write '" + path + "'");
  out << date_col;
  for (const auto& n : table.names) out << ',' << n;
  out << '\n';
  char buf[40];
  for (std::size_t r = 0; r < table.rows(); ++r) {
    out << table.dates[r].str();
    for (const auto& c : table.columns) {
      std::snprintf(buf, sizeof buf, "%.17g", c[r]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

TransformKind parse_transform_kind(const std::string& text) {
  if (text == "log") return TransformKind::log;
  if (text == "diff") return TransformKind::diff;
  if (text == "lag") return TransformKind::lag;
  throw Error(ErrorCode::bad_spec, "unknown transform kind '" + text + "'");
}

namespace {

MacroTable apply_step(const MacroTable& table, const TransformStep& step) {
  const auto& src = table.col(step.column);
  std::string name = step.name;
  MacroTable out;
  out.names = table.names;

  switch (step.kind) {
    case TransformKind::log: {
      if (name.empty()) name = "log_" + step.column;
      std::vector<double> derived(src.size());
      for (std::size_t i = 0; i < src.size(); ++i) {
        if (src[i] <= 0.0)
          throw Error(ErrorCode::bad_data,
                      "log of non-positive value at (" + std::to_string(i) +
                          ", " + step.column + ")");
        derived[i] = std::log(src[i]);
      }
      out.dates = table.dates;
      out.columns = table.columns;
      out.add_column(name, std::move(derived));
      return out;
    }
    case TransformKind::diff:
    case TransformKind::lag: {
      if (src.size() < 2)
        throw Error(ErrorCode::bad_data,
                    "column '" + step.column + "' too short to " +
                        (step.kind == TransformKind::diff ? "diff" : "lag"));
      if (name.empty())
        name = (step.kind == TransformKind::diff ? "diff_" : "lag_") +
               step.column;
      const std::size_t n = table.rows();
      out.dates.assign(table.dates.begin() + 1, table.dates.end());
      for (const auto& c : table.columns)
        out.columns.emplace_back(c.begin() + 1, c.end());
      std::vector<double> derived(n - 1);
      for (std::size_t i = 1; i < n; ++i)
        derived[i - 1] = step.kind == TransformKind::diff
                             ? src[i] - src[i - 1]
                             : src[i - 1];
      out.add_column(name, std::move(derived));
      return out;
    }
  }
  throw Error(ErrorCode::internal, "unreachable transform kind");
}

}  // namespace

MacroTable transform(const MacroTable& table,
                     const std::vector<TransformStep>& steps) {
  MacroTable out = table;
  for (const auto& step : steps) out = apply_step(out, step);
  out.validate();
  return out;
}

}  // namespace ipw
