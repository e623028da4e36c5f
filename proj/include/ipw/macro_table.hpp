#pragma once

#include <string>
#include <vector>

#include "ipw/quarter.hpp"

namespace ipw {

// Validated quarterly multi-series table. Invariants (enforced by
// validate(), called from load_csv):
//   - every column has one value per date
//   - dates strictly increasing consecutive quarters, no gaps
//   - all values finite
class MacroTable {
 public:
  std::vector<Quarter> dates;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // parallel to names

  std::size_t rows() const { return dates.size(); }

  bool has_column(const std::string& name) const;
  const std::vector<double>& col(const std::string& name) const;
  void add_column(const std::string& name, std::vector<double> values);

  // Throws ipw::Error(bad_data) with row/column location on violation.
  void validate() const;
};

MacroTable load_csv(const std::string& path,
                    const std::string& date_col = "date");

// Full round-trip precision (17 significant digits).
void write_csv(const MacroTable& table, const std::string& path,
               const std::string& date_col = "date");

enum class TransformKind { log, diff, lag };

struct TransformStep {
  TransformKind kind;
  std::string column;
  std::string name;  // derived column name; empty = "<kind>_<column>"
};

TransformKind parse_transform_kind(const std::string& text);

// Appends the derived column. diff/lag consume one leading row: every
// existing column and the date index are shortened by one so all columns
// stay aligned.
MacroTable transform(const MacroTable& table,
                     const std::vector<TransformStep>& steps);

}  // namespace ipw
