#include "ipw/panel.hpp"

#include <cmath>

#include "ipw/errors.hpp"

namespace ipw {

CovariateKind parse_covariate_kind(const std::string& text) {
  if (text == "log_diff") return CovariateKind::log_diff;
  if (text == "diff") return CovariateKind::diff;
  if (text == "diff_log") return CovariateKind::diff_log;
  throw Error(ErrorCode::bad_spec, "unknown covariate kind '" + text + "'");
}

namespace {

double checked_log(double v, const std::string& column, std::size_t row) {
  if (v <= 0.0)
    throw Error(ErrorCode::bad_data,
                "log of non-positive value at (" + std::to_string(row) +
                    ", " + column + ")");
  return std::log(v);
}

bool wants_log(const PanelConfig& config, const std::string& column) {
  for (const auto& c : config.z_log_cols)
    if (c == column) return true;
  return false;
}

}  // namespace

Panel assemble_panel(const MacroTable& table, const PanelConfig& config) {
  const auto& ycol = table.col(config.y_col);
  const auto& gcol = table.col(config.g_col);
  for (const auto& name : config.z_cols) table.col(name);  // existence check
  for (const auto& spec : config.x_recipe) table.col(spec.column);

  const std::size_t raw = table.rows();
  // x_{t-1} differences need levels at t-2; the lead needs t+1.
  const std::size_t lost_front = 2, lost_back = 1;
  const std::size_t k = config.x_recipe.size();
  const std::size_t min_rows = 4 + k + 1;  // J + k + 1
  if (raw < lost_front + lost_back ||
      raw - lost_front - lost_back < min_rows)
    throw Error(ErrorCode::bad_data,
                "insufficient rows after alignment: " +
                    std::to_string(raw < lost_front + lost_back
                                       ? 0
                                       : raw - lost_front - lost_back) +
                    " < " + std::to_string(min_rows));

  const std::size_t n = raw - lost_front - lost_back;
  Panel panel;
  panel.t.reserve(n);
  panel.y.resize(n);
  panel.y_next.resize(n);
  panel.g.resize(n);
  panel.x.resize(n, static_cast<Eigen::Index>(k));
  panel.z.resize(n, static_cast<Eigen::Index>(config.z_cols.size()));

  for (std::size_t i = lost_front; i + lost_back < raw; ++i) {
    const std::size_t r = i - lost_front;
    panel.t.push_back(table.dates[i]);
    panel.y(r) = checked_log(ycol[i], config.y_col, i);
    panel.y_next(r) = checked_log(ycol[i + 1], config.y_col, i + 1);
    panel.g(r) = checked_log(gcol[i], config.g_col, i) -
                 checked_log(gcol[i - 1], config.g_col, i - 1);

    for (std::size_t j = 0; j < k; ++j) {
      const auto& spec = config.x_recipe[j];
      const auto& c = table.col(spec.column);
      double v;
      switch (spec.kind) {
        case CovariateKind::diff:
          v = c[i - 1] - c[i - 2];
          break;
        case CovariateKind::log_diff:
        case CovariateKind::diff_log:
          v = checked_log(c[i - 1], spec.column, i - 1) -
              checked_log(c[i - 2], spec.column, i - 2);
          break;
      }
      panel.x(r, static_cast<Eigen::Index>(j)) = v;
    }

    for (std::size_t j = 0; j < config.z_cols.size(); ++j) {
      const auto& c = table.col(config.z_cols[j]);
      panel.z(r, static_cast<Eigen::Index>(j)) =
          wants_log(config, config.z_cols[j])
              ? checked_log(c[i - 1], config.z_cols[j], i - 1)
              : c[i - 1];
    }
  }
  return panel;
}

}  // namespace ipw
