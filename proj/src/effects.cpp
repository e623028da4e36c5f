#include "ipw/effects.hpp"

#include <boost/math/distributions/students_t.hpp>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "ipw/errors.hpp"

namespace ipw {

Variant parse_variant(const std::string& text) {
  if (text == "wls-a2" || text == "wls_a2") return Variant::wls_a2;
  if (text == "ols-a2" || text == "ols_a2") return Variant::ols_a2;
  if (text == "wls-a1" || text == "wls_a1") return Variant::wls_a1;
  throw Error(ErrorCode::bad_spec, "unknown variant '" + text + "'");
}

Parameterization parse_parameterization(const std::string& text) {
  if (text == "ref" || text == "reference_coded")
    return Parameterization::reference_coded;
  if (text == "cell" || text == "cell_means")
    return Parameterization::cell_means;
  throw Error(ErrorCode::bad_spec,
              "unknown parameterization '" + text + "'");
}

TableFormat parse_table_format(const std::string& text) {
  if (text == "text") return TableFormat::text;
  if (text == "csv") return TableFormat::csv;
  if (text == "json") return TableFormat::json;
  throw Error(ErrorCode::bad_spec, "unknown format '" + text + "'");
}

std::string variant_name(Variant v) {
  switch (v) {
    case Variant::wls_a2: return "WLS (A2)";
    case Variant::ols_a2: return "OLS (A2)";
    case Variant::wls_a1: return "WLS (A1)";
  }
  return "?";
}

std::string stars_for(double p_value) {
  if (p_value < 0.001) return "***";
  if (p_value < 0.01) return "**";
  if (p_value < 0.05) return "*";
  return "";
}

EstimationResult estimate_dummy_regression(
    const Eigen::VectorXd& response, const TreatmentAssignment& assignment,
    const Eigen::VectorXd& weights, Variant variant,
    Parameterization parameterization, const EstimateOptions& options) {
  const Eigen::Index n = response.size();
  const auto counts = assignment.class_counts();
  for (int j = 0; j < kTreatmentClasses; ++j)
    if (counts[static_cast<std::size_t>(j)] == 0)
      throw Error(ErrorCode::empty_cell,
                  "treatment class " + std::to_string(j + 1) +
                      " is empty in-sample");

  Eigen::MatrixXd design;
  if (parameterization == Parameterization::cell_means) {
    design = assignment.dummies;
  } else {
    design.resize(n, kTreatmentClasses);
    design.col(0).setOnes();
    design.rightCols(kTreatmentClasses - 1) =
        assignment.dummies.rightCols(kTreatmentClasses - 1);
  }

  const bool use_weights = variant != Variant::ols_a2;
  const FitResult fit =
      use_weights ? wls_fit(design, response, weights, options.robust_se)
                  : ols_fit(design, response, options.robust_se);

  EstimationResult result;
  result.variant = variant;
  result.parameterization = parameterization;
  result.r_squared = fit.r_squared;
  result.n = static_cast<int>(n);

  const boost::math::students_t tdist(static_cast<double>(fit.dof));
  const Eigen::VectorXd se = fit.std_errors();
  for (int j = 0; j < kTreatmentClasses; ++j) {
    result.betas[static_cast<std::size_t>(j)] = fit.coefficients(j);
    result.std_errors[static_cast<std::size_t>(j)] = se(j);
    const double t = fit.coefficients(j) / se(j);
    const double p =
        2.0 * boost::math::cdf(boost::math::complement(tdist, std::abs(t)));
    result.p_values[static_cast<std::size_t>(j)] = p;
    result.stars[static_cast<std::size_t>(j)] = stars_for(p);
  }
  return result;
}

EstimationResult estimate(const Panel& panel, const BaselineFit& baseline,
                          const PropensityFit& propensity, Variant variant,
                          Parameterization parameterization,
                          const EstimateOptions& options) {
  const Eigen::VectorXd response = variant == Variant::wls_a1
                                       ? response_a1(panel)
                                       : response_a2(panel, baseline);
  const TreatmentAssignment assignment = classify(panel.g);
  if (propensity.weights.size() != panel.rows())
    throw Error(ErrorCode::bad_spec,
                "propensity fit is for a different panel");
  return estimate_dummy_regression(response, assignment, propensity.weights,
                                   variant, parameterization, options);
}

namespace {

const char* kRowLabels[kTreatmentClasses] = {
    "Large fiscal contraction",
    "Small fiscal contraction",
    "Small fiscal expansion",
    "Large fiscal expansion",
};

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

void check_consistent(const std::vector<EstimationResult>& results) {
  if (results.empty())
    throw Error(ErrorCode::bad_spec, "no results to render");
  for (const auto& r : results) {
    if (r.parameterization != results.front().parameterization)
      throw Error(ErrorCode::bad_spec,
                  "mixed parameterizations in one table");
    if (r.n != results.front().n)
      throw Error(ErrorCode::bad_spec, "mixed sample sizes in one table");
  }
}

std::string render_text(const std::vector<EstimationResult>& results) {
  const bool ref =
      results.front().parameterization == Parameterization::reference_coded;
  std::ostringstream out;
  const int label_w = 38, col_w = 14;
  out << "Regression results for the policy response\n\n";
  out << "Independent variable"
      << std::string(label_w - 20, ' ');
  for (const auto& r : results) {
    std::string name = variant_name(r.variant);
    out << name << std::string(col_w - name.size(), ' ');
  }
  out << '\n';
  for (int j = 0; j < kTreatmentClasses; ++j) {
    std::string label = kRowLabels[j];
    if (ref && j == 0) label += " (Intercept)";
    out << label << std::string(label_w - label.size(), ' ');
    for (const auto& r : results) {
      std::string cell = fixed4(r.betas[static_cast<std::size_t>(j)]);
      if (!r.stars[static_cast<std::size_t>(j)].empty())
        cell += " " + r.stars[static_cast<std::size_t>(j)];
      out << cell << std::string(col_w - cell.size(), ' ');
    }
    out << '\n' << std::string(label_w, ' ');
    for (const auto& r : results) {
      std::string cell =
          "(" + fixed4(r.std_errors[static_cast<std::size_t>(j)]) + ")";
      out << cell << std::string(col_w - cell.size(), ' ');
    }
    out << '\n';
  }
  out << "Number of observations" << std::string(label_w - 22, ' ');
  for (const auto& r : results) {
    std::string cell = std::to_string(r.n);
    out << cell << std::string(col_w - cell.size(), ' ');
  }
  out << '\n';
  out << "R^2" << std::string(label_w - 3, ' ');
  for (const auto& r : results) {
    std::string cell = fixed4(r.r_squared);
    out << cell << std::string(col_w - cell.size(), ' ');
  }
  out << '\n';
  out << "\nStandard errors are in parentheses. *** p < 0.001, "
         "** p < 0.01, * p < 0.05.\n";
  return out.str();
}

std::string render_csv(const std::vector<EstimationResult>& results) {
  std::ostringstream out;
  out << "row";
  for (const auto& r : results) out << ',' << variant_name(r.variant);
  out << '\n';
  char buf[40];
  auto full = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (int j = 0; j < kTreatmentClasses; ++j) {
    out << kRowLabels[j];
    for (const auto& r : results)
      out << ',' << full(r.betas[static_cast<std::size_t>(j)]);
    out << '\n';
    out << "se:" << kRowLabels[j];
    for (const auto& r : results)
      out << ',' << full(r.std_errors[static_cast<std::size_t>(j)]);
    out << '\n';
  }
  out << "n";
  for (const auto& r : results) out << ',' << r.n;
  out << '\n';
  out << "r_squared";
  for (const auto& r : results) out << ',' << full(r.r_squared);
  out << '\n';
  return out.str();
}

std::string render_json(const std::vector<EstimationResult>& results) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json item;
    item["variant"] = variant_name(r.variant);
    item["parameterization"] =
        r.parameterization == Parameterization::cell_means ? "cell_means"
                                                           : "reference_coded";
    item["betas"] = r.betas;
    item["std_errors"] = r.std_errors;
    item["p_values"] = r.p_values;
    item["stars"] = r.stars;
    item["r_squared"] = r.r_squared;
    item["n"] = r.n;
    doc.push_back(item);
  }
  return doc.dump(2) + "\n";
}

}  // namespace

std::string render_table(const std::vector<EstimationResult>& results,
                         TableFormat format) {
  check_consistent(results);
  switch (format) {
    case TableFormat::text: return render_text(results);
    case TableFormat::csv: return render_csv(results);
    case TableFormat::json: return render_json(results);
  }
  throw Error(ErrorCode::internal, "unreachable table format");
}

}  // namespace ipw
