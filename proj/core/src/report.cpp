#include "ceo/io/report.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

#include "ceo/constants.hpp"

namespace ceo::io {

using nlohmann::json;

std::string fit_report_json(const std::string& recipe, const fit::FitResult& result,
                            const std::vector<std::pair<std::string, double>>& derived,
                            const std::vector<std::pair<std::string, std::string>>& inputs) {
  json estimates = json::object();
  json ci = json::object();
  for (std::size_t i = 0; i < result.parameter_names.size(); ++i) {
    estimates[result.parameter_names[i]] = result.estimates(static_cast<Eigen::Index>(i));
    ci[result.parameter_names[i]] = result.ci95_half_width(static_cast<Eigen::Index>(i));
  }

  json covariance = json::array();
  for (Eigen::Index r = 0; r < result.covariance.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < result.covariance.cols(); ++c)
      row.push_back(result.covariance(r, c));
    covariance.push_back(row);
  }

  json derived_json = json::object();
  for (const auto& [key, value] : derived) derived_json[key] = value;
  json inputs_json = json::object();
  for (const auto& [key, value] : inputs) inputs_json[key] = value;

  json report{{"tool", "ceosim"},
              {"version", kVersion},
              {"recipe", recipe},
              {"status", fit::to_string(result.status)},
              {"cost", result.cost},
              {"iterations", result.iterations},
              {"n_residuals", result.n_residuals},
              {"estimates", estimates},
              {"ci95_half_width", ci},
              {"covariance", covariance},
              {"cost_trace", result.cost_trace},
              {"derived", derived_json},
              {"inputs", inputs_json}};
  return report.dump(2);
}

void write_fit_report(const std::string& path, const std::string& recipe,
                      const fit::FitResult& result,
                      const std::vector<std::pair<std::string, double>>& derived,
                      const std::vector<std::pair<std::string, std::string>>& inputs) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write fit report '" + path + "'");
  out << fit_report_json(recipe, result, derived, inputs) << "\n";
}

std::string error_json(const std::string& kind, const std::string& message,
                       const std::vector<std::string>& details) {
  json err{{"error", kind}, {"message", message}};
  if (!details.empty()) err["details"] = details;
  return err.dump();
}

}  // namespace ceo::io
