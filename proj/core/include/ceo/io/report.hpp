#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ceo/fit/least_squares.hpp"

namespace ceo::io {

// Structured fit report: estimates, 95% CIs, covariance, cost trace, status,
// derived quantities (e.g. rates in Hz), and input digests.
std::string fit_report_json(const std::string& recipe, const fit::FitResult& result,
                            const std::vector<std::pair<std::string, double>>& derived,
                            const std::vector<std::pair<std::string, std::string>>& inputs);

void write_fit_report(const std::string& path, const std::string& recipe,
                      const fit::FitResult& result,
                      const std::vector<std::pair<std::string, double>>& derived,
                      const std::vector<std::pair<std::string, std::string>>& inputs);

// Machine-readable error JSON for the CLI's stderr channel.
std::string error_json(const std::string& kind, const std::string& message,
                       const std::vector<std::string>& details = {});

}  // namespace ceo::io
