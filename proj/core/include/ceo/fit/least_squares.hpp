#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace ceo::fit {

struct Parameter {
  std::string name;
  double initial = 0.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool fixed = false;
  // Typical magnitude used for finite-difference steps; 0 = max(|initial|, 1).
  double scale = 0.0;
};

enum class FitStatus { Converged, MaxIterations, Singular };

const char* to_string(FitStatus status);

struct FitResult {
  std::vector<std::string> parameter_names;
  Eigen::VectorXd estimates;        // full parameter vector, fixed entries passed through
  Eigen::MatrixXd covariance;       // sigma^2 (J^T J)^-1 at the optimum (zero rows for fixed)
  Eigen::VectorXd ci95_half_width;  // 1.96 sqrt(diag covariance)
  double cost = 0.0;                // final sum of squared residuals
  FitStatus status = FitStatus::Converged;
  std::vector<double> cost_trace;   // accepted costs, non-increasing
  Eigen::MatrixXd null_directions;  // columns: unidentifiable directions (free-param space)
  int iterations = 0;
  int n_residuals = 0;
  int n_free = 0;

  double estimate(const std::string& name) const;
  double ci95(const std::string& name) const;
};

struct FitOptions {
  int max_iterations = 200;
  double ftol = 1e-14;        // relative cost decrease
  double xtol = 1e-14;        // relative step size
  double gtol = 1e-12;        // gradient infinity norm (scaled)
  double fd_step_rel = 1e-6;  // central-difference relative step
  double lambda_init = 1e-10;  // near-Gauss-Newton start; rejections raise it
  double lambda_up = 10.0;
  double lambda_down = 0.25;
  double singular_rtol = 1e-10;  // singular-value ratio below which a direction is null
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Damped Gauss-Newton (Levenberg-Marquardt) with central finite-difference
// Jacobians, box bounds by projection, and a recorded monotone accepted-cost
// trace. Covariance is sigma^2 (J^T J)^+ with sigma^2 = cost/(m - n) estimated
// at the optimum; rank deficiency yields FitStatus::Singular plus the null
// directions.
FitResult least_squares(const ResidualFn& residual, std::vector<Parameter> parameters,
                        const FitOptions& options = {});

}  // namespace ceo::fit
