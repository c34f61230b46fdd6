#include "ceo/fit/least_squares.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ceo::fit {

namespace {

constexpr double kZ95 = 1.959963984540054;  // two-sided 95% normal quantile

double clamp(double x, double lo, double hi) { return std::min(std::max(x, lo), hi); }

// column scaling keeps the damped normal equations well conditioned when
// parameters mix rad/s magnitudes with dimensionless ones
Eigen::VectorXd column_scales(const Eigen::MatrixXd& j) {
  Eigen::VectorXd d(j.cols());
  for (Eigen::Index c = 0; c < j.cols(); ++c) {
    const double norm = j.col(c).norm();
    d(c) = norm > 1e-300 ? 1.0 / norm : 1.0;
  }
  return d;
}

}  // namespace

const char* to_string(FitStatus status) {
  switch (status) {
    case FitStatus::Converged: return "converged";
    case FitStatus::MaxIterations: return "max_iterations";
    case FitStatus::Singular: return "singular";
  }
  return "?";
}

double FitResult::estimate(const std::string& name) const {
  for (size_t i = 0; i < parameter_names.size(); ++i)
    if (parameter_names[i] == name) return estimates(static_cast<Eigen::Index>(i));
  throw std::out_of_range("FitResult: unknown parameter '" + name + "'");
}

double FitResult::ci95(const std::string& name) const {
  for (size_t i = 0; i < parameter_names.size(); ++i)
    if (parameter_names[i] == name) return ci95_half_width(static_cast<Eigen::Index>(i));
  throw std::out_of_range("FitResult: unknown parameter '" + name + "'");
}

FitResult least_squares(const ResidualFn& residual, std::vector<Parameter> parameters,
                        const FitOptions& options) {
  if (parameters.empty()) throw std::invalid_argument("least_squares: no parameters");

  std::vector<int> free_index;
  for (size_t i = 0; i < parameters.size(); ++i) {
    auto& p = parameters[i];
    if (!(p.lower <= p.initial && p.initial <= p.upper))
      throw std::invalid_argument("least_squares: initial value of '" + p.name +
                                  "' outside its bounds");
    if (p.scale == 0.0) p.scale = std::max(std::abs(p.initial), 1.0);
    if (!p.fixed) free_index.push_back(static_cast<int>(i));
  }
  const int n_free = static_cast<int>(free_index.size());
  if (n_free == 0) throw std::invalid_argument("least_squares: no free parameters");

  Eigen::VectorXd full(parameters.size());
  for (size_t i = 0; i < parameters.size(); ++i)
    full(static_cast<Eigen::Index>(i)) = parameters[i].initial;

  auto eval = [&](const Eigen::VectorXd& x_free) {
    Eigen::VectorXd x = full;
    for (int j = 0; j < n_free; ++j) x(free_index[j]) = x_free(j);
    return residual(x);
  };

  Eigen::VectorXd x(n_free);
  for (int j = 0; j < n_free; ++j) x(j) = parameters[free_index[j]].initial;

  Eigen::VectorXd r = eval(x);
  const int m = static_cast<int>(r.size());
  if (m < n_free)
    throw std::invalid_argument("least_squares: fewer residuals than free parameters");
  double cost = r.squaredNorm();

  FitResult result;
  result.cost_trace.push_back(cost);
  result.n_residuals = m;
  result.n_free = n_free;

  auto jacobian = [&](const Eigen::VectorXd& at) {
    Eigen::MatrixXd j(m, n_free);
    Eigen::VectorXd xp = at, xm = at;
    for (int k = 0; k < n_free; ++k) {
      const Parameter& p = parameters[free_index[k]];
      const double step = options.fd_step_rel * std::max(std::abs(at(k)), p.scale);
      const double hi = clamp(at(k) + step, p.lower, p.upper);
      const double lo = clamp(at(k) - step, p.lower, p.upper);
      if (hi == lo) {
        j.col(k).setZero();
        continue;
      }
      xp(k) = hi;
      xm(k) = lo;
      j.col(k) = (eval(xp) - eval(xm)) / (hi - lo);
      xp(k) = at(k);
      xm(k) = at(k);
    }
    return j;
  };

  double lambda = options.lambda_init;
  bool converged = (cost == 0.0);
  int iter = 0;

  while (!converged && iter < options.max_iterations) {
    ++iter;
    const Eigen::MatrixXd j = jacobian(x);
    const Eigen::VectorXd d = column_scales(j);
    const Eigen::MatrixXd js = j * d.asDiagonal();
    const Eigen::VectorXd gs = js.transpose() * r;
    const Eigen::MatrixXd hs = js.transpose() * js;

    // scaled-gradient stationarity: |J_s^T r| relative to the residual norm
    if (gs.lpNorm<Eigen::Infinity>() <=
        options.gtol * std::max(std::sqrt(cost), 1e-300)) {
      converged = true;
      break;
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
      Eigen::MatrixXd damped = hs;
      for (int k = 0; k < n_free; ++k)
        damped(k, k) += lambda * std::max(hs(k, k), 1e-30);
      const Eigen::VectorXd step_s = damped.ldlt().solve(-gs);
      const Eigen::VectorXd step = d.asDiagonal() * step_s;

      Eigen::VectorXd candidate = x + step;
      for (int k = 0; k < n_free; ++k) {
        const Parameter& p = parameters[free_index[k]];
        candidate(k) = clamp(candidate(k), p.lower, p.upper);
      }
      const Eigen::VectorXd r_new = eval(candidate);
      const double cost_new = r_new.squaredNorm();

      if (std::isfinite(cost_new) && cost_new < cost) {
        const double decrease = cost - cost_new;
        const double step_norm = step_s.norm();
        x = candidate;
        r = r_new;
        cost = cost_new;
        result.cost_trace.push_back(cost);
        lambda = std::max(lambda * options.lambda_down, 1e-14);
        accepted = true;
        if (decrease <= options.ftol * std::max(cost, 1e-300) ||
            step_norm <= options.xtol || cost == 0.0)
          converged = true;
      } else {
        lambda *= options.lambda_up;
        if (lambda > 1e16) break;
      }
    }
    if (!accepted) {
      // no descent direction left at this damping scale: local minimum
      converged = true;
    }
  }

  result.iterations = iter;
  result.status = converged ? FitStatus::Converged : FitStatus::MaxIterations;

  // curvature, covariance and identifiability at the optimum, evaluated on the
  // column-scaled Jacobian so mixed parameter units cannot masquerade as rank
  // deficiency
  const Eigen::MatrixXd j_opt = jacobian(x);
  const Eigen::VectorXd d_opt = column_scales(j_opt);
  const Eigen::MatrixXd js_opt = j_opt * d_opt.asDiagonal();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(js_opt, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double sv_max = sv.size() > 0 ? sv(0) : 0.0;

  auto significant = [&](int k) {
    return sv(k) > options.singular_rtol * sv_max && sv(k) > 0.0;
  };

  int rank = 0;
  for (int k = 0; k < sv.size(); ++k)
    if (significant(k)) ++rank;
  if (rank < n_free) {
    result.status = FitStatus::Singular;
    result.null_directions.resize(n_free, n_free - rank);
    int col = 0;
    for (int k = 0; k < sv.size(); ++k) {
      if (!significant(k)) {
        Eigen::VectorXd dir = d_opt.asDiagonal() * svd.matrixV().col(k);
        const double norm = dir.norm();
        result.null_directions.col(col++) = norm > 0.0 ? (dir / norm).eval() : dir;
      }
    }
  }

  const double sigma2 = (m > n_free) ? cost / static_cast<double>(m - n_free) : 0.0;
  Eigen::MatrixXd cov_free = Eigen::MatrixXd::Zero(n_free, n_free);
  for (int k = 0; k < sv.size(); ++k) {
    if (significant(k)) {
      const Eigen::VectorXd v = d_opt.asDiagonal() * svd.matrixV().col(k);
      cov_free.noalias() += (sigma2 / (sv(k) * sv(k))) * (v * v.transpose());
    }
  }

  const auto total = static_cast<Eigen::Index>(parameters.size());
  result.parameter_names.reserve(parameters.size());
  for (const auto& p : parameters) result.parameter_names.push_back(p.name);
  result.estimates = full;
  for (int k = 0; k < n_free; ++k) result.estimates(free_index[k]) = x(k);
  result.covariance = Eigen::MatrixXd::Zero(total, total);
  result.ci95_half_width = Eigen::VectorXd::Zero(total);
  for (int a = 0; a < n_free; ++a) {
    for (int b = 0; b < n_free; ++b)
      result.covariance(free_index[a], free_index[b]) = cov_free(a, b);
    result.ci95_half_width(free_index[a]) = kZ95 * std::sqrt(std::max(cov_free(a, a), 0.0));
  }
  result.cost = cost;
  return result;
}

}  // namespace ceo::fit
