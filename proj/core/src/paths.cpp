#include "mylab/paths.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mylab/error.hpp"
#include "mylab/specialfn.hpp"

namespace mylab::paths {

TimeGrid::TimeGrid(double horizon, std::size_t n_steps)
    : horizon_(horizon), n_steps_(n_steps), dt_(horizon / static_cast<double>(n_steps)) {
  if (!(horizon > 0.0) || n_steps == 0) {
    throw DomainError("TimeGrid: horizon and step count must be positive");
  }
}

std::size_t TimeGrid::index_of(double t) const {
  if (t < 0.0 || t > horizon_ * (1.0 + 1e-12)) throw DomainError("TimeGrid: time outside grid");
  return std::min(n_steps_, static_cast<std::size_t>(std::llround(t / dt_)));
}

ScalarPath sample_bm(const TimeGrid& grid, double drift, RngStream& rng, double noise_scale) {
  ScalarPath path{grid, std::vector<double>(grid.n_steps() + 1)};
  const double mean = drift * grid.dt();
  const double sd = noise_scale * std::sqrt(grid.dt());
  double x = 0.0;
  path.values[0] = 0.0;
  for (std::size_t k = 1; k <= grid.n_steps(); ++k) {
    x += mean + sd * rng.normal();
    path.values[k] = x;
  }
  return path;
}

ScalarPath path_from_increments(const TimeGrid& grid, const std::vector<double>& increments) {
  if (increments.size() != grid.n_steps()) {
    throw DomainError("path_from_increments: size mismatch");
  }
  ScalarPath path{grid, std::vector<double>(grid.n_steps() + 1)};
  double x = 0.0;
  for (std::size_t k = 0; k < increments.size(); ++k) {
    x += increments[k];
    path.values[k + 1] = x;
  }
  return path;
}

ScalarPath exponential_functional(const ScalarPath& b, double mu) {
  const auto& v = b.values;
  ScalarPath out{b.grid, std::vector<double>(v.size(), 0.0)};
  const double half_dt = 0.5 * b.grid.dt();
  double max_abs = 0.0;
  for (double x : v) max_abs = std::max(max_abs, std::abs(x));

  if (max_abs <= 30.0) {
    double integral = 0.0;
    double prev = std::exp(mu * v[0]);
    for (std::size_t k = 1; k < v.size(); ++k) {
      const double cur = std::exp(mu * v[k]);
      integral += half_dt * (prev + cur);
      out.values[k] = std::exp(-v[k]) * integral;
      prev = cur;
    }
    return out;
  }

  const auto log_add = [](double a, double c) {
    const double m = std::max(a, c);
    return m + std::log1p(std::exp(std::min(a, c) - m));
  };
  const double log_half_dt = std::log(half_dt);
  double log_integral = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < v.size(); ++k) {
    const double step = log_half_dt + log_add(mu * v[k - 1], mu * v[k]);
    log_integral = k == 1 ? step : log_add(log_integral, step);
    out.values[k] = std::exp(log_integral - v[k]);
  }
  return out;
}

ScalarPath eta_functional(const ScalarPath& b) { return exponential_functional(b, 2.0); }

ScalarPath pitman_transform(const ScalarPath& b) {
  ScalarPath out{b.grid, std::vector<double>(b.values.size())};
  double running_max = b.values[0];
  for (std::size_t k = 0; k < b.values.size(); ++k) {
    running_max = std::max(running_max, b.values[k]);
    out.values[k] = 2.0 * running_max - b.values[k];
  }
  return out;
}

ScalarPath hyperbolic_radial(int q, const ScalarPath& b, const RngStream& rng) {
  if (q < 1) throw DomainError("hyperbolic_radial: q must be >= 1");
  const std::size_t n = b.grid.n_steps();
  const double sqrt_dt = std::sqrt(b.grid.dt());
  std::vector<double> weight(n);
  for (std::size_t k = 0; k < n; ++k) weight[k] = std::exp(b.values[k]) * sqrt_dt;

  std::vector<double> sum_sq(n + 1, 0.0);
  std::vector<double> noise(n);
  for (int col = 1; col < q; ++col) {
    RngStream stream = rng.derive(static_cast<std::uint64_t>(col));
    stream.fill_normal(noise);
    double integral = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      integral += weight[k] * noise[k];
      sum_sq[k + 1] += integral * integral;
    }
  }

  ScalarPath out{b.grid, std::vector<double>(n + 1)};
  for (std::size_t k = 0; k <= n; ++k) {
    const double bk = b.values[k];
    double arg = std::cosh(bk) + 0.5 * std::exp(-bk) * sum_sq[k];
    if (arg < 1.0) {
      if (arg < 1.0 - 1e-12) {
        throw IntegratorError("hyperbolic_radial: arccosh argument below 1 at step " +
                              std::to_string(k));
      }
      arg = 1.0;
    }
    out.values[k] = std::acosh(arg);
  }
  return out;
}

double my_drift(double r, double lambda) {
  const double x = std::exp(-r);
  return -x * specialfn::macdonald_k_log_slope(lambda, x);
}

TabulatedDrift::TabulatedDrift(double lambda, double lo, double hi, std::size_t intervals)
    : lambda_(lambda), lo_(lo), step_((hi - lo) / static_cast<double>(intervals)) {
  if (!(hi > lo) || intervals < 4) throw DomainError("TabulatedDrift: bad table range");
  table_.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    table_[i] = my_drift(lo + static_cast<double>(i) * step_, lambda);
  }
}

double TabulatedDrift::operator()(double r) const {
  const double u = (r - lo_) / step_;
  const double last = static_cast<double>(table_.size() - 1);
  if (!(u >= 1.0 && u <= last - 2.0)) return my_drift(r, lambda_);
  const auto i = static_cast<std::size_t>(u);
  const double s = u - static_cast<double>(i);
  // Lagrange basis on nodes -1, 0, 1, 2.
  const double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
  const double w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
  const double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
  const double w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
  return w0 * table_[i - 1] + w1 * table_[i] + w2 * table_[i + 1] + w3 * table_[i + 2];
}

ScalarPath euler_diffusion(const std::function<double(double)>& drift, const TimeGrid& grid,
                           double x0, RngStream& rng) {
  ScalarPath out{grid, std::vector<double>(grid.n_steps() + 1)};
  const double dt = grid.dt();
  const double sd = std::sqrt(dt);
  double x = x0;
  out.values[0] = x;
  for (std::size_t k = 1; k <= grid.n_steps(); ++k) {
    x += drift(x) * dt + sd * rng.normal();
    if (!(std::abs(x) <= 1e6)) {
      throw IntegratorError("euler_diffusion: state escaped |x| <= 1e6 at step " +
                            std::to_string(k));
    }
    out.values[k] = x;
  }
  return out;
}

}  // namespace mylab::paths
