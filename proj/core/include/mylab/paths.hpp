#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mylab/rng.hpp"

namespace mylab::paths {

/// Uniform grid t_k = k * dt, k = 0..n_steps, on [0, T].
class TimeGrid {
 public:
  TimeGrid(double horizon, std::size_t n_steps);

  double horizon() const noexcept { return horizon_; }
  std::size_t n_steps() const noexcept { return n_steps_; }
  double dt() const noexcept { return dt_; }
  double time(std::size_t k) const noexcept { return static_cast<double>(k) * dt_; }
  /// Index of the grid point closest to t.
  std::size_t index_of(double t) const;

 private:
  double horizon_;
  std::size_t n_steps_;
  double dt_;
};

struct ScalarPath {
  TimeGrid grid;
  std::vector<double> values;

  double operator[](std::size_t k) const { return values[k]; }
  double back() const { return values.back(); }
};

/// Brownian motion with drift, B_0 = 0. `noise_scale` multiplies the Gaussian
/// increments; 0 gives the deterministic path drift * t.
ScalarPath sample_bm(const TimeGrid& grid, double drift, RngStream& rng,
                     double noise_scale = 1.0);

/// Path from explicit increments (size n_steps), starting at 0.
ScalarPath path_from_increments(const TimeGrid& grid, const std::vector<double>& increments);

/// e^{-B_t} int_0^t e^{mu B_s} ds with trapezoidal accumulation; switches to
/// log-domain accumulation when max |B| exceeds 30.
ScalarPath exponential_functional(const ScalarPath& b, double mu);

/// eta_t = int_0^t e^{2 B_s - B_t} ds.
ScalarPath eta_functional(const ScalarPath& b);

/// 2 max_{s <= t} B_s - B_t.
ScalarPath pitman_transform(const ScalarPath& b);

/// Distance to the origin of the horocyclic process in H_q:
/// cosh d = cosh B + e^{-B}/2 sum_{k<q} (int e^B dbeta_k)^2 with left-point Ito
/// sums. Column k draws from rng.derive(k), so different q nest on shared noise.
ScalarPath hyperbolic_radial(int q, const ScalarPath& b, const RngStream& rng);

/// d/dr log K_lambda(e^{-r}) = -e^{-r} K_lambda'(e^{-r}) / K_lambda(e^{-r}).
double my_drift(double r, double lambda);

/// my_drift on a uniform table with 4-point Lagrange interpolation; falls back
/// to direct evaluation outside [lo, hi].
class TabulatedDrift {
 public:
  explicit TabulatedDrift(double lambda, double lo = -10.0, double hi = 20.0,
                          std::size_t intervals = 15000);
  double operator()(double r) const;
  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
  double lo_;
  double step_;
  std::vector<double> table_;
};

/// Euler-Maruyama for dX = drift(X) dt + dW, X_0 = x0. Throws IntegratorError
/// if |X| exceeds 1e6.
ScalarPath euler_diffusion(const std::function<double(double)>& drift, const TimeGrid& grid,
                           double x0, RngStream& rng);

}  // namespace mylab::paths
