#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "mylab/paths.hpp"
#include "mylab/rng.hpp"

namespace mylab::matrixproc {

using paths::TimeGrid;
using Matrix = Eigen::MatrixXcd;

/// Entry field of the group: SO(p,q) is Real, SU(p,q) is Complex. Real
/// matrices are stored as complex ones with zero imaginary part.
enum class Field { Real, Complex };

/// Decreasing vector of radial coordinates or singular values.
class RadialVector {
 public:
  RadialVector() = default;
  /// Sorts into decreasing order.
  explicit RadialVector(std::vector<double> values);

  std::size_t size() const noexcept { return r_.size(); }
  double operator[](std::size_t i) const { return r_[i]; }
  const std::vector<double>& values() const noexcept { return r_; }

 private:
  std::vector<double> r_;
};

/// Standard deviations (per unit time) of the driving Brownian motions.
/// Diagonal lambda: 1. Off-diagonal lambda, beta and kappa entries: real and
/// imaginary parts sqrt(2) each (real part only for Field::Real). Diagonal of
/// the skew-Hermitian kappa: imaginary part 2 (zero for Field::Real).
struct NoiseScales {
  double lambda_diag;
  double lambda_off;
  double beta;
  double kappa_diag;
  double kappa_off;

  static NoiseScales for_field(Field field);
};

/// Increments of the lower-triangular driver lambda_t, one p x p matrix per step.
class TriangularNoise {
 public:
  TriangularNoise(int p, Field field, const TimeGrid& grid, RngStream& rng);

  int p() const noexcept { return p_; }
  Field field() const noexcept { return field_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const Matrix& increment(std::size_t k) const { return steps_[k]; }

  /// Sums `factor` consecutive increments; the result drives the same
  /// Brownian path on a grid `factor` times coarser.
  TriangularNoise coarsen(std::size_t factor) const;

 private:
  TriangularNoise(int p, Field field, const TimeGrid& grid, std::vector<Matrix> steps);

  int p_;
  Field field_;
  TimeGrid grid_;
  std::vector<Matrix> steps_;
};

/// Frames l_{t_k}, each lower triangular with positive real diagonal.
struct TriangularPath {
  int p;
  Field field;
  TimeGrid grid;
  std::vector<Matrix> frames;
};

/// exp of a lower-triangular matrix with real diagonal, by the finite sum over
/// index chains weighted with divided differences of exp on the diagonal.
/// Entries above the diagonal are exactly zero.
Matrix lower_triangular_exp(const Matrix& a);

/// Product of lower-triangular matrices computed on the lower part only.
Matrix lower_product(const Matrix& a, const Matrix& b);

/// l_{k+1} = l_k exp(dlambda_k + diag(drift) dt).
TriangularPath triangular_path(const TriangularNoise& noise,
                               const std::vector<double>& diag_drift = {});

TriangularPath sample_triangular_bm(int p, Field field, const TimeGrid& grid,
                                    const std::vector<double>& diag_drift, RngStream& rng);

/// Singular values of a square matrix, decreasing, from cyclic Jacobi on NN*.
RadialVector singular_values(const Matrix& n);

/// Symmetric eigenvalues by cyclic Jacobi rotations, increasing.
std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, int max_sweeps = 60);

/// Inverse of a lower-triangular matrix by forward substitution.
Matrix lower_inverse(const Matrix& l);

/// SingVal(l_t^{-1} int_0^t l_s l_s^* ds) at every `stride`-th grid point
/// (the last point is always included), trapezoidal time integral.
std::vector<RadialVector> eta_matrix(const TriangularPath& path, std::size_t stride = 1);

/// Time integral int_0^t l l^* ds (trapezoid) at the final grid time.
Matrix frame_gram_integral(const TriangularPath& path);

/// Point (l, b, c) of the solvable group S; c + c^* = b b^* on S.
struct SuSolvableState {
  double t;
  Matrix l;
  Matrix b;
  Matrix c;
};

/// Increments of beta (p x (q-p)) and kappa (p x p skew-Hermitian). Column j of
/// beta draws from rng.derive(1).derive(j), so runs with different q share
/// their common columns.
class SolvableNoise {
 public:
  SolvableNoise(int p, int q, Field field, const TimeGrid& grid, const RngStream& rng);

  int p() const noexcept { return p_; }
  int q() const noexcept { return q_; }
  Field field() const noexcept { return field_; }
  const TimeGrid& grid() const noexcept { return grid_; }
  const Matrix& dbeta(std::size_t k) const { return dbeta_[k]; }
  const Matrix& dkappa(std::size_t k) const { return dkappa_[k]; }

  SolvableNoise coarsen(std::size_t factor) const;

 private:
  SolvableNoise(int p, int q, Field field, const TimeGrid& grid, std::vector<Matrix> dbeta,
                std::vector<Matrix> dkappa);

  int p_;
  int q_;
  Field field_;
  TimeGrid grid_;
  std::vector<Matrix> dbeta_;
  std::vector<Matrix> dkappa_;
};

/// ||c + c^* - b b^*||_inf (largest entry modulus).
double solvable_invariant_defect(const SuSolvableState& s);

/// Heun (trapezoidal) discretization of b = int l dbeta and
/// c = int l dkappa l^* + int b dbeta^* l^*, along the frames of `shared_l`.
/// Records every `stride`-th step plus the last. Throws IntegratorError when
/// the invariant defect exceeds alarm * (1 + ||b b^*||).
std::vector<SuSolvableState> simulate_su_solvable(const TriangularPath& shared_l,
                                                  const SolvableNoise& noise,
                                                  std::size_t stride = 1,
                                                  double alarm = 0.5);

std::vector<SuSolvableState> simulate_su_solvable(const TriangularPath& shared_l, int q,
                                                  const RngStream& rng, std::size_t stride = 1);

/// Rad(S(l, b, c)) = arccosh(SingVal(l + (I + c) l^{*-1}) / 2). The Hermitian
/// part of c is replaced by b b^* / 2, its exact value on S.
RadialVector finite_q_radial(const SuSolvableState& state);
std::vector<RadialVector> finite_q_radial(const std::vector<SuSolvableState>& states);

}  // namespace mylab::matrixproc
