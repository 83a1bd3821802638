#include "mylab/matrixproc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "mylab/error.hpp"

namespace mylab::matrixproc {

using cd = std::complex<double>;

RadialVector::RadialVector(std::vector<double> values) : r_(std::move(values)) {
  std::sort(r_.begin(), r_.end(), std::greater<>());
}

NoiseScales NoiseScales::for_field(Field field) {
  const double s2 = std::sqrt(2.0);
  if (field == Field::Real) return {1.0, s2, s2, 0.0, s2};
  return {1.0, s2, s2, 2.0, s2};
}

namespace {

cd draw(RngStream& rng, double sd, Field field) {
  const double re = sd * rng.normal();
  const double im = field == Field::Complex ? sd * rng.normal() : 0.0;
  return {re, im};
}

std::size_t checked_coarse_steps(const TimeGrid& grid, std::size_t factor) {
  if (factor == 0 || grid.n_steps() % factor != 0) {
    throw DomainError("coarsen: factor must divide the number of steps");
  }
  return grid.n_steps() / factor;
}

std::vector<Matrix> sum_groups(const std::vector<Matrix>& steps, std::size_t factor) {
  std::vector<Matrix> out;
  out.reserve(steps.size() / factor);
  for (std::size_t k = 0; k < steps.size(); k += factor) {
    Matrix acc = steps[k];
    for (std::size_t j = 1; j < factor; ++j) acc += steps[k + j];
    out.push_back(std::move(acc));
  }
  return out;
}

// Divided difference of exp on nodes y (all small), by the Taylor series
// sum_{n >= m} h_{n-m}(y) / n! with complete homogeneous polynomials h.
double exp_divided_difference(const std::vector<double>& y) {
  const std::size_t m = y.size() - 1;
  std::vector<double> h(y.size(), 1.0);
  double inv_fact = 1.0;
  for (std::size_t n = 1; n <= m; ++n) inv_fact /= static_cast<double>(n);
  double radius = 0.0;
  for (double v : y) radius = std::max(radius, std::abs(v));
  // |h_k| <= C(k+m, m) R^k, so the k-th term is at most R^k / (k! m!)
  double bound = inv_fact;
  double sum = h[m] * inv_fact;
  for (std::size_t k = 1; k < 400; ++k) {
    h[0] *= y[0];
    for (std::size_t s = 1; s <= m; ++s) h[s] = h[s - 1] + y[s] * h[s];
    inv_fact /= static_cast<double>(k + m);
    bound *= radius / static_cast<double>(k);
    sum += h[m] * inv_fact;
    if (k > 2 && bound <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// exp(A) for lower-triangular A whose diagonal spread is at most ~1.
Matrix chain_exp(const Matrix& a, double shift) {
  const auto n = a.rows();
  Matrix e = Matrix::Zero(n, n);
  std::vector<Eigen::Index> chain;
  std::vector<double> nodes;
  const std::function<void(Eigen::Index, Eigen::Index, cd)> walk =
      [&](Eigen::Index cur, Eigen::Index target, cd weight) {
        if (cur == target) {
          nodes.clear();
          for (auto k : chain) nodes.push_back(a(k, k).real() - shift);
          e(chain.front(), target) += weight * exp_divided_difference(nodes);
          return;
        }
        for (Eigen::Index next = cur - 1; next >= target; --next) {
          if (a(cur, next) == cd(0.0, 0.0)) continue;
          chain.push_back(next);
          walk(next, target, weight * a(cur, next));
          chain.pop_back();
        }
      };
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      chain.assign(1, i);
      walk(i, j, cd(1.0, 0.0));
    }
  }
  return e * std::exp(shift);
}

}  // namespace

TriangularNoise::TriangularNoise(int p, Field field, const TimeGrid& grid, RngStream& rng)
    : p_(p), field_(field), grid_(grid) {
  if (p < 1) throw DomainError("TriangularNoise: p must be >= 1");
  const NoiseScales s = NoiseScales::for_field(field);
  const double sq = std::sqrt(grid.dt());
  steps_.reserve(grid.n_steps());
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    Matrix m = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
      m(i, i) = cd(s.lambda_diag * sq * rng.normal(), 0.0);
      for (int j = 0; j < i; ++j) m(i, j) = draw(rng, s.lambda_off * sq, field);
    }
    steps_.push_back(std::move(m));
  }
}

TriangularNoise::TriangularNoise(int p, Field field, const TimeGrid& grid,
                                 std::vector<Matrix> steps)
    : p_(p), field_(field), grid_(grid), steps_(std::move(steps)) {}

TriangularNoise TriangularNoise::coarsen(std::size_t factor) const {
  const std::size_t n = checked_coarse_steps(grid_, factor);
  return TriangularNoise(p_, field_, TimeGrid(grid_.horizon(), n), sum_groups(steps_, factor));
}

Matrix lower_product(const Matrix& a, const Matrix& b) {
  const auto n = a.rows();
  Matrix out = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j <= i; ++j) {
      cd acc(0.0, 0.0);
      for (Eigen::Index k = j; k <= i; ++k) acc += a(i, k) * b(k, j);
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix lower_triangular_exp(const Matrix& a) {
  const auto n = a.rows();
  if (n != a.cols()) throw DomainError("lower_triangular_exp: matrix must be square");
  double lo = a(0, 0).real();
  double hi = lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (a(i, i).imag() != 0.0) throw DomainError("lower_triangular_exp: diagonal must be real");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (a(i, j) != cd(0.0, 0.0)) throw DomainError("lower_triangular_exp: not lower triangular");
    }
    lo = std::min(lo, a(i, i).real());
    hi = std::max(hi, a(i, i).real());
  }
  int squarings = 0;
  while ((hi - lo) / std::ldexp(1.0, squarings) > 1.0) ++squarings;
  const double inv = std::ldexp(1.0, -squarings);
  Matrix e = chain_exp(a * inv, 0.5 * (lo + hi) * inv);
  for (int s = 0; s < squarings; ++s) e = lower_product(e, e);
  return e;
}

TriangularPath triangular_path(const TriangularNoise& noise,
                               const std::vector<double>& diag_drift) {
  const int p = noise.p();
  if (!diag_drift.empty() && diag_drift.size() != static_cast<std::size_t>(p)) {
    throw DomainError("triangular_path: drift size must equal p");
  }
  const TimeGrid& grid = noise.grid();
  TriangularPath path{p, noise.field(), grid, {}};
  path.frames.reserve(grid.n_steps() + 1);
  path.frames.push_back(Matrix::Identity(p, p));
  for (std::size_t k = 0; k < grid.n_steps(); ++k) {
    Matrix step = noise.increment(k);
    for (int i = 0; i < static_cast<int>(diag_drift.size()); ++i) {
      step(i, i) += diag_drift[i] * grid.dt();
    }
    path.frames.push_back(lower_product(path.frames.back(), lower_triangular_exp(step)));
  }
  return path;
}

TriangularPath sample_triangular_bm(int p, Field field, const TimeGrid& grid,
                                    const std::vector<double>& diag_drift, RngStream& rng) {
  return triangular_path(TriangularNoise(p, field, grid, rng), diag_drift);
}

std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a, int max_sweeps) {
  const auto n = a.rows();
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < n; ++j) {
        total += a(i, j) * a(i, j);
        if (i != j) off += a(i, j) * a(i, j);
      }
    }
    if (off <= 1e-30 * total || off == 0.0) {
      std::vector<double> ev(static_cast<std::size_t>(n));
      for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
      std::sort(ev.begin(), ev.end());
      return ev;
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  throw ConvergenceError("jacobi_eigenvalues: no convergence within the sweep cap");
}

RadialVector singular_values(const Matrix& n) {
  const Matrix g = n * n.adjoint();
  const auto p = g.rows();
  bool complex = false;
  for (Eigen::Index i = 0; i < p && !complex; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (g(i, j).imag() != 0.0) {
        complex = true;
        break;
      }
    }
  }
  std::vector<double> sv;
  if (!complex) {
    const std::vector<double> ev = jacobi_eigenvalues(g.real());
    for (double e : ev) sv.push_back(std::sqrt(std::max(0.0, e)));
  } else {
    // Hermitian H = X + iY embeds as the real symmetric [[X, -Y], [Y, X]],
    // whose spectrum is that of H with every eigenvalue doubled.
    Eigen::MatrixXd e(2 * p, 2 * p);
    e.topLeftCorner(p, p) = g.real();
    e.bottomRightCorner(p, p) = g.real();
    e.topRightCorner(p, p) = -g.imag();
    e.bottomLeftCorner(p, p) = g.imag();
    const std::vector<double> ev = jacobi_eigenvalues(e);
    for (std::size_t i = 0; i < ev.size(); i += 2) {
      sv.push_back(std::sqrt(std::max(0.0, 0.5 * (ev[i] + ev[i + 1]))));
    }
  }
  return RadialVector(std::move(sv));
}

Matrix lower_inverse(const Matrix& l) {
  const auto n = l.rows();
  Matrix x = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    x(j, j) = 1.0 / l(j, j);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      cd acc(0.0, 0.0);
      for (Eigen::Index k = j; k < i; ++k) acc += l(i, k) * x(k, j);
      x(i, j) = -acc / l(i, i);
    }
  }
  return x;
}

std::vector<RadialVector> eta_matrix(const TriangularPath& path, std::size_t stride) {
  if (stride == 0) throw DomainError("eta_matrix: stride must be positive");
  const int p = path.p;
  const double half_dt = 0.5 * path.grid.dt();
  Matrix gram = Matrix::Zero(p, p);
  std::vector<RadialVector> out;
  const std::size_t n = path.frames.size() - 1;
  for (std::size_t k = 0; k <= n; ++k) {
    if (k > 0) {
      const Matrix& a = path.frames[k - 1];
      const Matrix& b = path.frames[k];
      gram += half_dt * (a * a.adjoint() + b * b.adjoint());
    }
    if (k % stride == 0 || k == n) {
      out.push_back(singular_values(lower_inverse(path.frames[k]) * gram));
    }
  }
  return out;
}

Matrix frame_gram_integral(const TriangularPath& path) {
  const double half_dt = 0.5 * path.grid.dt();
  Matrix gram = Matrix::Zero(path.p, path.p);
  for (std::size_t k = 1; k < path.frames.size(); ++k) {
    const Matrix& a = path.frames[k - 1];
    const Matrix& b = path.frames[k];
    gram += half_dt * (a * a.adjoint() + b * b.adjoint());
  }
  return gram;
}

SolvableNoise::SolvableNoise(int p, int q, Field field, const TimeGrid& grid,
                             const RngStream& rng)
    : p_(p), q_(q), field_(field), grid_(grid) {
  if (p < 1 || q <= p) throw DomainError("SolvableNoise: need 1 <= p < q");
  const NoiseScales s = NoiseScales::for_field(field);
  const double sq = std::sqrt(grid.dt());
  const std::size_t n = grid.n_steps();
  const int m = q - p;
  dbeta_.assign(n, Matrix::Zero(p, m));
  const RngStream beta_root = rng.derive(1);
  for (int col = 0; col < m; ++col) {
    RngStream stream = beta_root.derive(static_cast<std::uint64_t>(col));
    for (std::size_t k = 0; k < n; ++k) {
      for (int i = 0; i < p; ++i) dbeta_[k](i, col) = draw(stream, s.beta * sq, field);
    }
  }
  RngStream kappa = rng.derive(2);
  dkappa_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Matrix d = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
      if (field == Field::Complex) d(i, i) = cd(0.0, s.kappa_diag * sq * kappa.normal());
      for (int j = i + 1; j < p; ++j) {
        d(i, j) = draw(kappa, s.kappa_off * sq, field);
        d(j, i) = -std::conj(d(i, j));
      }
    }
    dkappa_.push_back(std::move(d));
  }
}

SolvableNoise::SolvableNoise(int p, int q, Field field, const TimeGrid& grid,
                             std::vector<Matrix> dbeta, std::vector<Matrix> dkappa)
    : p_(p), q_(q), field_(field), grid_(grid), dbeta_(std::move(dbeta)),
      dkappa_(std::move(dkappa)) {}

SolvableNoise SolvableNoise::coarsen(std::size_t factor) const {
  const std::size_t n = checked_coarse_steps(grid_, factor);
  return SolvableNoise(p_, q_, field_, TimeGrid(grid_.horizon(), n),
                       sum_groups(dbeta_, factor), sum_groups(dkappa_, factor));
}

double solvable_invariant_defect(const SuSolvableState& s) {
  return (s.c + s.c.adjoint() - s.b * s.b.adjoint()).cwiseAbs().maxCoeff();
}

std::vector<SuSolvableState> simulate_su_solvable(const TriangularPath& shared_l,
                                                  const SolvableNoise& noise,
                                                  std::size_t stride, double alarm) {
  if (stride == 0) throw DomainError("simulate_su_solvable: stride must be positive");
  const std::size_t n = noise.grid().n_steps();
  if (shared_l.frames.size() != n + 1 || shared_l.p != noise.p()) {
    throw DomainError("simulate_su_solvable: frames and noise must share the grid and p");
  }
  const int p = noise.p();
  const int m = noise.q() - p;
  SuSolvableState s{0.0, shared_l.frames[0], Matrix::Zero(p, m), Matrix::Zero(p, p)};
  std::vector<SuSolvableState> out;
  out.push_back(s);
  for (std::size_t k = 0; k < n; ++k) {
    const Matrix& l0 = shared_l.frames[k];
    const Matrix& l1 = shared_l.frames[k + 1];
    const Matrix& db = noise.dbeta(k);
    const Matrix& dk = noise.dkappa(k);
    const Matrix b1 = s.b + 0.5 * (l0 + l1) * db;
    const Matrix dbh = db.adjoint();
    s.c += 0.5 * (l0 * dk * l0.adjoint() + l1 * dk * l1.adjoint()) +
           0.5 * (s.b * dbh * l0.adjoint() + b1 * dbh * l1.adjoint());
    s.b = b1;
    s.l = l1;
    s.t = noise.grid().time(k + 1);
    if (k + 1 == n || (k + 1) % stride == 0) {
      const double scale = 1.0 + (s.b * s.b.adjoint()).cwiseAbs().maxCoeff();
      if (solvable_invariant_defect(s) > alarm * scale) {
        throw IntegratorError("simulate_su_solvable: invariant c + c* = bb* drifted at t = " +
                              std::to_string(s.t));
      }
      out.push_back(s);
    }
  }
  return out;
}

std::vector<SuSolvableState> simulate_su_solvable(const TriangularPath& shared_l, int q,
                                                  const RngStream& rng, std::size_t stride) {
  return simulate_su_solvable(shared_l, SolvableNoise(shared_l.p, q, shared_l.field,
                                                      shared_l.grid, rng),
                              stride);
}

RadialVector finite_q_radial(const SuSolvableState& state) {
  const auto p = state.l.rows();
  const Matrix c = 0.5 * (state.c - state.c.adjoint()) + 0.5 * state.b * state.b.adjoint();
  const Matrix l_star_inv = lower_inverse(state.l).adjoint();
  const Matrix m = state.l + (Matrix::Identity(p, p) + c) * l_star_inv;
  const RadialVector sv = singular_values(m);
  std::vector<double> rad(sv.size());
  for (std::size_t i = 0; i < sv.size(); ++i) {
    double arg = 0.5 * sv[i];
    if (arg < 1.0) {
      if (arg < 1.0 - 1e-12) {
        throw IntegratorError("finite_q_radial: arccosh argument " + std::to_string(arg) +
                              " below 1");
      }
      arg = 1.0;
    }
    rad[i] = std::acosh(arg);
  }
  return RadialVector(std::move(rad));
}

std::vector<RadialVector> finite_q_radial(const std::vector<SuSolvableState>& states) {
  std::vector<RadialVector> out;
  out.reserve(states.size());
  for (const auto& s : states) out.push_back(finite_q_radial(s));
  return out;
}

}  // namespace mylab::matrixproc
