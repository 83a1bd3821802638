#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

#include "mylab/error.hpp"
#include "mylab/matrixproc.hpp"
#include "mylab/paths.hpp"

namespace mp = mylab::matrixproc;
using mp::Field;
using mp::Matrix;
using mylab::RngStream;
using cd = std::complex<double>;

namespace {

Matrix random_matrix(int p, RngStream& r, bool complex) {
  Matrix m(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) m(i, j) = cd(r.normal(), complex ? r.normal() : 0.0);
  }
  return m;
}

Matrix random_lower(int p, RngStream& r) {
  Matrix m = Matrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    m(i, i) = std::exp(0.5 * r.normal());
    for (int j = 0; j < i; ++j) m(i, j) = cd(r.normal(), r.normal());
  }
  return m;
}

// Roots of the characteristic cubic of a 3x3 Hermitian matrix by bisection.
std::vector<double> cubic_eigenvalues(const Matrix& h) {
  const double a2 = h.trace().real();
  const double a1 = (h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0) + h(0, 0) * h(2, 2) -
                     h(0, 2) * h(2, 0) + h(1, 1) * h(2, 2) - h(1, 2) * h(2, 1))
                        .real();
  const double a0 = h.determinant().real();
  const auto f = [&](double x) { return ((x - a2) * x + a1) * x - a0; };
  const double bound = 1.0 + std::abs(a2) + std::abs(a1) + std::abs(a0);
  std::vector<double> roots;
  const int cells = 200000;
  double x0 = -bound, f0 = f(x0);
  for (int i = 1; i <= cells; ++i) {
    const double x1 = -bound + 2.0 * bound * i / cells;
    const double f1 = f(x1);
    if (f0 == 0.0) roots.push_back(x0);
    if (f0 * f1 < 0.0) {
      double lo = x0, hi = x1;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        ((f(lo) < 0.0) == (f(mid) < 0.0) ? lo : hi) = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    x0 = x1;
    f0 = f1;
  }
  std::sort(roots.rbegin(), roots.rend());
  return roots;
}

// Reference exponential: Taylor series after scaling, then squaring.
Matrix reference_exp(const Matrix& a) {
  const int s = 10;
  const Matrix b = a / std::ldexp(1.0, s);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

}  // namespace

TEST(SingularValues, TrivialCases) {
  EXPECT_EQ(mp::singular_values(Matrix::Identity(3, 3)).values(), (std::vector<double>{1, 1, 1}));
  Matrix d = Matrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -4.0;
  const auto sv = mp::singular_values(d);
  EXPECT_NEAR(sv[0], 4.0, 1e-14);
  EXPECT_NEAR(sv[1], 3.0, 1e-14);
}

TEST(SingularValues, CubicRootOracle) {
  RngStream r(17, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix n = random_matrix(3, r, trial % 2 == 1);
    const auto roots = cubic_eigenvalues(n * n.adjoint());
    ASSERT_EQ(roots.size(), 3u);
    const auto sv = mp::singular_values(n);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(sv[i], std::sqrt(std::max(0.0, roots[i])), 1e-10);
  }
}

TEST(SingularValues, JacobiMatchesEigenSolver) {
  RngStream r(18, 0);
  for (int p : {2, 4, 6}) {
    Eigen::MatrixXd a(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = r.normal();
    const auto ours = mp::jacobi_eigenvalues(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    for (int i = 0; i < p; ++i) EXPECT_NEAR(ours[i], es.eigenvalues()(i), 1e-12);
  }
}

TEST(SingularValues, ShiftIdentityOnRandomFrames) {
  RngStream r(19, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int p = 2 + trial % 4;
    const Matrix l = random_lower(p, r);
    const Matrix x0 = random_matrix(p, r, true);
    const Matrix x = x0 * x0.adjoint();
    const auto a = mp::singular_values(x * mp::lower_inverse(l).adjoint());
    const auto b = mp::singular_values(mp::lower_inverse(l) * x);
    for (int i = 0; i < p; ++i) EXPECT_NEAR(a[i], b[i], 1e-10 * (1.0 + b[0]));
  }
}

TEST(LowerTriangular, ExponentialMatchesTaylor) {
  RngStream r(20, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int p = 1 + trial % 5;
    Matrix a = Matrix::Zero(p, p);
    for (int i = 0; i < p; ++i) {
      a(i, i) = 1.5 * r.normal();
      for (int j = 0; j < i; ++j) a(i, j) = cd(r.normal(), r.normal());
    }
    a(0, 0) = trial % 3 == 0 ? 3.0 : a(0, 0);
    const Matrix e = mp::lower_triangular_exp(a);
    const Matrix ref = reference_exp(a);
    EXPECT_LT((e - ref).cwiseAbs().maxCoeff(), 1e-11 * (1.0 + ref.cwiseAbs().maxCoeff()));
  }
}

TEST(LowerTriangular, InverseAndValidation) {
  RngStream r(21, 0);
  const Matrix l = random_lower(4, r);
  EXPECT_LT((mp::lower_inverse(l) * l - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-12);
  Matrix upper = Matrix::Identity(2, 2);
  upper(0, 1) = 1.0;
  EXPECT_THROW(mp::lower_triangular_exp(upper), mylab::DomainError);
}

TEST(TriangularPath, GroupPreservationProperty) {
  const mylab::paths::TimeGrid g(1.0, 200);
  for (int seed = 0; seed < 10; ++seed) {
    RngStream r(22, seed);
    const int p = 1 + seed % 4;
    const auto path = mp::sample_triangular_bm(p, seed % 2 ? Field::Complex : Field::Real, g,
                                               std::vector<double>(p, 0.3), r);
    EXPECT_EQ(path.frames.front(), Matrix::Identity(p, p));
    for (const auto& f : path.frames) {
      for (int i = 0; i < p; ++i) {
        ASSERT_GT(f(i, i).real(), 0.0);
        ASSERT_EQ(f(i, i).imag(), 0.0);
        for (int j = i + 1; j < p; ++j) ASSERT_EQ(f(i, j), cd(0.0, 0.0));
      }
    }
  }
}

TEST(TriangularPath, ScalarCaseIsExponentialOfBrownianMotion) {
  const mylab::paths::TimeGrid g(1.0, 100);
  RngStream r(23, 0);
  const mp::TriangularNoise noise(1, Field::Real, g, r);
  const auto path = mp::triangular_path(noise, {0.25});
  double b = 0.0;
  for (std::size_t k = 0; k < g.n_steps(); ++k) {
    b += noise.increment(k)(0, 0).real() + 0.25 * g.dt();
    EXPECT_NEAR(path.frames[k + 1](0, 0).real(), std::exp(b), 1e-12 * std::exp(b));
  }
}

TEST(TriangularPath, DeterminantIdentity) {
  const mylab::paths::TimeGrid g(1.0, 300);
  RngStream r(24, 0);
  const std::vector<double> drift{0.1, -0.2, 0.3};
  const mp::TriangularNoise noise(3, Field::Complex, g, r);
  const auto path = mp::triangular_path(noise, drift);
  double s = 0.0;
  for (std::size_t k = 0; k < g.n_steps(); ++k) {
    s += noise.increment(k).diagonal().real().sum() + 0.2 * g.dt();
  }
  EXPECT_NEAR(path.frames.back().determinant().real() / std::exp(s), 1.0, 1e-10);
}

TEST(TriangularPath, OffDiagonalMatchesStratonovichClosedForm) {
  const mylab::paths::TimeGrid g(1.0, 10000);
  for (int seed = 0; seed < 5; ++seed) {
    RngStream r(25, seed);
    const mp::TriangularNoise noise(2, Field::Real, g, r);
    const auto path = mp::triangular_path(noise);
    double l1 = 0.0, l2 = 0.0, integral = 0.0;
    double prev = 1.0;
    for (std::size_t k = 0; k < g.n_steps(); ++k) {
      const Matrix& d = noise.increment(k);
      l1 += d(0, 0).real();
      l2 += d(1, 1).real();
      const double cur = std::exp(l2 - l1);
      integral += 0.5 * (prev + cur) * d(1, 0).real();
      prev = cur;
    }
    const double closed = std::exp(l1) * integral;
    const double sim = path.frames.back()(1, 0).real();
    EXPECT_LE(std::abs(sim - closed), 5.0 * std::sqrt(g.dt()) * std::max(1.0, std::abs(closed)));
  }
}

TEST(TriangularNoise, CoarsenSumsIncrements) {
  const mylab::paths::TimeGrid g(1.0, 8);
  RngStream r(26, 0);
  const mp::TriangularNoise fine(2, Field::Complex, g, r);
  const auto coarse = fine.coarsen(4);
  EXPECT_EQ(coarse.grid().n_steps(), 2u);
  const Matrix expected = fine.increment(4) + fine.increment(5) + fine.increment(6) + fine.increment(7);
  EXPECT_LT((coarse.increment(1) - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(fine.coarsen(3), mylab::DomainError);
}

TEST(EtaMatrix, RankOneReducesToScalarEta) {
  const mylab::paths::TimeGrid g(1.0, 1000);
  RngStream r(27, 0);
  const auto l = mp::sample_triangular_bm(1, Field::Real, g, {}, r);
  std::vector<double> logs;
  for (const auto& f : l.frames) logs.push_back(std::log(f(0, 0).real()));
  const auto scalar = mylab::paths::eta_functional(mylab::paths::ScalarPath{g, logs});
  const auto eta = mp::eta_matrix(l);
  for (std::size_t k = 1; k < eta.size(); ++k) {
    EXPECT_NEAR(eta[k][0] / scalar.values[k], 1.0, 5.0 * std::sqrt(g.dt()));
  }
}

TEST(EtaMatrix, SmallTimeAndOrdering) {
  const mylab::paths::TimeGrid g(1.0, 1000);
  RngStream r(28, 0);
  const auto eta = mp::eta_matrix(mp::sample_triangular_bm(3, Field::Complex, g, {}, r));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_GT(eta[1][i], 0.8 * g.dt());
    EXPECT_LT(eta[1][i], 1.2 * g.dt());
  }
  for (const auto& v : eta) {
    for (std::size_t i = 1; i < v.size(); ++i) ASSERT_GE(v[i - 1], v[i]);
  }
}

TEST(SolvableProcess, InitialStateAndRadialPartAtZero) {
  const mylab::paths::TimeGrid g(0.5, 500);
  RngStream r(29, 0);
  const auto l = mp::sample_triangular_bm(2, Field::Complex, g, {}, r);
  const auto states = mp::simulate_su_solvable(l, 12, RngStream(29, 1));
  EXPECT_EQ(states.front().l, Matrix::Identity(2, 2));
  EXPECT_EQ(states.front().b.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(states.front().c.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(states.front().b.cols(), 10);
  const auto rad0 = mp::finite_q_radial(states.front());
  EXPECT_EQ(rad0.values(), (std::vector<double>{0.0, 0.0}));
  for (const auto& rad : mp::finite_q_radial(states)) {
    ASSERT_GE(rad[0], rad[1]);
    ASSERT_GE(rad[1], 0.0);
  }
}

TEST(SolvableProcess, InvariantDefectIsFirstOrderSmall) {
  const mylab::paths::TimeGrid g(1.0, 4000);
  RngStream r(30, 0);
  const auto l = mp::sample_triangular_bm(2, Field::Real, g, {}, r);
  const auto states = mp::simulate_su_solvable(l, 20, RngStream(30, 1), 100);
  for (const auto& s : states) {
    const double scale = 1.0 + (s.b * s.b.adjoint()).cwiseAbs().maxCoeff();
    EXPECT_LT(mp::solvable_invariant_defect(s), 0.1 * scale);
  }
}

TEST(SolvableProcess, CScalingApproachesTwiceGramIntegralForComplex) {
  const mylab::paths::TimeGrid g(1.0, 500);
  RngStream r(31, 0);
  const auto l = mp::sample_triangular_bm(2, Field::Complex, g, {}, r);
  const int q = 1000;
  const auto states = mp::simulate_su_solvable(l, q, RngStream(31, 1), g.n_steps());
  const Matrix c = states.back().c / static_cast<double>(q);
  const Matrix a = mp::frame_gram_integral(l);
  const double kappa = (c * a.adjoint()).trace().real() / (a * a.adjoint()).trace().real();
  EXPECT_NEAR(kappa, 2.0, 0.25);
}

TEST(SolvableProcess, MismatchedInputsThrow) {
  const mylab::paths::TimeGrid g(1.0, 10), h(1.0, 20);
  RngStream r(32, 0);
  const auto l = mp::sample_triangular_bm(2, Field::Complex, g, {}, r);
  EXPECT_THROW(mp::simulate_su_solvable(l, mp::SolvableNoise(2, 5, Field::Complex, h, r)),
               mylab::DomainError);
  EXPECT_THROW(mp::SolvableNoise(3, 3, Field::Real, g, r), mylab::DomainError);
}
