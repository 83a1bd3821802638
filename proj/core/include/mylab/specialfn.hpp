#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace mylab::specialfn {

/// The three infinite series of rank-one noncompact symmetric spaces.
enum class GroupFamily { SO, SU, Sp };

/// Root multiplicities (m_alpha, m_2alpha) of a rank-one symmetric space.
struct Multiplicities {
  int m_alpha = 0;
  int m_2alpha = 0;

  /// SO(1,q) -> (q-1, 0), SU(1,q) -> (2(q-1), 1), Sp(1,q) -> (4(q-1), 3).
  static Multiplicities from_group(GroupFamily family, int q);

  /// Half-sum of positive roots with multiplicity: (m_alpha + 2 m_2alpha) / 2.
  double rho() const noexcept { return 0.5 * (m_alpha + 2.0 * m_2alpha); }

  friend bool operator==(const Multiplicities&, const Multiplicities&) = default;
};

/// Point of the closed Weyl chamber r_1 >= r_2 >= ... >= r_p. With `strict`
/// the inequalities must be strict (determinant formulas divide by gaps).
struct ChamberVector {
  explicit ChamberVector(std::vector<double> coords, bool strict = false);

  std::size_t size() const noexcept { return r.size(); }
  double operator[](std::size_t i) const { return r[i]; }

  std::vector<double> r;
  bool strict;
};

/// Signed logarithm: value = sign * exp(log_abs).
struct SignedLog {
  double log_abs = 0.0;
  int sign = 1;

  double value() const;
};

SignedLog log_gamma(double z);
double gamma(double z);

/// Macdonald function K_lambda(x) = 1/2 (x/2)^lambda int_0^inf e^{-t - x^2/4t} t^{-1-lambda} dt,
/// evaluated by trapezoidal quadrature after t = e^u.
double macdonald_k(double lambda, double x);
double log_macdonald_k(double lambda, double x);

/// K_num(x) / K_den(x), robust when both factors under- or overflow.
double macdonald_k_ratio(double num_lambda, double den_lambda, double x);

/// dK_lambda/dx from the integral differentiated under the integral sign.
double macdonald_k_dx(double lambda, double x);

/// (dK_lambda/dx) / K_lambda at x.
double macdonald_k_log_slope(double lambda, double x);

/// n-th lambda-derivative of K_lambda(x) at lambda = 0:
/// 1/2 int e^{-t - x^2/4t} (ln(x/2) - ln t)^n t^{-1} dt.
double macdonald_k_dlambda(int n, double x);

/// Determinant of a row-major p x p matrix by partially pivoted elimination.
double small_determinant(std::vector<double> a, std::size_t p);

/// det[ macdonald_k_dlambda(2(j-1), e^{-r_i}) ]_{i,j=1..p}.
double ktilde_det(const ChamberVector& r);

/// Harish-Chandra c-function of a rank-one space,
/// 2^{m_a/2 + m_2a - lambda} Gamma((m_a + m_2a + 1)/2) Gamma(lambda)
///   / (Gamma((m_a/2 + 1 + lambda)/2) Gamma((m_a/2 + m_2a + lambda)/2)).
double c_function(double lambda, const Multiplicities& mult);
SignedLog log_c_function(double lambda, const Multiplicities& mult);

/// Which normalizer enters the spherical-function limit.
enum class NormalizerVariant {
  /// Gamma(m_a/2)^2 / (Gamma(m_a) 2^{1 + 3 m_2a / 2})
  Squared,
  /// Gamma(m_a/2) / (Gamma(m_a) 2^{1 + 3 m_2a / 2}); kept for comparison only
  Unsquared,
};

double a_normalizer(const Multiplicities& mult,
                    NormalizerVariant variant = NormalizerVariant::Squared);
double log_a_normalizer(const Multiplicities& mult,
                        NormalizerVariant variant = NormalizerVariant::Squared);

}  // namespace mylab::specialfn
