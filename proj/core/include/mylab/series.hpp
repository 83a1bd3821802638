#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mylab/specialfn.hpp"

namespace mylab::series {

using specialfn::ChamberVector;
using specialfn::Multiplicities;
using specialfn::NormalizerVariant;

enum class SeriesKind { Toda, CMS };

/// Coefficients of Psi(lambda, r) = sum_n b_n e^{(lambda - n) r}.
///
/// Stored rescaled as b_n = scaled[n] * scale^n so that the large CMS
/// potentials (m_alpha up to ~10^3) never overflow the raw coefficients.
struct SeriesExpansion {
  double lambda = 0.0;
  SeriesKind kind = SeriesKind::Toda;
  Multiplicities mult{};
  double scale = 1.0;
  std::vector<double> scaled;

  std::size_t truncation() const noexcept { return scaled.empty() ? 0 : scaled.size() - 1; }
  /// Raw b_n; may overflow for large potentials, use `scaled` in numerics.
  double coefficient(std::size_t n) const;
};

/// Coefficients v_k of V(r) = sum_{k>=1} v_k e^{-2kr} for the CMS potential
/// m_a(m_a + 2 m_2a - 2) / (4 sinh^2 r) + m_2a(m_2a - 2) / sinh^2 2r.
std::vector<double> cms_potential_coefficients(const Multiplicities& mult, std::size_t kmax);

/// The CMS potential V(r) in closed form, so that H_CMS = d^2/dr^2 - V.
double cms_potential(double r, const Multiplicities& mult);

/// Throws ResonanceError when lambda lies within 1e-6 of a nonzero half-integer.
void check_resonance(double lambda);

/// H_T = d^2/dr^2 - e^{-2r}; b_n = b_{n-2} / (n (n - 2 lambda)).
SeriesExpansion toda_series(double lambda, std::size_t n_max);

/// (n^2 - 2 n lambda) b_n = sum_{k>=1} v_k b_{n-2k}.
SeriesExpansion cms_series(double lambda, const Multiplicities& mult, std::size_t n_max);

/// Truncated sum at r. Throws TruncationError when the geometric tail
/// estimate exceeds tol * max(1, |sum|).
double eval_series(const SeriesExpansion& s, double r, double tol = 1e-15);

/// Psi, Psi' and Psi'' by term-wise differentiation.
struct SeriesJet {
  double value;
  double d1;
  double d2;
};
SeriesJet eval_series_jet(const SeriesExpansion& s, double r);

/// |H Psi - lambda^2 Psi| / |Psi| at r using the closed-form potential.
double series_residual(const SeriesExpansion& s, double r);

/// Psi_T(lambda, r) with truncation doubled until the tail is negligible.
double toda_psi(double lambda, double r);

/// Gamma(lambda) 2^{lambda-1} Psi_T(lambda, r) + Gamma(-lambda) 2^{-lambda-1} Psi_T(-lambda, r).
double toda_macdonald_combination(double lambda, double r);

/// (e^r - e^{-r})^{m_a} (e^{2r} - e^{-2r})^{m_2a}.
double delta_q(double r, const Multiplicities& mult);
double log_delta_q(double r, const Multiplicities& mult);

/// exp(log_prefactor) * (c(l) Psi_CMS(l, r) + c(-l) Psi_CMS(-l, r)), combined
/// in log space so that the huge c-function values of large q cancel against
/// the prefactor before exponentiation.
double rank1_spherical_scaled(double lambda, const Multiplicities& mult, double r,
                              double log_prefactor);

/// delta_q^{1/2}(r) times the rank-one spherical function.
double rank1_spherical(double lambda, const Multiplicities& mult, double r);

/// The spherical function itself, normalized to 1 at r = 0.
double rank1_spherical_function(double lambda, const Multiplicities& mult, double r);

/// a(q) (delta_q^{1/2} phi_lambda)(r + log m_a) - K_lambda(e^{-r}).
double g_q_error(double lambda, double r, const Multiplicities& mult,
                 NormalizerVariant variant = NormalizerVariant::Squared);

/// Value and second derivative at lambda = 0 of the lambda-even g_q,
/// from symmetric stencils with steps h and h/2 and Richardson extrapolation.
struct EvenDerivatives {
  double value;
  double second;
};
EvenDerivatives g_q_at_zero(double r, const Multiplicities& mult, double h = 1e-2,
                            NormalizerVariant variant = NormalizerVariant::Squared);

/// Even derivatives f^{(0)}, f^{(2)}, ..., f^{(2(count-1))} at 0 of an even
/// function, from interpolation in lambda^2 through nodes h, 2h, ..., n_nodes h.
std::vector<double> even_derivatives_at_zero(const std::function<double(double)>& f,
                                             std::size_t count, double h,
                                             std::size_t n_nodes);

/// A(p, q) = (-1)^{p(p-1)/2} 2^{2p(p-1)} prod_{j<p} (q - p + j)^{p-j} j!.
double hoogenboom_prefactor(int p, int q);

/// Spherical function of SU(p, q) at D_p(r) from the rank-one functions of
/// SU(1, q - p + 1). Requires non-integer lambdas with distinct squares and
/// strictly decreasing r.
double hoogenboom_det(const std::vector<double>& lambdas, int q, const ChamberVector& r);

/// det N_(p,q)(r + shift) with rows scaled by a(q - p + 1), where
/// N^{ij} = d^{2(j-1)}/dlambda^{2(j-1)} (delta^{1/2} phi_lambda)(r_i) at 0
/// for SU(1, q - p + 1).
double n_matrix_det(int q, const ChamberVector& r, double shift);

}  // namespace mylab::series
