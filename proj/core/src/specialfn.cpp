#include "mylab/specialfn.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <functional>
#include <numbers>
#include <string>

#include "mylab/error.hpp"

namespace mylab::specialfn {

Multiplicities Multiplicities::from_group(GroupFamily family, int q) {
  if (q < 1) throw DomainError("Multiplicities: q must be >= 1");
  switch (family) {
    case GroupFamily::SO:
      return {q - 1, 0};
    case GroupFamily::SU:
      return {2 * (q - 1), 1};
    case GroupFamily::Sp:
      return {4 * (q - 1), 3};
  }
  throw DomainError("Multiplicities: unknown group family");
}

ChamberVector::ChamberVector(std::vector<double> coords, bool strict_order)
    : r(std::move(coords)), strict(strict_order) {
  for (std::size_t i = 1; i < r.size(); ++i) {
    const bool ok = strict ? r[i - 1] > r[i] : r[i - 1] >= r[i];
    if (!ok) throw DomainError("ChamberVector: coordinates must be decreasing");
  }
}

double SignedLog::value() const { return sign * std::exp(log_abs); }

// ---------------------------------------------------------------------------
// Gamma (Lanczos, g = 7, 9 terms)

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

bool is_nonpositive_integer(double z) { return z <= 0.0 && z == std::floor(z); }

// log Gamma(z) for z >= 0.5.
double lanczos_log_gamma(double z) {
  z -= 1.0;
  double series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (z + i);
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t +
         std::log(series);
}

}  // namespace

SignedLog log_gamma(double z) {
  if (is_nonpositive_integer(z)) {
    throw PoleError("gamma: pole at nonpositive integer " + std::to_string(z));
  }
  if (z >= 0.5) return {lanczos_log_gamma(z), 1};
  // Reflection: Gamma(z) Gamma(1 - z) = pi / sin(pi z).
  const double s = std::sin(std::numbers::pi * z);
  const SignedLog other{lanczos_log_gamma(1.0 - z), 1};
  return {std::log(std::numbers::pi) - std::log(std::abs(s)) - other.log_abs,
          s > 0 ? 1 : -1};
}

double gamma(double z) {
  if (is_nonpositive_integer(z)) {
    throw PoleError("gamma: pole at nonpositive integer " + std::to_string(z));
  }
  if (z >= 0.5 && z <= 20.0) {
    // Direct Lanczos product keeps full relative precision on the common range.
    const double zm = z - 1.0;
    double series = kLanczos[0];
    for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (zm + i);
    const double t = zm + kLanczosG + 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, zm + 0.5) * std::exp(-t) * series;
  }
  if (z < 0.5) {
    return std::numbers::pi / (std::sin(std::numbers::pi * z) * gamma(1.0 - z));
  }
  return log_gamma(z).value();
}

// ---------------------------------------------------------------------------
// Macdonald integral

namespace {

// Result of 1/2 int exp(phi(u)) w(u) du, expressed as mantissa * exp(log_scale).
struct ScaledIntegral {
  double mantissa;
  double log_scale;
};

// After t = e^u the Macdonald integrand is
//   (x/2)^lambda exp(-e^u - (x^2/4) e^{-u} - lambda u),
// smooth with doubly exponential decay on both sides, so the trapezoid rule
// converges geometrically. The window is grown from the peak until the
// weighted integrand drops below e^-42 of its peak.
ScaledIntegral macdonald_quadrature(double lambda, double x,
                                    const std::function<double(double)>& weight) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw DomainError("macdonald_k: x must be positive and finite");
  }
  const double a = 0.25 * x * x;
  const auto phi = [&](double u) { return -std::exp(u) - a * std::exp(-u) - lambda * u; };

  const double root = std::sqrt(lambda * lambda + x * x);
  const double peak_t = lambda > 0.0 ? x * x / (2.0 * (lambda + root)) : 0.5 * (root - lambda);
  const double u_peak = std::log(peak_t);
  const double phi_peak = phi(u_peak);

  const auto log_magnitude = [&](double u) {
    return phi(u) - phi_peak + std::log(std::max(1.0, std::abs(weight(u))));
  };
  constexpr double kCutoff = -42.0;
  const double width = 1.0 / std::sqrt(std::exp(u_peak) + a * std::exp(-u_peak));
  const double kStride = std::min(0.5, 2.0 * width);
  double lo = u_peak - kStride;
  while (log_magnitude(lo) > kCutoff) lo -= kStride;
  double hi = u_peak + kStride;
  while (log_magnitude(hi) > kCutoff) hi += kStride;

  const auto sample = [&](double u) {
    const double d = u - u_peak;
    const double rel = -peak_t * std::expm1(d) - a / peak_t * std::expm1(-d) - lambda * d;
    return weight(u) * std::exp(rel);
  };

  double h = std::min(0.25, width);
  std::size_t intervals = static_cast<std::size_t>(std::ceil((hi - lo) / h));
  h = (hi - lo) / static_cast<double>(intervals);
  double sum = 0.0;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i <= intervals; ++i) {
    const double v = sample(lo + static_cast<double>(i) * h);
    const double w = (i == 0 || i == intervals) ? 0.5 : 1.0;
    sum += w * v;
    abs_sum += w * std::abs(v);
  }
  double estimate = h * sum;

  constexpr int kMaxHalvings = 12;
  double last_change = std::numeric_limits<double>::infinity();
  for (int level = 0; level < kMaxHalvings; ++level) {
    double mid_sum = 0.0;
    double mid_abs = 0.0;
    for (std::size_t i = 0; i < intervals; ++i) {
      const double v = sample(lo + (static_cast<double>(i) + 0.5) * h);
      mid_sum += v;
      mid_abs += std::abs(v);
    }
    sum += mid_sum;
    abs_sum += mid_abs;
    intervals *= 2;
    h *= 0.5;
    const double refined = h * sum;
    const double scale = h * abs_sum;
    const double change = std::abs(refined - estimate);
    // A sharp peak leaves roundoff near 1e-13; two small changes in a row mean
    // geometric convergence has already bottomed out.
    if (change <= 1e-14 * scale || (change <= 1e-12 * scale && last_change <= 1e-11 * scale)) {
      return {0.5 * refined, phi_peak + lambda * std::log(0.5 * x)};
    }
    last_change = change;
    estimate = refined;
  }
  throw ConvergenceError("macdonald_k: trapezoid rule did not converge");
}

double to_double(const ScaledIntegral& s) { return s.mantissa * std::exp(s.log_scale); }

}  // namespace

double macdonald_k(double lambda, double x) {
  return to_double(macdonald_quadrature(lambda, x, [](double) { return 1.0; }));
}

double log_macdonald_k(double lambda, double x) {
  const auto s = macdonald_quadrature(lambda, x, [](double) { return 1.0; });
  return std::log(s.mantissa) + s.log_scale;
}

double macdonald_k_ratio(double num_lambda, double den_lambda, double x) {
  return std::exp(log_macdonald_k(num_lambda, x) - log_macdonald_k(den_lambda, x));
}

double macdonald_k_dx(double lambda, double x) {
  const double half_x = 0.5 * x;
  return to_double(macdonald_quadrature(
      lambda, x, [&](double u) { return lambda / x - half_x * std::exp(-u); }));
}

double macdonald_k_log_slope(double lambda, double x) {
  const double half_x = 0.5 * x;
  const auto value = macdonald_quadrature(lambda, x, [](double) { return 1.0; });
  const auto slope = macdonald_quadrature(
      lambda, x, [&](double u) { return lambda / x - half_x * std::exp(-u); });
  return slope.mantissa / value.mantissa * std::exp(slope.log_scale - value.log_scale);
}

double macdonald_k_dlambda(int n, double x) {
  if (n < 0) throw DomainError("macdonald_k_dlambda: order must be nonnegative");
  if (n == 0) return macdonald_k(0.0, x);
  const double log_half_x = std::log(0.5 * x);
  return to_double(macdonald_quadrature(
      0.0, x, [&](double u) { return std::pow(log_half_x - u, n); }));
}

double small_determinant(std::vector<double> a, std::size_t p) {
  if (a.size() != p * p) throw DomainError("small_determinant: size mismatch");
  double det = 1.0;
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < p; ++row) {
      if (std::abs(a[row * p + col]) > std::abs(a[pivot * p + col])) pivot = row;
    }
    if (a[pivot * p + col] == 0.0) return 0.0;
    if (pivot != col) {
      for (std::size_t k = 0; k < p; ++k) std::swap(a[pivot * p + k], a[col * p + k]);
      det = -det;
    }
    const double diag = a[col * p + col];
    det *= diag;
    for (std::size_t row = col + 1; row < p; ++row) {
      const double factor = a[row * p + col] / diag;
      for (std::size_t k = col; k < p; ++k) a[row * p + k] -= factor * a[col * p + k];
    }
  }
  return det;
}

double ktilde_det(const ChamberVector& r) {
  const std::size_t p = r.size();
  std::vector<double> m(p * p);
  for (std::size_t i = 0; i < p; ++i) {
    const double x = std::exp(-r[i]);
    for (std::size_t j = 0; j < p; ++j) {
      m[i * p + j] = macdonald_k_dlambda(static_cast<int>(2 * j), x);
    }
  }
  return small_determinant(std::move(m), p);
}

// ---------------------------------------------------------------------------
// c-function and normalizer

SignedLog log_c_function(double lambda, const Multiplicities& mult) {
  const double ma = mult.m_alpha;
  const double m2a = mult.m_2alpha;
  const SignedLog top = log_gamma(0.5 * (ma + m2a + 1.0));
  const SignedLog gl = log_gamma(lambda);
  const SignedLog d1 = log_gamma(0.5 * (0.5 * ma + 1.0 + lambda));
  const SignedLog d2 = log_gamma(0.5 * (0.5 * ma + m2a + lambda));
  return {(0.5 * ma + m2a - lambda) * std::numbers::ln2 + top.log_abs + gl.log_abs -
              d1.log_abs - d2.log_abs,
          top.sign * gl.sign * d1.sign * d2.sign};
}

double c_function(double lambda, const Multiplicities& mult) {
  return log_c_function(lambda, mult).value();
}

double log_a_normalizer(const Multiplicities& mult, NormalizerVariant variant) {
  if (mult.m_alpha < 2) throw DomainError("a_normalizer: requires m_alpha >= 2");
  const double half = log_gamma(0.5 * mult.m_alpha).log_abs;
  const double power = variant == NormalizerVariant::Squared ? 2.0 : 1.0;
  return power * half - log_gamma(mult.m_alpha).log_abs -
         (1.0 + 1.5 * mult.m_2alpha) * std::numbers::ln2;
}

double a_normalizer(const Multiplicities& mult, NormalizerVariant variant) {
  return std::exp(log_a_normalizer(mult, variant));
}

}  // namespace mylab::specialfn
