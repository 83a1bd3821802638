#include "mylab/series.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "mylab/error.hpp"

namespace mylab::series {

namespace {

// Solves a small dense system in place by partially pivoted elimination.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    for (std::size_t row = col + 1; row < n; ++row) {
      if (std::abs(a[row * n + col]) > std::abs(a[pivot * n + col])) pivot = row;
    }
    if (a[pivot * n + col] == 0.0) throw DomainError("solve_dense: singular system");
    if (pivot != col) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[pivot * n + k], a[col * n + k]);
      std::swap(rhs[pivot], rhs[col]);
    }
    for (std::size_t row = col + 1; row < n; ++row) {
      const double f = a[row * n + col] / a[col * n + col];
      for (std::size_t k = col; k < n; ++k) a[row * n + k] -= f * a[col * n + k];
      rhs[row] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i * n + k] * x[k];
    x[i] = s / a[i * n + i];
  }
  return x;
}

double potential_a(const Multiplicities& m) {
  return 0.25 * m.m_alpha * (m.m_alpha + 2.0 * m.m_2alpha - 2.0);
}

double potential_b(const Multiplicities& m) { return m.m_2alpha * (m.m_2alpha - 2.0); }

SeriesExpansion build_series(double lambda, SeriesKind kind, const Multiplicities& mult,
                             std::size_t n_max) {
  check_resonance(lambda);
  if (n_max == 0 || n_max % 2 != 0) {
    throw DomainError("series: truncation must be a positive even integer");
  }
  SeriesExpansion s;
  s.lambda = lambda;
  s.kind = kind;
  s.mult = mult;

  std::vector<double> v;
  if (kind == SeriesKind::Toda) {
    v = {0.0, 1.0};
  } else {
    v = cms_potential_coefficients(mult, n_max / 2);
  }
  s.scale = std::max(1.0, std::sqrt(std::abs(v.size() > 1 ? v[1] : 0.0)));

  // Rescaled recurrence: beta_n = sum_k v_k s^{-2k} beta_{n-2k} / (n^2 - 2 n lambda).
  std::vector<double> w(v.size(), 0.0);
  const double inv_s2 = 1.0 / (s.scale * s.scale);
  double power = 1.0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    power *= inv_s2;
    w[k] = v[k] * power;
  }

  s.scaled.assign(n_max + 1, 0.0);
  s.scaled[0] = 1.0;
  for (std::size_t n = 2; n <= n_max; n += 2) {
    double acc = 0.0;
    for (std::size_t k = 1; 2 * k <= n && k < w.size(); ++k) acc += w[k] * s.scaled[n - 2 * k];
    const double nd = static_cast<double>(n);
    s.scaled[n] = acc / (nd * nd - 2.0 * nd * lambda);
  }
  return s;
}

// Terms t_n = scaled_n (scale e^{-r})^n, without the common factor e^{lambda r}.
struct TermSum {
  double sum;
  double tail;
};

TermSum sum_terms(const SeriesExpansion& s, double r) {
  const double z = s.scale * std::exp(-r);
  const double z2 = z * z;
  double zn = 1.0;
  double sum = 0.0;
  double last = 0.0;
  double prev = 0.0;
  for (std::size_t n = 0; n < s.scaled.size(); n += 2) {
    const double t = s.scaled[n] * zn;
    sum += t;
    prev = last;
    last = t;
    zn *= z2;
  }
  double tail = 0.0;
  if (last != 0.0) {
    if (prev == 0.0) {
      tail = std::numeric_limits<double>::infinity();
    } else {
      const double ratio = std::abs(last / prev);
      tail = ratio < 0.9 ? std::abs(last) * ratio / (1.0 - ratio)
                         : std::numeric_limits<double>::infinity();
    }
  }
  return {sum, tail};
}

// Sum of the rescaled series at r with adaptive truncation (factor e^{lambda r} excluded).
double adaptive_sum(double lambda, SeriesKind kind, const Multiplicities& mult, double r) {
  constexpr double kTol = 1e-15;
  for (std::size_t n = 32; n <= 8192; n *= 2) {
    const SeriesExpansion s = build_series(lambda, kind, mult, n);
    const TermSum ts = sum_terms(s, r);
    if (ts.tail <= kTol * std::max(1.0, std::abs(ts.sum))) return ts.sum;
  }
  throw TruncationError("series: truncation did not converge at r = " + std::to_string(r),
                        std::numeric_limits<double>::infinity());
}

}  // namespace

double SeriesExpansion::coefficient(std::size_t n) const {
  if (n >= scaled.size()) return 0.0;
  return scaled[n] * std::pow(scale, static_cast<double>(n));
}

std::vector<double> cms_potential_coefficients(const Multiplicities& mult, std::size_t kmax) {
  const double a = potential_a(mult);
  const double b = potential_b(mult);
  std::vector<double> v(kmax + 1, 0.0);
  for (std::size_t k = 1; k <= kmax; ++k) {
    const double kd = static_cast<double>(k);
    v[k] = 4.0 * a * kd + (k % 2 == 0 ? 4.0 * b * (kd / 2.0) : 0.0);
  }
  return v;
}

double cms_potential(double r, const Multiplicities& mult) {
  const double s1 = std::sinh(r);
  const double s2 = std::sinh(2.0 * r);
  return potential_a(mult) / (s1 * s1) + potential_b(mult) / (s2 * s2);
}

void check_resonance(double lambda) {
  const double twice = 2.0 * lambda;
  const double nearest = std::round(twice);
  if (nearest != 0.0 && std::abs(twice - nearest) < 2e-6) {
    throw ResonanceError("series: 2*lambda is within resonance of the integer " +
                         std::to_string(static_cast<long long>(nearest)));
  }
}

SeriesExpansion toda_series(double lambda, std::size_t n_max) {
  return build_series(lambda, SeriesKind::Toda, {}, n_max);
}

SeriesExpansion cms_series(double lambda, const Multiplicities& mult, std::size_t n_max) {
  return build_series(lambda, SeriesKind::CMS, mult, n_max);
}

double eval_series(const SeriesExpansion& s, double r, double tol) {
  const TermSum ts = sum_terms(s, r);
  if (ts.tail > tol * std::max(1.0, std::abs(ts.sum))) {
    throw TruncationError("eval_series: tail estimate exceeds tolerance", ts.tail);
  }
  return std::exp(s.lambda * r) * ts.sum;
}

SeriesJet eval_series_jet(const SeriesExpansion& s, double r) {
  const double z = s.scale * std::exp(-r);
  const double z2 = z * z;
  double zn = 1.0;
  SeriesJet jet{0.0, 0.0, 0.0};
  for (std::size_t n = 0; n < s.scaled.size(); n += 2) {
    const double t = s.scaled[n] * zn;
    const double e = s.lambda - static_cast<double>(n);
    jet.value += t;
    jet.d1 += e * t;
    jet.d2 += e * e * t;
    zn *= z2;
  }
  const double f = std::exp(s.lambda * r);
  jet.value *= f;
  jet.d1 *= f;
  jet.d2 *= f;
  return jet;
}

double series_residual(const SeriesExpansion& s, double r) {
  const SeriesJet jet = eval_series_jet(s, r);
  const double v = s.kind == SeriesKind::Toda ? std::exp(-2.0 * r) : cms_potential(r, s.mult);
  return std::abs(jet.d2 - v * jet.value - s.lambda * s.lambda * jet.value) /
         std::abs(jet.value);
}

double toda_psi(double lambda, double r) {
  return std::exp(lambda * r) * adaptive_sum(lambda, SeriesKind::Toda, {}, r);
}

double toda_macdonald_combination(double lambda, double r) {
  const specialfn::SignedLog gp = specialfn::log_gamma(lambda);
  const specialfn::SignedLog gm = specialfn::log_gamma(-lambda);
  const double sp = adaptive_sum(lambda, SeriesKind::Toda, {}, r);
  const double sm = adaptive_sum(-lambda, SeriesKind::Toda, {}, r);
  const double ln2 = std::numbers::ln2;
  return gp.sign * std::exp(gp.log_abs + (lambda - 1.0) * ln2 + lambda * r) * sp +
         gm.sign * std::exp(gm.log_abs + (-lambda - 1.0) * ln2 - lambda * r) * sm;
}

double log_delta_q(double r, const Multiplicities& mult) {
  if (r < 0.0) throw DomainError("delta_q: r must be nonnegative");
  const double l1 = std::log(2.0 * std::sinh(r));
  const double l2 = std::log(2.0 * std::sinh(2.0 * r));
  return (mult.m_alpha == 0 ? 0.0 : mult.m_alpha * l1) +
         (mult.m_2alpha == 0 ? 0.0 : mult.m_2alpha * l2);
}

double delta_q(double r, const Multiplicities& mult) {
  if (r < 0.0) throw DomainError("delta_q: r must be nonnegative");
  return std::pow(2.0 * std::sinh(r), mult.m_alpha) *
         std::pow(2.0 * std::sinh(2.0 * r), mult.m_2alpha);
}

double rank1_spherical_scaled(double lambda, const Multiplicities& mult, double r,
                              double log_prefactor) {
  if (lambda == 0.0) throw DomainError("rank1_spherical: lambda must be nonzero");
  const specialfn::SignedLog cp = specialfn::log_c_function(lambda, mult);
  const specialfn::SignedLog cm = specialfn::log_c_function(-lambda, mult);
  const double sp = adaptive_sum(lambda, SeriesKind::CMS, mult, r);
  const double sm = adaptive_sum(-lambda, SeriesKind::CMS, mult, r);
  return cp.sign * std::exp(log_prefactor + cp.log_abs + lambda * r) * sp +
         cm.sign * std::exp(log_prefactor + cm.log_abs - lambda * r) * sm;
}

double rank1_spherical(double lambda, const Multiplicities& mult, double r) {
  return rank1_spherical_scaled(lambda, mult, r, 0.0);
}

double rank1_spherical_function(double lambda, const Multiplicities& mult, double r) {
  return rank1_spherical_scaled(lambda, mult, r, -0.5 * log_delta_q(r, mult));
}

double g_q_error(double lambda, double r, const Multiplicities& mult,
                 NormalizerVariant variant) {
  const double shift = std::log(static_cast<double>(mult.m_alpha));
  const double la = specialfn::log_a_normalizer(mult, variant);
  return rank1_spherical_scaled(lambda, mult, r + shift, la) -
         specialfn::macdonald_k(lambda, std::exp(-r));
}

EvenDerivatives g_q_at_zero(double r, const Multiplicities& mult, double h,
                            NormalizerVariant variant) {
  const auto g = [&](double l) { return g_q_error(l, r, mult, variant); };
  const double gh2 = g(0.5 * h);
  const double gh = g(h);
  const double g2h = g(2.0 * h);
  const double d_h = (g2h - gh) / (1.5 * h * h);
  const double d_h2 = (gh - gh2) / (1.5 * 0.25 * h * h);
  const double v_h = (4.0 * gh - g2h) / 3.0;
  const double v_h2 = (4.0 * gh2 - gh) / 3.0;
  return {(16.0 * v_h2 - v_h) / 15.0, (4.0 * d_h2 - d_h) / 3.0};
}

std::vector<double> even_derivatives_at_zero(const std::function<double(double)>& f,
                                             std::size_t count, double h,
                                             std::size_t n_nodes) {
  if (count == 0 || n_nodes < count) {
    throw DomainError("even_derivatives_at_zero: need at least `count` nodes");
  }
  const double span = static_cast<double>(n_nodes) * h;
  std::vector<double> a(n_nodes * n_nodes);
  std::vector<double> rhs(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k) {
    const double lambda = static_cast<double>(k + 1) * h;
    const double t = (lambda / span) * (lambda / span);
    double tm = 1.0;
    for (std::size_t m = 0; m < n_nodes; ++m) {
      a[k * n_nodes + m] = tm;
      tm *= t;
    }
    rhs[k] = f(lambda);
  }
  const std::vector<double> gamma = solve_dense(std::move(a), std::move(rhs));
  std::vector<double> out(count);
  double factorial = 1.0;
  double span_pow = 1.0;
  for (std::size_t m = 0; m < count; ++m) {
    if (m > 0) {
      factorial *= static_cast<double>((2 * m - 1) * (2 * m));
      span_pow *= span * span;
    }
    out[m] = gamma[m] / span_pow * factorial;
  }
  return out;
}

double hoogenboom_prefactor(int p, int q) {
  if (p < 1 || q < p) throw DomainError("hoogenboom_prefactor: need 1 <= p <= q");
  const int half = p * (p - 1) / 2;
  double value = (half % 2 == 0 ? 1.0 : -1.0) * std::ldexp(1.0, 2 * p * (p - 1));
  double jfact = 1.0;
  for (int j = 1; j <= p - 1; ++j) {
    jfact *= j;
    value *= std::pow(static_cast<double>(q - p + j), p - j) * jfact;
  }
  return value;
}

double hoogenboom_det(const std::vector<double>& lambdas, int q, const ChamberVector& r) {
  const std::size_t p = lambdas.size();
  if (p == 0 || r.size() != p) throw DomainError("hoogenboom_det: size mismatch");
  for (std::size_t i = 1; i < p; ++i) {
    if (!(r[i - 1] > r[i])) throw DomainError("hoogenboom_det: r must be strictly decreasing");
  }
  for (std::size_t i = 0; i < p; ++i) {
    if (std::abs(lambdas[i] - std::round(lambdas[i])) < 1e-6) {
      throw DomainError("hoogenboom_det: lambda must not be an integer");
    }
    for (std::size_t j = i + 1; j < p; ++j) {
      if (std::abs(lambdas[i] * lambdas[i] - lambdas[j] * lambdas[j]) < 1e-12) {
        throw DomainError("hoogenboom_det: lambda^2 must be pairwise distinct");
      }
    }
  }
  const int pi = static_cast<int>(p);
  const Multiplicities mult{2 * (q - pi), 1};
  std::vector<double> m(p * p);
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      m[i * p + j] = rank1_spherical_function(lambdas[i], mult, r[j]);
    }
  }
  double denom = 1.0;
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = i + 1; j < p; ++j) {
      denom *= (std::cosh(2.0 * r[i]) - std::cosh(2.0 * r[j])) *
               (lambdas[i] * lambdas[i] - lambdas[j] * lambdas[j]);
    }
  }
  return hoogenboom_prefactor(pi, q) * specialfn::small_determinant(std::move(m), p) / denom;
}

double n_matrix_det(int q, const ChamberVector& r, double shift) {
  const std::size_t p = r.size();
  const int pi = static_cast<int>(p);
  if (q - pi < 1) throw DomainError("n_matrix_det: need q > p");
  const Multiplicities mult{2 * (q - pi), 1};
  const double la = specialfn::log_a_normalizer(mult);
  std::vector<double> m(p * p);
  for (std::size_t i = 0; i < p; ++i) {
    const double ri = r[i] + shift;
    const auto f = [&](double l) { return rank1_spherical_scaled(l, mult, ri, la); };
    const std::vector<double> d = even_derivatives_at_zero(f, p, 0.03, p + 4);
    for (std::size_t j = 0; j < p; ++j) m[i * p + j] = d[j];
  }
  return specialfn::small_determinant(std::move(m), p);
}

}  // namespace mylab::series
