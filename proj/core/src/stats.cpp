#include "mylab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "mylab/error.hpp"
#include "mylab/specialfn.hpp"

namespace mylab::stats {

double kolmogorov_tail(double x) {
  if (x <= 0.0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_statistic(std::span<const double> a, std::span<const double> b) {
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double level) {
  if (a.size() < 100 || b.size() < 100) {
    throw SampleError("ks_two_sample: each batch needs at least 100 values");
  }
  if (!(level > 0.0 && level < 1.0)) throw SampleError("ks_two_sample: level must be in (0,1)");
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  const double scale = std::sqrt((n + m) / (n * m));
  TestReport r;
  r.name = "ks_two_sample";
  r.statistic = ks_statistic(a, b);
  r.threshold = std::sqrt(-0.5 * std::log(0.5 * level)) * scale;
  r.p_value = kolmogorov_tail(r.statistic / scale);
  r.verdict = r.statistic > r.threshold ? Verdict::Reject : Verdict::Pass;
  return r;
}

TestReport ks_two_sample(const SampleBatch& a, const SampleBatch& b, double level) {
  return ks_two_sample(std::span<const double>(a.values), std::span<const double>(b.values),
                       level);
}

TestFunction TestFunction::gaussian_bump(double center, double width) {
  const double w2 = width * width;
  TestFunction t;
  t.f = [=](double x) { return std::exp(-0.5 * (x - center) * (x - center) / w2); };
  t.df = [=](double x) {
    const double u = x - center;
    return -u / w2 * std::exp(-0.5 * u * u / w2);
  };
  t.d2f = [=](double x) {
    const double u = x - center;
    return (u * u / w2 - 1.0) / w2 * std::exp(-0.5 * u * u / w2);
  };
  return t;
}

MeanEstimate mean_with_error(std::span<const double> x) {
  if (x.size() < 2) throw SampleError("mean_with_error: need at least two values");
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

TestReport generator_test(std::span<const double> x_t, std::span<const double> x_th,
                          const std::function<double(double)>& drift, const TestFunction& f,
                          double h, double z_crit) {
  if (x_t.size() != x_th.size()) throw SampleError("generator_test: size mismatch");
  if (!(h > 0.0)) throw SampleError("generator_test: h must be positive");
  std::vector<double> d(x_t.size());
  for (std::size_t i = 0; i < x_t.size(); ++i) {
    const double x = x_t[i];
    d[i] = f.f(x_th[i]) - f.f(x) - h * (0.5 * f.d2f(x) + drift(x) * f.df(x));
  }
  const MeanEstimate e = mean_with_error(d);
  if (!(e.standard_error > 0.0)) throw SampleError("generator_test: degenerate variance");
  TestReport r;
  r.name = "generator_test";
  r.statistic = e.mean / e.standard_error;
  r.threshold = z_crit;
  r.standard_error = e.standard_error;
  r.verdict = std::abs(r.statistic) > z_crit ? Verdict::Reject : Verdict::Pass;
  return r;
}

TestReport markov_property_test(std::span<const double> current, std::span<const double> future,
                                std::span<const double> auxiliary, std::size_t bins,
                                double level) {
  const std::size_t n = current.size();
  if (future.size() != n || auxiliary.size() != n) {
    throw SampleError("markov_property_test: size mismatch");
  }
  if (bins == 0 || n / bins < 200) {
    throw SampleError("markov_property_test: fewer than 200 samples per bin");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return current[a] < current[b]; });

  const double bonferroni = level / static_cast<double>(bins);
  const double crit = std::sqrt(-0.5 * std::log(0.5 * bonferroni));
  double worst = 0.0;
  double min_p = 1.0;
  for (std::size_t bin = 0; bin < bins; ++bin) {
    const std::size_t lo = bin * n / bins;
    const std::size_t hi = (bin + 1) * n / bins;
    const double m = static_cast<double>(hi - lo);
    double mx = 0.0, my = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      mx += current[order[k]];
      my += auxiliary[order[k]];
    }
    mx /= m;
    my /= m;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
      const double dx = current[order[k]] - mx;
      sxy += dx * (auxiliary[order[k]] - my);
      sxx += dx * dx;
    }
    const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
    std::vector<std::pair<double, double>> rows;
    rows.reserve(hi - lo);
    for (std::size_t k = lo; k < hi; ++k) {
      const std::size_t i = order[k];
      rows.emplace_back(auxiliary[i] - my - slope * (current[i] - mx), future[i]);
    }
    std::sort(rows.begin(), rows.end());
    const std::size_t half = rows.size() / 2;
    std::vector<double> below, above;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      (k < half ? below : above).push_back(rows[k].second);
    }
    const double d = ks_statistic(below, above);
    const double nb = static_cast<double>(below.size());
    const double na = static_cast<double>(above.size());
    const double scaled = d * std::sqrt(nb * na / (nb + na));
    worst = std::max(worst, scaled);
    min_p = std::min(min_p, kolmogorov_tail(scaled));
  }
  TestReport r;
  r.name = "markov_property_test";
  r.statistic = worst;
  r.threshold = crit;
  r.p_value = std::min(1.0, min_p * static_cast<double>(bins));
  r.verdict = worst > crit ? Verdict::Reject : Verdict::Pass;
  return r;
}

ConditionalLawResult conditional_law_estimates(
    std::span<const double> b_t, std::span<const double> eta_t, double lambda,
    const std::vector<std::function<double(double)>>& g, double z_crit, double kurtosis_cap) {
  const std::size_t n = b_t.size();
  if (eta_t.size() != n) throw SampleError("conditional_law_test: size mismatch");
  if (n < 100 || g.empty()) throw SampleError("conditional_law_test: too few samples");
  std::vector<double> resid(n);
  std::vector<double> expo(n);
  for (std::size_t i = 0; i < n; ++i) {
    expo[i] = std::exp(lambda * b_t[i]);
    const double ratio =
        lambda == 0.0 ? 1.0 : specialfn::macdonald_k_ratio(lambda, 0.0, 1.0 / eta_t[i]);
    resid[i] = expo[i] - ratio;
  }
  ConditionalLawResult out;
  TestReport& r = out.report;
  r.name = "conditional_law_test";
  r.threshold = z_crit;
  const MeanEstimate me = mean_with_error(expo);
  double m2 = 0.0, m4 = 0.0;
  for (double v : expo) {
    const double d = v - me.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  if (m2 > 0.0) {
    const double kurt = m4 * static_cast<double>(n) / (m2 * m2);
    if (kurt > kurtosis_cap) {
      r.warnings.push_back("heavy tail: kurtosis of exp(lambda B) is " + std::to_string(kurt));
    }
  }
  double worst = 0.0;
  double worst_se = 0.0;
  std::vector<double> y(n);
  for (const auto& gj : g) {
    for (std::size_t i = 0; i < n; ++i) y[i] = resid[i] * gj(eta_t[i]);
    const MeanEstimate e = mean_with_error(y);
    out.estimates.push_back(e);
    if (e.standard_error == 0.0) {
      if (e.mean != 0.0) worst = std::numeric_limits<double>::infinity();
      continue;
    }
    const double z = std::abs(e.mean) / e.standard_error;
    if (z >= worst) {
      worst = z;
      worst_se = e.standard_error;
    }
  }
  r.statistic = worst;
  r.standard_error = worst_se;
  r.verdict = worst > z_crit ? Verdict::Reject : Verdict::Pass;
  return out;
}

TestReport conditional_law_test(std::span<const double> b_t, std::span<const double> eta_t,
                                double lambda,
                                const std::vector<std::function<double(double)>>& g,
                                double z_crit, double kurtosis_cap) {
  return conditional_law_estimates(b_t, eta_t, lambda, g, z_crit, kurtosis_cap).report;
}

}  // namespace mylab::stats
