#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace mylab::stats {

/// Exchangeable replicate values with the configuration that produced them.
struct SampleBatch {
  std::vector<double> values;
  std::uint64_t seed = 0;
  std::size_t n_paths = 0;
  double dt = 0.0;
  double t = 0.0;
  int q = 0;
};

enum class Verdict { Pass, Reject };

struct TestReport {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  Verdict verdict = Verdict::Pass;
  double standard_error = std::numeric_limits<double>::quiet_NaN();
  double p_value = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;

  bool passed() const noexcept { return verdict == Verdict::Pass; }
};

/// Kolmogorov distribution tail P(K > x) = 2 sum_{k>=1} (-1)^{k-1} e^{-2 k^2 x^2}.
double kolmogorov_tail(double x);

/// Two-sample statistic sup |F_a - F_b|.
double ks_statistic(std::span<const double> a, std::span<const double> b);

/// Rejects when D exceeds sqrt(-ln(level/2)/2) sqrt((n+m)/(nm)). Both batches
/// need at least 100 values.
TestReport ks_two_sample(const SampleBatch& a, const SampleBatch& b, double level);
TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double level);

/// A smooth test function with its first two derivatives.
struct TestFunction {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;

  static TestFunction gaussian_bump(double center, double width);
};

/// z-score of mean[f(X_{t+h}) - f(X_t) - h (f''/2 + drift f')(X_t)] against its
/// empirical standard error; rejects when |z| > z_crit.
TestReport generator_test(std::span<const double> x_t, std::span<const double> x_th,
                          const std::function<double(double)>& drift, const TestFunction& f,
                          double h, double z_crit = 3.0);

/// Conditional-independence check of `future` from `auxiliary` given `current`.
/// Samples are sorted into `bins` equal-count bins of `current`; inside each
/// bin the auxiliary variable is regressed linearly on `current`, and `future`
/// is split at the median residual. The KS statistics of the halves are
/// compared with a Bonferroni threshold at `level`.
TestReport markov_property_test(std::span<const double> current, std::span<const double> future,
                                std::span<const double> auxiliary, std::size_t bins,
                                double level);

struct MeanEstimate {
  double mean;
  double standard_error;
};
MeanEstimate mean_with_error(std::span<const double> x);

struct ConditionalLawResult {
  TestReport report;
  std::vector<MeanEstimate> estimates;
};

/// For each g_j, mean[(e^{lambda B_t} - K_lambda(1/eta_t)/K_0(1/eta_t)) g_j(eta_t)]
/// must lie within z_crit standard errors of 0.
TestReport conditional_law_test(std::span<const double> b_t, std::span<const double> eta_t,
                                double lambda,
                                const std::vector<std::function<double(double)>>& g,
                                double z_crit = 3.0, double kurtosis_cap = 50.0);

/// Same test, also returning the per-function estimates.
ConditionalLawResult conditional_law_estimates(
    std::span<const double> b_t, std::span<const double> eta_t, double lambda,
    const std::vector<std::function<double(double)>>& g, double z_crit = 3.0,
    double kurtosis_cap = 50.0);

}  // namespace mylab::stats
