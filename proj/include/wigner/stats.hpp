#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace wigner {

double normal_cdf(double t);  // standard normal

struct MomentSummary {
  long long count = 0;
  double mean = 0.0;
  double variance = 0.0;       // unbiased
  double skewness = 0.0;
  double mean_stderr = 0.0;
  double variance_stderr = 0.0;  // sqrt((m4 - s^4 (n-3)/(n-1))/n)
};

MomentSummary summarize(std::span<const double> samples);

double correlation(std::span<const double> a, std::span<const double> b);
double covariance(std::span<const double> a, std::span<const double> b);

// sup_x |F_hat(x) - F(x)|, exact over the jumps of the empirical CDF.
// Samples must be sorted ascending.
double ks_statistic(std::span<const double> sorted_samples,
                    const std::function<double(double)>& cdf);

// Asymptotic Kolmogorov critical value at level 0.01 is 1.63/sqrt(n).
inline double ks_critical_99(long long n) { return 1.6276 / std::sqrt(double(n)); }

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

// Ordinary least squares y = a + b x.
SlopeFit fit_line(std::span<const double> x, std::span<const double> y);

// Gauss-Hermite rule: E h(xi) = sum w_i h(x_i) for xi ~ N(0,1).
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const GaussHermite& gauss_hermite_64();

}  // namespace wigner
