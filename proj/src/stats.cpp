#include "wigner/stats.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace wigner {

double normal_cdf(double t) { return 0.5 * std::erfc(-t / std::sqrt(2.0)); }

MomentSummary summarize(std::span<const double> samples) {
  const long long n = static_cast<long long>(samples.size());
  if (n < 2) throw std::invalid_argument("summarize: need at least two samples");
  MomentSummary s;
  s.count = n;
  double m = 0.0;
  for (double x : samples) m += x;
  m /= n;
  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double x : samples) {
    const double d = x - m;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  s.mean = m;
  s.variance = m2 * n / (n - 1.0);
  s.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
  s.mean_stderr = std::sqrt(s.variance / n);
  const double var_of_var = (m4 - m2 * m2 * (n - 3.0) / (n - 1.0)) / n;
  s.variance_stderr = std::sqrt(std::max(0.0, var_of_var));
  return s;
}

double covariance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2)
    throw std::invalid_argument("covariance: size mismatch");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += (a[i] - ma) * (b[i] - mb);
  return acc / (n - 1.0);
}

double correlation(std::span<const double> a, std::span<const double> b) {
  const double c = covariance(a, b);
  const double va = summarize(a).variance;
  const double vb = summarize(b).variance;
  if (va == 0.0 || vb == 0.0) return 0.0;
  return c / std::sqrt(va * vb);
}

double ks_statistic(std::span<const double> sorted_samples,
                    const std::function<double(double)>& cdf) {
  const std::size_t n = sorted_samples.size();
  if (n == 0) throw std::invalid_argument("ks_statistic: empty sample");
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = cdf(sorted_samples[i]);
    d = std::max(d, (i + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return d;
}

SlopeFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n < 2) throw std::invalid_argument("fit_line: need >= 2 points");
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    rss += r * r;
  }
  f.slope_stderr = n > 2 ? std::sqrt(rss / (n - 2.0) / sxx) : 0.0;
  return f;
}

const GaussHermite& gauss_hermite_64() {
  static const GaussHermite rule = [] {
    // Golub-Welsch on the Hermite Jacobi matrix, mapped to the
    // probabilists' normalization E h(xi) = sum w_i h(node_i), xi ~ N(0,1).
    const int n = 64;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const double b = std::sqrt(k / 2.0);
      J(k, k - 1) = J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussHermite r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
      r.nodes[i] = std::sqrt(2.0) * es.eigenvalues()(i);
      const double v0 = es.eigenvectors()(0, i);
      r.weights[i] = v0 * v0;  // physicists' weight / sqrt(pi)
    }
    return r;
  }();
  return rule;
}

}  // namespace wigner
