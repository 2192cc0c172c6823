#include "wigner/semicircle.hpp"

#include <cmath>

namespace wigner {

namespace {
constexpr double kPi = 3.14159265358979323846264338327950288;

// sqrt(z^2 - 4 sigma^2) on the branch with s(z) ~ z at infinity, computed as
// z * sqrt(1 - 4 sigma^2 / z^2) with the principal square root.  This places
// the branch cut exactly on [-2 sigma, 2 sigma] and is stable for large |z|.
Complex edge_root(Complex z, const SpectralParams& p) {
  const Complex u = 4.0 * p.sigma * p.sigma / (z * z);
  return z * std::sqrt(1.0 - u);
}
}  // namespace

double semicircle_density(double x, const SpectralParams& p) {
  const double e = p.edge();
  if (std::abs(x) >= e) return 0.0;
  return std::sqrt(e * e - x * x) / (2.0 * kPi * p.sigma * p.sigma);
}

Complex stieltjes_g(Complex z, const SpectralParams& p) {
  require_off_cut(z, p);
  // (z - s)/(2 sigma^2) rewritten as 2/(z + s) to avoid cancellation at large |z|.
  return 2.0 / (z + edge_root(z, p));
}

Complex stieltjes_g_prime(Complex z, const SpectralParams& p) {
  require_off_cut(z, p);
  const Complex s = edge_root(z, p);
  return -2.0 / ((z + s) * s);  // g' = -g/s
}

Complex phi(Complex z, Complex w, const SpectralParams& p) {
  require_off_cut(z, p);
  require_off_cut(w, p);
  // Confluent branch: the difference quotient cancels catastrophically for
  // nearly equal arguments.
  if (std::abs(z - w) < 1e-8 * std::max(1.0, std::abs(z)))
    return -stieltjes_g_prime(0.5 * (z + w), p);
  return -(stieltjes_g(w, p) - stieltjes_g(z, p)) / (w - z);
}

namespace {
double real_kernel(Complex v, double scale_hint) {
  if (std::abs(v.imag()) > 1e-10 * std::max(1.0, scale_hint))
    throw std::logic_error("phi kernel: nonreal combination");
  return v.real();
}
}  // namespace

double phi_pp(Complex z, Complex w, const SpectralParams& p) {
  const Complex v = 0.25 * (phi(z, w, p) + phi(std::conj(z), std::conj(w), p) +
                            phi(std::conj(z), w, p) + phi(z, std::conj(w), p));
  return real_kernel(v, std::abs(v));
}

double phi_mm(Complex z, Complex w, const SpectralParams& p) {
  const Complex v = -0.25 * (phi(z, w, p) + phi(std::conj(z), std::conj(w), p) -
                             phi(std::conj(z), w, p) - phi(z, std::conj(w), p));
  return real_kernel(v, std::abs(v));
}

double phi_pm(Complex z, Complex w, const SpectralParams& p) {
  const Complex v = Complex(0.0, -0.25) *
                    (phi(z, w, p) + phi(std::conj(z), w, p) -
                     phi(std::conj(z), std::conj(w), p) - phi(z, std::conj(w), p));
  return real_kernel(v, std::abs(v));
}

QuadratureRule::QuadratureRule(int node_count) {
  if (node_count < 1) throw std::invalid_argument("QuadratureRule: node_count must be >= 1");
  nodes_.resize(node_count);
  weights_.resize(node_count);
  // E f(eta) = (2/pi) \int_0^pi f(2 sigma cos t) sin^2 t dt; the midpoint-free
  // Chebyshev-U rule is exact through degree 2n-1.
  const double denom = node_count + 1.0;
  for (int k = 1; k <= node_count; ++k) {
    const double t = kPi * k / denom;
    nodes_[k - 1] = std::cos(t);
    const double s = std::sin(t);
    weights_[k - 1] = 2.0 / denom * s * s;
  }
}

const QuadratureRule& default_quadrature() {
  static const QuadratureRule rule(2048);
  return rule;
}

double semicircle_moment(int k, const SpectralParams& p) {
  if (k < 0) throw std::invalid_argument("semicircle_moment: negative order");
  if (k % 2 == 1) return 0.0;
  const int m = k / 2;
  // Catalan numbers by the exact integer recurrence (m+1) C_m = 2 (2m-1) C_{m-1}.
  unsigned long long c = 1;
  for (int j = 1; j <= m; ++j) c = c * 2ULL * (2ULL * j - 1ULL) / (j + 1ULL);
  return static_cast<double>(c) * std::pow(p.sigma, 2 * m);
}

}  // namespace wigner
