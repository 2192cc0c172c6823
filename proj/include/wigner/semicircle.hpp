#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

namespace wigner {

using Complex = std::complex<double>;

// Scale of the semicircle law with density sqrt(4 sigma^2 - x^2) / (2 pi sigma^2)
// supported on [-2 sigma, 2 sigma].
struct SpectralParams {
  double sigma = 1.0;

  SpectralParams() = default;
  explicit SpectralParams(double s) : sigma(s) {
    if (!(s > 0.0)) throw std::invalid_argument("SpectralParams: sigma must be > 0");
  }
  double edge() const { return 2.0 * sigma; }
};

// A point z in C together with the cut [-2 sigma, 2 sigma].
inline bool on_cut(Complex z, const SpectralParams& p) {
  return z.imag() == 0.0 && std::abs(z.real()) <= p.edge();
}

inline void require_off_cut(Complex z, const SpectralParams& p) {
  if (on_cut(z, p))
    throw std::domain_error("spectral point lies on the cut [-2 sigma, 2 sigma]");
}

double semicircle_density(double x, const SpectralParams& p);

// Stieltjes transform g(z) = E 1/(z - eta), the branch decaying at infinity;
// satisfies sigma^2 g^2 - z g + 1 = 0.
Complex stieltjes_g(Complex z, const SpectralParams& p);
Complex stieltjes_g_prime(Complex z, const SpectralParams& p);

// phi(z, w) = E [ 1/(z-eta) 1/(w-eta) ], confluent value -g'(z) on the diagonal.
Complex phi(Complex z, Complex w, const SpectralParams& p);

// Real two-point kernels built from phi at (z,w), (conj z, conj w), (conj z, w),
// (z, conj w); these are E[Re/Im(1/(z-eta)) * Re/Im(1/(w-eta))].
double phi_pp(Complex z, Complex w, const SpectralParams& p);
double phi_mm(Complex z, Complex w, const SpectralParams& p);
double phi_pm(Complex z, Complex w, const SpectralParams& p);

// Gauss-Chebyshev quadrature of the second kind under x = 2 sigma cos(theta);
// integrates polynomials of degree <= 2 node_count - 1 against the semicircle
// weight exactly.
class QuadratureRule {
 public:
  explicit QuadratureRule(int node_count = 2048);

  int node_count() const { return static_cast<int>(nodes_.size()); }
  // Nodes on (-1, 1); physical node is 2 sigma * unit_node.
  const std::vector<double>& unit_nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  // E f(eta) for eta distributed by the semicircle law of scale p.sigma.
  template <class F>
  double expect(F&& f, const SpectralParams& p) const {
    const double s = 2.0 * p.sigma;
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) acc += weights_[k] * f(s * nodes_[k]);
    return acc;
  }

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

const QuadratureRule& default_quadrature();

template <class F>
double semicircle_expect(F&& f, const SpectralParams& p, const QuadratureRule& q) {
  return q.expect(std::forward<F>(f), p);
}

// Exact moments: odd vanish, E eta^{2m} = Catalan(m) sigma^{2m}.
double semicircle_moment(int k, const SpectralParams& p);

}  // namespace wigner
