#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

#include "wigner/ensembles.hpp"
#include "wigner/functionals.hpp"

namespace wigner {

enum class EntryClass { diag, offdiag };
enum class CovComponent { ReRe, ImIm, ReIm };
enum class Component { value, re, im };

// Limiting law of sqrt(N)(f(X)_ij - centering): coefficient * W_ij plus an
// independent Gaussian.  In the Hermitian off-diagonal case the law is
// complex with i.i.d. real and imaginary Gaussian parts of variance
// gaussian_variance/2, and W_ij = (xi_1 + i xi_2)/sqrt(2) with xi ~ entry.
struct EntryLaw {
  double coefficient = 0.0;        // alpha(f)/sigma
  Marginal entry = Marginal::gaussian(1.0);
  bool complex_field = false;
  double gaussian_variance = 0.0;  // v1^2 or v2^2 (diag), d^2 (offdiag)

  double entry_variance() const { return entry.variance(); }
  double total_variance() const {
    return coefficient * coefficient * entry_variance() + gaussian_variance;
  }
  nlohmann::json to_json() const;
};

EntryLaw predict_entry_law(const TestFunction& f, const EnsembleSpec& spec,
                           EntryClass entry,
                           const QuadratureRule& q = default_quadrature());

struct CdfValue {
  double p = 0.0;
  std::string method;      // "enumeration", "gauss_hermite", "closed_form", "monte_carlo"
  double mc_stderr = 0.0;  // zero unless method == "monte_carlo"
};

// P(component of the law <= t); the evaluation route depends on the marginal.
CdfValue law_cdf(const EntryLaw& law, double t, Component c = Component::value);

double law_sample(const EntryLaw& law, Rng& rng);
Complex law_sample_complex(const EntryLaw& law, Rng& rng);

// Covariances of the Gaussian field Y(z); ReIm is Cov(Re Y(z), Im Y(w)),
// which is not symmetric under swapping z and w.
double predict_y_cov(Complex z, Complex w, const EnsembleSpec& spec, EntryClass entry,
                     CovComponent c);

// Covariances of Upsilon(z) = g^2(z) (W^(m) + Y(z)): the resolvent field itself.
double predict_upsilon_cov(Complex z, Complex w, const EnsembleSpec& spec,
                           EntryClass entry, CovComponent c);

// Covariance matrix of (Re Y(z_1), Im Y(z_1), Re Y(z_2), ...) for PSD checks.
Eigen::MatrixXd y_cov_matrix(const std::vector<Complex>& points,
                             const EnsembleSpec& spec, EntryClass entry);

// Cross-check between the entry-law coefficients for f_z(x) = 1/(z-x) at a
// real off-cut point and the resolvent covariances: a = g^2, d^2 = -s^4 g^4 g',
// v^2 = kappa4 g^6 - 2 s^4 g^4 g' (real) or kappa4 g^6 - s^4 g^4 g' (Hermitian).
struct ConsistencyReport {
  double coefficient_residual = 0.0;
  double d2_residual = 0.0;
  double vsq_residual = 0.0;
  double max_residual() const;
};
ConsistencyReport consistency_resolvent_vs_entry(
    double x, const EnsembleSpec& spec,
    const QuadratureRule& q = default_quadrature());

}  // namespace wigner
