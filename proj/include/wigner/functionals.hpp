#pragma once

#include "wigner/semicircle.hpp"
#include "wigner/test_function.hpp"

#include <nlohmann/json_fwd.hpp>

namespace wigner {

// Spectral functionals of a test function under the semicircle law.
// alpha = E[f(eta) eta/sigma], beta = E[f(eta)(eta^2-sigma^2)/sigma^2],
// omega2 = V(f(eta)); the variance coefficients of the limiting entry laws are
//   v1sq = 2 (omega2 - alpha^2 + kappa4 beta^2 / (2 sigma^4))   (real symmetric, diagonal)
//   v2sq =    omega2 - alpha^2 + kappa4 beta^2 / sigma^4        (Hermitian, diagonal)
//   d2   =    omega2 - alpha^2                                  (off-diagonal)

double alpha(const TestFunction& f, const SpectralParams& p,
             const QuadratureRule& q = default_quadrature());
double beta(const TestFunction& f, const SpectralParams& p,
            const QuadratureRule& q = default_quadrature());
double omega2(const TestFunction& f, const SpectralParams& p,
              const QuadratureRule& q = default_quadrature());

double v1sq(const TestFunction& f, double kappa4, const SpectralParams& p,
            const QuadratureRule& q = default_quadrature());
double v2sq(const TestFunction& f, double kappa4, const SpectralParams& p,
            const QuadratureRule& q = default_quadrature());
double d2(const TestFunction& f, const SpectralParams& p,
          const QuadratureRule& q = default_quadrature());

struct FunctionalReport {
  double alpha = 0.0;
  double beta = 0.0;
  double omega2 = 0.0;
  double v1sq = 0.0;
  double v2sq = 0.0;
  double d2 = 0.0;
  double kappa4_used = 0.0;

  nlohmann::json to_json() const;
  static FunctionalReport from_json(const nlohmann::json& j);
  bool operator==(const FunctionalReport&) const = default;
};

FunctionalReport functional_report(const TestFunction& f, double kappa4,
                                   const SpectralParams& p,
                                   const QuadratureRule& q = default_quadrature());

}  // namespace wigner
