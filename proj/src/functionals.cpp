#include "wigner/functionals.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

namespace wigner {

namespace {

// Quadrature round-off can push a theoretically nonnegative variance slightly
// below zero; anything past the tolerance is a real inconsistency.
double clamp_variance(double v, const char* what) {
  if (v >= 0.0) return v;
  if (v >= -1e-10) return 0.0;
  throw std::logic_error(std::string(what) + ": negative variance " + std::to_string(v));
}

void check_kappa4(double kappa4, const SpectralParams& p) {
  const double floor = -2.0 * std::pow(p.sigma, 4);
  if (kappa4 < floor - 1e-12 * std::max(1.0, std::abs(floor)))
    throw std::invalid_argument("kappa4 below the Bernoulli floor -2 sigma^4");
}

}  // namespace

double alpha(const TestFunction& f, const SpectralParams& p, const QuadratureRule& q) {
  const double s = p.sigma;
  return q.expect([&](double x) { return f(x) * x / s; }, p);
}

double beta(const TestFunction& f, const SpectralParams& p, const QuadratureRule& q) {
  const double s2 = p.sigma * p.sigma;
  return q.expect([&](double x) { return f(x) * (x * x - s2) / s2; }, p);
}

double omega2(const TestFunction& f, const SpectralParams& p, const QuadratureRule& q) {
  const double mean = q.expect([&](double x) { return f(x); }, p);
  const double second = q.expect([&](double x) { return f(x) * f(x); }, p);
  return clamp_variance(second - mean * mean, "omega2");
}

double v1sq(const TestFunction& f, double kappa4, const SpectralParams& p,
            const QuadratureRule& q) {
  check_kappa4(kappa4, p);
  const double s4 = std::pow(p.sigma, 4);
  const double b = beta(f, p, q);
  const double v = 2.0 * (omega2(f, p, q) - std::pow(alpha(f, p, q), 2) +
                          kappa4 * b * b / (2.0 * s4));
  return clamp_variance(v, "v1sq");
}

double v2sq(const TestFunction& f, double kappa4, const SpectralParams& p,
            const QuadratureRule& q) {
  check_kappa4(kappa4, p);
  const double s4 = std::pow(p.sigma, 4);
  const double b = beta(f, p, q);
  const double v =
      omega2(f, p, q) - std::pow(alpha(f, p, q), 2) + kappa4 * b * b / s4;
  return clamp_variance(v, "v2sq");
}

double d2(const TestFunction& f, const SpectralParams& p, const QuadratureRule& q) {
  const double v = omega2(f, p, q) - std::pow(alpha(f, p, q), 2);
  return clamp_variance(v, "d2");
}

FunctionalReport functional_report(const TestFunction& f, double kappa4,
                                   const SpectralParams& p, const QuadratureRule& q) {
  FunctionalReport r;
  r.alpha = alpha(f, p, q);
  r.beta = beta(f, p, q);
  r.omega2 = omega2(f, p, q);
  r.v1sq = v1sq(f, kappa4, p, q);
  r.v2sq = v2sq(f, kappa4, p, q);
  r.d2 = d2(f, p, q);
  r.kappa4_used = kappa4;
  return r;
}

nlohmann::json FunctionalReport::to_json() const {
  return nlohmann::json{{"alpha", alpha},   {"beta", beta}, {"omega2", omega2},
                        {"v1sq", v1sq},     {"v2sq", v2sq}, {"d2", d2},
                        {"kappa4_used", kappa4_used}};
}

FunctionalReport FunctionalReport::from_json(const nlohmann::json& j) {
  FunctionalReport r;
  r.alpha = j.at("alpha").get<double>();
  r.beta = j.at("beta").get<double>();
  r.omega2 = j.at("omega2").get<double>();
  r.v1sq = j.at("v1sq").get<double>();
  r.v2sq = j.at("v2sq").get<double>();
  r.d2 = j.at("d2").get<double>();
  r.kappa4_used = j.at("kappa4_used").get<double>();
  return r;
}

}  // namespace wigner
