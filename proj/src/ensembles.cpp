#include "wigner/ensembles.hpp"

#include <cmath>
#include <stdexcept>

namespace wigner {

double Marginal::moment(int k) const {
  if (k < 0 || k > 6) throw std::invalid_argument("Marginal::moment: order 0..6");
  return moments_[static_cast<std::size_t>(k)];
}

double Marginal::cumulant(int k) const {
  switch (k) {
    case 2: return moments_[2];
    case 3: return moments_[3];
    case 4: return moments_[4] - 3.0 * moments_[2] * moments_[2];
    default: throw std::invalid_argument("Marginal::cumulant: order 2..4");
  }
}

std::array<double, 3> cumulants(const Marginal& d) {
  return {d.cumulant(2), d.cumulant(3), d.cumulant(4)};
}

double Marginal::abs_moment(int k) const {
  if (k < 0 || k > 6) throw std::invalid_argument("Marginal::abs_moment: order 0..6");
  if (k % 2 == 0) return moments_[static_cast<std::size_t>(k)];
  const double v = moments_[2];
  switch (kind_) {
    case Kind::gaussian: {
      // E|xi|^{2m+1} = sigma^{2m+1} 2^{m+1} m! / sqrt(2 pi)
      const double s = std::sqrt(v);
      const double c = std::sqrt(2.0 / 3.14159265358979323846);
      if (k == 1) return s * c;
      if (k == 3) return 2.0 * s * v * c;
      return 8.0 * s * v * v * c;  // k == 5
    }
    case Kind::rademacher:
      return std::pow(v, k / 2.0);
    case Kind::uniform:
      return std::pow(a_, k) / (k + 1.0);
    case Kind::three_point:
      return 2.0 * p_atom_ * std::pow(a_, k);
    case Kind::shifted_exponential: {
      // E|E - 1|^k for E ~ Exp(1), scaled by a_^k; the integral splits at 1
      // into an incomplete piece plus the full gamma tail.
      // \int_0^1 (1-t)^k e^{-t} dt + \int_1^inf (t-1)^k e^{-t} dt
      //   = e^{-1} k! (... ), evaluated numerically once per order here.
      double acc = 0.0;
      const int nq = 4000;
      for (int i = 0; i < nq; ++i) {  // [0, 40] covers the mass to ~1e-17
        const double t = 40.0 * (i + 0.5) / nq;
        acc += std::pow(std::abs(t - 1.0), k) * std::exp(-t) * 40.0 / nq;
      }
      return std::pow(a_, k) * acc;
    }
  }
  return 0.0;
}

Marginal Marginal::gaussian(double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("gaussian: variance must be > 0");
  Marginal m;
  m.kind_ = Kind::gaussian;
  m.name_ = "gaussian";
  const double v = variance;
  m.moments_ = {1.0, 0.0, v, 0.0, 3.0 * v * v, 0.0, 15.0 * v * v * v};
  return m;
}

Marginal Marginal::rademacher(double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("rademacher: variance must be > 0");
  Marginal m;
  m.kind_ = Kind::rademacher;
  m.name_ = "rademacher";
  const double v = variance;
  m.moments_ = {1.0, 0.0, v, 0.0, v * v, 0.0, v * v * v};
  m.a_ = std::sqrt(v);
  m.p_atom_ = 0.5;
  return m;
}

Marginal Marginal::uniform(double variance) {
  if (!(variance > 0.0)) throw std::invalid_argument("uniform: variance must be > 0");
  Marginal m;
  m.kind_ = Kind::uniform;
  m.name_ = "uniform";
  const double v = variance;
  m.moments_ = {1.0, 0.0, v, 0.0, 1.8 * v * v, 0.0, 27.0 / 7.0 * v * v * v};
  m.a_ = std::sqrt(3.0 * v);  // half-width
  return m;
}

Marginal Marginal::shifted_exponential(double variance) {
  if (!(variance > 0.0))
    throw std::invalid_argument("shifted_exponential: variance must be > 0");
  Marginal m;
  m.kind_ = Kind::shifted_exponential;
  m.name_ = "shifted_exponential";
  const double v = variance, s = std::sqrt(variance);
  // central moments of Exp(1), scaled by s^k
  m.moments_ = {1.0, 0.0, v, 2.0 * s * v, 9.0 * v * v, 44.0 * s * v * v, 265.0 * v * v * v};
  m.a_ = s;
  return m;
}

Marginal Marginal::three_point(double variance, double kappa4) {
  if (!(variance > 0.0)) throw std::invalid_argument("three_point: variance must be > 0");
  const double v = variance;
  if (kappa4 < -2.0 * v * v - 1e-12)
    throw std::invalid_argument("three_point: kappa4 below the Bernoulli floor -2 variance^2");
  const double m4 = kappa4 + 3.0 * v * v;
  Marginal m;
  m.kind_ = Kind::three_point;
  m.name_ = "three_point";
  m.a_ = std::sqrt(m4 / v);
  m.p_atom_ = std::min(0.5, v * v / (2.0 * m4));
  m.moments_ = {1.0, 0.0, v, 0.0, m4, 0.0, m4 * m4 / v};
  return m;
}

Marginal Marginal::by_name(const std::string& name, double variance,
                           std::optional<double> kappa4) {
  if (name == "gaussian") return gaussian(variance);
  if (name == "rademacher") return rademacher(variance);
  if (name == "uniform") return uniform(variance);
  if (name == "shifted_exponential") return shifted_exponential(variance);
  if (name == "three_point") {
    if (!kappa4) throw std::invalid_argument("three_point marginal needs kappa4");
    return three_point(variance, *kappa4);
  }
  throw std::invalid_argument("unknown marginal '" + name + "'");
}

double Marginal::sample(Rng& rng) const {
  switch (kind_) {
    case Kind::gaussian:
      return std::sqrt(moments_[2]) * gaussian01(rng);
    case Kind::rademacher:
      return uniform01(rng) < 0.5 ? -a_ : a_;
    case Kind::uniform:
      return a_ * (2.0 * uniform01(rng) - 1.0);
    case Kind::shifted_exponential:
      return a_ * (-std::log(uniform01_open(rng)) - 1.0);
    case Kind::three_point: {
      const double u = uniform01(rng);
      if (u < p_atom_) return a_;
      if (u < 2.0 * p_atom_) return -a_;
      return 0.0;
    }
  }
  return 0.0;
}

std::optional<std::vector<std::pair<double, double>>> Marginal::atoms() const {
  if (kind_ == Kind::rademacher)
    return std::vector<std::pair<double, double>>{{-a_, 0.5}, {a_, 0.5}};
  if (kind_ == Kind::three_point) {
    std::vector<std::pair<double, double>> a{{-a_, p_atom_}, {a_, p_atom_}};
    if (p_atom_ < 0.5) a.insert(a.begin() + 1, {0.0, 1.0 - 2.0 * p_atom_});
    return a;
  }
  return std::nullopt;
}

double EnsembleSpec::effective_kappa4() const {
  if (symmetry == Symmetry::real_symmetric) return offdiag.cumulant(4);
  // E|W_12|^4 - 2 sigma^4 with W_12 = (xi_1 + i xi_2)/sqrt(2), xi ~ mu:
  // E|W_12|^4 = (m4 + sigma^4)/2.
  const double s2 = offdiag.variance();
  return 0.5 * (offdiag.moment(4) + s2 * s2) - 2.0 * s2 * s2;
}

EnsembleSpec EnsembleSpec::goe(double sigma) {
  EnsembleSpec s;
  s.symmetry = Symmetry::real_symmetric;
  s.offdiag = Marginal::gaussian(sigma * sigma);
  s.diag = Marginal::gaussian(2.0 * sigma * sigma);
  return s;
}

EnsembleSpec EnsembleSpec::gue(double sigma) {
  EnsembleSpec s;
  s.symmetry = Symmetry::hermitian;
  s.offdiag = Marginal::gaussian(sigma * sigma);
  s.diag = Marginal::gaussian(sigma * sigma);
  return s;
}

template <class Scalar>
const Eigen::SelfAdjointEigenSolver<typename WignerSample<Scalar>::Matrix>&
WignerSample<Scalar>::decomposition() const {
  if (!eig_) {
    auto solver = std::make_shared<Eigen::SelfAdjointEigenSolver<Matrix>>(matrix);
    if (solver->info() != Eigen::Success)
      throw std::runtime_error("spectral decomposition failed");
    eig_ = std::move(solver);
  }
  return *eig_;
}

template struct WignerSample<double>;
template struct WignerSample<std::complex<double>>;

RealSample sample_wigner_real(const EnsembleSpec& spec, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_wigner: n >= 1");
  if (spec.symmetry != Symmetry::real_symmetric)
    throw std::invalid_argument("sample_wigner_real: spec is Hermitian");
  RealSample s;
  s.n = n;
  s.matrix.resize(n, n);
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const double w = spec.offdiag.sample(rng) * inv;
      s.matrix(i, j) = w;
      s.matrix(j, i) = w;
    }
    s.matrix(j, j) = spec.diag.sample(rng) * inv;
  }
  return s;
}

HermitianSample sample_wigner_hermitian(const EnsembleSpec& spec, int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("sample_wigner: n >= 1");
  if (spec.symmetry != Symmetry::hermitian)
    throw std::invalid_argument("sample_wigner_hermitian: spec is real symmetric");
  HermitianSample s;
  s.n = n;
  s.matrix.resize(n, n);
  const double inv = 1.0 / std::sqrt(static_cast<double>(n));
  const double r = inv / std::sqrt(2.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const std::complex<double> w(spec.offdiag.sample(rng) * r,
                                   spec.offdiag.sample(rng) * r);
      s.matrix(i, j) = w;
      s.matrix(j, i) = std::conj(w);
    }
    s.matrix(j, j) = spec.diag.sample(rng) * inv;
  }
  return s;
}

AnySample sample_wigner(const EnsembleSpec& spec, int n, const SeedDerivation& seed) {
  Rng rng = seed.rng();
  if (spec.symmetry == Symmetry::real_symmetric)
    return sample_wigner_real(spec, n, rng);
  return sample_wigner_hermitian(spec, n, rng);
}

namespace {
void require_unit_variance(const Marginal& d) {
  if (std::abs(d.variance() - 1.0) > 1e-12)
    throw std::invalid_argument("sample_iid_vector: marginal must have unit variance");
}
}  // namespace

Eigen::VectorXd sample_iid_vector_real(const Marginal& d, int n, Rng& rng) {
  require_unit_variance(d);
  Eigen::VectorXd u(n);
  for (int i = 0; i < n; ++i) u(i) = d.sample(rng);
  return u;
}

Eigen::VectorXcd sample_iid_vector_complex(const Marginal& d, int n, Rng& rng) {
  require_unit_variance(d);
  Eigen::VectorXcd u(n);
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i) {
    const double a = d.sample(rng);
    const double b = d.sample(rng);
    u(i) = std::complex<double>(a * r, b * r);
  }
  return u;
}

}  // namespace wigner
