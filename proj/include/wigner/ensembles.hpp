#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "wigner/rng.hpp"
#include "wigner/semicircle.hpp"

namespace wigner {

// Centered marginal with declared moments up to order six and a sampler.
class Marginal {
 public:
  enum class Kind { gaussian, rademacher, uniform, shifted_exponential, three_point };

  static Marginal gaussian(double variance);
  static Marginal rademacher(double variance = 1.0);
  static Marginal uniform(double variance = 1.0);
  static Marginal shifted_exponential(double variance = 1.0);
  // Symmetric three-point law on {-a, 0, +a} with the requested variance and
  // fourth cumulant; kappa4 ranges over [-2 variance^2, infinity).
  static Marginal three_point(double variance, double kappa4);
  static Marginal by_name(const std::string& name, double variance,
                          std::optional<double> kappa4 = std::nullopt);

  const std::string& name() const { return name_; }
  Kind kind() const { return kind_; }
  double variance() const { return moments_[2]; }
  double moment(int k) const;      // E xi^k, 0 <= k <= 6
  double cumulant(int k) const;    // 2 <= k <= 4 (mean-zero convention)
  double abs_moment(int k) const;  // E |xi|^k, 0 <= k <= 6

  double sample(Rng& rng) const;

  // Atoms (x, p) for discrete laws; enables exact expectations.
  std::optional<std::vector<std::pair<double, double>>> atoms() const;

  bool operator==(const Marginal& o) const {
    return kind_ == o.kind_ && moments_ == o.moments_;
  }

 private:
  Marginal() = default;
  Kind kind_ = Kind::gaussian;
  std::string name_;
  std::array<double, 7> moments_{};  // moments_[k] = E xi^k
  // three-point parameters: P(+-a) = p_atom, P(0) = 1 - 2 p_atom
  double a_ = 0.0, p_atom_ = 0.0;
};

// (kappa2, kappa3, kappa4) of a mean-zero marginal.
std::array<double, 3> cumulants(const Marginal& d);

enum class Symmetry { real_symmetric, hermitian };

// Wigner ensemble: off-diagonal marginal mu (in the Hermitian case the common
// law of sqrt(2) Re W_jk and sqrt(2) Im W_jk) and the diagonal marginal, the
// law of W_ii itself.  Note the paper's mu_1 is the law of W_11/sqrt(2) in the
// real case; we store the entry law directly, so a GOE spec reads
// diag = gaussian(2 sigma^2).
struct EnsembleSpec {
  Symmetry symmetry = Symmetry::real_symmetric;
  Marginal offdiag = Marginal::gaussian(1.0);
  Marginal diag = Marginal::gaussian(1.0);

  double sigma() const { return std::sqrt(offdiag.variance()); }
  SpectralParams spectral_params() const { return SpectralParams(sigma()); }

  // Variance of a single off-diagonal entry: sigma^2 in both symmetry classes
  // (E|W_12|^2 = sigma^2 for Hermitian).
  double offdiag_entry_variance() const { return offdiag.variance(); }
  double diag_entry_variance() const { return diag.variance(); }

  // Fourth cumulant entering the covariance formulas: m4 - 3 sigma^4 for real
  // entries, E|W_12|^4 - 2 sigma^4 for complex ones.
  double effective_kappa4() const;

  static EnsembleSpec goe(double sigma = 1.0);
  static EnsembleSpec gue(double sigma = 1.0);
};

// X = W / sqrt(n), stored densely with both triangles filled.
template <class Scalar>
struct WignerSample {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  int n = 0;
  Matrix matrix;

  // Lazily computed spectral decomposition, shared read-only afterwards.
  const Eigen::SelfAdjointEigenSolver<Matrix>& decomposition() const;

 private:
  mutable std::shared_ptr<Eigen::SelfAdjointEigenSolver<Matrix>> eig_;
};

using RealSample = WignerSample<double>;
using HermitianSample = WignerSample<std::complex<double>>;
using AnySample = std::variant<RealSample, HermitianSample>;

RealSample sample_wigner_real(const EnsembleSpec& spec, int n, Rng& rng);
HermitianSample sample_wigner_hermitian(const EnsembleSpec& spec, int n, Rng& rng);
AnySample sample_wigner(const EnsembleSpec& spec, int n, const SeedDerivation& seed);

enum class Field { real, complex };

// i.i.d. coordinates with unit variance (contract of the quadratic-form CLT);
// complex coordinates are (a + i b)/sqrt(2) with a, b i.i.d. from d.
Eigen::VectorXd sample_iid_vector_real(const Marginal& d, int n, Rng& rng);
Eigen::VectorXcd sample_iid_vector_complex(const Marginal& d, int n, Rng& rng);

}  // namespace wigner
