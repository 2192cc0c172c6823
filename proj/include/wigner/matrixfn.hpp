#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include "wigner/ensembles.hpp"
#include "wigner/test_function.hpp"

namespace wigner {

// f(X) restricted to the top-left m x m block, computed through the full
// spectral decomposition: f(X)_ij = sum_k f(lambda_k) u_ik conj(u_jk).
// This is the reference path; faster polynomial routes are tested against it.
Eigen::MatrixXd apply_function_entries(const RealSample& X, const TestFunction& f, int m);
Eigen::MatrixXcd apply_function_entries(const HermitianSample& X, const TestFunction& f,
                                        int m);

// Top-left m x m block of poly(X) by block Horner; exact whenever the
// polynomial describes f on the whole spectrum.
Eigen::MatrixXd polynomial_block(const Eigen::MatrixXd& X,
                                 const std::vector<double>& coeffs, int m);
Eigen::MatrixXcd polynomial_block(const Eigen::MatrixXcd& X,
                                  const std::vector<double>& coeffs, int m);

struct ResolventRequest {
  Complex z;
  std::vector<std::pair<int, int>> indices;
};

// Entries of (zI - X)^{-1} by per-column linear solves.  Real z is checked
// against the spectrum (distance <= 1e-12 raises); non-real z is always
// admissible.
std::vector<Complex> resolvent_entries(const RealSample& X, const ResolventRequest& req);
std::vector<Complex> resolvent_entries(const HermitianSample& X,
                                       const ResolventRequest& req);

// Top-left m x m block of the resolvent by direct factorization: Cholesky for
// real shifts outside the spectrum, partial-pivot LU otherwise.
Eigen::MatrixXcd resolvent_corner(const Eigen::MatrixXd& X, Complex z, int m);
Eigen::MatrixXcd resolvent_corner(const Eigen::MatrixXcd& X, Complex z, int m);

// |analytic derivative - central finite difference| for d R_kl / d X_pq.
// In the Hermitian overload `which` selects the real (0) or imaginary (1)
// part of X_pq.
double resolvent_derivative_check(const RealSample& X, Complex z,
                                  std::pair<int, int> kl, std::pair<int, int> pq);
double resolvent_derivative_check(const HermitianSample& X, Complex z,
                                  std::pair<int, int> kl, std::pair<int, int> pq,
                                  int which);

// Conjugate-gradient solve of (z - X) V = B for a real shift z with zI - X
// positive definite (z to the right of the spectrum) or negative definite
// (z to the left).  Returns false when CG stalls; callers fall back to the
// direct factorization.  Monte Carlo fast path; agreement with
// resolvent_corner is part of the test suite.
bool shifted_solve_cg(const Eigen::MatrixXd& X, double z, const Eigen::MatrixXd& B,
                      Eigen::MatrixXd& V, double tol = 1e-11, int max_iter = 400);
bool shifted_solve_cg(const Eigen::MatrixXcd& X, double z, const Eigen::MatrixXcd& B,
                      Eigen::MatrixXcd& V, double tol = 1e-11, int max_iter = 400);

// One Householder reduction X = Q T Q^* per sample; afterwards any resolvent
// corner costs O(n m) per spectral point and the full spectrum is cheap.
template <class Scalar>
class TridiagonalEngine {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  TridiagonalEngine(const Matrix& X, int m);

  int size() const { return static_cast<int>(diag_.size()); }
  int block() const { return m_; }
  const Eigen::VectorXd& eigenvalues() const;
  double spectral_radius() const;

  // m x m top-left block of (zI - X)^{-1}.
  Eigen::MatrixXcd corner(Complex z) const;
  // (i, j) entry with i, j < m.
  Complex entry(Complex z, int i, int j) const;
  // Tr (zI - X)^{-1} = sum_k 1/(z - lambda_k).
  Complex resolvent_trace(Complex z) const;

 private:
  int m_;
  Eigen::VectorXd diag_;
  Eigen::VectorXd sub_;
  std::vector<Vector> qrows_;  // rows 0..m-1 of Q, untransposed
  mutable std::optional<Eigen::VectorXd> eigs_;
};

using RealTridiagonalEngine = TridiagonalEngine<double>;
using HermitianTridiagonalEngine = TridiagonalEngine<std::complex<double>>;

// Almost-analytic extension f~(x+iy) = sum_{n<=l} f^(n)(x) (iy)^n / n! * cutoff(y)
// with the mollified-step cutoff equal to 1 for |y| <= 1/2 and 0 for |y| >= 1.
class AlmostAnalyticExtension {
 public:
  AlmostAnalyticExtension(TestFunction f, int order_l);

  const TestFunction& function() const { return f_; }
  int order() const { return l_; }

  static double cutoff(double y);
  static double cutoff_derivative(double y);

  Complex extension(double x, double y) const;
  Complex dbar(double x, double y) const;

 private:
  TestFunction f_;
  int l_;
};

struct HsGrid {
  int x_nodes = 400;
  int y_nodes = 400;   // per half-plane; conjugate symmetry supplies the other half
  double y_min = 1e-4;
};

// f(X) block from the planar resolvent integral
//   -(1/pi) \int dbar f~(z) (z - X)^{-1} dx dy,
// tensor Gauss-Legendre panels, geometric refinement of the y panels toward
// the excluded band |y| < y_min.
Eigen::MatrixXd hs_reconstruct_entries(const RealSample& X,
                                       const AlmostAnalyticExtension& ext, int m,
                                       const HsGrid& grid);
Eigen::MatrixXcd hs_reconstruct_entries(const HermitianSample& X,
                                        const AlmostAnalyticExtension& ext, int m,
                                        const HsGrid& grid);

// Schur-complement field: Y_ij(z) = sqrt(N) (<x^(i), R~(z) x^(j)> - sigma^2 g(z) d_ij)
// with R~ the resolvent of the lower-right (N-m) block and x^(i) the trailing
// part of column i.  `fast` switches the inner solve to CG for real shifts.
Eigen::MatrixXcd schur_field(const RealSample& X, Complex z, int m,
                             const SpectralParams& p, bool fast = false);
Eigen::MatrixXcd schur_field(const HermitianSample& X, Complex z, int m,
                             const SpectralParams& p, bool fast = false);

// Corner resolvent for the Monte Carlo drivers: CG when the shift allows it,
// direct factorization otherwise.
Eigen::MatrixXcd resolvent_corner_fast(const Eigen::MatrixXd& X, Complex z, int m);
Eigen::MatrixXcd resolvent_corner_fast(const Eigen::MatrixXcd& X, Complex z, int m);

}  // namespace wigner
