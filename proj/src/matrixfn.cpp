#include "wigner/matrixfn.hpp"

#include <cmath>
#include <stdexcept>

namespace wigner {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;
constexpr double kNormGuard = 1e12;  // ||R e_j|| beyond this means dist(z, spec) < 1e-12

template <class Mat>
void check_solution_norm(const Mat& V) {
  for (int j = 0; j < V.cols(); ++j)
    if (!(V.col(j).norm() < kNormGuard))
      throw std::runtime_error("resolvent: shift is numerically on the spectrum");
}

template <class Scalar>
Eigen::MatrixXcd corner_impl(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& X, Complex z, int m) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = static_cast<int>(X.rows());
  if (m < 1 || m > n) throw std::invalid_argument("resolvent corner: bad block size");
  if (z.imag() == 0.0) {
    const double x = z.real();
    // Definite side first: Cholesky is the cheapest dense factorization.
    Matrix S;
    double sign;
    if (x >= 0.0) {
      S = -X;
      S.diagonal().array() += x;
      sign = 1.0;
    } else {
      S = X;
      S.diagonal().array() -= x;
      sign = -1.0;
    }
    Eigen::LLT<Matrix> llt(S);
    Matrix E = Matrix::Zero(n, m);
    for (int j = 0; j < m; ++j) E(j, j) = Scalar(1);
    if (llt.info() == Eigen::Success) {
      Matrix V = llt.solve(E);
      check_solution_norm(V);
      return (sign * V.topRows(m)).template cast<Complex>();
    }
    // shift inside the spectrum hull: symmetric indefinite, use LU
    Matrix A = -X;
    A.diagonal().array() += x;
    Eigen::PartialPivLU<Matrix> lu(A);
    Matrix V = lu.solve(E);
    check_solution_norm(V);
    return V.topRows(m).template cast<Complex>();
  }
  Eigen::MatrixXcd A = (-X).template cast<Complex>();
  A.diagonal().array() += z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(n, m);
  for (int j = 0; j < m; ++j) E(j, j) = 1.0;
  Eigen::MatrixXcd V = lu.solve(E);
  check_solution_norm(V);
  return V.topRows(m);
}

template <class Scalar>
std::vector<Complex> entries_impl(const WignerSample<Scalar>& X,
                                  const ResolventRequest& req) {
  const int n = X.n;
  for (auto [i, j] : req.indices)
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("resolvent_entries: index out of range");
  if (req.z.imag() == 0.0) {
    // contract: real shifts within 1e-12 of an eigenvalue are rejected
    const auto& ev = X.decomposition().eigenvalues();
    double dist = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) dist = std::min(dist, std::abs(req.z.real() - ev(k)));
    if (dist <= 1e-12)
      throw std::runtime_error("resolvent_entries: shift within 1e-12 of an eigenvalue");
  }
  Eigen::MatrixXcd A = (-X.matrix).template cast<Complex>();
  A.diagonal().array() += req.z;
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
  std::vector<Complex> out;
  out.reserve(req.indices.size());
  // factor once, one solve per distinct column
  std::vector<int> col_of(n, -1);
  std::vector<Eigen::VectorXcd> cols;
  for (auto [i, j] : req.indices) {
    if (col_of[j] < 0) {
      col_of[j] = static_cast<int>(cols.size());
      cols.push_back(lu.solve(Eigen::VectorXcd::Unit(n, j)));
      check_solution_norm(cols.back());
    }
    out.push_back(cols[col_of[j]](i));
  }
  return out;
}

template <class Scalar>
bool cg_impl(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& X, double z,
             const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& B,
             Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& V, double tol,
             int max_iter) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int c = static_cast<int>(B.cols());
  // Solve s (zI - X) V = s B with s chosen so the operator is positive definite.
  const double s = z >= 0.0 ? 1.0 : -1.0;
  auto apply = [&](const Matrix& P) -> Matrix {
    Matrix AP = (s * z) * P;
    AP.noalias() -= s * (X.template selfadjointView<Eigen::Lower>() * P);
    return AP;
  };
  V = Matrix::Zero(B.rows(), c);
  Matrix R = s * B;
  Matrix P = R;
  Eigen::VectorXd rz(c), target(c);
  for (int j = 0; j < c; ++j) {
    rz(j) = R.col(j).squaredNorm();
    target(j) = tol * tol * rz(j);
  }
  for (int it = 0; it < max_iter; ++it) {
    const Matrix AP = apply(P);
    for (int j = 0; j < c; ++j) {
      if (rz(j) <= target(j)) continue;
      const double den = std::real(Complex(P.col(j).dot(AP.col(j))));
      if (!(den > 0.0)) return false;  // not positive definite after all
      const double a = rz(j) / den;
      V.col(j) += a * P.col(j);
      R.col(j) -= a * AP.col(j);
      const double rz_new = R.col(j).squaredNorm();
      P.col(j) = R.col(j) + (rz_new / rz(j)) * P.col(j);
      rz(j) = rz_new;
    }
    bool done = true;
    for (int j = 0; j < c; ++j) done = done && rz(j) <= target(j);
    if (done) {
      // verify against the true residual before reporting success
      const Matrix RT = s * B - apply(V);
      for (int j = 0; j < c; ++j)
        if (RT.col(j).squaredNorm() > 4.0 * std::max(target(j), 1e-300)) return false;
      return true;
    }
  }
  return false;
}

// LAPACK-style tridiagonal LU with partial pivoting for zI - T.
class TridiagonalFactor {
 public:
  TridiagonalFactor(Complex z, const Eigen::VectorXd& diag, const Eigen::VectorXd& sub) {
    const int n = static_cast<int>(diag.size());
    d_.resize(n);
    dl_.resize(std::max(0, n - 1));
    du_.resize(std::max(0, n - 1));
    du2_.assign(std::max(0, n - 2), 0.0);
    piv_.assign(std::max(0, n - 1), false);
    for (int i = 0; i < n; ++i) d_[i] = z - diag(i);
    for (int i = 0; i + 1 < n; ++i) dl_[i] = du_[i] = -sub(i);
    for (int i = 0; i + 1 < n; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (d_[i] != 0.0) {
          const Complex f = dl_[i] / d_[i];
          dl_[i] = f;
          d_[i + 1] -= f * du_[i];
        }
      } else {
        const Complex f = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = f;
        const Complex t = d_[i + 1];
        d_[i + 1] = du_[i] - f * t;
        du_[i] = t;
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -f * du2_[i];
        }
        piv_[i] = true;
      }
    }
  }

  Eigen::VectorXcd solve(Eigen::VectorXcd b) const {
    const int n = static_cast<int>(d_.size());
    for (int i = 0; i + 1 < n; ++i) {
      if (!piv_[i]) {
        b(i + 1) -= dl_[i] * b(i);
      } else {
        const Complex t = b(i);
        b(i) = b(i + 1);
        b(i + 1) = t - dl_[i] * b(i);
      }
    }
    b(n - 1) /= d_[n - 1];
    if (n > 1) b(n - 2) = (b(n - 2) - du_[n - 2] * b(n - 1)) / d_[n - 2];
    for (int i = n - 3; i >= 0; --i)
      b(i) = (b(i) - du_[i] * b(i + 1) - du2_[i] * b(i + 2)) / d_[i];
    return b;
  }

 private:
  std::vector<Complex> d_, dl_, du_, du2_;
  std::vector<bool> piv_;
};

template <class Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> apply_impl(
    const WignerSample<Scalar>& X, const TestFunction& f, int m) {
  const int n = X.n;
  if (m < 1 || m > n) throw std::invalid_argument("apply_function_entries: bad block");
  const auto& es = X.decomposition();
  const auto& ev = es.eigenvalues();
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> V = es.eigenvectors().topRows(m);
  Eigen::VectorXd fl(n);
  for (int k = 0; k < n; ++k) fl(k) = f(ev(k));
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> scaled = V * fl.asDiagonal();
  return scaled * V.adjoint();
}

template <class Mat>
Mat poly_block_impl(const Mat& X, const std::vector<double>& coeffs, int m) {
  const int n = static_cast<int>(X.rows());
  if (coeffs.empty()) throw std::invalid_argument("polynomial_block: empty coefficients");
  if (m < 1 || m > n) throw std::invalid_argument("polynomial_block: bad block");
  Mat B = Mat::Zero(n, m);
  for (int j = 0; j < m; ++j) B(j, j) = coeffs.back();
  Mat tmp(n, m);
  for (int k = static_cast<int>(coeffs.size()) - 2; k >= 0; --k) {
    tmp.noalias() = X.template selfadjointView<Eigen::Lower>() * B;
    for (int j = 0; j < m; ++j) tmp(j, j) += coeffs[k];
    B.swap(tmp);
  }
  return B.topRows(m);
}

}  // namespace

// ---------------------------------------------------------------------------
// spectral path and polynomial blocks

Eigen::MatrixXd apply_function_entries(const RealSample& X, const TestFunction& f, int m) {
  return apply_impl(X, f, m);
}
Eigen::MatrixXcd apply_function_entries(const HermitianSample& X, const TestFunction& f,
                                        int m) {
  return apply_impl(X, f, m);
}

Eigen::MatrixXd polynomial_block(const Eigen::MatrixXd& X,
                                 const std::vector<double>& coeffs, int m) {
  return poly_block_impl(X, coeffs, m);
}
Eigen::MatrixXcd polynomial_block(const Eigen::MatrixXcd& X,
                                  const std::vector<double>& coeffs, int m) {
  return poly_block_impl(X, coeffs, m);
}

// ---------------------------------------------------------------------------
// resolvents

std::vector<Complex> resolvent_entries(const RealSample& X, const ResolventRequest& req) {
  return entries_impl(X, req);
}
std::vector<Complex> resolvent_entries(const HermitianSample& X,
                                       const ResolventRequest& req) {
  return entries_impl(X, req);
}

Eigen::MatrixXcd resolvent_corner(const Eigen::MatrixXd& X, Complex z, int m) {
  return corner_impl(X, z, m);
}
Eigen::MatrixXcd resolvent_corner(const Eigen::MatrixXcd& X, Complex z, int m) {
  return corner_impl(X, z, m);
}

bool shifted_solve_cg(const Eigen::MatrixXd& X, double z, const Eigen::MatrixXd& B,
                      Eigen::MatrixXd& V, double tol, int max_iter) {
  return cg_impl(X, z, B, V, tol, max_iter);
}
bool shifted_solve_cg(const Eigen::MatrixXcd& X, double z, const Eigen::MatrixXcd& B,
                      Eigen::MatrixXcd& V, double tol, int max_iter) {
  return cg_impl(X, z, B, V, tol, max_iter);
}

namespace {
template <class Mat>
Eigen::MatrixXcd corner_fast_impl(const Mat& X, Complex z, int m) {
  const int n = static_cast<int>(X.rows());
  if (z.imag() == 0.0) {
    Mat B = Mat::Zero(n, m);
    for (int j = 0; j < m; ++j) B(j, j) = 1.0;
    Mat V;
    if (shifted_solve_cg(X, z.real(), B, V)) return V.topRows(m).template cast<Complex>();
  }
  return resolvent_corner(X, z, m);
}
}  // namespace

Eigen::MatrixXcd resolvent_corner_fast(const Eigen::MatrixXd& X, Complex z, int m) {
  return corner_fast_impl(X, z, m);
}
Eigen::MatrixXcd resolvent_corner_fast(const Eigen::MatrixXcd& X, Complex z, int m) {
  return corner_fast_impl(X, z, m);
}

// ---------------------------------------------------------------------------
// derivative checks

namespace {
template <class Scalar>
Eigen::MatrixXcd full_resolvent(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& X, Complex z) {
  Eigen::MatrixXcd A = (-X).template cast<Complex>();
  A.diagonal().array() += z;
  return A.inverse();
}
}  // namespace

double resolvent_derivative_check(const RealSample& X, Complex z, std::pair<int, int> kl,
                                  std::pair<int, int> pq) {
  const auto [k, l] = kl;
  const auto [p, q] = pq;
  const Eigen::MatrixXcd R = full_resolvent(X.matrix, z);
  const Complex analytic =
      (p != q) ? R(k, p) * R(q, l) + R(k, q) * R(p, l) : R(k, p) * R(p, l);
  const double h = 1e-6;
  Eigen::MatrixXd Xp = X.matrix, Xm = X.matrix;
  Xp(p, q) += h;
  Xm(p, q) -= h;
  if (p != q) {
    Xp(q, p) += h;
    Xm(q, p) -= h;
  }
  const Complex fd =
      (full_resolvent(Xp, z)(k, l) - full_resolvent(Xm, z)(k, l)) / (2.0 * h);
  return std::abs(analytic - fd);
}

double resolvent_derivative_check(const HermitianSample& X, Complex z,
                                  std::pair<int, int> kl, std::pair<int, int> pq,
                                  int which) {
  const auto [k, l] = kl;
  const auto [p, q] = pq;
  const Eigen::MatrixXcd R = full_resolvent(X.matrix, z);
  Complex analytic;
  Eigen::MatrixXcd Xp = X.matrix, Xm = X.matrix;
  const double h = 1e-6;
  if (p == q) {
    analytic = R(k, p) * R(p, l);
    Xp(p, p) += h;
    Xm(p, p) -= h;
  } else if (which == 0) {  // d / d Re X_pq
    analytic = R(k, p) * R(q, l) + R(k, q) * R(p, l);
    Xp(p, q) += h;
    Xp(q, p) += h;
    Xm(p, q) -= h;
    Xm(q, p) -= h;
  } else {  // d / d Im X_pq
    analytic = Complex(0.0, 1.0) * (R(k, p) * R(q, l) - R(k, q) * R(p, l));
    Xp(p, q) += Complex(0.0, h);
    Xp(q, p) -= Complex(0.0, h);
    Xm(p, q) -= Complex(0.0, h);
    Xm(q, p) += Complex(0.0, h);
  }
  const Complex fd =
      (full_resolvent(Xp, z)(k, l) - full_resolvent(Xm, z)(k, l)) / (2.0 * h);
  return std::abs(analytic - fd);
}

// ---------------------------------------------------------------------------
// tridiagonal engine

template <class Scalar>
TridiagonalEngine<Scalar>::TridiagonalEngine(const Matrix& X, int m) : m_(m) {
  const int n = static_cast<int>(X.rows());
  if (m < 1 || m > n) throw std::invalid_argument("TridiagonalEngine: bad block size");
  Eigen::Tridiagonalization<Matrix> tri(X);
  const Matrix T = tri.matrixT();
  diag_ = T.diagonal().real();
  sub_ = T.diagonal(-1).real();
  qrows_.reserve(m);
  for (int i = 0; i < m; ++i) {
    // a_i = Q^* e_i, so that R_ij = a_i . ((zI - T)^{-1} a_j)
    Vector e = Vector::Zero(n);
    e(i) = Scalar(1);
    Vector a = tri.matrixQ().adjoint() * e;
    qrows_.push_back(std::move(a));
  }
}

template <class Scalar>
const Eigen::VectorXd& TridiagonalEngine<Scalar>::eigenvalues() const {
  if (!eigs_) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag_, sub_, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("TridiagonalEngine: eigenvalue iteration failed");
    eigs_ = es.eigenvalues();
  }
  return *eigs_;
}

template <class Scalar>
double TridiagonalEngine<Scalar>::spectral_radius() const {
  const auto& ev = eigenvalues();
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

template <class Scalar>
Eigen::MatrixXcd TridiagonalEngine<Scalar>::corner(Complex z) const {
  const TridiagonalFactor lu(z, diag_, sub_);
  Eigen::MatrixXcd R(m_, m_);
  for (int j = 0; j < m_; ++j) {
    const Eigen::VectorXcd w = lu.solve(qrows_[j].template cast<Complex>());
    if (!(w.norm() < kNormGuard))
      throw std::runtime_error("resolvent: shift is numerically on the spectrum");
    for (int i = 0; i < m_; ++i) R(i, j) = qrows_[i].template cast<Complex>().dot(w);
  }
  return R;
}

template <class Scalar>
Complex TridiagonalEngine<Scalar>::entry(Complex z, int i, int j) const {
  if (i < 0 || j < 0 || i >= m_ || j >= m_)
    throw std::invalid_argument("TridiagonalEngine: entry outside block");
  const TridiagonalFactor lu(z, diag_, sub_);
  const Eigen::VectorXcd w = lu.solve(qrows_[j].template cast<Complex>());
  return qrows_[i].template cast<Complex>().dot(w);
}

template <class Scalar>
Complex TridiagonalEngine<Scalar>::resolvent_trace(Complex z) const {
  const auto& ev = eigenvalues();
  Complex acc = 0.0;
  for (int k = 0; k < ev.size(); ++k) acc += 1.0 / (z - ev(k));
  return acc;
}

template class TridiagonalEngine<double>;
template class TridiagonalEngine<std::complex<double>>;

// ---------------------------------------------------------------------------
// Helffer-Sjostrand

AlmostAnalyticExtension::AlmostAnalyticExtension(TestFunction f, int order_l)
    : f_(std::move(f)), l_(order_l) {
  if (!f_.compact_support())
    throw std::invalid_argument("almost-analytic extension requires compact support");
  if (l_ < 1) throw std::invalid_argument("almost-analytic extension: order_l >= 1");
  if (l_ + 1 > f_.max_order())
    throw std::invalid_argument("almost-analytic extension: order_l exceeds max_order - 1");
}

double AlmostAnalyticExtension::cutoff(double y) {
  const double a = std::abs(y);
  if (a <= 0.5) return 1.0;
  if (a >= 1.0) return 0.0;
  return mollifier_step(0, 2.0 * (1.0 - a));
}

double AlmostAnalyticExtension::cutoff_derivative(double y) {
  const double a = std::abs(y);
  if (a <= 0.5 || a >= 1.0) return 0.0;
  const double ds = mollifier_step(1, 2.0 * (1.0 - a));
  return ds * (y > 0.0 ? -2.0 : 2.0);
}

Complex AlmostAnalyticExtension::extension(double x, double y) const {
  const double s = cutoff(y);
  if (s == 0.0) return 0.0;
  const Complex iy(0.0, y);
  Complex acc = 0.0;
  Complex pw = 1.0;
  double fact = 1.0;
  for (int n = 0; n <= l_; ++n) {
    if (n > 0) {
      pw *= iy;
      fact *= n;
    }
    acc += f_.derivative(n, x) / fact * pw;
  }
  return acc * s;
}

Complex AlmostAnalyticExtension::dbar(double x, double y) const {
  const double s = cutoff(y);
  const double ds = cutoff_derivative(y);
  if (s == 0.0 && ds == 0.0) return 0.0;
  const Complex iy(0.0, y);
  Complex sum = 0.0;
  Complex pw = 1.0;
  double fact = 1.0;
  for (int n = 0; n <= l_; ++n) {
    if (n > 0) {
      pw *= iy;
      fact *= n;
    }
    sum += f_.derivative(n, x) / fact * pw;
  }
  // pw and fact now hold (iy)^l and l!
  const Complex term1 = 0.5 * Complex(0.0, 1.0) * ds * sum;
  const Complex term2 = 0.5 * s * f_.derivative(l_ + 1, x) * pw / fact;
  return term1 + term2;
}

namespace {

void gauss_legendre_nodes(int n, std::vector<double>& x, std::vector<double>& w) {
  x.resize(n);
  w.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double p0 = 0.0, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      double p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * t * p1 - j * p2) / (j + 1.0);
      }
      dp = n * (t * p0 - p1) / (t * t - 1.0);
      const double step = p0 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    x[i] = t;
    w[i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

struct Panel1D {
  std::vector<double> nodes, weights;
};

Panel1D paneled_rule(const std::vector<std::pair<double, double>>& panels,
                     int nodes_per_panel) {
  std::vector<double> gx, gw;
  gauss_legendre_nodes(nodes_per_panel, gx, gw);
  Panel1D out;
  for (auto [a, b] : panels) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (int i = 0; i < nodes_per_panel; ++i) {
      out.nodes.push_back(mid + half * gx[i]);
      out.weights.push_back(half * gw[i]);
    }
  }
  return out;
}

template <class Scalar>
Eigen::MatrixXcd hs_impl(const WignerSample<Scalar>& X,
                         const AlmostAnalyticExtension& ext, int m, const HsGrid& grid) {
  const TestFunction& f = ext.function();
  const auto support = *f.support_hint();
  if (!(grid.y_min > 0.0 && grid.y_min < 0.5))
    throw std::invalid_argument("hs grid: y_min must lie in (0, 1/2)");
  const int l = ext.order();

  TridiagonalEngine<Scalar> engine(X.matrix, m);

  // x: uniform panels over the support of f
  const int per_panel = 8;
  const int x_panels = std::max(1, grid.x_nodes / per_panel);
  std::vector<std::pair<double, double>> xp;
  for (int i = 0; i < x_panels; ++i) {
    const double a = support.lo + (support.hi - support.lo) * i / x_panels;
    const double b = support.lo + (support.hi - support.lo) * (i + 1) / x_panels;
    xp.emplace_back(a, b);
  }
  const Panel1D xr = paneled_rule(xp, per_panel);

  // y > 0 splits into two regimes. On [1/2, 1] the cutoff derivative drives the
  // integrand and needs uniform resolution; below 1/2 the integrand decays like
  // y^l while the resolvent varies on scale y, so geometric panels match both.
  std::vector<std::pair<double, double>> yp;
  const int top_panels = std::max(2, grid.y_nodes / (2 * per_panel));
  for (int i = 0; i < top_panels; ++i)
    yp.emplace_back(0.5 + 0.5 * i / top_panels, 0.5 + 0.5 * (i + 1) / top_panels);
  std::vector<std::pair<double, double>> levels;
  for (double hi = 0.5; hi > grid.y_min * (1.0 + 1e-12); hi *= 0.5)
    levels.emplace_back(std::max(grid.y_min, hi * 0.5), hi);
  const int sub = std::max(
      1, grid.y_nodes / (2 * per_panel * std::max<int>(1, levels.size())));
  for (auto [a, b] : levels)
    for (int s = 0; s < sub; ++s)
      yp.emplace_back(a + (b - a) * s / sub, a + (b - a) * (s + 1) / sub);
  const Panel1D yr = paneled_rule(yp, per_panel);

  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(m, m);
  std::vector<double> scaled(l + 2);
  for (std::size_t ix = 0; ix < xr.nodes.size(); ++ix) {
    const double x = xr.nodes[ix];
    double fact = 1.0;
    for (int n = 0; n <= l + 1; ++n) {
      if (n > 0) fact *= n;
      scaled[n] = f.derivative(n, x) / fact;
    }
    // the remainder term carries f^(l+1)/l! = scaled[l+1] * (l+1)
    const double flp1_over_lfact = scaled[l + 1] * (l + 1);
    for (std::size_t iy = 0; iy < yr.nodes.size(); ++iy) {
      const double y = yr.nodes[iy];
      const double s = AlmostAnalyticExtension::cutoff(y);
      const double ds = AlmostAnalyticExtension::cutoff_derivative(y);
      if (s == 0.0 && ds == 0.0) continue;
      const Complex iyc(0.0, y);
      Complex sum = 0.0;
      Complex pw = 1.0;
      for (int n = 0; n <= l; ++n) {
        if (n > 0) pw *= iyc;
        sum += scaled[n] * pw;
      }
      const Complex dbar =
          0.5 * Complex(0.0, 1.0) * ds * sum + 0.5 * s * flp1_over_lfact * pw;
      const double wt = xr.weights[ix] * yr.weights[iy];
      acc += (wt * dbar) * engine.corner(Complex(x, y));
    }
  }
  // conjugate symmetry supplies the lower half-plane
  const Eigen::MatrixXcd total = acc + acc.adjoint();
  return (-1.0 / kPi) * total;
}

}  // namespace

Eigen::MatrixXd hs_reconstruct_entries(const RealSample& X,
                                       const AlmostAnalyticExtension& ext, int m,
                                       const HsGrid& grid) {
  return hs_impl(X, ext, m, grid).real();
}
Eigen::MatrixXcd hs_reconstruct_entries(const HermitianSample& X,
                                        const AlmostAnalyticExtension& ext, int m,
                                        const HsGrid& grid) {
  return hs_impl(X, ext, m, grid);
}

// ---------------------------------------------------------------------------
// Schur field

namespace {
template <class Scalar>
Eigen::MatrixXcd schur_impl(const WignerSample<Scalar>& X, Complex z, int m,
                            const SpectralParams& p, bool fast) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  const int n = X.n;
  const int k = n - m;
  if (m < 1 || k < 1) throw std::invalid_argument("schur_field: bad block size");
  require_off_cut(z, p);
  const Matrix Xt = X.matrix.bottomRightCorner(k, k);
  const Matrix B = X.matrix.block(m, 0, k, m);

  Eigen::MatrixXcd V;
  if (z.imag() == 0.0 && fast) {
    Matrix Vs;
    if (shifted_solve_cg(Xt, z.real(), B, Vs)) V = Vs.template cast<Complex>();
  }
  if (V.size() == 0) {
    if (z.imag() == 0.0) {
      const double x = z.real();
      Matrix S;
      double sign;
      if (x >= 0.0) {
        S = -Xt;
        S.diagonal().array() += x;
        sign = 1.0;
      } else {
        S = Xt;
        S.diagonal().array() -= x;
        sign = -1.0;
      }
      Eigen::LLT<Matrix> llt(S);
      if (llt.info() == Eigen::Success) {
        Matrix Vs = sign * llt.solve(B);
        check_solution_norm(Vs);
        V = Vs.template cast<Complex>();
      }
    }
    if (V.size() == 0) {
      Eigen::MatrixXcd A = (-Xt).template cast<Complex>();
      A.diagonal().array() += z;
      Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
      V = lu.solve(B.template cast<Complex>());
      check_solution_norm(V);
    }
  }
  const Eigen::MatrixXcd quad = B.template cast<Complex>().adjoint() * V;
  const Complex g = stieltjes_g(z, p);
  const double scale = std::sqrt(static_cast<double>(n));
  Eigen::MatrixXcd Y = scale * quad;
  Y.diagonal().array() -= scale * p.sigma * p.sigma * g;
  return Y;
}
}  // namespace

Eigen::MatrixXcd schur_field(const RealSample& X, Complex z, int m,
                             const SpectralParams& p, bool fast) {
  return schur_impl(X, z, m, p, fast);
}
Eigen::MatrixXcd schur_field(const HermitianSample& X, Complex z, int m,
                             const SpectralParams& p, bool fast) {
  return schur_impl(X, z, m, p, fast);
}

}  // namespace wigner
