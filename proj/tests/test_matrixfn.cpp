#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wigner/matrixfn.hpp"

using namespace wigner;

namespace {

RealSample random_real(int n, std::uint64_t seed, const EnsembleSpec& spec) {
  Rng rng(seed);
  return sample_wigner_real(spec, n, rng);
}

HermitianSample random_hermitian(int n, std::uint64_t seed) {
  Rng rng(seed);
  return sample_wigner_hermitian(EnsembleSpec::gue(1.0), n, rng);
}

EnsembleSpec default_spec() {
  EnsembleSpec s;
  s.offdiag = Marginal::gaussian(1.0);
  s.diag = Marginal::gaussian(1.0);
  return s;
}

Eigen::MatrixXcd spectral_resolvent_block(const RealSample& X, Complex z, int m) {
  const auto& es = X.decomposition();
  Eigen::MatrixXcd V = es.eigenvectors().topRows(m).cast<Complex>();
  Eigen::VectorXcd r(X.n);
  for (int k = 0; k < X.n; ++k) r(k) = 1.0 / (z - es.eigenvalues()(k));
  return V * r.asDiagonal() * V.adjoint();
}

}  // namespace

TEST_CASE("apply_function_entries basic identities") {
  RealSample X = random_real(24, 5, default_spec());
  const int m = 4;
  // f(x) = x returns the block itself
  Eigen::MatrixXd fx = apply_function_entries(X, tf_monomial(1), m);
  CHECK((fx - X.matrix.topLeftCorner(m, m)).cwiseAbs().maxCoeff() <= 1e-12);
  // f = 1 is the identity block
  Eigen::MatrixXd f1 = apply_function_entries(X, tf_constant(1.0), m);
  CHECK((f1 - Eigen::MatrixXd::Identity(m, m)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("apply_function_entries matches an explicit matrix square") {
  RealSample X = random_real(3, 17, default_spec());
  Eigen::MatrixXd sq = apply_function_entries(X, tf_monomial(2), 3);
  Eigen::MatrixXd oracle = X.matrix * X.matrix;
  CHECK((sq - oracle).cwiseAbs().maxCoeff() <= 1e-13);

  HermitianSample H = random_hermitian(3, 18);
  Eigen::MatrixXcd sqh = apply_function_entries(H, tf_monomial(2), 3);
  Eigen::MatrixXcd oracleh = H.matrix * H.matrix;
  CHECK((sqh - oracleh).cwiseAbs().maxCoeff() <= 1e-13);
}

TEST_CASE("polynomial block Horner agrees with the spectral path") {
  RealSample X = random_real(40, 23, default_spec());
  const std::vector<double> coeffs{0.5, -1.0, 0.0, 2.0, 1.0};  // 0.5 - x + 2x^3 + x^4
  Eigen::MatrixXd horner = polynomial_block(X.matrix, coeffs, 3);
  Eigen::MatrixXd spectral =
      apply_function_entries(X, tf_poly(coeffs, "q"), 3);
  CHECK((horner - spectral).cwiseAbs().maxCoeff() <= 1e-11);

  HermitianSample H = random_hermitian(40, 24);
  Eigen::MatrixXcd hh = polynomial_block(H.matrix, coeffs, 3);
  Eigen::MatrixXcd hs = apply_function_entries(H, tf_poly(coeffs, "q"), 3);
  CHECK((hh - hs).cwiseAbs().maxCoeff() <= 1e-11);
}

TEST_CASE("plateau polynomial equals the bare polynomial once the spectrum is inside") {
  SpectralParams p(1.0);
  RealSample X = random_real(60, 29, default_spec());
  TestFunction f = tf_plateau_poly({0.0, 0.0, 0.0, 1.0}, p, 0.5, "h*x^3");
  const auto& ev = X.decomposition().eigenvalues();
  REQUIRE(std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1))) <
          f.polynomial_radius());
  Eigen::MatrixXd via_spectral = apply_function_entries(X, f, 2);
  Eigen::MatrixXd via_horner = polynomial_block(X.matrix, *f.polynomial(), 2);
  CHECK((via_spectral - via_horner).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("resolvent of the zero matrix") {
  RealSample X;
  X.n = 4;
  X.matrix = Eigen::MatrixXd::Zero(4, 4);
  ResolventRequest req{Complex(2.0, 0.0), {{0, 0}, {1, 1}, {0, 1}, {2, 3}}};
  const auto vals = resolvent_entries(X, req);
  CHECK(std::abs(vals[0] - 0.5) <= 1e-15);
  CHECK(std::abs(vals[1] - 0.5) <= 1e-15);
  CHECK(std::abs(vals[2]) <= 1e-15);
  CHECK(std::abs(vals[3]) <= 1e-15);
}

TEST_CASE("resolvent entry bound |R_ij| <= 1/|Im z|") {
  RealSample X = random_real(50, 31, default_spec());
  ResolventRequest req;
  req.z = Complex(0.0, 3.0);
  for (int i = 0; i < 50; i += 7)
    for (int j = 0; j < 50; j += 11) req.indices.emplace_back(i, j);
  for (const Complex& v : resolvent_entries(X, req)) CHECK(std::abs(v) <= 1.0 / 3.0);
}

TEST_CASE("resolvent identity") {
  RealSample X1 = random_real(30, 37, default_spec());
  RealSample X2 = random_real(30, 38, default_spec());
  const Complex z(0.0, 2.0);
  auto full = [&](const RealSample& X) {
    Eigen::MatrixXcd A = (-X.matrix).cast<Complex>();
    A.diagonal().array() += z;
    return Eigen::MatrixXcd(A.inverse());
  };
  const Eigen::MatrixXcd R1 = full(X1), R2 = full(X2);
  const Eigen::MatrixXcd rhs = R1 - R1 * (X1.matrix - X2.matrix).cast<Complex>() * R2;
  CHECK((R2 - rhs).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("resolvent corner agrees with the spectral route") {
  RealSample X = random_real(50, 41, default_spec());
  for (Complex z : {Complex(0.0, 0.7), Complex(2.6, 0.0), Complex(-2.6, 0.0),
                    Complex(1.2, -0.4)}) {
    Eigen::MatrixXcd direct = resolvent_corner(X.matrix, z, 4);
    Eigen::MatrixXcd spectral = spectral_resolvent_block(X, z, 4);
    CHECK((direct - spectral).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("resolvent norm equals inverse spectral distance") {
  RealSample X = random_real(40, 43, default_spec());
  const auto& ev = X.decomposition().eigenvalues();
  for (Complex z : {Complex(2.7, 0.3), Complex(0.1, 1.1)}) {
    double dist = std::numeric_limits<double>::infinity();
    for (int k = 0; k < ev.size(); ++k)
      dist = std::min(dist, std::abs(z - Complex(ev(k), 0.0)));
    Eigen::MatrixXcd A = (-X.matrix).cast<Complex>();
    A.diagonal().array() += z;
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(A.inverse());
    CHECK(svd.singularValues()(0) ==
          doctest::Approx(1.0 / dist).epsilon(1e-9));
  }
}

TEST_CASE("near-singular real shift is rejected") {
  RealSample X = random_real(12, 47, default_spec());
  const double lam = X.decomposition().eigenvalues()(5);
  ResolventRequest req{Complex(lam, 0.0), {{0, 0}}};
  CHECK_THROWS(resolvent_entries(X, req));
  // just off the eigenvalue works
  req.z = Complex(lam + 1e-6, 0.0);
  CHECK_NOTHROW(resolvent_entries(X, req));
}

TEST_CASE("resolvent derivative formulas") {
  RealSample X = random_real(20, 53, default_spec());
  const Complex z(0.4, 1.3);
  CHECK(resolvent_derivative_check(X, z, {2, 5}, {3, 7}) <= 1e-6);
  CHECK(resolvent_derivative_check(X, z, {0, 0}, {1, 4}) <= 1e-6);
  CHECK(resolvent_derivative_check(X, z, {2, 5}, {4, 4}) <= 1e-6);

  HermitianSample H = random_hermitian(20, 54);
  CHECK(resolvent_derivative_check(H, z, {2, 5}, {3, 7}, 0) <= 1e-6);
  CHECK(resolvent_derivative_check(H, z, {2, 5}, {3, 7}, 1) <= 1e-6);
  CHECK(resolvent_derivative_check(H, z, {1, 6}, {4, 4}, 0) <= 1e-6);
}

TEST_CASE("conjugate gradient shifted solve matches the direct factorization") {
  RealSample X = random_real(120, 59, default_spec());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(120, 3);
  B(0, 0) = B(1, 1) = B(2, 2) = 1.0;
  Eigen::MatrixXd V;
  REQUIRE(shifted_solve_cg(X.matrix, 2.5, B, V));
  Eigen::MatrixXcd direct = resolvent_corner(X.matrix, Complex(2.5, 0.0), 120);
  CHECK((V.cast<Complex>() - direct.leftCols(3)).cwiseAbs().maxCoeff() <= 1e-9);

  // left side of the spectrum
  Eigen::MatrixXd VL;
  REQUIRE(shifted_solve_cg(X.matrix, -2.5, B, VL));
  Eigen::MatrixXcd directL = resolvent_corner(X.matrix, Complex(-2.5, 0.0), 120);
  CHECK((VL.cast<Complex>() - directL.leftCols(3)).cwiseAbs().maxCoeff() <= 1e-9);

  // a shift inside the spectrum is indefinite: CG must refuse, not mislead
  Eigen::MatrixXd VI;
  CHECK(!shifted_solve_cg(X.matrix, 0.3, B, VI));

  HermitianSample H = random_hermitian(100, 61);
  Eigen::MatrixXcd Bc = Eigen::MatrixXcd::Zero(100, 2);
  Bc(0, 0) = Bc(1, 1) = 1.0;
  Eigen::MatrixXcd Vc;
  REQUIRE(shifted_solve_cg(H.matrix, 2.5, Bc, Vc));
  Eigen::MatrixXcd directH = resolvent_corner(H.matrix, Complex(2.5, 0.0), 100);
  CHECK((Vc - directH.leftCols(2)).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("tridiagonal engine reproduces resolvent corners and the spectrum") {
  RealSample X = random_real(80, 67, default_spec());
  RealTridiagonalEngine engine(X.matrix, 3);
  for (Complex z : {Complex(0.0, 3.0), Complex(2.6, 0.0), Complex(0.5, 0.8)}) {
    Eigen::MatrixXcd direct = resolvent_corner(X.matrix, z, 3);
    CHECK((engine.corner(z) - direct).cwiseAbs().maxCoeff() <= 1e-10);
    const auto& ev = X.decomposition().eigenvalues();
    Complex tr = 0.0;
    for (int k = 0; k < ev.size(); ++k) tr += 1.0 / (z - ev(k));
    CHECK(std::abs(engine.resolvent_trace(z) - tr) <= 1e-9 * std::abs(tr));
  }
  const auto& ev = X.decomposition().eigenvalues();
  Eigen::VectorXd diff = engine.eigenvalues() - ev;
  CHECK(diff.cwiseAbs().maxCoeff() <= 1e-11);
  CHECK(engine.spectral_radius() ==
        doctest::Approx(std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)))));

  HermitianSample H = random_hermitian(60, 68);
  HermitianTridiagonalEngine he(H.matrix, 2);
  for (Complex z : {Complex(0.0, 2.0), Complex(2.7, 0.0)}) {
    Eigen::MatrixXcd direct = resolvent_corner(H.matrix, z, 2);
    CHECK((he.corner(z) - direct).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("almost-analytic extension basics") {
  SpectralParams p(1.0);
  TestFunction f = tf_plateau_poly({0.0, 1.0}, p, 0.5, "h*x");
  AlmostAnalyticExtension ext(f, 3);
  // value at y=0 is f itself
  for (double x : {-2.0, 0.3, 2.9}) {
    CHECK(ext.extension(x, 0.0).real() == doctest::Approx(f(x)));
    CHECK(ext.extension(x, 0.0).imag() == 0.0);
  }
  // cutoff shape
  CHECK(AlmostAnalyticExtension::cutoff(0.25) == 1.0);
  CHECK(AlmostAnalyticExtension::cutoff(1.1) == 0.0);
  CHECK(AlmostAnalyticExtension::cutoff(0.75) ==
        doctest::Approx(0.5).epsilon(1e-12));
  CHECK(AlmostAnalyticExtension::cutoff_derivative(0.75) < 0.0);
  CHECK(AlmostAnalyticExtension::cutoff_derivative(-0.75) > 0.0);

  // dbar reduces to the remainder term on |y| <= 1/2, which vanishes for
  // polynomial content of degree <= l inside the plateau
  TestFunction q = tf_plateau_poly({0.0, 0.0, 1.0}, p, 0.5, "h*x^2");
  AlmostAnalyticExtension eq(q, 3);
  for (double x : {-2.0, 0.0, 1.7}) {
    CHECK(std::abs(eq.dbar(x, 0.3)) == 0.0);
    CHECK(std::abs(eq.dbar(x, -0.45)) == 0.0);
  }
  // contract errors
  CHECK_THROWS_AS(AlmostAnalyticExtension(tf_monomial(2), 3), std::invalid_argument);
  CHECK_THROWS_AS(AlmostAnalyticExtension(f, 0), std::invalid_argument);
  CHECK_THROWS_AS(AlmostAnalyticExtension(f, f.max_order()), std::invalid_argument);
}

TEST_CASE("dbar satisfies the |y|^l bound") {
  SpectralParams p(1.0);
  TestFunction f = tf_plateau_poly({0.0, 1.0, 0.0, 0.5}, p, 0.5, "h*(x+x^3/2)");
  const int l = 3;
  AlmostAnalyticExtension ext(f, l);
  double cnorm = 0.0;
  for (double x = -3.0; x <= 3.0; x += 0.01)
    for (int k = 0; k <= l + 1; ++k) cnorm = std::max(cnorm, std::abs(f.derivative(k, x)));
  double worst = 0.0;
  for (double x = -3.0; x <= 3.0; x += 0.05)
    for (double y = -1.0; y <= 1.0; y += 0.02) {
      if (y == 0.0) continue;
      worst = std::max(worst,
                       std::abs(ext.dbar(x, y)) / (cnorm * std::pow(std::abs(y), l)));
    }
  CHECK(worst <= 50.0);
}

TEST_CASE("hs reconstruction on a 1x1 matrix recovers the function value") {
  TestFunction f = tf_compact_power({0.0, 1.0, 1.0}, 4.0, 8, "w8*(x+x^2)");
  AlmostAnalyticExtension ext(f, 3);
  RealSample X;
  X.n = 1;
  X.matrix = Eigen::MatrixXd::Constant(1, 1, 0.7);
  HsGrid grid;
  Eigen::MatrixXd R = hs_reconstruct_entries(X, ext, 1, grid);
  CHECK(std::abs(R(0, 0) - f(0.7)) <= 1e-8);
}

TEST_CASE("hs reconstruction converges to the spectral path") {
  TestFunction f = tf_compact_power({0.0, 1.0}, 4.0, 8, "w8*x");
  RealSample X = random_real(100, 71, default_spec());
  Eigen::MatrixXd oracle = apply_function_entries(X, f, 3);

  AlmostAnalyticExtension ext3(f, 3);
  double prev = std::numeric_limits<double>::infinity();
  for (int nodes : {100, 200, 400}) {
    HsGrid grid;
    grid.x_nodes = nodes;
    grid.y_nodes = nodes;
    Eigen::MatrixXd rec = hs_reconstruct_entries(X, ext3, 3, grid);
    const double err = (rec - oracle).cwiseAbs().maxCoeff();
    CHECK(err <= 2.0 * prev);  // refinement does not regress
    CHECK(err <= 1e-6);
    prev = err;
  }

  // order independence: l = 3 vs l = 5
  AlmostAnalyticExtension ext5(f, 5);
  HsGrid grid;
  Eigen::MatrixXd r3 = hs_reconstruct_entries(X, ext3, 3, grid);
  Eigen::MatrixXd r5 = hs_reconstruct_entries(X, ext5, 3, grid);
  CHECK((r3 - r5).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("hs refinement is monotone within 2x for the mollifier cutoff too") {
  // the exp(-1/t) plateau has much larger high derivatives, so absolute
  // accuracy is worse; the refinement property is what is asserted here
  SpectralParams p(1.0);
  TestFunction f = tf_plateau_poly({0.0, 1.0}, p, 0.5, "h*x");
  RealSample X = random_real(60, 72, default_spec());
  Eigen::MatrixXd oracle = apply_function_entries(X, f, 2);
  AlmostAnalyticExtension ext(f, 3);
  double prev = std::numeric_limits<double>::infinity();
  for (int nodes : {100, 200, 400}) {
    HsGrid grid;
    grid.x_nodes = nodes;
    grid.y_nodes = nodes;
    const double err =
        (hs_reconstruct_entries(X, ext, 2, grid) - oracle).cwiseAbs().maxCoeff();
    CHECK(err <= 2.0 * prev);
    prev = err;
  }
}

TEST_CASE("schur complement identity for the resolvent corner") {
  RealSample X = random_real(200, 73, default_spec());
  const int m = 3;
  const Complex z(0.0, 1.5);
  Eigen::MatrixXcd corner = resolvent_corner(X.matrix, z, m);
  // (z I_m - W^(m)/sqrt(N) - B^* R~ B)^{-1}
  const int k = X.n - m;
  Eigen::MatrixXcd Xt = X.matrix.bottomRightCorner(k, k).cast<Complex>();
  Eigen::MatrixXcd A = -Xt;
  A.diagonal().array() += z;
  Eigen::MatrixXcd B = X.matrix.block(m, 0, k, m).cast<Complex>();
  Eigen::MatrixXcd quad = B.adjoint() * A.partialPivLu().solve(B);
  Eigen::MatrixXcd T = -X.matrix.topLeftCorner(m, m).cast<Complex>();
  T.diagonal().array() += z;
  T -= quad;
  Eigen::MatrixXcd viaschur = T.inverse();
  CHECK((corner - viaschur).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("schur field of a decoupled first column") {
  EnsembleSpec spec = default_spec();
  Rng rng(79);
  RealSample X = sample_wigner_real(spec, 100, rng);
  X.matrix.row(0).setZero();
  X.matrix.col(0).setZero();
  const SpectralParams p(1.0);
  const Complex z(2.7, 0.0);
  Eigen::MatrixXcd Y = schur_field(X, z, 1, p);
  const Complex expected = -std::sqrt(100.0) * stieltjes_g(z, p);
  CHECK(std::abs(Y(0, 0) - expected) <= 1e-10);
}

TEST_CASE("schur field fast path matches the direct path") {
  RealSample X = random_real(150, 83, default_spec());
  const SpectralParams p(1.0);
  for (Complex z : {Complex(2.5, 0.0), Complex(3.0, 0.0)}) {
    Eigen::MatrixXcd direct = schur_field(X, z, 2, p, false);
    Eigen::MatrixXcd fast = schur_field(X, z, 2, p, true);
    CHECK((direct - fast).cwiseAbs().maxCoeff() <= 1e-8);
  }
  HermitianSample H = random_hermitian(150, 84);
  Eigen::MatrixXcd direct = schur_field(H, Complex(2.5, 0.0), 2, p, false);
  Eigen::MatrixXcd fast = schur_field(H, Complex(2.5, 0.0), 2, p, true);
  CHECK((direct - fast).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("resolvent corner fast path matches direct") {
  RealSample X = random_real(150, 89, default_spec());
  for (Complex z : {Complex(2.5, 0.0), Complex(-2.6, 0.0), Complex(0.0, 1.0)}) {
    Eigen::MatrixXcd direct = resolvent_corner(X.matrix, z, 3);
    Eigen::MatrixXcd fast = resolvent_corner_fast(X.matrix, z, 3);
    CHECK((direct - fast).cwiseAbs().maxCoeff() <= 1e-8);
  }
}
