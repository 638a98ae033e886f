#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "force/matlin.hpp"
#include "force/rng.hpp"
#include "oracles.hpp"

using namespace force;

TEST_CASE("eig_sym: identity and diagonal") {
  Matrix I3 = Matrix::Identity(3, 3);
  auto e = eig_sym(I3);
  for (int i = 0; i < 3; ++i) CHECK(e.values(i) == doctest::Approx(1.0));

  Matrix D2 = Matrix::Zero(2, 2);
  D2(0, 0) = 2;
  D2(1, 1) = -1;
  auto e2 = eig_sym(D2);
  CHECK(e2.values(0) == doctest::Approx(-1.0));
  CHECK(e2.values(1) == doctest::Approx(2.0));
}

TEST_CASE("eig_sym: matches characteristic-polynomial companion oracle at 6x6") {
  Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    Matrix M = oracle::random_symmetric(6, rng);
    auto e = eig_sym(M);
    Vector ref = oracle::charpoly_eigenvalues(M);
    for (int i = 0; i < 6; ++i) CHECK(e.values(i) == doctest::Approx(ref(i)).epsilon(1e-7));
  }
}

TEST_CASE("eig_sym: reconstruction and orthonormality bounds") {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const Index d = 2 + Index(rng.uniform_int(0, 48));
    Matrix M = oracle::random_symmetric(d, rng, 3.0);
    auto e = eig_sym(M);
    const Matrix R = e.vectors * e.values.asDiagonal() * e.vectors.transpose();
    CHECK((R - M).norm() <= 1e-10 * (1 + M.norm()));
    const Matrix QtQ = e.vectors.transpose() * e.vectors;
    CHECK((QtQ - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10);
    // ascending order
    for (Index i = 1; i < d; ++i) CHECK(e.values(i) >= e.values(i - 1));
  }
}

TEST_CASE("eig_sym: error paths") {
  Matrix M(2, 2);
  M << 1, std::numeric_limits<double>::quiet_NaN(), 0, 1;
  CHECK_THROWS_AS(eig_sym(M), std::invalid_argument);
  CHECK_THROWS_AS(eig_sym(Matrix::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("min_eigenvalue: examples and shift property") {
  Matrix ones = Matrix::Ones(3, 3);
  CHECK(min_eigenvalue(ones) == doctest::Approx(0.0).epsilon(1e-12));

  Matrix D = Matrix::Zero(3, 3);
  D.diagonal() << 5, -2, 1;
  CHECK(min_eigenvalue(D) == doctest::Approx(-2.0));

  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix M = oracle::random_symmetric(8, rng);
    const double t = rng.normal();
    Matrix Mt = M;
    Mt.diagonal().array() += t;
    CHECK(min_eigenvalue(Mt) == doctest::Approx(min_eigenvalue(M) + t).epsilon(1e-10));
    CHECK(min_eigenvalue(M) == doctest::Approx(eig_sym(M).values(0)).epsilon(1e-12));
  }
}

TEST_CASE("trace_inner: examples and naive oracle") {
  CHECK(trace_inner(Matrix::Identity(4, 4), Matrix::Identity(4, 4)) == doctest::Approx(4.0));
  CHECK(trace_inner(Matrix::Ones(3, 3), Matrix::Identity(3, 3)) == doctest::Approx(3.0));
  CHECK_THROWS_AS(trace_inner(Matrix::Ones(2, 2), Matrix::Ones(3, 3)), std::invalid_argument);

  Rng rng(11);
  Matrix A = oracle::random_symmetric(5, rng), B = oracle::random_symmetric(5, rng);
  double naive = 0;
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j) naive += A(i, j) * B(i, j);
  CHECK(trace_inner(A, B) == doctest::Approx(naive).epsilon(1e-14));
}

TEST_CASE("symmetrize: averages and rejects gross asymmetry") {
  Matrix M(2, 2);
  M << 1, 1 + 1e-10, 1 - 1e-10, 2;
  Matrix S = symmetrize(M);
  CHECK(S(0, 1) == S(1, 0));
  M(0, 1) = 2.0;
  CHECK_THROWS_AS(symmetrize(M), std::invalid_argument);
}

TEST_CASE("SpectralShift: eigenvalue structure {a, a+db}") {
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Index d = 2 + Index(rng.uniform_int(0, 18));
    SpectralShiftd S{d, 0.1 + rng.uniform(), 0.1 + rng.uniform()};
    auto e = eig_sym(S.dense());
    for (Index i = 0; i < d - 1; ++i) CHECK(e.values(i) == doctest::Approx(S.a).epsilon(1e-10));
    CHECK(e.values(d - 1) == doctest::Approx(S.a + double(d) * S.b).epsilon(1e-10));
  }
}

TEST_CASE("structured_forms: identity, the d=5 start, and the eig oracle") {
  SpectralShiftd id{4, 1.0, 0.0};
  auto forms_id = structured_forms(id);
  CHECK(forms_id.inverse.a == doctest::Approx(1.0));
  CHECK(forms_id.inverse.b == doctest::Approx(0.0));

  // a=1/4, b=3/20 at d=5: inverse spectral norm (d-1)/(K-1) = 4
  SpectralShiftd F52{5, 0.25, 0.15};
  auto e = eig_sym(F52.inverse().dense());
  CHECK(e.values(4) == doctest::Approx(4.0).epsilon(1e-12));

  SpectralShiftd S{4, 2.0, 1.0};
  auto forms = structured_forms(S);
  auto ed = eig_sym(S.dense());
  Matrix inv_ref = ed.vectors * ed.values.cwiseInverse().asDiagonal() * ed.vectors.transpose();
  CHECK((forms.inverse.dense() - inv_ref).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("structured_forms: products reconstruct to 1e-10") {
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    const Index d = 2 + Index(rng.uniform_int(0, 28));
    SpectralShiftd S{d, 0.05 + rng.uniform(), 0.05 + rng.uniform()};
    auto f = structured_forms(S);
    const Matrix M = S.dense();
    const Matrix I = Matrix::Identity(d, d);
    CHECK((M * f.inverse.dense() - I).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((f.sqrt.dense() * f.sqrt.dense() - M).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((f.inv_sqrt.dense() * f.inv_sqrt.dense() - f.inverse.dense()).cwiseAbs().maxCoeff() <=
          1e-10);
  }
}

TEST_CASE("structured_forms: rejects non-positive-definite shifts") {
  SpectralShiftd bad{3, -1.0, 0.5};
  CHECK_THROWS_AS(structured_forms(bad), std::invalid_argument);
  SpectralShiftd bad2{3, 1.0, -0.5};  // a + db = -0.5
  CHECK_THROWS_AS(structured_forms(bad2), std::invalid_argument);
}

TEST_CASE("SpectralShift: apply and conjugate agree with dense products") {
  Rng rng(9);
  SpectralShiftd S{6, 0.7, 0.3};
  Matrix X = oracle::random_symmetric(6, rng);
  CHECK((S.apply(X) - S.dense() * X).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK((S.conjugate(X) - S.dense() * X * S.dense()).cwiseAbs().maxCoeff() <= 1e-11);
}
