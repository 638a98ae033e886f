#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "force/certificate.hpp"
#include "force/problem.hpp"
#include "force/rng.hpp"
#include "oracles.hpp"

using namespace force;

TEST_CASE("partnership_matrix: explicit values and singletons") {
  Partition G({{0, 1}, {2}}, 3);
  Matrix B = partnership_matrix(G);
  Matrix expected(3, 3);
  expected << 0.5, 0.5, 0, 0.5, 0.5, 0, 0, 0, 1;
  CHECK((B - expected).cwiseAbs().maxCoeff() == 0.0);

  CHECK((partnership_matrix(Partition::singletons(4)) - Matrix::Identity(4, 4))
            .cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("partnership_matrix: trace K, row sums 1, idempotent, feasible") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const Index d = 4 + Index(rng.uniform_int(0, 8));
    const Index K = 2 + Index(rng.uniform_int(0, std::min<Index>(d - 3, 3)));
    std::vector<Index> labels(static_cast<size_t>(d));
    for (Index i = 0; i < d; ++i) labels[size_t(i)] = i < K ? i : Index(rng.uniform_int(0, K - 1));
    Partition G = Partition::from_labels(labels);
    if (G.num_groups() != K) continue;
    Matrix B = partnership_matrix(G);
    CHECK(B.trace() == doctest::Approx(double(K)).epsilon(1e-14));
    CHECK((B.rowwise().sum().array() - 1).abs().maxCoeff() <= 1e-14);
    CHECK((B * B - B).cwiseAbs().maxCoeff() <= 1e-13);

    SdpInstance inst = SdpInstance::fixed(-B, K);
    CHECK(check_feasibility(inst, B).feasible);
  }
}

TEST_CASE("Partition: invariants enforced") {
  CHECK_THROWS_AS(Partition({{0, 1}, {1, 2}}, 3), std::invalid_argument);  // overlap
  CHECK_THROWS_AS(Partition({{0, 1}}, 3), std::invalid_argument);          // not a cover
  CHECK_THROWS_AS(Partition({{0}, {}}, 1), std::invalid_argument);         // empty group
}

TEST_CASE("feasible_start_fixed: the Lemma values") {
  auto F52 = feasible_start_fixed(5, 2);
  CHECK(F52.a == doctest::Approx(0.25));
  CHECK(F52.b == doctest::Approx(0.15));

  auto F32 = feasible_start_fixed(3, 2);
  CHECK(F32.a == doctest::Approx(0.5));
  CHECK(F32.b == doctest::Approx(1.0 / 6));
  CHECK(F32.dense().trace() == doctest::Approx(2.0));

  auto F104 = feasible_start_fixed(10, 4);
  CHECK(F104.inverse_norm() == doctest::Approx(3.0));

  CHECK_THROWS_AS(feasible_start_fixed(5, 1), std::invalid_argument);
  CHECK_THROWS_AS(feasible_start_fixed(5, 5), std::invalid_argument);
}

TEST_CASE("feasible_start_fixed: full constraint set over a d, K sweep") {
  for (Index d = 3; d <= 60; d += 7)
    for (Index K = 2; K < d; K += 3) {
      auto F = feasible_start_fixed(d, K);
      Matrix Fd = F.dense();
      CHECK(Fd.minCoeff() > 0);
      CHECK((Fd.rowwise().sum().array() - 1).abs().maxCoeff() <= 1e-12);
      CHECK(Fd.trace() == doctest::Approx(double(K)).epsilon(1e-12));
      CHECK(F.inverse_norm() == doctest::Approx(double(d - 1) / double(K - 1)).epsilon(1e-12));
    }
}

TEST_CASE("feasible_start_adaptive: eigenvalues and inverse") {
  auto F2 = feasible_start_adaptive(2);
  CHECK(F2.a == doctest::Approx(0.5));
  CHECK(F2.b == doctest::Approx(0.25));
  auto e = eig_sym(F2.dense());
  CHECK(e.values(0) == doctest::Approx(0.5));
  CHECK(e.values(1) == doctest::Approx(1.0));

  auto F4 = feasible_start_adaptive(4);
  Matrix expected = 2 * Matrix::Identity(4, 4) - Matrix::Ones(4, 4) / 4;
  CHECK((F4.inverse().dense() - expected).cwiseAbs().maxCoeff() <= 1e-12);

  for (Index d : {1, 3, 17, 60}) {
    auto F = feasible_start_adaptive(d);
    CHECK((F.dense() * F.inverse().dense() - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() <=
          1e-12);
    CHECK((F.dense().rowwise().sum().array() - 1).abs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("distance_matrix_points: examples and pairwise loop") {
  Matrix X(2, 1);
  X << 0, 3;
  Matrix D = distance_matrix_points(X);
  CHECK(D(0, 1) == doctest::Approx(9.0));
  CHECK(D(0, 0) == 0.0);

  Matrix same = Matrix::Ones(3, 2);
  CHECK(distance_matrix_points(same).cwiseAbs().maxCoeff() <= 1e-12);

  Rng rng(31);
  Matrix P(5, 2);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 2; ++j) P(i, j) = rng.normal();
  Matrix Dp = distance_matrix_points(P);
  for (Index i = 0; i < 5; ++i)
    for (Index j = 0; j < 5; ++j)
      CHECK(Dp(i, j) == doctest::Approx((P.row(i) - P.row(j)).squaredNorm()).epsilon(1e-10));
}

TEST_CASE("difference_matrix_variables: examples") {
  Matrix Sigma = Matrix::Identity(3, 3);
  CHECK((difference_matrix_variables(Sigma, Vector::Zero(3)) + Matrix::Identity(3, 3))
            .cwiseAbs().maxCoeff() == 0.0);

  Rng rng(13);
  Matrix S = oracle::random_symmetric(4, rng);
  Matrix D = difference_matrix_variables(S, S.diagonal());
  CHECK(D.diagonal().cwiseAbs().maxCoeff() <= 1e-14);
  CHECK_THROWS_AS(difference_matrix_variables(S, Vector::Zero(5)), std::invalid_argument);
}

TEST_CASE("primal and dual objectives") {
  Partition G({{0, 1}, {2, 3}, {4}}, 5);
  Matrix B = partnership_matrix(G);
  SdpInstance inst = SdpInstance::fixed(-B, 3);
  CHECK(primal_objective(inst, B) == doctest::Approx(3.0));  // <B,B> = tr B = K
  CHECK(primal_objective(inst, Matrix::Zero(5, 5)) == 0.0);

  DualCertificate cert;
  cert.y = Vector::Zero(5);
  cert.y_T = 1.0;
  CHECK(dual_objective(inst, cert) == doctest::Approx(3.0));

  SdpInstance inst4 = SdpInstance::fixed(Matrix::Identity(4, 4) * -1.0, 2);
  DualCertificate cert4;
  cert4.y = Vector::Ones(4);
  cert4.y_T = 0.0;
  CHECK(dual_objective(inst4, cert4) == doctest::Approx(8.0));

  // adaptive: <-D - kappa I, U>
  SdpInstance ad = SdpInstance::adaptive(-B, 0.5);
  CHECK(primal_objective(ad, B) == doctest::Approx(3.0 - 0.5 * 3.0));
  DualCertificate certa;
  certa.y = Vector::Ones(5);
  certa.kind = SdpKind::Adaptive;
  CHECK(dual_objective(ad, certa) == doctest::Approx(10.0));
}

TEST_CASE("check_feasibility: reports residuals") {
  const Index d = 6;
  Partition G({{0, 1, 2}, {3, 4, 5}}, d);
  Matrix B = partnership_matrix(G);
  SdpInstance inst = SdpInstance::fixed(-B, 2);

  auto rb = check_feasibility(inst, B);
  CHECK(rb.feasible);
  CHECK(rb.min_entry >= 0);

  auto rf = check_feasibility(inst, feasible_start_fixed(d, 2).dense());
  CHECK(rf.feasible);
  CHECK(rf.lambda_min > 0);

  auto ri = check_feasibility(inst, Matrix::Identity(d, d));
  CHECK(!ri.feasible);
  CHECK(ri.trace_err == doctest::Approx(double(d - 2)));
}

TEST_CASE("planted optimum dominates any same-K partition on noiseless instances") {
  Rng rng(17);
  for (Index d = 5; d <= 8; ++d) {
    std::vector<Index> labels(static_cast<size_t>(d));
    for (Index i = 0; i < d; ++i) labels[size_t(i)] = i % 3;
    Partition Gstar = Partition::from_labels(labels);
    Matrix D = -partnership_matrix(Gstar);
    SdpInstance inst = SdpInstance::fixed(D, 3);
    const double vstar = primal_objective(inst, partnership_matrix(Gstar));
    oracle::enumerate_partitions(d, 3, [&](const Partition& G) {
      CHECK(primal_objective(inst, partnership_matrix(G)) <= vstar + 1e-12);
    });
  }
}

TEST_CASE("SdpInstance: construction guards") {
  CHECK_THROWS_AS(SdpInstance::fixed(Matrix::Zero(4, 4), 1), std::invalid_argument);
  CHECK_THROWS_AS(SdpInstance::fixed(Matrix::Zero(4, 4), 4), std::invalid_argument);
  CHECK_NOTHROW(SdpInstance::adaptive(Matrix::Zero(4, 4), 0.0));
}
