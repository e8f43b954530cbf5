#include <doctest.h>

#include <random>

#include "qik/matkernel.hpp"
#include "qik/quiver.hpp"

using namespace qik;

namespace {

Mat jordanBlock(int m, cplx t) {
  Mat J = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) J(i, i) = t;
  for (int i = 0; i + 1 < m; ++i) J(i, i + 1) = 1.0;
  return J;
}

// Nullity by Gaussian elimination with partial pivoting, independent of SVD.
int bruteNullity(Mat A, double thresh) {
  const int r = int(A.rows()), c = int(A.cols());
  int rank = 0;
  for (int col = 0; col < c && rank < r; ++col) {
    int piv = rank;
    for (int i = rank; i < r; ++i)
      if (std::abs(A(i, col)) > std::abs(A(piv, col))) piv = i;
    if (std::abs(A(piv, col)) <= thresh) continue;
    A.row(rank).swap(A.row(piv));
    for (int i = rank + 1; i < r; ++i) A.row(i) -= (A(i, col) / A(rank, col)) * A.row(rank);
    ++rank;
  }
  return c - rank;
}

}  // namespace

TEST_CASE("clusters of the identity and a nilpotent block") {
  auto c = schurEigenCluster(Mat::Identity(3, 3), 1e-9);
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c[0].value - 1.0) < 1e-12);
  CHECK(c[0].multiplicity == 3);

  auto z = schurEigenCluster(jordanBlock(3, 0.0), 1e-9);
  REQUIRE(z.size() == 1);
  CHECK(z[0].multiplicity == 3);
  CHECK(std::abs(z[0].value) < 1e-9);
}

TEST_CASE("nearby eigenvalues merge") {
  Mat A = Mat::Zero(3, 3);
  A.diagonal() << 1.0, 1.0 + 1e-12, 2.0;
  auto c = schurEigenCluster(A, 1e-9);
  REQUIRE(c.size() == 2);
  // characteristic polynomial roots read straight off the diagonal
  CHECK(std::abs(c[0].value - 1.0) < 1e-11);
  CHECK(c[0].multiplicity == 2);
  CHECK(std::abs(c[1].value - 2.0) < 1e-12);
  CHECK(c[1].multiplicity == 1);
  for (auto& cl : c) {
    Mat B = cl.basis;
    CHECK((A * B - B * (B.adjoint() * A * B)).norm() <= 1e-8);
  }
}

TEST_CASE("jordan types") {
  auto z = jordanType(Mat::Zero(3, 3), 1e-9);
  REQUIRE(z.size() == 1);
  CHECK(z[0].partition == std::vector<int>{1, 1, 1});

  auto j = jordanType(jordanBlock(3, 0.0), 1e-9);
  REQUIRE(j.size() == 1);
  CHECK(j[0].partition == std::vector<int>{3});

  Mat A = blockDiagonal({jordanBlock(2, 0.0), jordanBlock(1, 0.0), jordanBlock(2, 5.0)});
  // brute-force nullities of powers
  Mat P = Mat::Identity(5, 5);
  std::vector<int> nul0;
  for (int k = 1; k <= 3; ++k) {
    P = P * A;
    nul0.push_back(bruteNullity(P, 1e-9));
  }
  CHECK(nul0 == std::vector<int>{2, 3, 3});
  auto t = jordanType(A, 1e-9);
  REQUIRE(t.size() == 2);
  CHECK(std::abs(t[0].eigenvalue) < 1e-9);
  CHECK(t[0].partition == std::vector<int>{2, 1});
  CHECK(std::abs(t[1].eigenvalue - 5.0) < 1e-9);
  CHECK(t[1].partition == std::vector<int>{2});
}

TEST_CASE("jordan type is a similarity invariant") {
  std::mt19937_64 rng(7);
  Mat A = blockDiagonal({jordanBlock(3, 1.0), jordanBlock(1, 1.0), jordanBlock(2, -2.0)});
  for (int trial = 0; trial < 10; ++trial) {
    Mat g = Mat::Identity(6, 6) + 0.2 * randomMatrix(6, 6, rng);
    Eigen::JacobiSVD<Mat> svd(g);
    if (svd.singularValues()(0) / svd.singularValues()(5) > 10) continue;
    auto t = jordanType(g * A * g.inverse(), 1e-6);
    REQUIRE(t.size() == 2);
    std::vector<int> p1 = std::abs(t[0].eigenvalue + 2.0) < 1e-3 ? t[0].partition : t[1].partition;
    std::vector<int> p2 = std::abs(t[0].eigenvalue + 2.0) < 1e-3 ? t[1].partition : t[0].partition;
    CHECK(p1 == std::vector<int>{2});
    CHECK(p2 == std::vector<int>{3, 1});
  }
}

TEST_CASE("generalised eigenprojectors") {
  Mat D = Mat::Zero(2, 2);
  D.diagonal() << 1.0, 2.0;
  auto P = generalizedEigenprojectors(D, 1e-9);
  REQUIRE(P.size() == 2);
  Mat e1 = Mat::Zero(2, 2), e2 = Mat::Zero(2, 2);
  e1(0, 0) = 1;
  e2(1, 1) = 1;
  CHECK((P[0] - e1).norm() < 1e-12);
  CHECK((P[1] - e2).norm() < 1e-12);

  auto I = generalizedEigenprojectors(Mat::Identity(4, 4), 1e-9);
  REQUIRE(I.size() == 1);
  CHECK((I[0] - Mat::Identity(4, 4)).norm() < 1e-12);

  Mat A(2, 2);
  A << 0.0, 1.0, 0.0, 3.0;
  auto Q = generalizedEigenprojectors(A, 1e-9);
  REQUIRE(Q.size() == 2);
  CHECK((Q[0] + Q[1] - Mat::Identity(2, 2)).norm() <= 1e-8);
  for (auto& p : Q) {
    CHECK((A * p - p * A).norm() <= 1e-8);
    CHECK((p * p - p).norm() <= 1e-8);
  }
  CHECK((Q[0] * Q[1]).norm() <= 1e-8);
}

TEST_CASE("projector completeness on random matrices") {
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 6; ++n) {
    Mat A = randomMatrix(n, n, rng);
    auto P = generalizedEigenprojectors(A, 1e-9);
    Mat S = Mat::Zero(n, n);
    for (auto& p : P) S += p;
    CHECK((S - Mat::Identity(n, n)).norm() <= 1e-8);
  }
}

TEST_CASE("non-square input is rejected") {
  CHECK_THROWS_AS(schurEigenCluster(Mat::Zero(2, 3), 1e-9), InputError);
}

TEST_CASE("jordan bases") {
  std::mt19937_64 rng(31);
  std::vector<std::vector<JordanBlock>> cases = {
      {{0.0, 3}},
      {{1.0, 2}, {1.0, 1}, {cplx(0, 2), 2}},
      {{0.5, 2}, {0.5, 2}, {-1.0, 1}},
      {{0.0, 1}, {0.0, 1}, {2.0, 3}},
  };
  for (auto& blocks : cases) {
    Mat J = jordanMatrix(blocks);
    const int n = int(J.rows());
    Mat S = randomMatrix(n, n, rng) + 2.0 * Mat::Identity(n, n);
    Mat A = S * J * S.inverse();
    JordanBasis jb = jordanBasis(A, 1e-9);
    REQUIRE(jb.P.cols() == n);
    Mat got = jb.P.inverse() * A * jb.P;
    CHECK((got - jordanMatrix(jb.blocks)).norm() <= 1e-6);
    int total = 0;
    for (auto& b : jb.blocks) total += b.size;
    CHECK(total == n);
    for (size_t i = 1; i < jb.blocks.size(); ++i)
      if (std::abs(jb.blocks[i].eigenvalue - jb.blocks[i - 1].eigenvalue) < 1e-6)
        CHECK(jb.blocks[i].size <= jb.blocks[i - 1].size);
  }
}
