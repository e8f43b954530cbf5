#include <doctest.h>

#include <random>

#include "qik/hypertoric.hpp"
#include "support.hpp"

using namespace qik;

namespace {

DiagonalQuiver randomDiagonal(int n, std::mt19937_64& rng) {
  DiagonalQuiver dq = DiagonalQuiver::zero(n);
  std::normal_distribution<double> N;
  for (int k = 1; k < n; ++k)
    for (int i = 0; i < k; ++i) {
      dq.nu[k - 1][i] = cplx(N(rng), N(rng));
      dq.mu[k - 1][i] = cplx(N(rng), N(rng));
    }
  return dq;
}

}  // namespace

TEST_CASE("diagonal shapes") {
  CHECK(buildDiagonal(DiagonalQuiver::zero(4)).alpha(3).norm() == 0.0);
  DiagonalQuiver dq = DiagonalQuiver::zero(2);
  dq.nu[0][0] = 1.0;
  dq.mu[0][0] = 2.0;
  Quiver q = buildDiagonal(dq);
  Mat a(2, 1), b(1, 2);
  a << 1.0, 0.0;
  b << 2.0, 0.0;
  CHECK((q.alpha(1) - a).norm() == 0.0);
  CHECK((q.beta(1) - b).norm() == 0.0);

  auto t = torusMomentResidual(dq);
  CHECK(std::abs(t.levels.lambdaC[0] - cplx(-2.0)) < 1e-15);
  CHECK(t.levels.lambdaR[0] == doctest::Approx(3.0));
  auto qm = momentValue(q);
  CHECK(std::abs(qm.lambdaC[0] - t.levels.lambdaC[0]) < 1e-15);
  CHECK(std::abs(qm.lambdaR[0] - t.levels.lambdaR[0]) < 1e-15);
}

TEST_CASE("compositions of diagonal quivers are diagonal") {
  std::mt19937_64 rng(1);
  Quiver q = buildDiagonal(randomDiagonal(5, rng));
  for (int k = 1; k < 5; ++k) {
    for (Mat P : {Mat(q.alpha(k) * q.beta(k)), Mat(q.beta(k) * q.alpha(k)), Mat(q.alpha(k) * q.alpha(k).adjoint()),
                  Mat(q.beta(k).adjoint() * q.beta(k))}) {
      Mat off = P;
      off.diagonal().setZero();
      CHECK(off.norm() == 0.0);
    }
  }
}

TEST_CASE("scalar and quiver residuals agree") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    DiagonalQuiver dq = randomDiagonal(2 + trial % 4, rng);
    Quiver q = buildDiagonal(dq);
    auto t = torusMomentResidual(dq);
    auto c = complexMomentResidual(q);
    auto r = realMomentResidual(q);
    CHECK(std::abs(t.residualC - c.residual) <= 1e-12);
    CHECK(std::abs(t.residualR - r.residual) <= 1e-12);
    for (size_t k = 0; k < c.lambdaC.size(); ++k) {
      CHECK(std::abs(t.levels.lambdaC[k] - c.lambdaC[k]) <= 1e-12);
      CHECK(std::abs(t.levels.lambdaR[k] - r.lambdaR[k]) <= 1e-12);
    }
    DiagonalQuiver back = extractDiagonal(q);
    CHECK(back.nu == dq.nu);
  }
}

TEST_CASE("diagonal solutions at prescribed levels") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> N;
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 4;
    MomentValue m;
    for (int k = 1; k < n; ++k) {
      m.lambdaC.push_back(cplx(N(rng), N(rng)));
      m.lambdaR.push_back(N(rng));
    }
    DiagonalQuiver dq = solveDiagonal(m, &rng);
    Quiver q = buildDiagonal(dq);
    CHECK(complexMomentResidual(q).residual <= 1e-12);
    CHECK(realMomentResidual(q).residual <= 1e-12);
    auto got = momentValue(q);
    for (int k = 0; k < n - 1; ++k) {
      CHECK(std::abs(got.lambdaC[k] - m.lambdaC[k]) <= 1e-12);
      CHECK(std::abs(got.lambdaR[k] - m.lambdaR[k]) <= 1e-12);
    }
  }
}

TEST_CASE("hks predicate for diagonal quivers") {
  std::mt19937_64 rng(4);
  DiagonalQuiver ones = DiagonalQuiver::zero(4);
  for (auto& row : ones.nu)
    for (auto& v : row) v = 1.0;
  CHECK(isDiagHKS(ones));
  CHECK(isHKStable(buildDiagonal(ones), 1e-9, 32, 0) == Stability::stable);
  DiagonalQuiver r = randomDiagonal(4, rng);
  CHECK(isDiagHKS(r));
  CHECK(isHKStable(buildDiagonal(r), 1e-9, 32, 0) == Stability::stable);
  r.nu[1][0] = 0;
  r.mu[1][0] = 0;
  CHECK_FALSE(isDiagHKS(r));
  CHECK(isHKStable(buildDiagonal(r), 1e-9, 32, 0) == Stability::unstable);

  DiagonalQuiver three = randomDiagonal(3, rng);
  three.nu[0][0] = three.mu[0][0] = 0;
  CHECK(isHKStable(buildDiagonal(three), 1e-9, 32, 0) == Stability::unstable);
}

TEST_CASE("torus action matches conjugation") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N;
  DiagonalQuiver dq = randomDiagonal(4, rng);
  std::vector<std::vector<cplx>> t;
  GroupElement g;
  for (int k = 1; k <= 4; ++k) {
    t.emplace_back();
    Mat d = Mat::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      t.back().push_back(std::polar(1.0 + 0.5 * std::abs(N(rng)), N(rng)));
      d(i, i) = t.back().back();
    }
    g.factors.push_back(d);
  }
  Quiver a = applyGroup(buildDiagonal(dq), g);
  Quiver b = buildDiagonal(torusAct(dq, t));
  for (int k = 1; k < 4; ++k) {
    CHECK((a.alpha(k) - b.alpha(k)).norm() <= 1e-15);
    CHECK((a.beta(k) - b.beta(k)).norm() <= 1e-15);
  }
}

TEST_CASE("root arrangement") {
  using V = Eigen::Vector3d;
  auto one = rootArrangementStratum(ArrangementPoint::fromTau({V::Zero(), V::Zero(), V::Zero()}), 1e-9);
  CHECK(one == EquivRelation::whole(3));
  auto sing = rootArrangementStratum(ArrangementPoint::fromTau({V(1, 0, 0), V(0, 2, 0), V(0, 0, 3)}), 1e-9);
  CHECK(sing == EquivRelation::singletons(3));

  ArrangementPoint p = ArrangementPoint::fromTau({V(1, 0, 0), V(1, 0, 0), V(-2, 0, 0)});
  EquivRelation e = rootArrangementStratum(p, 1e-9);
  CHECK(e.classes == std::vector<std::vector<int>>{{1, 2}, {3}});
  CHECK((p.s[0] - (p.tau[1] + p.tau[2])).norm() < 1e-15);
  CHECK((p.s[1] - p.tau[2]).norm() < 1e-15);
  // the level view of the same point: lambda_1 = 0, lambda_2 != 0
  MomentValue m = p.levels();
  CHECK(std::abs(m.lambdaC[0]) < 1e-15);
  CHECK(std::abs(m.lambdaC[1]) > 1.0);
  ArrangementPoint back = ArrangementPoint::fromMoment(m);
  for (int j = 0; j < 3; ++j) CHECK((back.tau[j] - p.tau[j]).norm() < 1e-14);
}

TEST_CASE("stabiliser subtori") {
  CHECK(stabilizerSubtorus(4, {}).dimension() == 0);
  auto t = stabilizerSubtorus(4, {{1, 3}});
  CHECK(t.generators == std::vector<std::vector<int>>{{1, 1, 0}});
  auto full = stabilizerSubtorus(3, {{1, 2}, {2, 3}});
  CHECK(full.dimension() == 2);
  CHECK(stabilizerSubtorus(4, {{1, 3}, {1, 2}, {2, 3}}).dimension() == 2);
  CHECK_THROWS_AS(stabilizerSubtorus(3, {{2, 2}}), InputError);
}
