#include <doctest.h>

#include <random>

#include "qik/forms.hpp"
#include "qik/hypertoric.hpp"
#include "fixtures.hpp"
#include "support.hpp"

using namespace qik;
using namespace qik::testing;

namespace {

double quiverDistance(const Quiver& a, const Quiver& b) {
  double d = 0;
  for (int k = 1; k < a.levels(); ++k) {
    d = std::max(d, (a.alpha(k) - b.alpha(k)).norm());
    d = std::max(d, (a.beta(k) - b.beta(k)).norm());
  }
  return d;
}

}  // namespace

TEST_CASE("beta standardisation") {
  std::mt19937_64 rng(41);
  std::vector<cplx> lam = randomLambda(4, rng);
  Quiver already = alphaFromX(parabolicX0(fullFlag(4), lam, rng), fullFlag(4), lam);
  StandardizedQuiver s0 = standardizeBeta(already);
  for (auto& f : s0.witness.factors) CHECK(f == Mat::Identity(f.rows(), f.cols()));

  Quiver two = fullFlagZero(2);
  two.beta(1) << 2.0, 0.0;
  two.alpha(1) << 1.0, 1.0;
  StandardizedQuiver s2 = standardizeBeta(two);
  Mat want(1, 2);
  want << 0.0, 1.0;
  CHECK(s2.quiver.beta(1) == want);
  CHECK(std::abs(s2.witness.factors.back().determinant() - cplx(1)) <= 1e-14);
  CHECK(quiverDistance(applyGroup(two, s2.witness), s2.quiver) <= 1e-12);
  CHECK(std::abs(complexMomentResidual(s2.quiver).lambdaC[0] - cplx(-2.0)) <= 1e-14);

  for (int trial = 0; trial < 10; ++trial) {
    MomentValue m{randomLambda(3, rng), {0.3, -0.2}};
    Quiver q = applyGroup(buildDiagonal(solveDiagonal(m, &rng)), randomGL(fullFlagZero(3), rng, true));
    StandardizedQuiver s = standardizeBeta(q);
    CHECK(quiverDistance(applyGroup(q, s.witness), s.quiver) <= 1e-9);
    auto before = complexMomentResidual(q), after = complexMomentResidual(s.quiver);
    CHECK(after.residual <= 1e-9);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(after.lambdaC[k] - before.lambdaC[k]) <= 1e-10);
    Mat X = bigX(s.quiver).X;
    const auto& l = m.lambdaC;
    CHECK(std::abs(X(0, 0)) <= 1e-8);
    CHECK(std::abs(X(1, 1) + l[1]) <= 1e-8);
    CHECK(std::abs(X(2, 2) + l[1] + l[0]) <= 1e-8);
  }

  Quiver flat = fullFlagZero(3);
  CHECK_THROWS_AS(standardizeBeta(flat), PreconditionError);
}

TEST_CASE("alpha from X") {
  Quiver zero = alphaFromX(Mat::Zero(3, 3), fullFlag(3), {0.0, 0.0}, false);
  for (int k = 1; k < 3; ++k) CHECK(zero.alpha(k).norm() == 0.0);
  CHECK(complexMomentResidual(zero).residual == 0.0);
  CHECK_THROWS_AS(alphaFromX(Mat::Zero(3, 3), fullFlag(3), {0.0, 0.0}), PreconditionError);

  // the vanishing column of X comes first in the standard basis
  Mat X0 = Mat::Zero(2, 2);
  X0(0, 0) = -1.0;
  X0(1, 1) = 1.0;
  Quiver two = alphaFromX(X0, fullFlag(2), {-2.0});
  CHECK(std::abs(two.alpha(1)(0, 0)) == 0.0);
  CHECK(std::abs(two.alpha(1)(1, 0) - cplx(2.0)) <= 1e-15);
  CHECK((bigX(two).X - Mat(Mat(X0).array() + 1.0).cwiseProduct(Mat::Identity(2, 2))).norm() <= 1e-15);
  CHECK(complexMomentResidual(two).residual <= 1e-15);
  Mat swapped = -X0;
  CHECK_THROWS_AS(alphaFromX(swapped, fullFlag(2), {-2.0}), PreconditionError);
  CHECK_NOTHROW(alphaFromX(swapped, fullFlag(2), {2.0}));

  std::mt19937_64 rng(42);
  std::vector<std::vector<int>> flags = {fullFlag(4), {0, 1, 1, 3, 4}, {0, 0, 2, 2, 4}, fullFlag(5)};
  for (auto& m : flags) {
    const int n = m.back();
    for (int trial = 0; trial < 5; ++trial) {
      auto lam = randomLambda(n, rng);
      Mat Y = parabolicX0(m, lam, rng);
      Quiver q = alphaFromX(Y, m, lam);
      auto c = complexMomentResidual(q);
      CHECK(c.residual <= 1e-10);
      for (int k = 0; k < n - 1; ++k)
        if (m[k + 1] > 0) CHECK(std::abs(c.lambdaC[k] - lam[k]) <= 1e-10);
      CHECK((bigX(q).X0 - Y).norm() <= 1e-9);

      // standardise a moved copy and rebuild it from its X
      Quiver moved = applyGroup(q, randomGL(q, rng, true));
      StandardizedQuiver s = standardizeBeta(moved);
      Quiver back = alphaFromX(bigX(s.quiver).X0, m, lam);
      CHECK(quiverDistance(back, s.quiver) <= 1e-8 * (1 + bigX(s.quiver).X.norm()));
    }
  }
}

TEST_CASE("Jordan forms of diagonal quivers") {
  std::mt19937_64 rng(43);
  MomentValue m{randomLambda(4, rng), {0.1, 0.2, -0.4}};
  Quiver q = applyGroup(buildDiagonal(solveDiagonal(m, &rng)), randomGL(fullFlagZero(4), rng, true));
  StandardizedQuiver s = toJCF(q);
  REQUIRE(s.blocks.size() == 4);
  auto nu = m.nu();
  nu.push_back(0.0);
  for (int j = 0; j < 4; ++j) {
    CHECK(s.blocks[j].size == 1);
    CHECK(std::abs(s.blocks[j].eigenvalue + nu[j]) <= 1e-14);
  }
  Mat X = bigX(s.quiver).X;
  Mat off = X;
  off.diagonal().setZero();
  CHECK(off.norm() == 0.0);
  CHECK(quiverDistance(applyGroup(q, s.witness), s.quiver) <= 1e-8);
}

TEST_CASE("regular nilpotent Jordan form") {
  std::mt19937_64 rng(44);
  Quiver q = hksFromFlag(fullFlag(3), {0.0, 0.0}, rng);
  StandardizedQuiver s = toJCF(q);
  REQUIRE(s.blocks.size() == 1);
  CHECK(s.blocks[0].size == 3);
  Mat b2(2, 3), b1(1, 2);
  b2 << 0, 1, 0, 0, 0, 1;
  b1 << 0, 1;
  CHECK((s.quiver.beta(2) - b2).norm() <= 1e-9);
  CHECK((s.quiver.beta(1) - b1).norm() <= 1e-9);
  CHECK((bigX(s.quiver).X - jordanMatrix(s.blocks)).norm() <= 1e-8);
}

TEST_CASE("Jordan form is idempotent and witnessed") {
  std::mt19937_64 rng(45);
  std::vector<std::pair<std::vector<int>, std::vector<cplx>>> cases = {
      {fullFlag(3), {1.0, 0.0}},
      {fullFlag(4), {0.0, cplx(0.5, 1), 0.0}},
      {fullFlag(4), {0.0, 0.0, 0.0}},
      {{0, 1, 1, 3, 4}, {0.7, -0.3, 0.5}},
      {fullFlag(5), {0.4, 0.0, -0.4, 0.2}},
  };
  for (auto& [m, lam] : cases) {
    for (auto shape : {JcfShape::betaShift, JcfShape::alphaSelect}) {
      Quiver q = hksFromFlag(m, lam, rng);
      StandardizedQuiver s = toJCF(q, 1e-7, shape);
      const double xs = 1 + bigX(q).X.norm();
      CHECK(quiverDistance(applyGroup(q, s.witness), s.quiver) <= 1e-8 * xs);
      CHECK(std::abs(s.witness.factors.back().determinant() - cplx(1)) <= 1e-9);
      CHECK((bigX(s.quiver).X - jordanMatrix(s.blocks)).norm() <= 1e-8 * xs);
      CHECK(complexMomentResidual(s.quiver).residual <= 1e-8 * xs);
      // classes ordered by minimal index, sizes decreasing within a class
      for (size_t i = 1; i < s.blocks.size(); ++i)
        if (s.blocks[i].eigenvalue == s.blocks[i - 1].eigenvalue)
          CHECK(s.blocks[i].size <= s.blocks[i - 1].size);
      StandardizedQuiver again = toJCF(s.quiver, 1e-7, shape);
      CHECK(quiverDistance(again.quiver, s.quiver) <= 1e-8 * xs);
      CHECK(again.blocks.size() == s.blocks.size());
    }
  }
}

TEST_CASE("psi keeps diagonals and inverts") {
  StandardizedQuiver two;
  two.form = StandardForm::jcf;
  two.shape = JcfShape::alphaSelect;
  two.quiver = fullFlagZero(2);
  two.quiver.alpha(1) << 1.0, 0.0;
  two.quiver.beta(1) << 2.0, 3.0;
  Quiver t = toDiagonal(two);
  CHECK(t.alpha(1)(0, 0) == cplx(1.0));
  CHECK(t.beta(1)(0, 0) == cplx(2.0));
  CHECK(t.beta(1)(0, 1) == cplx(0.0));
  Mat ab = t.alpha(1) * t.beta(1);
  CHECK(ab(0, 0) == cplx(2.0));
  CHECK(ab(1, 1) == cplx(0.0));

  StandardizedQuiver wrong = two;
  wrong.shape = JcfShape::betaShift;
  CHECK_THROWS_AS(toDiagonal(wrong), InputError);

  std::mt19937_64 rng(46);
  std::vector<std::pair<std::vector<int>, std::vector<cplx>>> cases = {
      {fullFlag(3), {0.0, 0.0}},
      {fullFlag(4), {1.0, 0.0, 0.0}},
      {fullFlag(4), {cplx(0, 1), 1.0, -0.5}},
      {{0, 1, 1, 3, 4}, {0.7, -0.3, 0.5}},
  };
  for (auto& [m, lam] : cases) {
    Quiver q = hksFromFlag(m, lam, rng);
    for (bool uni : {false, true}) {
      StandardizedQuiver s = toJCF(q, 1e-7, JcfShape::alphaSelect, uni);
      Quiver qt = toDiagonal(s);
      CHECK(complexMomentResidual(qt).residual <= 1e-9);
      for (int k = 1; k < q.levels(); ++k) {
        Mat a = s.quiver.alpha(k) * s.quiver.beta(k), at = qt.alpha(k) * qt.beta(k);
        Mat b = s.quiver.beta(k) * s.quiver.alpha(k), bt = qt.beta(k) * qt.alpha(k);
        CHECK(a.diagonal() == at.diagonal());
        CHECK(b.diagonal() == bt.diagonal());
      }
      Quiver back = fromDiagonal(qt, s.blocks, lam);
      CHECK(quiverDistance(back, s.quiver) <= 1e-8);
    }
  }
}

TEST_CASE("torus orbits of Jordan forms with equal moment data") {
  std::mt19937_64 rng(47);
  std::vector<cplx> lam{0.5, 0.0, 0.0};
  for (int trial = 0; trial < 5; ++trial) {
    Quiver a = hksFromFlag(fullFlag(4), lam, rng);
    Mat X = bigX(a).X;
    std::normal_distribution<double> N;
    Mat c = expm(Mat(cplx(N(rng), N(rng)) * 0.3 * X + cplx(N(rng), N(rng)) * 0.1 * X * X));
    c /= std::pow(c.determinant(), 0.25);
    GroupElement g = randomGL(a, rng, false);
    g.factors.push_back(c);
    Quiver b = applyGroup(a, g);
    CHECK((bigX(b).X - X).norm() <= 1e-9 * (1 + X.norm()));
    StandardizedQuiver sa = toJCF(a, 1e-7, JcfShape::alphaSelect, true);
    StandardizedQuiver sb = toJCF(b, 1e-7, JcfShape::alphaSelect, true);
    TorusMatch t = torusBetween(sa.quiver, sb.quiver);
    CHECK(t.residual <= 1e-7);
    CHECK(std::abs(t.g.factors.back().determinant() - cplx(1)) <= 1e-9);
  }
}
