#include <doctest.h>

#include <set>

#include "qik/labels.hpp"
#include "qik/matkernel.hpp"

using namespace qik;

TEST_CASE("zero orbit on one class") {
  StratumLabel l = labelFromOrbit(EquivRelation::whole(3), {{1, 1, 1}});
  CHECK(l.S == std::vector<std::pair<int, int>>{{1, 2}, {2, 3}});
  CHECK(l.delta == std::vector<int>{1, 2});
  CHECK(l.mDims == std::vector<int>{0, 0, 0, 3});
  CHECK(l.ell == 0);

  StratumLabel m = labelFromOrbit(EquivRelation::whole(3), {{2, 1}});
  CHECK(m.S == std::vector<std::pair<int, int>>{{1, 2}, {2, 3}});
  CHECK(m.delta == std::vector<int>{1, 1});
  CHECK(m.mDims == std::vector<int>{0, 0, 1, 3});

  StratumLabel reg = labelFromOrbit(EquivRelation::whole(3), {{3}});
  CHECK(reg.S.empty());
  CHECK(reg.mDims == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("chains spanning a gap") {
  // classes {1,3},{2}: zero orbit on {1,3} gives one chain through level 2
  EquivRelation e = EquivRelation::generatedBy(3, {{1, 3}});
  StratumLabel l = labelFromOrbit(e, {{1, 1}, {1}});
  CHECK(l.S == std::vector<std::pair<int, int>>{{1, 3}});
  CHECK(l.delta == std::vector<int>{1});
  CHECK(l.ell == 1);
  CHECK(l.mDims == std::vector<int>{0, 0, 1, 3});
}

TEST_CASE("label counts") {
  CHECK(allLabels(3).size() == 10);
  CHECK(allLabels(4).size() == 42);
  CHECK(allEquivRelations(4).size() == 15);
  CHECK(allPartitions(5).size() == 7);
}

TEST_CASE("star dimensions invert") {
  for (int r = 1; r <= 6; ++r)
    for (auto& p : allPartitions(r)) CHECK(partitionFromStarDims(starDims(p)) == p);
}

TEST_CASE("realizable chain data is exactly the orbit image") {
  for (int n = 2; n <= 5; ++n) {
    std::set<std::string> fromOrbit, fromChains;
    for (auto& l : allLabels(n)) {
      for (int k = 1; k <= n; ++k) CHECK(l.mDims[k] >= l.mDims[k - 1]);
      fromOrbit.insert(describe(l));
    }
    int total = 0;
    for (auto& c : allChainData(n)) {
      ++total;
      if (realizable(c)) fromChains.insert(describe(labelFromChains(c.sim, c.S, c.delta)));
    }
    CHECK(fromOrbit == fromChains);
    CHECK(total >= int(fromOrbit.size()));
  }
}

TEST_CASE("unrealizable chains are rejected") {
  // (1,3) with 2 in the same class skips an element
  CHECK_THROWS_AS(labelFromChains(EquivRelation::whole(3), {{1, 3}}, {1}), PreconditionError);
}
