#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qik {

// Partition of {1..n}; classes sorted, ordered by minimal element.
struct EquivRelation {
  int n = 0;
  std::vector<std::vector<int>> classes;

  static EquivRelation singletons(int n);
  static EquivRelation whole(int n);
  // Smallest relation containing the given pairs.
  static EquivRelation generatedBy(int n, const std::vector<std::pair<int, int>>& pairs);
  void normalize();
  int classOf(int i) const;
  bool related(int i, int j) const { return classOf(i) == classOf(j); }
  bool operator==(const EquivRelation& o) const { return n == o.n && classes == o.classes; }
};

struct StratumLabel {
  EquivRelation sim;
  std::vector<std::vector<int>> orbit;     // partition per class of sim
  std::vector<std::pair<int, int>> S;      // sorted by j
  std::vector<int> delta;
  std::vector<int> mDims;                  // m_0..m_n
  int ell = 0;

  bool operator==(const StratumLabel& o) const {
    return sim == o.sim && orbit == o.orbit && S == o.S && delta == o.delta && mDims == o.mDims &&
           ell == o.ell;
  }
};

std::string describe(const StratumLabel& l);

// m_k = k - sum_{i_h <= k < j_h} d_h for k = 0..n.
std::vector<int> mDimsFor(int n, const std::vector<std::pair<int, int>>& S, const std::vector<int>& delta);
int ellFor(const std::vector<std::pair<int, int>>& S);

// Star dimensions s_0..s_r of the contracted class quiver from its nilpotent
// orbit: s_t = sum_i max(p_i - (r - t), 0).
std::vector<int> starDims(const std::vector<int>& partition);
// Inverse: partition from the rank sequence rank(N^s) = s_{r-s}.
std::vector<int> partitionFromStarDims(const std::vector<int>& s);

// (sim, orbit) -> full label including (S, delta, m, ell).
StratumLabel labelFromOrbit(const EquivRelation& sim, const std::vector<std::vector<int>>& orbit);
// (S, delta, sim) -> full label; throws PreconditionError if not realizable.
StratumLabel labelFromChains(const EquivRelation& sim, const std::vector<std::pair<int, int>>& S,
                             const std::vector<int>& delta);

std::vector<EquivRelation> allEquivRelations(int n);
std::vector<std::vector<int>> allPartitions(int r);
// Every (sim, orbit) label for SU(n).
std::vector<StratumLabel> allLabels(int n);

struct ChainData {
  std::vector<std::pair<int, int>> S;
  std::vector<int> delta;
  EquivRelation sim;
};
// Every (S, delta, sim) satisfying the indexing constraints: i_h distinct,
// j_h strictly increasing, 0 = m_0 <= ... <= m_n = n, S contained in sim.
std::vector<ChainData> allChainData(int n);
bool realizable(const ChainData& c);

}  // namespace qik
