#include "qik/labels.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "qik/matkernel.hpp"

namespace qik {

EquivRelation EquivRelation::singletons(int n) {
  EquivRelation e;
  e.n = n;
  for (int i = 1; i <= n; ++i) e.classes.push_back({i});
  return e;
}

EquivRelation EquivRelation::whole(int n) {
  EquivRelation e;
  e.n = n;
  e.classes.emplace_back(n);
  std::iota(e.classes[0].begin(), e.classes[0].end(), 1);
  return e;
}

EquivRelation EquivRelation::generatedBy(int n, const std::vector<std::pair<int, int>>& pairs) {
  std::vector<int> parent(n + 1);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
  for (auto [i, j] : pairs) {
    if (i < 1 || j < 1 || i > n || j > n) throw InputError("pair outside 1..n");
    parent[find(i)] = find(j);
  }
  EquivRelation e;
  e.n = n;
  std::vector<int> slot(n + 1, -1);
  for (int i = 1; i <= n; ++i) {
    int r = find(i);
    if (slot[r] < 0) {
      slot[r] = int(e.classes.size());
      e.classes.emplace_back();
    }
    e.classes[slot[r]].push_back(i);
  }
  return e;
}

void EquivRelation::normalize() {
  for (auto& c : classes) std::sort(c.begin(), c.end());
  std::sort(classes.begin(), classes.end(), [](auto& a, auto& b) { return a.front() < b.front(); });
}

int EquivRelation::classOf(int i) const {
  for (size_t c = 0; c < classes.size(); ++c)
    if (std::find(classes[c].begin(), classes[c].end(), i) != classes[c].end()) return int(c);
  return -1;
}

std::string describe(const StratumLabel& l) {
  std::ostringstream os;
  os << "sim=";
  for (auto& c : l.sim.classes) {
    os << "{";
    for (size_t i = 0; i < c.size(); ++i) os << (i ? "," : "") << c[i];
    os << "}";
  }
  os << " orbit=";
  for (auto& p : l.orbit) {
    os << "[";
    for (size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
    os << "]";
  }
  os << " S=";
  for (size_t h = 0; h < l.S.size(); ++h)
    os << "(" << l.S[h].first << "," << l.S[h].second << ";" << l.delta[h] << ")";
  return os.str();
}

std::vector<int> mDimsFor(int n, const std::vector<std::pair<int, int>>& S, const std::vector<int>& delta) {
  std::vector<int> m(n + 1);
  for (int k = 0; k <= n; ++k) {
    int s = 0;
    for (size_t h = 0; h < S.size(); ++h)
      if (S[h].first <= k && k < S[h].second) s += delta[h];
    m[k] = k - s;
  }
  return m;
}

int ellFor(const std::vector<std::pair<int, int>>& S) {
  int l = 0;
  for (auto [i, j] : S) l += std::max(0, j - 1 - i);
  return l;
}

std::vector<int> starDims(const std::vector<int>& partition) {
  const int r = std::accumulate(partition.begin(), partition.end(), 0);
  std::vector<int> s(r + 1, 0);
  for (int t = 0; t <= r; ++t)
    for (int p : partition) s[t] += std::max(p - (r - t), 0);
  return s;
}

std::vector<int> partitionFromStarDims(const std::vector<int>& s) {
  const int r = int(s.size()) - 1;
  std::vector<int> counts;
  for (int k = 1; k <= r; ++k) {
    int c = s[r - k + 1] - s[r - k];
    if (c > 0) counts.push_back(c);
  }
  return conjugatePartition(counts);
}

namespace {

void sortChains(std::vector<std::pair<int, int>>& S, std::vector<int>& delta) {
  std::vector<size_t> idx(S.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
    return S[a].second != S[b].second ? S[a].second < S[b].second : S[a].first < S[b].first;
  });
  std::vector<std::pair<int, int>> S2;
  std::vector<int> d2;
  for (size_t i : idx) {
    S2.push_back(S[i]);
    d2.push_back(delta[i]);
  }
  S = S2;
  delta = d2;
}

}  // namespace

StratumLabel labelFromOrbit(const EquivRelation& simIn, const std::vector<std::vector<int>>& orbit) {
  StratumLabel l;
  l.sim = simIn;
  l.sim.normalize();
  if (orbit.size() != l.sim.classes.size()) throw InputError("one partition per class required");
  l.orbit = orbit;
  for (size_t c = 0; c < l.sim.classes.size(); ++c) {
    const auto& C = l.sim.classes[c];
    auto p = orbit[c];
    std::sort(p.rbegin(), p.rend());
    l.orbit[c] = p;
    const int r = int(C.size());
    if (std::accumulate(p.begin(), p.end(), 0) != r) throw InputError("partition does not match class size");
    auto s = starDims(p);
    for (int t = 1; t < r; ++t) {
      const int z = t - s[t];
      if (z > 0) {
        l.S.push_back({C[t - 1], C[t]});
        l.delta.push_back(z);
      }
    }
  }
  sortChains(l.S, l.delta);
  l.mDims = mDimsFor(l.sim.n, l.S, l.delta);
  l.ell = ellFor(l.S);
  return l;
}

StratumLabel labelFromChains(const EquivRelation& simIn, const std::vector<std::pair<int, int>>& S,
                             const std::vector<int>& delta) {
  EquivRelation sim = simIn;
  sim.normalize();
  if (S.size() != delta.size()) throw InputError("S and delta differ in length");
  std::vector<std::vector<int>> orbit;
  std::vector<bool> used(S.size(), false);
  for (auto& C : sim.classes) {
    const int r = int(C.size());
    std::vector<int> s(r + 1);
    s[0] = 0;
    s[r] = r;
    for (int t = 1; t < r; ++t) {
      int z = 0;
      for (size_t h = 0; h < S.size(); ++h)
        if (S[h].first == C[t - 1] && S[h].second == C[t]) {
          z = delta[h];
          used[h] = true;
        }
      s[t] = t - z;
    }
    for (int t = 1; t <= r; ++t) {
      if (s[t] < s[t - 1]) throw PreconditionError("star dimensions decrease");
      if (t >= 2 && s[t] - s[t - 1] < s[t - 1] - s[t - 2]) throw PreconditionError("star dimensions not convex");
    }
    orbit.push_back(partitionFromStarDims(s));
  }
  for (bool u : used)
    if (!u) throw PreconditionError("chain does not join consecutive elements of a class");
  StratumLabel l = labelFromOrbit(sim, orbit);
  auto S2 = S;
  auto d2 = delta;
  sortChains(S2, d2);
  if (l.S != S2 || l.delta != d2) throw PreconditionError("chains inconsistent with class structure");
  return l;
}

std::vector<EquivRelation> allEquivRelations(int n) {
  std::vector<EquivRelation> out;
  std::vector<int> block(n + 1, 0);
  std::function<void(int, int)> rec = [&](int i, int nb) {
    if (i > n) {
      EquivRelation e;
      e.n = n;
      e.classes.assign(nb, {});
      for (int k = 1; k <= n; ++k) e.classes[block[k]].push_back(k);
      out.push_back(e);
      return;
    }
    for (int b = 0; b <= nb; ++b) {
      block[i] = b;
      rec(i + 1, std::max(nb, b + 1));
    }
  };
  rec(1, 0);
  return out;
}

std::vector<std::vector<int>> allPartitions(int r) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur;
  std::function<void(int, int)> rec = [&](int left, int maxPart) {
    if (left == 0) {
      out.push_back(cur);
      return;
    }
    for (int p = std::min(left, maxPart); p >= 1; --p) {
      cur.push_back(p);
      rec(left - p, p);
      cur.pop_back();
    }
  };
  rec(r, r);
  return out;
}

std::vector<StratumLabel> allLabels(int n) {
  std::vector<StratumLabel> out;
  for (auto& e : allEquivRelations(n)) {
    std::vector<std::vector<std::vector<int>>> choices;
    for (auto& C : e.classes) choices.push_back(allPartitions(int(C.size())));
    std::vector<std::vector<int>> orbit(e.classes.size());
    std::function<void(size_t)> rec = [&](size_t c) {
      if (c == e.classes.size()) {
        out.push_back(labelFromOrbit(e, orbit));
        return;
      }
      for (auto& p : choices[c]) {
        orbit[c] = p;
        rec(c + 1);
      }
    };
    rec(0);
  }
  return out;
}

std::vector<ChainData> allChainData(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) pairs.push_back({i, j});
  std::vector<ChainData> out;
  auto relations = allEquivRelations(n);
  std::vector<std::pair<int, int>> S;
  std::vector<int> delta;
  std::function<void(size_t)> rec = [&](size_t start) {
    auto m = mDimsFor(n, S, delta);
    bool ok = m[0] == 0 && m[n] == n;
    for (int k = 1; k <= n && ok; ++k) ok = m[k] >= m[k - 1];
    if (ok) {
      auto S2 = S;
      auto d2 = delta;
      sortChains(S2, d2);
      for (auto& e : relations) {
        bool inside = true;
        for (auto [i, j] : S2) inside = inside && e.related(i, j);
        if (inside) out.push_back({S2, d2, e});
      }
    }
    for (size_t p = start; p < pairs.size(); ++p) {
      bool clash = false;
      for (auto [i, j] : S) clash = clash || i == pairs[p].first || j == pairs[p].second;
      if (clash) continue;
      for (int d = 1; d <= n; ++d) {
        S.push_back(pairs[p]);
        delta.push_back(d);
        auto m = mDimsFor(n, S, delta);
        bool nonneg = true;
        for (int k = 0; k <= n; ++k) nonneg = nonneg && m[k] >= 0;
        if (nonneg) rec(p + 1);
        S.pop_back();
        delta.pop_back();
        if (!nonneg) break;
      }
    }
  };
  rec(0);
  return out;
}

bool realizable(const ChainData& c) {
  try {
    labelFromChains(c.sim, c.S, c.delta);
    return true;
  } catch (const PreconditionError&) {
    return false;
  }
}

}  // namespace qik
