#pragma once

#include <random>

#include "qik/forms.hpp"
#include "qik/quiver.hpp"

namespace qik::testing {

inline MomentValue randomLevels(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  MomentValue m;
  for (int k = 1; k < n; ++k) {
    m.lambdaC.push_back(cplx(N(rng), N(rng)));
    m.lambdaR.push_back(N(rng));
  }
  return m;
}

inline GroupElement randomSLElement(const Quiver& q, std::mt19937_64& rng, double spread) {
  GroupElement g;
  for (int k = 1; k < q.levels(); ++k) g.factors.push_back(randomSL(q.dim(k), rng, spread));
  return g;
}


inline std::vector<cplx> randomLambda(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  std::vector<cplx> l;
  for (int k = 1; k < n; ++k) l.push_back(cplx(N(rng), N(rng)));
  return l;
}

inline std::vector<int> fullFlag(int n) {
  std::vector<int> m(n + 1);
  for (int k = 0; k <= n; ++k) m[k] = k;
  return m;
}

inline GroupElement randomGL(const Quiver& q, std::mt19937_64& rng, bool top) {
  GroupElement g;
  for (int k = 1; k <= q.levels() - (top ? 0 : 1); ++k) g.factors.push_back(randomSL(q.dim(k), rng, 0.4));
  return g;
}

// Random hks quiver: standard form from a parabolic X0, moved by a random
// element of prod SL(m_k) x SL(n).
inline Quiver hksFromFlag(const std::vector<int>& m, const std::vector<cplx>& lambda, std::mt19937_64& rng) {
  Quiver q = alphaFromX(parabolicX0(m, lambda, rng), m, lambda);
  return applyGroup(q, randomGL(q, rng, true));
}

}  // namespace qik::testing
