#pragma once

#include <random>
#include <vector>

#include "qik/labels.hpp"
#include "qik/quiver.hpp"

namespace qik {

// nu[k-1][i-1] = nu^k_i for 1 <= i <= k <= n-1, likewise mu.
struct DiagonalQuiver {
  int n = 0;
  std::vector<std::vector<cplx>> nu;
  std::vector<std::vector<cplx>> mu;

  static DiagonalQuiver zero(int n);
  void validate() const;
};

Quiver buildDiagonal(const DiagonalQuiver& dq);
// Reads the scalars back; throws InputError unless q has the diagonal shape.
DiagonalQuiver extractDiagonal(const Quiver& q, double tol = 0.0);

struct TorusMoment {
  MomentValue levels;
  double residualC = 0;  // max over levels of the spread of the scalar equations
  double residualR = 0;
};
TorusMoment torusMomentResidual(const DiagonalQuiver& dq);

bool isDiagHKS(const DiagonalQuiver& dq, double tol = 0.0);

// Diagonal solution at the given level: nu^k_i mu^k_i = -(lC_i + ... + lC_k),
// |nu^k_i|^2 - |mu^k_i|^2 = -(lR_i + ... + lR_k). Phases of nu drawn from rng
// when supplied.
DiagonalQuiver solveDiagonal(const MomentValue& m, std::mt19937_64* rng = nullptr);

// Action of the maximal torus of prod U(k) (times the top torus):
// t[k-1] holds the k diagonal entries at level k, k = 1..n.
DiagonalQuiver torusAct(const DiagonalQuiver& dq, const std::vector<std::vector<cplx>>& t);

struct ArrangementPoint {
  std::vector<Eigen::Vector3d> tau;  // n entries, summing to zero
  std::vector<Eigen::Vector3d> s;    // s_j = tau_{j+1} + ... + tau_n

  static ArrangementPoint fromTau(std::vector<Eigen::Vector3d> tau);
  // Moment levels lambda_k = tau_{k+1} - tau_k.
  static ArrangementPoint fromMoment(const MomentValue& m);
  MomentValue levels() const;
};

EquivRelation rootArrangementStratum(const ArrangementPoint& p, double tol);

struct Subtorus {
  std::vector<std::vector<int>> generators;  // e_ij, length n-1
  std::vector<std::vector<int>> basis;       // independent subset spanning the same space
  int dimension() const { return int(basis.size()); }
};
Subtorus stabilizerSubtorus(int n, const std::vector<std::pair<int, int>>& S);

}  // namespace qik
