#pragma once

#include <random>
#include <vector>

#include "qik/quiver.hpp"

namespace qik {

enum class StandardForm { betaStd, jcf, diagonal };
const char* formName(StandardForm f);

// For jcf: betaShift keeps every beta a 0/1 selection that drops the first
// vector of each shrinking Jordan block; alphaSelect keeps every alpha a 0/1
// selection that drops the last one. In both, each alpha_k beta_k is in
// Jordan form.
enum class JcfShape { betaShift, alphaSelect };

struct StandardizedQuiver {
  Quiver quiver;
  GroupElement witness;  // with top factor; quiver = applyGroup(original, witness)
  StandardForm form = StandardForm::betaStd;
  JcfShape shape = JcfShape::betaShift;
  std::vector<JordanBlock> blocks;  // Jordan blocks of X, jcf only
  double snapSize = 0;              // largest entry forced to zero
};

// beta_k = (0 | I) at every level. Witness in prod GL(m_k) x SL(n).
StandardizedQuiver standardizeBeta(const Quiver& q);

// Inverse of bigX on beta-standardised quivers. mDims holds m_0..m_n,
// lambdaC the n-1 complex levels. X = X0 + (tr X / n) I with
// tr X = -sum_k lambda_k m_k. With requireOpen every alpha must be injective.
Quiver alphaFromX(const Mat& X0, const std::vector<int>& mDims, const std::vector<cplx>& lambdaC,
                  bool requireOpen = true, double tol = 1e-9);

// Random X0 in the open subset of the annihilator of [p,p] for the flag:
// block upper triangular, diagonal blocks (from the top) k_{n-1}, ..., k_0
// scalar with values 0, -lambda_{n-1}, -lambda_{n-1} - lambda_{n-2}, ...
Mat parabolicX0(const std::vector<int>& mDims, const std::vector<cplx>& lambdaC, std::mt19937_64& rng);

// Requires every alpha injective and every beta surjective. Blocks are
// grouped by the smallest index j with eigenvalue -nu_j and ordered by size
// inside each group. With unimodular the lower factors are in SL(m_k) too,
// leaving torus scalars in the entries.
StandardizedQuiver toJCF(const Quiver& q, double tol = 1e-7, JcfShape shape = JcfShape::betaShift,
                         bool unimodular = false);

// psi: drop the superdiagonal of every beta in an alphaSelect jcf quiver.
Quiver toDiagonal(const StandardizedQuiver& s);
// Rebuilds the superdiagonal entries from the complex equations and the
// Jordan blocks of X.
Quiver fromDiagonal(const Quiver& qT, const std::vector<JordanBlock>& blocks, const std::vector<cplx>& lambdaC);

// Diagonal element of prod GL(m_k) x GL(n) with det 1 on top carrying a to
// b, found by propagating entry ratios. residual = max |applyGroup(a,g) - b|.
struct TorusMatch {
  GroupElement g;
  double residual = 0;
};
TorusMatch torusBetween(const Quiver& a, const Quiver& b);

}  // namespace qik
