#pragma once

#include <random>
#include <utility>
#include <vector>

#include "qik/labels.hpp"
#include "qik/quiver.hpp"

namespace qik {

// i ~ j iff |lambda_i + ... + lambda_{j-1}| <= tol in R^3.
EquivRelation equivalenceFromLevels(const MomentValue& mu, double tol);
// Same test on the complex parts only.
EquivRelation complexEquivalence(const MomentValue& mu, double tol);

// True when every partial sum is either zero in R^3 or has a complex part
// that is clearly nonzero (above tol and a third of its length).
bool regularLevels(const MomentValue& mu, double tol);

struct RotatedQuiver {
  Quiver quiver;
  UnitQuaternion u;
  int attempts = 0;
};
// Identity first, then seeded random rotations; NumericalError after 200.
RotatedQuiver genericRotation(const Quiver& q, double tol, unsigned long long seed);

struct SubquiverPiece {
  std::vector<int> members;      // the class of ~ owning this piece
  std::vector<cplx> eigenvalue;  // eigenvalue of alpha_{k-1} beta_{k-1} at level k = 1..L
  Quiver fragment;               // dims may vanish at low levels
};

struct SubquiverDecomposition {
  EquivRelation sim;
  std::vector<SubquiverPiece> pieces;  // ordered by minimal class element
  GroupElement changeOfBasis;          // with top factor
  double offBlock = 0;                 // largest off-diagonal block after the change of basis
  double minTargetGap = 0;             // closest pair of distinct eigenvalue targets
  double kernelDropped = 0;            // largest singular value discarded by the eigenspace kernels
  double kernelKept = 0;               // smallest singular value kept
};

// Generalised eigenspaces of every alpha_{k-1} beta_{k-1}. The eigenvalue at
// level k on the piece of class C is nu_k - nu_C. Requires condition (reg).
SubquiverDecomposition decomposeByEigenspaces(const Quiver& q, double tol);

struct Contraction {
  Quiver quiver;
  std::vector<int> vertexLevels;  // original level of each kept vertex
  std::vector<cplx> lambdaC;      // summed complex levels, one per non-top vertex
};
// contractEdge[k-1] marks edge k (V_k -> V_{k+1}) for contraction. Each run
// of marked edges is collapsed onto its lowest vertex with
// alpha -> alpha_b ... alpha_a and beta -> (alpha_{b-1} ... alpha_a)^{-1} beta_b.
Contraction contract(const Quiver& piece, const std::vector<bool>& contractEdge,
                     const std::vector<cplx>& lambdaC);

struct ClosedSplit {
  Quiver star;           // alpha injective, beta surjective
  Quiver zero;           // all maps zero
  GroupElement basis;    // moves the input to blockSum({star, zero})
  double residual = 0;   // largest entry outside the two blocks
  double minKept = 0;    // smallest singular value counted as rank
  double maxDropped = 0; // largest singular value counted as zero
};
ClosedSplit splitClosedOrbitQuiver(const Quiver& piece, double tol);

struct ClassifyDiagnostics {
  UnitQuaternion rotation;
  int rotationAttempts = 0;
  double offBlock = 0;
  double splitResidual = 0;
  // log10 of the ratio between the smallest quantity read as nonzero and
  // the largest read as zero, over all decisions made.
  double margin = 0;
  std::vector<std::vector<int>> starDims;  // per class, s_1..s_r
};

struct Classification {
  StratumLabel label;
  ClassifyDiagnostics diagnostics;
};

// Throws PreconditionError if either residual exceeds 1e-8 and
// NumericalError when a stage cannot decide at tolerance.
Classification classify(const Quiver& q, double tol = 1e-7, unsigned long long seed = 0);

struct KostantCheck {
  double polyResidual = 0;
  double kappaMismatch = 0;
  std::vector<cplx> kappa;
};
// kappa_j = (1/n)(sum_{i<j} i lambda_i - sum_{i>=j} (n-i) lambda_i).
std::vector<cplx> kappaValues(const std::vector<cplx>& lambdaC);
KostantCheck checkKostantIdentity(const Quiver& q, double tol = 1e-7);

struct SymplecticStratum {
  std::vector<int> sequence;   // strictly increasing, ends with n
  std::vector<int> partition;  // successive differences
};
// Kaehler-side strata from the alphas alone: each level must have alpha
// injective or V_i = im alpha_{i-1} (+) ker alpha_i.
SymplecticStratum symplecticStratum(const std::vector<Mat>& alphas, double tol = 1e-9);

// Representative of a realizable label: lambda^C generic inside ~,
// lambda^R = 0, hks fragment from a random parabolic X solved to the real
// equations, scalar chains on (S, delta), then a random prod SL x SU(n)
// move flowed back to the level set.
Quiver buildRepresentative(const StratumLabel& label, std::mt19937_64& rng);

}  // namespace qik
