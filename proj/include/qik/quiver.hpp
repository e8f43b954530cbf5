#pragma once

#include <random>
#include <vector>

#include "qik/matkernel.hpp"

namespace qik {

// Chain 0 = V_0 <-> V_1 <-> ... <-> V_L = C^n. alphas[k-1] maps V_k to V_{k+1},
// betas[k-1] maps back. The top space is the frame and carries no equation.
struct Quiver {
  int n = 0;
  std::vector<int> dims;
  std::vector<Mat> alphas;
  std::vector<Mat> betas;

  int levels() const { return int(dims.size()); }
  int dim(int k) const { return k == 0 ? 0 : dims[k - 1]; }
  const Mat& alpha(int k) const { return alphas[k - 1]; }
  const Mat& beta(int k) const { return betas[k - 1]; }
  Mat& alpha(int k) { return alphas[k - 1]; }
  Mat& beta(int k) { return betas[k - 1]; }

  void validate() const;
  bool isFullFlag() const;
};

Quiver zeroQuiver(const std::vector<int>& dims);
Quiver fullFlagZero(int n);
std::vector<int> fullFlagDims(int n);
Quiver randomQuiver(const std::vector<int>& dims, std::mt19937_64& rng);

Mat randomMatrix(int rows, int cols, std::mt19937_64& rng);
Mat randomUnitary(int n, std::mt19937_64& rng);
Mat randomSL(int n, std::mt19937_64& rng, double spread);

struct MomentValue {
  std::vector<cplx> lambdaC;
  std::vector<double> lambdaR;

  int size() const { return int(lambdaC.size()); }
  // nu_i = sum_{j >= i} lambda^C_j, returned for i = 1..L with nu_L = 0.
  std::vector<cplx> nu() const;
  // lambda_k as a point of R^3.
  Eigen::Vector3d r3(int k) const;
  // sum_{k=i}^{j-1} lambda_k in R^3.
  Eigen::Vector3d partialSum(int i, int j) const;
};

struct ComplexMoment {
  std::vector<cplx> lambdaC;
  double residual = 0;
};

struct RealMoment {
  std::vector<double> lambdaR;
  double residual = 0;
};

std::vector<Mat> complexMomentMatrices(const Quiver& q);
std::vector<Mat> realMomentMatrices(const Quiver& q);
ComplexMoment complexMomentResidual(const Quiver& q);
RealMoment realMomentResidual(const Quiver& q);
MomentValue momentValue(const Quiver& q);
// Per-level sqrt(|D - lC|^2 + |E - lR|^2 / 4), the rotation-invariant residual.
double combinedResidual(const Quiver& q);

struct GroupElement {
  std::vector<Mat> factors;  // g_1..g_{L-1}, optionally g_L
  static GroupElement identity(const Quiver& q, bool withTop = false);
};

Quiver applyGroup(const Quiver& q, const GroupElement& g);
GroupElement compose(const GroupElement& h, const GroupElement& g);  // h after g

struct UnitQuaternion {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};

  static UnitQuaternion random(std::mt19937_64& rng);
  static UnitQuaternion j() { return {0.0, 1.0}; }
  UnitQuaternion normalized() const;
  // Rotation of R^3 induced on moment values.
  Eigen::Matrix3d rotation() const;
};

// (alpha, beta) -> (a alpha - conj(b) beta^*, a beta + conj(b) alpha^*).
Quiver rotateStructure(const Quiver& q, const UnitQuaternion& u);
MomentValue rotateMoment(const MomentValue& m, const UnitQuaternion& u);

struct BigX {
  Mat X;
  Mat X0;
};
BigX bigX(const Quiver& q);

enum class Stability { stable, unstable, inconclusive };
const char* verdictName(Stability s);

bool hksAt(const Quiver& q, double tol);
Stability isHKStable(const Quiver& q, double tol, int samples = 32, unsigned long long seed = 0);

// Block-diagonal sum over quivers with a common number of levels.
Quiver blockSum(const std::vector<Quiver>& parts);

// Scalar chain C^d <-> ... <-> C^d living at levels i..j-1 with edge scalars
// alpha[k - i], beta[k - i] for k = i..j-2.
struct ScalarChain {
  int i = 1;
  int j = 2;
  int d = 1;
  std::vector<cplx> alpha;
  std::vector<cplx> beta;
};

Quiver chainQuiver(int levels, const ScalarChain& c);
// Orthogonal direct sum of a fragment with dims m_1..m_n and scalar chains;
// requires m_k + sum_{i_h <= k < j_h} d_h = k.
Quiver directSum(const Quiver& fragment, const std::vector<ScalarChain>& chains);

}  // namespace qik
