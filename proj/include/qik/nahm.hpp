#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "qik/matkernel.hpp"

namespace qik {

// (T_0, T_1, T_2, T_3), each anti-Hermitian n x n.
using NahmQuad = std::array<Mat, 4>;

struct NahmSolution {
  int n = 0;
  std::vector<double> grid;
  std::vector<NahmQuad> values;
  bool truncated = false;
  std::string diagnostic;
  double maxProjection = 0;  // largest Hermitian part removed after a step
};

// e_1, e_2, e_3 in su(2) with [e_1, e_2] = e_3 cyclically.
Mat su2Generator(int i);

// Max over interior samples and cyclic (i,j,k) of
// |dT_i/dt + [T_0, T_i] - [T_j, T_k]|_F, second-order differences.
double nahmResidual(const NahmSolution& sol);

using MatPath = std::function<Mat(double)>;

// RK4 for dT_i/dt = -[T_0, T_i] + [T_j, T_k] with T_0 prescribed (empty
// profile means T_0 = 0). Stops early with truncated = true once a norm
// exceeds 1e8. The last step is shortened to land on t1.
NahmSolution integrate(const NahmQuad& init, const MatPath& T0, double t0, double t1, double step);

// T_0 -> g T_0 g^-1 - g' g^-1, T_i -> g T_i g^-1. Without gDot the
// derivative is a central difference. Throws InputError if g is not unitary.
NahmSolution gaugeTransform(const NahmSolution& sol, const MatPath& g, const MatPath& gDot = {});

struct AsymptoticData {
  std::array<Mat, 3> tau;
  std::array<Mat, 3> sigma;
  double fitResidual = 0;
  double tauCommutator = 0;  // max |[tau_a, tau_b]|
  double sigmaBracket = 0;   // max cyclic |[sigma_i, sigma_j] + sigma_k|
  double tauSigma = 0;       // max |[tau_a, sigma_b]|
};

// Least squares on [T/2, T] against tau + sigma/t + c_2/t^2 + c_3/t^3.
// Throws PreconditionError if T < 10, NumericalError if ill conditioned.
AsymptoticData fitAsymptotics(const NahmSolution& sol);

struct Centralizer {
  int dimension = 0;
  std::vector<Mat> basis;  // orthonormal in the Frobenius inner product
};
// Common centraliser of the matrices inside su(n).
Centralizer commonCentralizer(const std::vector<Mat>& mats, double tol = 1e-9);

struct BielawskiResult {
  double value = 0;
  bool convergent = true;
  double tailSlope = 0;  // infinity when the tail is at noise level
  std::vector<double> integrand;
};

// <A, B> = -tr(AB). Integrand sum_{i=0..3} <X_i, X_i> - <X_i(inf), X_i(inf)>,
// X_i(inf) from the tail fit; value is the trapezoid integral plus
// c <X(inf), X(inf)>. convergent iff the log-log slope of the integrand on
// [T/2, T] exceeds 1.1.
BielawskiResult bielawskiNorm(const NahmSolution& sol, const NahmSolution& tangent, double c = 1.0);

}  // namespace qik
