#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "qik/quiver.hpp"

namespace qik {

enum class FlowVerdict { converged, maxIterations, diverging };
const char* verdictName(FlowVerdict v);

struct FlowReport {
  int iterations = 0;
  double finalResidual = 0;
  std::vector<std::pair<int, double>> stepTrace;  // (iteration, residual) after accepted steps
  FlowVerdict verdict = FlowVerdict::maxIterations;
  double groupNorm = 0;             // max_k |g_k|_F of the accumulated element
  double maxComplexResidual = 0;    // along the flow
};

struct FlowResult {
  Quiver quiver;
  GroupElement g;  // quiver = applyGroup(input, g)
  FlowReport report;
};

// Without a target the flow runs in prod SL(n_k) and removes the traceless
// part of every real moment matrix. With a target lambda^R it runs in
// prod GL(n_k) and drives E_k to target_k I.
double flowObjective(const Quiver& q, const std::optional<std::vector<double>>& target);
double flowResidual(const Quiver& q, const std::optional<std::vector<double>>& target);
std::vector<Mat> flowGradient(const Quiver& q, const std::optional<std::vector<double>>& target);

FlowResult kempfNessFlow(const Quiver& q, const std::optional<std::vector<double>>& target, double tol,
                         int maxIter);

// Levenberg-Marquardt on the same objective in Hermitian coordinates. Much
// faster near closed orbits with small Hessian eigenvalues; no use for
// deciding closedness.
FlowResult gaussNewtonSolve(const Quiver& q, const std::optional<std::vector<double>>& target, double tol,
                            int maxIter);

enum class OrbitVerdict { closed, notClosed, inconclusive };
const char* verdictName(OrbitVerdict v);

struct OrbitReport {
  OrbitVerdict verdict = OrbitVerdict::inconclusive;
  FlowReport flow;
  // log |g| gained per decade of residual decrease over the last decades
  double logNormPerDecade = 0;
};

OrbitReport orbitClosed(const Quiver& q, double tol, int maxIter);

}  // namespace qik
