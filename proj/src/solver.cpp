#include "qik/solver.hpp"

#include <cmath>

namespace qik {

const char* verdictName(FlowVerdict v) {
  switch (v) {
    case FlowVerdict::converged: return "converged";
    case FlowVerdict::diverging: return "diverging";
    default: return "maxIterations";
  }
}

const char* verdictName(OrbitVerdict v) {
  switch (v) {
    case OrbitVerdict::closed: return "closed";
    case OrbitVerdict::notClosed: return "notClosed";
    default: return "inconclusive";
  }
}

namespace {

using Target = std::optional<std::vector<double>>;

std::vector<Mat> defects(const Quiver& q, const Target& target) {
  auto Es = realMomentMatrices(q);
  if (target && int(target->size()) != q.levels() - 1)
    throw InputError("target needs one real level per non-frame vertex");
  for (size_t k = 0; k < Es.size(); ++k) {
    if (Es[k].rows() == 0) continue;
    if (target)
      Es[k].diagonal().array() -= (*target)[k];
    else
      Es[k] = tracelessPart(Es[k]);
  }
  return Es;
}

double groupNorm(const GroupElement& g) {
  double m = 0;
  for (auto& f : g.factors) m = std::max(m, f.norm());
  return m;
}

struct Flow {
  Quiver q;
  GroupElement g;
  Target target;
  double step = 0.1;
  int iterations = 0;
  FlowReport report;

  Flow(const Quiver& q0, const Target& t) : q(q0), g(GroupElement::identity(q0)), target(t) {
    report.maxComplexResidual = complexMomentResidual(q0).residual;
  }

  // Runs until the residual is at most tol or maxIter total iterations.
  void run(double tol, int maxIter) {
    double f = flowObjective(q, target);
    double res = flowResidual(q, target);
    while (res > tol && iterations < maxIter) {
      auto grad = flowGradient(q, target);
      double g2 = 0;
      for (auto& G : grad) g2 += G.squaredNorm();
      if (g2 == 0) break;
      bool accepted = false;
      // keep each trial move inside a unit ball of the Lie algebra
      step = std::min(step, 1.0 / std::sqrt(g2));
      while (step > 1e-18) {
        GroupElement h;
        for (size_t k = 0; k < grad.size(); ++k) h.factors.push_back(expm(Mat(-step * grad[k])));
        Quiver trial = applyGroup(q, h);
        const double ft = flowObjective(trial, target);
        if (!std::isfinite(ft)) throw NumericalError("non-finite objective during flow");
        if (ft <= f - 1e-4 * step * g2) {
          q = trial;
          g = compose(h, g);
          f = ft;
          accepted = true;
          step *= 2.0;
          break;
        }
        step /= 2.0;
      }
      ++iterations;
      if (!accepted) break;
      res = flowResidual(q, target);
      report.stepTrace.push_back({iterations, res});
      report.maxComplexResidual = std::max(report.maxComplexResidual, complexMomentResidual(q).residual);
      if (groupNorm(g) > 1e12) break;
    }
    report.iterations = iterations;
    report.finalResidual = res;
    report.groupNorm = groupNorm(g);
    if (res <= tol)
      report.verdict = FlowVerdict::converged;
    else if (report.groupNorm > 1e6)
      report.verdict = FlowVerdict::diverging;
    else
      report.verdict = FlowVerdict::maxIterations;
  }
};

}  // namespace

double flowObjective(const Quiver& q, const Target& target) {
  double f = 0;
  for (auto& F : defects(q, target)) f += F.squaredNorm();
  return f;
}

double flowResidual(const Quiver& q, const Target& target) {
  double r = 0;
  for (auto& F : defects(q, target)) r = std::max(r, F.norm());
  return r;
}

std::vector<Mat> flowGradient(const Quiver& q, const Target& target) {
  const int L = q.levels();
  auto F = defects(q, target);
  F.push_back(Mat::Zero(q.n, q.n));  // frame: no equation
  auto Fk = [&](int k) -> const Mat& { return F[k - 1]; };
  std::vector<Mat> Ga(L), Gb(L);
  for (int k = 1; k < L; ++k) {
    Ga[k] = 4.0 * (Fk(k + 1) * q.alpha(k) - q.alpha(k) * Fk(k));
    Gb[k] = 4.0 * (Fk(k) * q.beta(k) - q.beta(k) * Fk(k + 1));
  }
  std::vector<Mat> grad;
  for (int m = 1; m < L; ++m) {
    const int d = q.dim(m);
    Mat A = Mat::Zero(d, d);
    if (m > 1) {
      A += Ga[m - 1] * q.alpha(m - 1).adjoint();
      A -= q.beta(m - 1).adjoint() * Gb[m - 1];
    }
    A -= q.alpha(m).adjoint() * Ga[m];
    A += Gb[m] * q.beta(m).adjoint();
    Mat H = hermitianPart(A);
    if (!target && d > 0) H = tracelessPart(H);
    grad.push_back(H);
  }
  return grad;
}

FlowResult kempfNessFlow(const Quiver& q, const Target& target, double tol, int maxIter) {
  q.validate();
  if (!(tol > 0)) throw InputError("tolerance must be positive");
  if (complexMomentResidual(q).residual > 1e-8)
    throw PreconditionError("complex moment equations do not hold to 1e-8");
  Flow flow(q, target);
  flow.run(tol, maxIter);
  return {flow.q, flow.g, flow.report};
}

namespace {

// Hermitian basis of gl(d), traceless-projected in the SL case.
std::vector<Mat> hermitianBasis(int d, bool traceless) {
  std::vector<Mat> out;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      Mat E = Mat::Zero(d, d);
      if (i == j) {
        E(i, i) = 1.0;
        out.push_back(traceless ? tracelessPart(E) : E);
        continue;
      }
      E(i, j) = E(j, i) = 1.0;
      out.push_back(E);
      E(i, j) = cplx(0, 1);
      E(j, i) = cplx(0, -1);
      out.push_back(E);
    }
  return out;
}

Eigen::VectorXd stackDefects(const std::vector<Mat>& F) {
  Eigen::Index len = 0;
  for (auto& M : F) len += 2 * M.size();
  Eigen::VectorXd v(len);
  Eigen::Index o = 0;
  for (auto& M : F)
    for (Eigen::Index i = 0; i < M.size(); ++i) {
      v(o++) = M.data()[i].real();
      v(o++) = M.data()[i].imag();
    }
  return v;
}

}  // namespace

FlowResult gaussNewtonSolve(const Quiver& q0, const Target& target, double tol, int maxIter) {
  q0.validate();
  if (!(tol > 0)) throw InputError("tolerance must be positive");
  if (complexMomentResidual(q0).residual > 1e-8)
    throw PreconditionError("complex moment equations do not hold to 1e-8");
  const int L = q0.levels();
  struct Dir {
    int level;
    Mat h;
  };
  std::vector<Dir> dirs;
  for (int m = 1; m < L; ++m)
    for (auto& B : hermitianBasis(q0.dim(m), !target)) dirs.push_back({m, B});

  Quiver q = q0;
  GroupElement g = GroupElement::identity(q0);
  FlowReport report;
  report.maxComplexResidual = complexMomentResidual(q0).residual;
  double f = flowObjective(q, target);
  double res = flowResidual(q, target);
  double mu = 1e-3;
  int it = 0;
  while (res > tol && it < maxIter) {
    ++it;
    const Eigen::VectorXd r = stackDefects(defects(q, target));
    Eigen::MatrixXd J(r.size(), Eigen::Index(dirs.size()));
    for (size_t c = 0; c < dirs.size(); ++c) {
      // E is quadratic, so the central difference is the exact derivative.
      Quiver plus = q, minus = q;
      const int m = dirs[c].level;
      const Mat& h = dirs[c].h;
      if (m > 1) {
        plus.alpha(m - 1) += h * q.alpha(m - 1);
        plus.beta(m - 1) -= q.beta(m - 1) * h;
      }
      plus.alpha(m) -= q.alpha(m) * h;
      plus.beta(m) += h * q.beta(m);
      for (int k = 1; k < L; ++k) {
        minus.alpha(k) = 2.0 * q.alpha(k) - plus.alpha(k);
        minus.beta(k) = 2.0 * q.beta(k) - plus.beta(k);
      }
      J.col(Eigen::Index(c)) = 0.5 * (stackDefects(defects(plus, target)) - stackDefects(defects(minus, target)));
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd Jtr = J.transpose() * r;
    bool accepted = false;
    for (int tries = 0; tries < 40 && !accepted; ++tries) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += mu * std::max(1.0, JtJ.diagonal().maxCoeff());
      const Eigen::VectorXd x = A.ldlt().solve(-Jtr);
      GroupElement step;
      for (int m = 1; m < L; ++m) step.factors.push_back(Mat::Zero(q.dim(m), q.dim(m)));
      for (size_t c = 0; c < dirs.size(); ++c) step.factors[dirs[c].level - 1] += x(Eigen::Index(c)) * dirs[c].h;
      for (auto& s : step.factors) s = s.rows() ? expm(s) : s;
      Quiver trial = applyGroup(q, step);
      const double ft = flowObjective(trial, target);
      if (std::isfinite(ft) && ft < f) {
        q = trial;
        g = compose(step, g);
        f = ft;
        mu = std::max(mu / 10.0, 1e-15);
        accepted = true;
      } else {
        mu *= 10.0;
      }
    }
    if (!accepted) break;
    res = flowResidual(q, target);
    report.stepTrace.push_back({it, res});
    report.maxComplexResidual = std::max(report.maxComplexResidual, complexMomentResidual(q).residual);
  }
  report.iterations = it;
  report.finalResidual = res;
  report.groupNorm = groupNorm(g);
  report.verdict = res <= tol ? FlowVerdict::converged
                   : report.groupNorm > 1e6 ? FlowVerdict::diverging
                                            : FlowVerdict::maxIterations;
  return {q, g, report};
}

OrbitReport orbitClosed(const Quiver& q, double tol, int maxIter) {
  q.validate();
  if (complexMomentResidual(q).residual > 1e-8)
    throw PreconditionError("complex moment equations do not hold to 1e-8");
  Flow flow(q, std::nullopt);
  OrbitReport out;
  flow.run(tol, maxIter);
  out.flow = flow.report;
  if (flow.report.verdict == FlowVerdict::diverging) {
    out.verdict = OrbitVerdict::notClosed;
    return out;
  }
  // Keep flowing through further decades of residual and watch how the group
  // element grows. On a closed orbit the flow converges geometrically to a
  // finite group element; on a non-closed orbit the residual decays only
  // while the group element escapes to infinity.
  double scale = 1.0;
  for (auto& a : q.alphas) scale += a.squaredNorm();
  for (auto& b : q.betas) scale += b.squaredNorm();
  const double floor = 1e-13 * scale;
  std::vector<double> logNorm{std::log(std::max(1.0, groupNorm(flow.g)))};
  std::vector<double> logRes{std::log10(std::max(flow.report.finalResidual, 1e-300))};
  double t = std::max(std::min(tol, flow.report.finalResidual), floor);
  for (int decade = 0; decade < 3 && t > floor; ++decade) {
    t = std::max(t / 100.0, floor);
    flow.run(t, flow.iterations + maxIter);
    if (flow.report.verdict != FlowVerdict::converged) break;
    logNorm.push_back(std::log(std::max(1.0, groupNorm(flow.g))));
    logRes.push_back(std::log10(std::max(flow.report.finalResidual, 1e-300)));
  }
  out.flow = flow.report;
  if (logNorm.size() >= 2) {
    const double dr = logRes.front() - logRes.back();
    out.logNormPerDecade = dr > 0 ? (logNorm.back() - logNorm.front()) / dr : 0.0;
  }
  const bool plateau = [&] {
    auto& tr = flow.report.stepTrace;
    if (tr.size() < 101) return false;
    return tr.back().second > 0.99 * tr[tr.size() - 101].second;
  }();
  if (flow.report.groupNorm > 1e6 && plateau && flow.report.finalResidual > tol)
    out.verdict = OrbitVerdict::notClosed;
  else if (out.logNormPerDecade > 0.05)
    out.verdict = OrbitVerdict::notClosed;
  else if (flow.report.verdict == FlowVerdict::converged && logNorm.size() >= 2 && out.logNormPerDecade < 0.01)
    out.verdict = OrbitVerdict::closed;
  else if (flow.report.finalResidual <= floor && flow.report.groupNorm < 1e6)
    out.verdict = OrbitVerdict::closed;
  else
    out.verdict = OrbitVerdict::inconclusive;
  return out;
}

}  // namespace qik
