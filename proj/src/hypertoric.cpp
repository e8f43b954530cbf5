#include "qik/hypertoric.hpp"

#include <cmath>

namespace qik {

DiagonalQuiver DiagonalQuiver::zero(int n) {
  DiagonalQuiver dq;
  dq.n = n;
  for (int k = 1; k < n; ++k) {
    dq.nu.emplace_back(k, 0.0);
    dq.mu.emplace_back(k, 0.0);
  }
  return dq;
}

void DiagonalQuiver::validate() const {
  if (n < 1 || n > kMaxDim) throw InputError("diagonal quiver needs 1 <= n <= 16");
  if (int(nu.size()) != n - 1 || int(mu.size()) != n - 1) throw InputError("need n-1 rows of scalars");
  for (int k = 1; k < n; ++k)
    if (int(nu[k - 1].size()) != k || int(mu[k - 1].size()) != k)
      throw InputError("row " + std::to_string(k) + " must hold k scalars");
}

Quiver buildDiagonal(const DiagonalQuiver& dq) {
  dq.validate();
  Quiver q = fullFlagZero(dq.n);
  for (int k = 1; k < dq.n; ++k)
    for (int i = 0; i < k; ++i) {
      q.alpha(k)(i, i) = dq.nu[k - 1][i];
      q.beta(k)(i, i) = dq.mu[k - 1][i];
    }
  return q;
}

DiagonalQuiver extractDiagonal(const Quiver& q, double tol) {
  q.validate();
  if (!q.isFullFlag()) throw InputError("diagonal quivers are full flag");
  DiagonalQuiver dq = DiagonalQuiver::zero(q.n);
  for (int k = 1; k < q.n; ++k) {
    Mat a = q.alpha(k), b = q.beta(k);
    for (int i = 0; i < k; ++i) {
      dq.nu[k - 1][i] = a(i, i);
      dq.mu[k - 1][i] = b(i, i);
      a(i, i) = 0;
      b(i, i) = 0;
    }
    if (a.cwiseAbs().maxCoeff() > tol || b.cwiseAbs().maxCoeff() > tol)
      throw InputError("quiver is not diagonal at edge " + std::to_string(k));
  }
  return dq;
}

TorusMoment torusMomentResidual(const DiagonalQuiver& dq) {
  dq.validate();
  TorusMoment t;
  const int n = dq.n;
  for (int k = 1; k < n; ++k) {
    std::vector<cplx> c(k);
    std::vector<double> r(k);
    for (int i = 0; i < k; ++i) {
      const cplx nu = dq.nu[k - 1][i], mu = dq.mu[k - 1][i];
      c[i] = -mu * nu;
      r[i] = std::norm(mu) - std::norm(nu);
      if (i < k - 1) {
        const cplx nl = dq.nu[k - 2][i], ml = dq.mu[k - 2][i];
        c[i] += nl * ml;
        r[i] += std::norm(nl) - std::norm(ml);
      }
    }
    cplx mc = 0;
    double mr = 0;
    for (int i = 0; i < k; ++i) {
      mc += c[i];
      mr += r[i];
    }
    mc /= double(k);
    mr /= double(k);
    double sc = 0, sr = 0;
    for (int i = 0; i < k; ++i) {
      sc += std::norm(c[i] - mc);
      sr += (r[i] - mr) * (r[i] - mr);
    }
    t.levels.lambdaC.push_back(mc);
    t.levels.lambdaR.push_back(mr);
    t.residualC = std::max(t.residualC, std::sqrt(sc));
    t.residualR = std::max(t.residualR, std::sqrt(sr));
  }
  return t;
}

bool isDiagHKS(const DiagonalQuiver& dq, double tol) {
  dq.validate();
  for (int k = 1; k < dq.n; ++k)
    for (int i = 0; i < k; ++i)
      if (std::abs(dq.nu[k - 1][i]) <= tol && std::abs(dq.mu[k - 1][i]) <= tol) return false;
  return true;
}

DiagonalQuiver solveDiagonal(const MomentValue& m, std::mt19937_64* rng) {
  const int n = m.size() + 1;
  DiagonalQuiver dq = DiagonalQuiver::zero(n);
  std::uniform_real_distribution<double> U(0.0, 2.0 * M_PI);
  for (int k = 1; k < n; ++k)
    for (int i = 1; i <= k; ++i) {
      cplx vc = 0;
      double vr = 0;
      for (int l = i; l <= k; ++l) {
        vc -= m.lambdaC[l - 1];
        vr -= m.lambdaR[l - 1];
      }
      const double a = (vr + std::sqrt(vr * vr + 4.0 * std::norm(vc))) / 2.0;
      if (a <= 0) {
        // nu = 0 and |mu|^2 = -vr
        cplx ph = rng ? std::polar(1.0, U(*rng)) : cplx(1.0);
        dq.mu[k - 1][i - 1] = std::sqrt(std::max(0.0, -vr)) * ph;
        continue;
      }
      cplx nu = std::sqrt(a) * (rng ? std::polar(1.0, U(*rng)) : cplx(1.0));
      dq.nu[k - 1][i - 1] = nu;
      dq.mu[k - 1][i - 1] = vc / nu;
    }
  return dq;
}

DiagonalQuiver torusAct(const DiagonalQuiver& dq, const std::vector<std::vector<cplx>>& t) {
  dq.validate();
  if (int(t.size()) != dq.n) throw InputError("torus element needs one row per level");
  DiagonalQuiver out = dq;
  for (int k = 1; k < dq.n; ++k)
    for (int i = 0; i < k; ++i) {
      out.nu[k - 1][i] = t[k][i] * dq.nu[k - 1][i] * (1.0 / t[k - 1][i]);
      out.mu[k - 1][i] = t[k - 1][i] * dq.mu[k - 1][i] * (1.0 / t[k][i]);
    }
  return out;
}

ArrangementPoint ArrangementPoint::fromTau(std::vector<Eigen::Vector3d> tau) {
  ArrangementPoint p;
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (auto& v : tau) mean += v;
  mean /= double(tau.size());
  for (auto& v : tau) v -= mean;
  p.tau = tau;
  const int n = int(tau.size());
  p.s.assign(n - 1, Eigen::Vector3d::Zero());
  for (int j = 1; j < n; ++j)
    for (int l = j + 1; l <= n; ++l) p.s[j - 1] += tau[l - 1];
  return p;
}

ArrangementPoint ArrangementPoint::fromMoment(const MomentValue& m) {
  const int n = m.size() + 1;
  std::vector<Eigen::Vector3d> tau(n, Eigen::Vector3d::Zero());
  for (int j = 2; j <= n; ++j) tau[j - 1] = tau[j - 2] + m.r3(j - 1);
  return fromTau(tau);
}

MomentValue ArrangementPoint::levels() const {
  MomentValue m;
  for (size_t k = 1; k < tau.size(); ++k) {
    Eigen::Vector3d d = tau[k] - tau[k - 1];
    m.lambdaC.push_back(cplx(d[0], d[1]));
    m.lambdaR.push_back(2.0 * d[2]);
  }
  return m;
}

EquivRelation rootArrangementStratum(const ArrangementPoint& p, double tol) {
  const int n = int(p.tau.size());
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if ((p.tau[i - 1] - p.tau[j - 1]).norm() <= tol) pairs.push_back({i, j});
  return EquivRelation::generatedBy(n, pairs);
}

Subtorus stabilizerSubtorus(int n, const std::vector<std::pair<int, int>>& S) {
  Subtorus t;
  Eigen::MatrixXd span(0, n - 1);
  for (auto [i, j] : S) {
    if (i < 1 || j > n || i >= j) throw InputError("pairs must satisfy 1 <= i < j <= n");
    std::vector<int> e(n - 1, 0);
    for (int k = i; k < j; ++k) e[k - 1] = 1;
    t.generators.push_back(e);
    Eigen::MatrixXd next(span.rows() + 1, n - 1);
    next.topRows(span.rows()) = span;
    for (int k = 0; k < n - 1; ++k) next(span.rows(), k) = e[k];
    if (Eigen::FullPivLU<Eigen::MatrixXd>(next).rank() > span.rows()) {
      span = next;
      t.basis.push_back(e);
    }
  }
  return t;
}

}  // namespace qik
