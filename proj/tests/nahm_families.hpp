#pragma once

#include <random>

#include "qik/nahm.hpp"

namespace qik::testing {

// Background on su(3): tau_i = a_i D with D = i diag(1,1,-2)/sqrt 6, plus the
// su(2) pole solution -e_i/(t+1) in the upper 2x2 block. D is scalar on the
// block, so the sum solves the equations exactly.
struct NahmFamily {
  Eigen::Vector3d a;
  Eigen::Vector3d b;  // tau direction
  Mat B;              // rotation generator
  NahmSolution base;
  NahmSolution tangent;
  double deltaDotEps = 0;  // sum_i <delta_i, eps_i> of the tangent's expansion
};

inline Mat blockD() {
  Mat D = Mat::Zero(3, 3);
  D.diagonal() << cplx(0, 1), cplx(0, 1), cplx(0, -2);
  return D / std::sqrt(6.0);
}

inline Mat embed2(const Mat& m) {
  Mat M = Mat::Zero(3, 3);
  M.topLeftCorner(2, 2) = m;
  return M;
}

inline Mat randomAntiHermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Mat A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cplx(N(rng), N(rng));
  return antiHermitianPart(A);
}

// Closed form of the background moved by s, sampled on a uniform grid.
// Forward integration is useless here: off-centraliser modes grow like
// exp(|tau_a - tau_b| t).
inline NahmSolution familyMember(const NahmFamily& f, double s, double tmax, double step) {
  const Mat g = expm(Mat(s * f.B));
  NahmSolution out;
  out.n = 3;
  const int M = int(std::lround(tmax / step));
  for (int m = 0; m <= M; ++m) {
    const double t = m * step;
    NahmQuad q;
    q[0] = Mat::Zero(3, 3);
    for (int i = 1; i <= 3; ++i)
      q[i] = g * ((f.a(i - 1) + s * f.b(i - 1)) * blockD() + embed2(Mat(-su2Generator(i) / (t + 1)))) * g.adjoint();
    out.grid.push_back(t);
    out.values.push_back(q);
  }
  return out;
}

// fixedCentralizer: B inside the su(2) block, so every member keeps C(tau).
// Otherwise B is a generic element of su(3) and the tangent leaves the stratum.
inline NahmFamily makeFamily(bool fixedCentralizer, std::mt19937_64& rng, double tmax = 50.0, double step = 0.02) {
  std::normal_distribution<double> N;
  NahmFamily f;
  f.a = Eigen::Vector3d(N(rng), N(rng), N(rng)) * 3.0;
  f.b = Eigen::Vector3d(N(rng), N(rng), N(rng));
  f.B = fixedCentralizer ? embed2(tracelessPart(randomAntiHermitian(2, rng))) : tracelessPart(randomAntiHermitian(3, rng));
  const double h = 1e-5;
  f.base = familyMember(f, 0.0, tmax, step);
  const NahmSolution plus = familyMember(f, h, tmax, step);
  const NahmSolution minus = familyMember(f, -h, tmax, step);
  f.tangent = f.base;
  for (size_t m = 0; m < f.base.grid.size(); ++m)
    for (int i = 0; i < 4; ++i) f.tangent.values[m][i] = (plus.values[m][i] - minus.values[m][i]) / (2 * h);
  // delta_i = b_i D + [B, tau_i], eps_i = [B, -e_i]
  for (int i = 1; i <= 3; ++i) {
    const Mat tau = f.a(i - 1) * blockD();
    const Mat delta = f.b(i - 1) * blockD() + commutator(f.B, tau);
    const Mat eps = commutator(f.B, embed2(Mat(-su2Generator(i))));
    f.deltaDotEps += -(delta * eps).trace().real();
  }
  return f;
}

// Perturbation of a commuting triple along the decaying directions of the
// linearised equations, scaled to the given size.
inline std::array<Mat, 3> stablePerturbation(const std::array<Mat, 3>& tau, double size, std::mt19937_64& rng) {
  const int n = int(tau[0].rows());
  std::vector<Mat> basis;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Mat E = Mat::Zero(n, n);
      if (a == b) E(a, a) = cplx(0, 1);
      else if (a < b) E(a, b) = 1.0, E(b, a) = -1.0;
      else E(a, b) = cplx(0, 1), E(b, a) = cplx(0, 1);
      basis.push_back(E);
    }
  const int d = int(basis.size());
  auto coords = [&](const Mat& M) {
    Eigen::VectorXd v(d);
    for (int c = 0; c < d; ++c) v(c) = (basis[c].adjoint() * M).trace().real() / basis[c].squaredNorm();
    return v;
  };
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(3 * d, 3 * d);
  for (int i = 0; i < 3; ++i)
    for (int c = 0; c < d; ++c) {
      std::array<Mat, 3> x{Mat::Zero(n, n), Mat::Zero(n, n), Mat::Zero(n, n)};
      x[i] = basis[c];
      for (int r = 0; r < 3; ++r) {
        const int j = (r + 1) % 3, k = (r + 2) % 3;
        L.block(r * d, i * d + c, d, 1) = coords(commutator(tau[j], x[k]) + commutator(x[j], tau[k]));
      }
    }
  Eigen::EigenSolver<Eigen::MatrixXd> es(L);
  std::normal_distribution<double> N;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * d);
  for (int e = 0; e < 3 * d; ++e)
    if (es.eigenvalues()(e).real() < -0.5) v += N(rng) * es.eigenvectors().col(e).real();
  v *= size / v.norm();
  std::array<Mat, 3> out;
  for (int i = 0; i < 3; ++i) {
    out[i] = Mat::Zero(n, n);
    for (int c = 0; c < d; ++c) out[i] += v(i * d + c) * basis[c];
  }
  return out;
}

}  // namespace qik::testing
