#include "qik/nahm.hpp"

#include <cmath>
#include <limits>

namespace qik {

namespace {

constexpr int kCyc[3][3] = {{1, 2, 3}, {2, 3, 1}, {3, 1, 2}};

using Triple = std::array<Mat, 3>;

Triple rhs(const Triple& T, const Mat& T0) {
  Triple d;
  for (int c = 0; c < 3; ++c) {
    const int i = kCyc[c][0] - 1, j = kCyc[c][1] - 1, k = kCyc[c][2] - 1;
    d[i] = commutator(T[j], T[k]);
    if (T0.size()) d[i] -= commutator(T0, T[i]);
  }
  return d;
}

Triple axpy(const Triple& a, double h, const Triple& b) {
  Triple out;
  for (int i = 0; i < 3; ++i) out[i] = a[i] + h * b[i];
  return out;
}

double inner(const Mat& A, const Mat& B) { return -(A * B).trace().real(); }

void checkGrid(const NahmSolution& s) {
  if (s.grid.size() != s.values.size()) throw InputError("grid and values differ in length");
  for (size_t m = 1; m < s.grid.size(); ++m)
    if (!(s.grid[m] > s.grid[m - 1])) throw InputError("grid is not strictly increasing");
}

// Rows of the scaled design (T/t)^p, p = 0..3, over the tail samples.
struct TailFit {
  std::vector<size_t> rows;
  Eigen::MatrixXd design;
  double tmax = 0;
};

TailFit tailDesign(const std::vector<double>& grid) {
  TailFit f;
  f.tmax = grid.back();
  if (f.tmax < 10.0) throw PreconditionError("tail fit needs T_max >= 10");
  for (size_t m = 0; m < grid.size(); ++m)
    if (grid[m] >= f.tmax / 2) f.rows.push_back(m);
  if (f.rows.size() < 8) throw PreconditionError("tail window has too few samples");
  f.design.resize(Eigen::Index(f.rows.size()), 4);
  for (size_t r = 0; r < f.rows.size(); ++r)
    for (int p = 0; p < 4; ++p) f.design(Eigen::Index(r), p) = std::pow(f.tmax / grid[f.rows[r]], p);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(f.design);
  const auto& sv = svd.singularValues();
  if (sv(3) <= 1e-12 * sv(0)) throw NumericalError("tail fit is ill conditioned");
  return f;
}

// Coefficients of 1, 1/t, 1/t^2, 1/t^3 for one matrix-valued series.
std::array<Mat, 4> fitSeries(const TailFit& f, const std::function<const Mat&(size_t)>& at, double& resid) {
  const Mat& first = at(f.rows.front());
  const Eigen::Index nr = first.rows(), nc = first.cols();
  Eigen::MatrixXcd Y(Eigen::Index(f.rows.size()), nr * nc);
  for (size_t r = 0; r < f.rows.size(); ++r) {
    const Mat& M = at(f.rows[r]);
    for (Eigen::Index e = 0; e < nr * nc; ++e) Y(Eigen::Index(r), e) = M.data()[e];
  }
  const Eigen::MatrixXcd D = f.design.cast<cplx>();
  const Eigen::MatrixXcd C = D.colPivHouseholderQr().solve(Y);
  resid = std::max(resid, (D * C - Y).rowwise().norm().maxCoeff());
  std::array<Mat, 4> out;
  for (int p = 0; p < 4; ++p) {
    Mat M(nr, nc);
    for (Eigen::Index e = 0; e < nr * nc; ++e) M.data()[e] = C(p, e) * std::pow(f.tmax, p);
    out[p] = antiHermitianPart(M);
  }
  return out;
}

}  // namespace

Mat su2Generator(int i) {
  Mat s = Mat::Zero(2, 2);
  const cplx I(0, 1);
  if (i == 1) s << 0, 1, 1, 0;
  else if (i == 2) s << 0, -I, I, 0;
  else if (i == 3) s << 1, 0, 0, -1;
  else throw InputError("su(2) generator index must be 1, 2 or 3");
  return -0.5 * I * s;
}

double nahmResidual(const NahmSolution& sol) {
  checkGrid(sol);
  if (sol.grid.size() < 3) throw InputError("residual needs at least three samples");
  double r = 0;
  for (size_t m = 1; m + 1 < sol.grid.size(); ++m) {
    const double h0 = sol.grid[m] - sol.grid[m - 1], h1 = sol.grid[m + 1] - sol.grid[m];
    const auto &a = sol.values[m - 1], &b = sol.values[m], &c = sol.values[m + 1];
    for (int cy = 0; cy < 3; ++cy) {
      const int i = kCyc[cy][0], j = kCyc[cy][1], k = kCyc[cy][2];
      const Mat d = (-h1 / (h0 * (h0 + h1))) * a[i] + ((h1 - h0) / (h0 * h1)) * b[i] + (h0 / (h1 * (h0 + h1))) * c[i];
      r = std::max(r, (d + commutator(b[0], b[i]) - commutator(b[j], b[k])).norm());
    }
  }
  return r;
}

NahmSolution integrate(const NahmQuad& init, const MatPath& T0, double t0, double t1, double step) {
  if (!(step > 0)) throw InputError("step must be positive");
  if (!(t1 > t0)) throw InputError("empty integration interval");
  const int n = int(init[1].rows());
  for (const auto& M : init) {
    if (M.rows() != n || M.cols() != n) throw InputError("initial data must be four n x n matrices");
    if ((M + M.adjoint()).norm() > 1e-10 * std::max(1.0, M.norm())) throw InputError("initial data is not anti-Hermitian");
  }
  auto t0At = [&](double t) -> Mat { return T0 ? antiHermitianPart(T0(t)) : Mat::Zero(n, n); };

  NahmSolution sol;
  sol.n = n;
  Triple T{init[1], init[2], init[3]};
  double t = t0;
  sol.grid.push_back(t);
  sol.values.push_back({t0At(t), T[0], T[1], T[2]});
  while (t < t1 - 1e-12 * std::max(1.0, std::abs(t1))) {
    const double h = std::min(step, t1 - t);
    const Mat A0 = t0At(t), Ah = t0At(t + h / 2), A1 = t0At(t + h);
    const Triple k1 = rhs(T, A0);
    const Triple k2 = rhs(axpy(T, h / 2, k1), Ah);
    const Triple k3 = rhs(axpy(T, h / 2, k2), Ah);
    const Triple k4 = rhs(axpy(T, h, k3), A1);
    double big = 0;
    for (int i = 0; i < 3; ++i) {
      Mat next = T[i] + (h / 6) * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      const Mat proj = antiHermitianPart(next);
      sol.maxProjection = std::max(sol.maxProjection, (next - proj).norm());
      T[i] = proj;
      big = std::max(big, T[i].norm());
    }
    t += h;
    if (!std::isfinite(big) || big > 1e8) {
      sol.truncated = true;
      sol.diagnostic = "blow-up near t = " + std::to_string(t);
      break;
    }
    sol.grid.push_back(t);
    sol.values.push_back({A1, T[0], T[1], T[2]});
  }
  return sol;
}

NahmSolution gaugeTransform(const NahmSolution& sol, const MatPath& g, const MatPath& gDot) {
  checkGrid(sol);
  NahmSolution out = sol;
  for (size_t m = 0; m < sol.grid.size(); ++m) {
    const double t = sol.grid[m];
    const Mat G = g(t);
    if (G.rows() != sol.n || (G * G.adjoint() - Mat::Identity(sol.n, sol.n)).norm() > 1e-10)
      throw InputError("gauge path is not unitary");
    Mat Gd;
    if (gDot) {
      Gd = gDot(t);
    } else {
      const double e = 1e-6 * std::max(1.0, std::abs(t));
      Gd = (g(t + e) - g(t - e)) / (2 * e);
    }
    const Mat Gi = G.adjoint();
    out.values[m][0] = antiHermitianPart(Mat(G * sol.values[m][0] * Gi - Gd * Gi));
    for (int i = 1; i < 4; ++i) out.values[m][i] = G * sol.values[m][i] * Gi;
  }
  return out;
}

AsymptoticData fitAsymptotics(const NahmSolution& sol) {
  checkGrid(sol);
  const TailFit f = tailDesign(sol.grid);
  AsymptoticData a;
  for (int i = 0; i < 3; ++i) {
    auto c = fitSeries(f, [&](size_t m) -> const Mat& { return sol.values[m][i + 1]; }, a.fitResidual);
    a.tau[i] = c[0];
    a.sigma[i] = c[1];
  }
  for (int x = 0; x < 3; ++x)
    for (int y = 0; y < 3; ++y) {
      if (x < y) a.tauCommutator = std::max(a.tauCommutator, commutator(a.tau[x], a.tau[y]).norm());
      a.tauSigma = std::max(a.tauSigma, commutator(a.tau[x], a.sigma[y]).norm());
    }
  for (int cy = 0; cy < 3; ++cy) {
    const int i = kCyc[cy][0] - 1, j = kCyc[cy][1] - 1, k = kCyc[cy][2] - 1;
    a.sigmaBracket = std::max(a.sigmaBracket, (commutator(a.sigma[i], a.sigma[j]) + a.sigma[k]).norm());
  }
  return a;
}

Centralizer commonCentralizer(const std::vector<Mat>& mats, double tol) {
  if (mats.empty()) throw InputError("no matrices given");
  const int n = int(mats.front().rows());
  // Orthonormal real basis of u(n).
  std::vector<Mat> basis;
  const cplx I(0, 1);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) {
      Mat E = Mat::Zero(n, n);
      if (a == b) {
        E(a, a) = I;
        basis.push_back(E);
        continue;
      }
      E(a, b) = 1.0 / std::sqrt(2.0);
      E(b, a) = -1.0 / std::sqrt(2.0);
      basis.push_back(E);
      E(a, b) = I / std::sqrt(2.0);
      E(b, a) = I / std::sqrt(2.0);
      basis.push_back(E);
    }
  double scale = 1.0;
  for (auto& M : mats) scale = std::max(scale, M.norm());
  const Eigen::Index rows = Eigen::Index(mats.size()) * 2 * n * n + 1;
  Eigen::MatrixXd op = Eigen::MatrixXd::Zero(rows, Eigen::Index(basis.size()));
  for (size_t c = 0; c < basis.size(); ++c) {
    Eigen::Index r = 0;
    for (auto& M : mats) {
      const Mat C = commutator(M, basis[c]);
      for (Eigen::Index e = 0; e < C.size(); ++e) {
        op(r++, Eigen::Index(c)) = C.data()[e].real();
        op(r++, Eigen::Index(c)) = C.data()[e].imag();
      }
    }
    op(r, Eigen::Index(c)) = scale * basis[c].trace().imag();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(op, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > tol * scale) ++rank;
  Centralizer out;
  out.dimension = int(basis.size()) - rank;
  for (int k = rank; k < int(basis.size()); ++k) {
    Mat M = Mat::Zero(n, n);
    for (size_t c = 0; c < basis.size(); ++c) M += svd.matrixV()(Eigen::Index(c), k) * basis[c];
    out.basis.push_back(M);
  }
  return out;
}

BielawskiResult bielawskiNorm(const NahmSolution& sol, const NahmSolution& tangent, double c) {
  checkGrid(tangent);
  if (sol.grid != tangent.grid) throw InputError("tangent must be sampled on the solution grid");
  const TailFit f = tailDesign(tangent.grid);
  double resid = 0;
  std::array<Mat, 4> inf;
  double infNorm = 0;
  for (int i = 0; i < 4; ++i) {
    inf[i] = fitSeries(f, [&](size_t m) -> const Mat& { return tangent.values[m][i]; }, resid)[0];
    infNorm += inner(inf[i], inf[i]);
  }
  BielawskiResult out;
  for (const auto& X : tangent.values) {
    double v = -infNorm;
    for (int i = 0; i < 4; ++i) v += inner(X[i], X[i]);
    out.integrand.push_back(v);
  }
  for (size_t m = 1; m < tangent.grid.size(); ++m)
    out.value += 0.5 * (tangent.grid[m] - tangent.grid[m - 1]) * (out.integrand[m] + out.integrand[m - 1]);
  out.value += c * infNorm;

  // log-log regression of |integrand| on the tail window
  double tailMax = 0;
  for (size_t m : f.rows) tailMax = std::max(tailMax, std::abs(out.integrand[m]));
  const double noise = 1e-9 * std::max(1.0, infNorm);
  if (tailMax <= noise) {
    out.tailSlope = std::numeric_limits<double>::infinity();
    out.convergent = true;
    return out;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (size_t m : f.rows) {
    const double y = std::abs(out.integrand[m]);
    if (y <= noise) continue;
    const double lx = std::log(tangent.grid[m]), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++cnt;
  }
  if (cnt < 4) throw NumericalError("tail of the integrand has too few usable samples");
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  out.tailSlope = -slope;
  out.convergent = out.tailSlope > 1.1;
  return out;
}

}  // namespace qik
