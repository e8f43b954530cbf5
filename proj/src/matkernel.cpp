#include "qik/matkernel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <unsupported/Eigen/MatrixFunctions>

namespace qik {

namespace {

void requireSquare(const Mat& A) {
  if (A.rows() != A.cols()) throw InputError("matrix is not square");
  if (A.rows() > kMaxDim) throw InputError("matrix dimension exceeds 16");
}

// Agglomerative grouping. A defective eigenvalue of multiplicity m splits
// by about (noise)^(1/m) under perturbation, so two groups merge when their
// centroids are within max(tol, 2 (tol * scale)^(1/m)) for the merged size m.
std::vector<std::vector<int>> linkage(const Vec& ev, double tol, double scale) {
  std::vector<std::vector<int>> groups;
  std::vector<cplx> centre;
  for (int i = 0; i < ev.size(); ++i) {
    groups.push_back({i});
    centre.push_back(ev[i]);
  }
  for (;;) {
    int bi = -1, bj = -1;
    double best = 0;
    for (size_t i = 0; i < groups.size(); ++i)
      for (size_t j = i + 1; j < groups.size(); ++j) {
        const double m = double(groups[i].size() + groups[j].size());
        const double radius = std::max(tol, 2.0 * std::pow(tol * scale, 1.0 / m));
        const double d = std::abs(centre[i] - centre[j]);
        if (d <= radius && (bi < 0 || d / radius < best)) {
          bi = int(i);
          bj = int(j);
          best = d / radius;
        }
      }
    if (bi < 0) break;
    const double wi = double(groups[bi].size()), wj = double(groups[bj].size());
    centre[bi] = (wi * centre[bi] + wj * centre[bj]) / (wi + wj);
    groups[bi].insert(groups[bi].end(), groups[bj].begin(), groups[bj].end());
    groups.erase(groups.begin() + bj);
    centre.erase(centre.begin() + bj);
  }
  return groups;
}

bool lessCplx(cplx a, cplx b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

Vec eigenvalues(const Mat& A) {
  requireSquare(A);
  if (A.rows() == 0) return Vec(0);
  Eigen::ComplexSchur<Mat> schur(A, false);
  if (schur.info() != Eigen::Success)
    throw NumericalError("Schur iteration did not converge");
  return schur.matrixT().diagonal();
}

int rankAbove(const Mat& A, double thresh) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& s = svd.singularValues();
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > thresh) ++r;
  return r;
}

int numericalRank(const Mat& A, double tol) {
  if (A.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(A);
  const auto& s = svd.singularValues();
  if (s[0] == 0.0) return 0;
  const double thresh = tol * double(std::max(A.rows(), A.cols())) * s[0];
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > thresh) ++r;
  return r;
}

Mat kernelBasis(const Mat& A, int dim) {
  const int c = int(A.cols());
  if (dim <= 0) return Mat(c, 0);
  if (A.rows() == 0) return Mat::Identity(c, c).leftCols(dim);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(dim);
}

Mat kernelBasisAbove(const Mat& A, double thresh) {
  return kernelBasis(A, int(A.cols()) - rankAbove(A, thresh));
}

Mat matrixPower(const Mat& A, int k) {
  Mat P = Mat::Identity(A.rows(), A.cols());
  for (int i = 0; i < k; ++i) P = P * A;
  return P;
}

Mat expm(const Mat& A) { return A.exp(); }

std::vector<int> conjugatePartition(const std::vector<int>& p) {
  std::vector<int> out;
  if (p.empty()) return out;
  const int top = *std::max_element(p.begin(), p.end());
  for (int k = 1; k <= top; ++k) {
    int c = 0;
    for (int x : p)
      if (x >= k) ++c;
    out.push_back(c);
  }
  return out;
}

std::vector<int> partitionAt(const Mat& A, cplx value, int mult, double tol) {
  const int n = int(A.rows());
  Mat M = A;
  M.diagonal().array() -= value;
  const double scale = std::max(1.0, A.norm());
  // counts[k-1] = nullity((A - value)^k) - nullity((A - value)^{k-1})
  std::vector<int> counts;
  Mat P = Mat::Identity(n, n);
  int prev = 0;
  for (int k = 1; k <= mult; ++k) {
    P = P * M;
    const double thresh = tol * double(n) * std::pow(scale, k);
    int nul = std::min(n - rankAbove(P, thresh), mult);
    if (nul <= prev) break;
    counts.push_back(nul - prev);
    prev = nul;
  }
  // counts is weakly decreasing for exact data; enforce it for noisy data.
  for (size_t i = 1; i < counts.size(); ++i) counts[i] = std::min(counts[i], counts[i - 1]);
  std::vector<int> p = conjugatePartition(counts);
  int sum = std::accumulate(p.begin(), p.end(), 0);
  // Stalled nullities (noise) leave the remainder as trivial blocks.
  while (sum < mult) {
    p.push_back(1);
    ++sum;
  }
  return p;
}

std::vector<EigenCluster> schurEigenCluster(const Mat& A, double tol) {
  requireSquare(A);
  if (!(tol > 0)) throw InputError("tolerance must be positive");
  const int n = int(A.rows());
  std::vector<EigenCluster> out;
  if (n == 0) return out;
  Vec ev = eigenvalues(A);
  auto groups = linkage(ev, tol, std::max(1.0, A.norm()));
  for (auto& g : groups) {
    EigenCluster c;
    cplx mean = 0;
    for (int i : g) mean += ev[i];
    c.value = mean / double(g.size());
    c.multiplicity = int(g.size());
    Mat M = A;
    M.diagonal().array() -= c.value;
    c.basis = kernelBasis(matrixPower(M, c.multiplicity), c.multiplicity);
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end(),
            [](const EigenCluster& a, const EigenCluster& b) { return lessCplx(a.value, b.value); });
  return out;
}

std::vector<JordanType> jordanType(const Mat& A, double tol) {
  auto clusters = schurEigenCluster(A, tol);
  std::vector<JordanType> out;
  for (size_t i = 0; i < clusters.size(); ++i) {
    JordanType j;
    j.eigenvalue = clusters[i].value;
    j.partition = partitionAt(A, clusters[i].value, clusters[i].multiplicity, tol);
    for (size_t k = 0; k < clusters.size(); ++k)
      if (k != i && std::abs(clusters[k].value - clusters[i].value) < 10 * tol) j.illConditioned = true;
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<Mat> generalizedEigenprojectors(const Mat& A, double tol) {
  auto clusters = schurEigenCluster(A, tol);
  const int n = int(A.rows());
  std::vector<Mat> out;
  for (auto& c : clusters) {
    Mat M = A;
    M.diagonal().array() -= c.value;
    Mat Mm = matrixPower(M, c.multiplicity);
    Mat B = c.basis;
    Mat L = kernelBasis(Mm.adjoint(), c.multiplicity);
    Mat P = B * (L.adjoint() * B).inverse() * L.adjoint();
    out.push_back(P);
  }
  if (clusters.empty()) out.push_back(Mat::Identity(n, n));
  return out;
}

JordanBasis jordanBasis(const Mat& A, double tol) {
  requireSquare(A);
  const int n = int(A.rows());
  JordanBasis out;
  out.P = Mat(n, 0);
  for (auto& c : schurEigenCluster(A, tol)) {
    const int m = c.multiplicity;
    const Mat& W = c.basis;
    Mat M = A;
    M.diagonal().array() -= c.value;
    // restriction of A - value to the invariant subspace
    const Mat N = W.adjoint() * M * W;
    std::vector<int> p = partitionAt(A, c.value, m, tol);
    const int top = p.front();
    std::vector<int> kerDim(top + 1, 0);
    for (int j = 1; j <= top; ++j)
      for (int s : p) kerDim[j] += std::min(s, j);
    std::vector<std::pair<Vec, int>> heads;
    for (int s = top; s >= 1; --s) {
      int count = 0;
      for (int x : p) count += (x == s);
      if (count == 0) continue;
      const Mat Ks = kernelBasis(matrixPower(N, s), kerDim[s]);
      Mat U = kernelBasis(matrixPower(N, s - 1), kerDim[s - 1]);
      for (auto& [v, len] : heads) {
        U.conservativeResize(m, U.cols() + 1);
        U.col(U.cols() - 1) = matrixPower(N, len - s) * v;
      }
      Mat proj = Ks;
      if (U.cols() > 0) {
        Eigen::HouseholderQR<Mat> qr(U);
        const int r = rankAbove(U, 1e-12 * std::max(1.0, U.norm()));
        Mat Q = qr.householderQ() * Mat::Identity(m, r);
        proj = Ks - Q * (Q.adjoint() * Ks);
      }
      Eigen::JacobiSVD<Mat> svd(proj, Eigen::ComputeThinU);
      for (int i = 0; i < count; ++i) heads.push_back({svd.matrixU().col(i), s});
    }
    for (auto& [v, len] : heads) {
      for (int t = len - 1; t >= 0; --t) {
        out.P.conservativeResize(n, out.P.cols() + 1);
        out.P.col(out.P.cols() - 1) = W * (matrixPower(N, t) * v);
      }
      out.blocks.push_back({c.value, len});
    }
  }
  return out;
}

Mat jordanMatrix(const std::vector<JordanBlock>& blocks) {
  int n = 0;
  for (auto& b : blocks) n += b.size;
  Mat J = Mat::Zero(n, n);
  int at = 0;
  for (auto& b : blocks) {
    for (int i = 0; i < b.size; ++i) {
      J(at + i, at + i) = b.eigenvalue;
      if (i + 1 < b.size) J(at + i, at + i + 1) = 1.0;
    }
    at += b.size;
  }
  return J;
}

Mat blockDiagonal(const std::vector<Mat>& blocks) {
  Eigen::Index r = 0, c = 0;
  for (auto& b : blocks) {
    r += b.rows();
    c += b.cols();
  }
  Mat out = Mat::Zero(r, c);
  r = c = 0;
  for (auto& b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

}  // namespace qik
