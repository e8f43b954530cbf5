#include "qik/forms.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace qik {

const char* formName(StandardForm f) {
  switch (f) {
    case StandardForm::betaStd: return "betaStd";
    case StandardForm::jcf: return "jcf";
    default: return "diagonal";
  }
}

namespace {

Mat rightInverse(const Mat& A) { return A.adjoint() * (A * A.adjoint()).inverse(); }
Mat leftInverse(const Mat& A) { return (A.adjoint() * A).inverse() * A.adjoint(); }

Mat zeroIdentity(int m, int k) {
  Mat b = Mat::Zero(m, m + k);
  b.rightCols(m).setIdentity();
  return b;
}

double quiverScale(const Quiver& q) {
  double s = 1.0;
  for (auto& a : q.alphas) s = std::max(s, a.norm());
  for (auto& b : q.betas) s = std::max(s, b.norm());
  return s;
}

double snap(Mat& M, double thresh) {
  double worst = 0;
  for (Eigen::Index i = 0; i < M.size(); ++i) {
    cplx& x = M.data()[i];
    if (x != cplx(0) && std::abs(x) < thresh) {
      worst = std::max(worst, std::abs(x));
      x = 0;
    }
  }
  return worst;
}

GroupElement fromBases(const std::vector<Mat>& B) {
  GroupElement g;
  for (auto& b : B) g.factors.push_back(b.rows() == 0 ? b : Mat(b.inverse()));
  return g;
}

void requireComplexEquations(const Quiver& q) {
  if (complexMomentResidual(q).residual > 1e-8)
    throw PreconditionError("complex moment equations do not hold to 1e-8");
}

}  // namespace

StandardizedQuiver standardizeBeta(const Quiver& q) {
  q.validate();
  requireComplexEquations(q);
  const int L = q.levels();
  // B[k-1] has the new basis of V_k as columns; g_k = B_k^{-1}.
  std::vector<Mat> B(L);
  B[0] = Mat::Identity(q.dim(1), q.dim(1));
  for (int k = 1; k < L; ++k) {
    const int m = q.dim(k), m1 = q.dim(k + 1);
    const Mat& beta = q.beta(k);
    if (rankAbove(beta, 1e-10 * std::max(1.0, beta.norm())) < m)
      throw PreconditionError("beta_" + std::to_string(k) + " is not surjective");
    const Mat gb = B[k - 1].inverse() * beta;
    if (gb == zeroIdentity(m, m1 - m)) {
      B[k] = Mat::Identity(m1, m1);
      continue;
    }
    B[k].resize(m1, m1);
    B[k] << kernelBasis(gb, m1 - m), rightInverse(gb);
  }
  const int n = q.n;
  const cplx det = B[L - 1].determinant();
  if (det != cplx(1)) {
    const cplx c = std::pow(det, 1.0 / n);
    for (auto& b : B) b /= c;
  }
  StandardizedQuiver out;
  out.witness = fromBases(B);
  out.quiver = applyGroup(q, out.witness);
  out.form = StandardForm::betaStd;
  for (int k = 1; k < L; ++k) {
    const Mat target = zeroIdentity(q.dim(k), q.dim(k + 1) - q.dim(k));
    if (target.size() > 0)
      out.snapSize = std::max(out.snapSize, (out.quiver.beta(k) - target).cwiseAbs().maxCoeff());
    out.quiver.beta(k) = target;
  }
  if (out.snapSize > 1e-8 * quiverScale(q)) throw NumericalError("beta standardisation lost accuracy");
  return out;
}

Quiver alphaFromX(const Mat& X0, const std::vector<int>& mDims, const std::vector<cplx>& lambdaC,
                  bool requireOpen, double tol) {
  const int n = int(X0.rows());
  if (X0.cols() != n || n < 1) throw InputError("X0 must be square");
  if (int(mDims.size()) != n + 1 || mDims.front() != 0 || mDims.back() != n)
    throw InputError("mDims must run m_0 = 0 .. m_n = n");
  for (int k = 1; k <= n; ++k)
    if (mDims[k] < mDims[k - 1]) throw InputError("mDims must be non-decreasing");
  if (int(lambdaC.size()) != n - 1) throw InputError("need n-1 complex levels");
  if (std::abs(X0.trace()) > tol * std::max(1.0, X0.norm())) throw PreconditionError("X0 is not traceless");

  cplx trX = 0;
  for (int k = 1; k < n; ++k) trX -= lambdaC[k - 1] * double(mDims[k]);
  Mat A = X0;
  A.diagonal().array() += trX / double(n);
  const double scale = std::max(1.0, A.norm());

  Quiver q = zeroQuiver(std::vector<int>(mDims.begin() + 1, mDims.end()));
  for (int i = n - 1; i >= 0; --i) {
    const int m = mDims[i], k = mDims[i + 1] - m;
    if (A.leftCols(k).norm() > tol * scale)
      throw PreconditionError("X0 violates the parabolic pattern at level " + std::to_string(i + 1));
    if (i == 0) break;
    q.alpha(i) = A.rightCols(m);
    q.beta(i) = zeroIdentity(m, k);
    if (requireOpen && rankAbove(q.alpha(i), tol * scale) < m)
      throw PreconditionError("alpha_" + std::to_string(i) + " is not injective");
    A = A.bottomRightCorner(m, m).eval();
    A.diagonal().array() += lambdaC[i - 1];
  }
  return q;
}

Mat parabolicX0(const std::vector<int>& mDims, const std::vector<cplx>& lambdaC, std::mt19937_64& rng) {
  const int n = mDims.back();
  Mat X = randomMatrix(n, n, rng);
  int at = 0;
  cplx value = 0;
  for (int i = n - 1; i >= 0; --i) {
    const int k = mDims[i + 1] - mDims[i];
    X.block(at, at, n - at, k).setZero();
    X.block(at, at, k, k).diagonal().setConstant(value);
    at += k;
    if (i > 0) value -= lambdaC[i - 1];
  }
  return tracelessPart(X);
}

StandardizedQuiver toJCF(const Quiver& q, double tol, JcfShape shape, bool unimodular) {
  q.validate();
  requireComplexEquations(q);
  const int L = q.levels();
  const double scale = quiverScale(q);
  for (int k = 1; k < L; ++k) {
    if (rankAbove(q.alpha(k), 1e-8 * scale) < q.dim(k))
      throw PreconditionError("alpha_" + std::to_string(k) + " is not injective");
    if (rankAbove(q.beta(k), 1e-8 * scale) < q.dim(k))
      throw PreconditionError("beta_" + std::to_string(k) + " is not surjective");
  }
  const std::vector<cplx> lambda = complexMomentResidual(q).lambdaC;
  std::vector<cplx> nu(L, 0.0);  // nu[j-1] = nu_j
  for (int j = L - 1; j >= 1; --j) nu[j - 1] = nu[j] + lambda[j - 1];

  const Mat X = bigX(q).X;
  const double xs = std::max(1.0, X.norm());
  JordanBasis jb = jordanBasis(X, tol);

  struct Tagged {
    JordanBlock block;
    int key;
    int start;
  };
  std::vector<Tagged> tagged;
  int start = 0;
  for (auto& b : jb.blocks) {
    int key = L + 1;
    for (int j = 1; j <= L && key > L; ++j)
      if (std::abs(b.eigenvalue + nu[j - 1]) <= 1e-6 * xs) key = j;
    JordanBlock exact = b;
    if (key <= L) exact.eigenvalue = -nu[key - 1];
    tagged.push_back({exact, key, start});
    start += b.size;
  }
  std::stable_sort(tagged.begin(), tagged.end(), [](const Tagged& a, const Tagged& b) {
    if (a.key != b.key) return a.key < b.key;
    return a.block.size > b.block.size;
  });

  const int n = q.n;
  std::vector<Mat> B(L);
  B[L - 1].resize(n, n);
  std::vector<JordanBlock> blocks;
  {
    int at = 0;
    for (auto& t : tagged) {
      B[L - 1].middleCols(at, t.block.size) = jb.P.middleCols(t.start, t.block.size);
      at += t.block.size;
      blocks.push_back(t.block);
    }
  }
  B[L - 1] /= std::pow(B[L - 1].determinant(), 1.0 / n);

  std::vector<JordanBlock> level = blocks;
  const double zeroTol = 1e-8 * xs;
  for (int k = L - 1; k >= 1; --k) {
    std::vector<int> keep;
    std::vector<JordanBlock> next;
    int at = 0, dropped = 0;
    for (auto& b : level) {
      const bool zero = std::abs(b.eigenvalue) <= zeroTol;
      for (int i = 0; i < b.size; ++i) {
        const bool drop = zero && (shape == JcfShape::betaShift ? i == 0 : i == b.size - 1);
        if (drop)
          ++dropped;
        else
          keep.push_back(at + i);
      }
      at += b.size;
      const int size = zero ? b.size - 1 : b.size;
      if (size > 0) next.push_back({b.eigenvalue + lambda[k - 1], size});
    }
    if (dropped != q.dim(k + 1) - q.dim(k))
      throw NumericalError("Jordan structure of alpha_k beta_k does not match the flag");
    Mat kept(q.dim(k + 1), int(keep.size()));
    for (size_t i = 0; i < keep.size(); ++i) kept.col(i) = B[k].col(keep[i]);
    B[k - 1] = shape == JcfShape::betaShift ? Mat(q.beta(k) * kept) : Mat(leftInverse(q.alpha(k)) * kept);
    level = next;
  }
  if (unimodular)
    for (int k = 0; k + 1 < L; ++k)
      if (B[k].rows() > 0) B[k] /= std::pow(B[k].determinant(), 1.0 / double(B[k].rows()));

  StandardizedQuiver out;
  out.form = StandardForm::jcf;
  out.shape = shape;
  out.blocks = blocks;
  out.witness = fromBases(B);
  out.quiver = applyGroup(q, out.witness);
  const double thresh = 1e-9 * xs;
  for (auto& a : out.quiver.alphas) out.snapSize = std::max(out.snapSize, snap(a, thresh));
  for (auto& b : out.quiver.betas) out.snapSize = std::max(out.snapSize, snap(b, thresh));
  const Mat J = jordanMatrix(blocks);
  if ((bigX(out.quiver).X - J).norm() > 1e-6 * xs) throw NumericalError("Jordan form not reached");
  return out;
}

namespace {

// Row of the single nonzero entry in each column; throws unless alpha is a
// scaled selection with increasing rows.
std::vector<int> selectionRows(const Mat& a) {
  std::vector<int> rows;
  for (int c = 0; c < a.cols(); ++c) {
    int r = -1;
    for (int i = 0; i < a.rows(); ++i) {
      if (a(i, c) == cplx(0)) continue;
      if (r >= 0) throw InputError("alpha is not a scaled selection");
      r = i;
    }
    if (r < 0 || (!rows.empty() && r <= rows.back())) throw InputError("alpha is not a scaled selection");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

Quiver toDiagonal(const StandardizedQuiver& s) {
  if (s.form != StandardForm::jcf || s.shape != JcfShape::alphaSelect)
    throw InputError("toDiagonal needs an alphaSelect Jordan form");
  Quiver out = s.quiver;
  for (int k = 1; k < out.levels(); ++k) {
    auto rows = selectionRows(out.alpha(k));
    Mat& b = out.beta(k);
    const double thresh = 1e-12 * std::max(1.0, b.norm());
    for (int c = 0; c < b.rows(); ++c)
      for (int j = 0; j < b.cols(); ++j) {
        if (j == rows[c]) continue;
        if (j != rows[c] + 1 && std::abs(b(c, j)) > thresh) throw InputError("beta is not upper bidiagonal");
        b(c, j) = 0;
      }
  }
  return out;
}

Quiver fromDiagonal(const Quiver& qT, const std::vector<JordanBlock>& blocks, const std::vector<cplx>& lambdaC) {
  qT.validate();
  const int L = qT.levels();
  if (int(lambdaC.size()) != L - 1) throw InputError("need one complex level per non-frame vertex");
  std::vector<bool> superdiag(qT.n, false);
  int at = 0;
  for (auto& b : blocks) {
    for (int i = 0; i + 1 < b.size; ++i) superdiag[at + i] = true;
    at += b.size;
  }
  if (at != qT.n) throw InputError("blocks do not cover C^n");
  Quiver q = qT;
  if (L < 2) return q;
  auto top = selectionRows(q.alpha(L - 1));
  for (int c = 0; c < int(top.size()); ++c)
    if (superdiag[top[c]]) q.beta(L - 1)(c, top[c] + 1) = 1.0 / q.alpha(L - 1)(top[c], c);
  for (int k = L - 1; k >= 2; --k) {
    Mat M = q.beta(k) * q.alpha(k);
    M.diagonal().array() += lambdaC[k - 1];
    auto rows = selectionRows(q.alpha(k - 1));
    for (int d = 0; d < int(rows.size()); ++d)
      if (rows[d] + 1 < M.cols()) q.beta(k - 1)(d, rows[d] + 1) = M(rows[d], rows[d] + 1) / q.alpha(k - 1)(rows[d], d);
  }
  return q;
}

TorusMatch torusBetween(const Quiver& a, const Quiver& b) {
  a.validate();
  b.validate();
  if (a.dims != b.dims || a.n != b.n) throw InputError("quivers have different shapes");
  const int L = a.levels();
  std::vector<int> offset(L + 1, 0);
  for (int k = 1; k <= L; ++k) offset[k] = offset[k - 1] + a.dim(k);
  const int total = offset[L];
  struct Edge {
    int to;
    cplx ratio;  // d[to] = d[from] * ratio
  };
  std::vector<std::vector<Edge>> adj(total);
  const double eps = 1e-12 * std::max(quiverScale(a), quiverScale(b));
  auto link = [&](int u, int v, cplx r) {
    adj[u].push_back({v, r});
    adj[v].push_back({u, 1.0 / r});
  };
  for (int k = 1; k < L; ++k) {
    for (int r = 0; r < a.dim(k + 1); ++r)
      for (int c = 0; c < a.dim(k); ++c) {
        const int lo = offset[k - 1] + c, hi = offset[k] + r;
        const cplx a1 = a.alpha(k)(r, c), a2 = b.alpha(k)(r, c);
        if (std::abs(a1) > eps && std::abs(a2) > eps) link(lo, hi, a2 / a1);
        const cplx b1 = a.beta(k)(c, r), b2 = b.beta(k)(c, r);
        if (std::abs(b1) > eps && std::abs(b2) > eps) link(lo, hi, b1 / b2);
      }
  }
  std::vector<cplx> d(total, 0.0);
  std::vector<bool> seen(total, false);
  for (int s = 0; s < total; ++s) {
    if (seen[s]) continue;
    seen[s] = true;
    d[s] = 1.0;
    std::deque<int> queue{s};
    while (!queue.empty()) {
      int u = queue.front();
      queue.pop_front();
      for (auto& e : adj[u])
        if (!seen[e.to]) {
          seen[e.to] = true;
          d[e.to] = d[u] * e.ratio;
          queue.push_back(e.to);
        }
    }
  }
  TorusMatch out;
  for (int k = 1; k <= L; ++k) {
    Mat f = Mat::Zero(a.dim(k), a.dim(k));
    for (int i = 0; i < a.dim(k); ++i) f(i, i) = d[offset[k - 1] + i];
    out.g.factors.push_back(f);
  }
  const cplx c = std::pow(out.g.factors.back().determinant(), 1.0 / a.n);
  for (auto& f : out.g.factors) f /= c;
  Quiver moved = applyGroup(a, out.g);
  for (int k = 1; k < L; ++k) {
    out.residual = std::max(out.residual, (moved.alpha(k) - b.alpha(k)).norm());
    out.residual = std::max(out.residual, (moved.beta(k) - b.beta(k)).norm());
  }
  return out;
}

}  // namespace qik
