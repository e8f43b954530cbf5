#include "qik/quiver.hpp"

#include <cmath>
#include <numeric>

namespace qik {

void Quiver::validate() const {
  const int L = levels();
  if (L < 1) throw InputError("quiver needs at least one level");
  if (dims.back() != n) throw InputError("top dimension must equal n");
  if (n > kMaxDim) throw InputError("n exceeds 16");
  if (int(alphas.size()) != L - 1 || int(betas.size()) != L - 1)
    throw InputError("expected one alpha and one beta per edge");
  for (int k = 1; k < L; ++k) {
    if (dim(k) < 0) throw InputError("negative dimension");
    if (alpha(k).rows() != dim(k + 1) || alpha(k).cols() != dim(k))
      throw InputError("alpha_" + std::to_string(k) + " has the wrong shape");
    if (beta(k).rows() != dim(k) || beta(k).cols() != dim(k + 1))
      throw InputError("beta_" + std::to_string(k) + " has the wrong shape");
    if (!alpha(k).allFinite() || !beta(k).allFinite())
      throw InputError("non-finite entries at edge " + std::to_string(k));
  }
}

bool Quiver::isFullFlag() const {
  if (levels() != n) return false;
  for (int k = 1; k <= n; ++k)
    if (dim(k) != k) return false;
  return true;
}

std::vector<int> fullFlagDims(int n) {
  std::vector<int> d(n);
  std::iota(d.begin(), d.end(), 1);
  return d;
}

Quiver zeroQuiver(const std::vector<int>& dims) {
  Quiver q;
  q.dims = dims;
  q.n = dims.back();
  for (int k = 1; k < q.levels(); ++k) {
    q.alphas.push_back(Mat::Zero(q.dim(k + 1), q.dim(k)));
    q.betas.push_back(Mat::Zero(q.dim(k), q.dim(k + 1)));
  }
  return q;
}

Quiver fullFlagZero(int n) { return zeroQuiver(fullFlagDims(n)); }

Mat randomMatrix(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  Mat m(rows, cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r < rows; ++r) m(r, c) = cplx(N(rng), N(rng));
  return m;
}

Mat randomUnitary(int n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Mat> qr(randomMatrix(n, n, rng));
  Mat Q = qr.householderQ();
  Mat R = qr.matrixQR();
  for (int i = 0; i < n; ++i) {
    cplx d = R(i, i);
    if (std::abs(d) > 0) Q.col(i) *= d / std::abs(d);
  }
  return Q;
}

Mat randomSL(int n, std::mt19937_64& rng, double spread) {
  Mat H = randomMatrix(n, n, rng) * spread;
  H = tracelessPart(H);
  return expm(H);
}

Quiver randomQuiver(const std::vector<int>& dims, std::mt19937_64& rng) {
  Quiver q = zeroQuiver(dims);
  for (int k = 1; k < q.levels(); ++k) {
    q.alpha(k) = randomMatrix(q.dim(k + 1), q.dim(k), rng);
    q.beta(k) = randomMatrix(q.dim(k), q.dim(k + 1), rng);
  }
  return q;
}

std::vector<cplx> MomentValue::nu() const {
  const int L = size() + 1;
  std::vector<cplx> v(L, 0.0);
  for (int i = L - 1; i >= 1; --i) v[i - 1] = v[i] + lambdaC[i - 1];
  return v;
}

Eigen::Vector3d MomentValue::r3(int k) const {
  const cplx c = lambdaC[k - 1];
  return {c.real(), c.imag(), lambdaR[k - 1] / 2.0};
}

Eigen::Vector3d MomentValue::partialSum(int i, int j) const {
  Eigen::Vector3d s = Eigen::Vector3d::Zero();
  for (int k = i; k < j; ++k) s += r3(k);
  return s;
}

std::vector<Mat> complexMomentMatrices(const Quiver& q) {
  std::vector<Mat> out;
  for (int k = 1; k < q.levels(); ++k) {
    Mat D = -q.beta(k) * q.alpha(k);
    if (k > 1) D += q.alpha(k - 1) * q.beta(k - 1);
    out.push_back(D);
  }
  return out;
}

std::vector<Mat> realMomentMatrices(const Quiver& q) {
  std::vector<Mat> out;
  for (int k = 1; k < q.levels(); ++k) {
    Mat E = q.beta(k) * q.beta(k).adjoint() - q.alpha(k).adjoint() * q.alpha(k);
    if (k > 1) E += q.alpha(k - 1) * q.alpha(k - 1).adjoint() - q.beta(k - 1).adjoint() * q.beta(k - 1);
    if ((E - E.adjoint()).norm() > 1e-10 * (1.0 + E.norm()))
      throw NumericalError("real moment matrix lost hermiticity");
    out.push_back(E);
  }
  return out;
}

ComplexMoment complexMomentResidual(const Quiver& q) {
  q.validate();
  ComplexMoment m;
  auto Ds = complexMomentMatrices(q);
  for (size_t k = 0; k < Ds.size(); ++k) {
    const Mat& D = Ds[k];
    const int d = int(D.rows());
    cplx l = d > 0 ? D.trace() / double(d) : cplx(0);
    m.lambdaC.push_back(l);
    if (d > 0) m.residual = std::max(m.residual, tracelessPart(D).norm());
  }
  return m;
}

RealMoment realMomentResidual(const Quiver& q) {
  q.validate();
  RealMoment m;
  auto Es = realMomentMatrices(q);
  for (size_t k = 0; k < Es.size(); ++k) {
    const Mat& E = Es[k];
    const int d = int(E.rows());
    double l = d > 0 ? E.trace().real() / double(d) : 0.0;
    m.lambdaR.push_back(l);
    if (d > 0) m.residual = std::max(m.residual, tracelessPart(E).norm());
  }
  return m;
}

MomentValue momentValue(const Quiver& q) {
  return {complexMomentResidual(q).lambdaC, realMomentResidual(q).lambdaR};
}

double combinedResidual(const Quiver& q) {
  auto Ds = complexMomentMatrices(q);
  auto Es = realMomentMatrices(q);
  double r = 0;
  for (size_t k = 0; k < Ds.size(); ++k) {
    if (Ds[k].rows() == 0) continue;
    double c = tracelessPart(Ds[k]).squaredNorm();
    double e = tracelessPart(Es[k]).squaredNorm();
    r = std::max(r, std::sqrt(c + e / 4.0));
  }
  return r;
}

GroupElement GroupElement::identity(const Quiver& q, bool withTop) {
  GroupElement g;
  const int L = q.levels();
  for (int k = 1; k < L + (withTop ? 1 : 0); ++k) g.factors.push_back(Mat::Identity(q.dim(k), q.dim(k)));
  return g;
}

Quiver applyGroup(const Quiver& q, const GroupElement& g) {
  q.validate();
  const int L = q.levels();
  if (int(g.factors.size()) != L - 1 && int(g.factors.size()) != L)
    throw InputError("group element has the wrong number of factors");
  std::vector<Mat> gs = g.factors;
  if (int(gs.size()) == L - 1) gs.push_back(Mat::Identity(q.n, q.n));
  std::vector<Mat> inv;
  for (int k = 1; k <= L; ++k) {
    const Mat& f = gs[k - 1];
    if (f.rows() != q.dim(k) || f.cols() != q.dim(k)) throw InputError("group factor has the wrong size");
    if (f.rows() == 0) {
      inv.push_back(f);
      continue;
    }
    Eigen::FullPivLU<Mat> lu(f);
    if (!lu.isInvertible()) throw InputError("singular group factor");
    inv.push_back(lu.inverse());
  }
  Quiver out = q;
  for (int k = 1; k < L; ++k) {
    out.alpha(k) = gs[k] * q.alpha(k) * inv[k - 1];
    out.beta(k) = gs[k - 1] * q.beta(k) * inv[k];
  }
  return out;
}

GroupElement compose(const GroupElement& h, const GroupElement& g) {
  GroupElement out;
  const size_t L = std::max(h.factors.size(), g.factors.size());
  for (size_t k = 0; k < L; ++k) {
    if (k < h.factors.size() && k < g.factors.size())
      out.factors.push_back(h.factors[k] * g.factors[k]);
    else if (k < h.factors.size())
      out.factors.push_back(h.factors[k]);
    else
      out.factors.push_back(g.factors[k]);
  }
  return out;
}

UnitQuaternion UnitQuaternion::random(std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  UnitQuaternion u{cplx(N(rng), N(rng)), cplx(N(rng), N(rng))};
  return u.normalized();
}

UnitQuaternion UnitQuaternion::normalized() const {
  double s = std::sqrt(std::norm(a) + std::norm(b));
  return {a / s, b / s};
}

Eigen::Matrix3d UnitQuaternion::rotation() const {
  // Image of (Re c, Im c, r/2) under c -> a^2 c - conj(b)^2 conj(c) + a conj(b) r,
  // r/2 -> (|a|^2 - |b|^2) r/2 - 2 Re(a b c).
  const cplx bb = std::conj(b);
  const cplx cx = a * a - bb * bb;
  const cplx cy = cplx(0, 1) * (a * a + bb * bb);
  const cplx cr = 2.0 * a * bb;
  const cplx ab = a * b;
  Eigen::Matrix3d R;
  R << cx.real(), cy.real(), cr.real(),
       cx.imag(), cy.imag(), cr.imag(),
       -2.0 * ab.real(), 2.0 * ab.imag(), std::norm(a) - std::norm(b);
  return R;
}

Quiver rotateStructure(const Quiver& q, const UnitQuaternion& u) {
  Quiver out = q;
  const cplx bb = std::conj(u.b);
  for (int k = 1; k < q.levels(); ++k) {
    out.alpha(k) = u.a * q.alpha(k) - bb * q.beta(k).adjoint();
    out.beta(k) = u.a * q.beta(k) + bb * q.alpha(k).adjoint();
  }
  return out;
}

MomentValue rotateMoment(const MomentValue& m, const UnitQuaternion& u) {
  MomentValue out = m;
  const Eigen::Matrix3d R = u.rotation();
  for (int k = 1; k <= m.size(); ++k) {
    Eigen::Vector3d v = R * m.r3(k);
    out.lambdaC[k - 1] = cplx(v[0], v[1]);
    out.lambdaR[k - 1] = 2.0 * v[2];
  }
  return out;
}

BigX bigX(const Quiver& q) {
  q.validate();
  BigX b;
  const int L = q.levels();
  if (L < 2) {
    b.X = Mat::Zero(q.n, q.n);
  } else {
    b.X = q.alpha(L - 1) * q.beta(L - 1);
  }
  b.X0 = tracelessPart(b.X);
  return b;
}

const char* verdictName(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    default: return "inconclusive";
  }
}

bool hksAt(const Quiver& q, double tol) {
  for (int k = 1; k < q.levels(); ++k) {
    if (numericalRank(q.alpha(k), tol) < q.dim(k) && q.dim(k) > 0) return false;
    if (numericalRank(q.beta(k), tol) < q.dim(k) && q.dim(k) > 0) return false;
  }
  return true;
}

Stability isHKStable(const Quiver& q, double tol, int samples, unsigned long long seed) {
  q.validate();
  if (samples < 1) throw InputError("samples must be at least 1");
  // A common kernel of alpha_k and beta_k^* survives every rotation.
  for (int k = 1; k < q.levels(); ++k) {
    if (q.dim(k) == 0) continue;
    Mat stack(2 * q.dim(k + 1), q.dim(k));
    stack << q.alpha(k), q.beta(k).adjoint();
    const double scale = std::max(1.0, stack.norm());
    if (rankAbove(stack, tol * scale) < q.dim(k)) return Stability::unstable;
  }
  if (hksAt(q, tol)) return Stability::stable;
  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    if (hksAt(rotateStructure(q, UnitQuaternion::random(rng)), tol)) return Stability::stable;
  }
  return Stability::inconclusive;
}

Quiver blockSum(const std::vector<Quiver>& parts) {
  if (parts.empty()) throw InputError("empty direct sum");
  const int L = parts.front().levels();
  std::vector<int> dims(L, 0);
  for (auto& p : parts) {
    if (p.levels() != L) throw InputError("direct sum parts have different lengths");
    for (int k = 0; k < L; ++k) dims[k] += p.dims[k];
  }
  Quiver out;
  out.dims = dims;
  out.n = dims.back();
  for (int k = 1; k < L; ++k) {
    std::vector<Mat> as, bs;
    for (auto& p : parts) {
      as.push_back(p.alpha(k));
      bs.push_back(p.beta(k));
    }
    out.alphas.push_back(blockDiagonal(as));
    out.betas.push_back(blockDiagonal(bs));
  }
  return out;
}

Quiver chainQuiver(int levels, const ScalarChain& c) {
  if (c.i < 1 || c.j <= c.i || c.j > levels || c.d < 1) throw InputError("malformed scalar chain");
  if (int(c.alpha.size()) != c.j - c.i - 1 || int(c.beta.size()) != c.j - c.i - 1)
    throw InputError("scalar chain needs j - i - 1 edge scalars");
  std::vector<int> dims(levels, 0);
  for (int k = c.i; k < c.j; ++k) dims[k - 1] = c.d;
  Quiver q = zeroQuiver(dims);
  const Mat I = Mat::Identity(c.d, c.d);
  for (int k = c.i; k + 1 < c.j; ++k) {
    q.alpha(k) = c.alpha[k - c.i] * I;
    q.beta(k) = c.beta[k - c.i] * I;
  }
  return q;
}

Quiver directSum(const Quiver& fragment, const std::vector<ScalarChain>& chains) {
  const int L = fragment.levels();
  std::vector<Quiver> parts{fragment};
  std::vector<int> total = fragment.dims;
  for (auto& c : chains) {
    parts.push_back(chainQuiver(L, c));
    for (int k = c.i; k < c.j; ++k) total[k - 1] += c.d;
  }
  for (int k = 1; k <= L; ++k)
    if (total[k - 1] != k) throw InputError("dimension bookkeeping violated at level " + std::to_string(k));
  for (int k = 1; k < L; ++k)
    if (fragment.dim(k) > fragment.dim(k + 1)) throw InputError("fragment dimensions must be monotone");
  return blockSum(parts);
}

}  // namespace qik
