#include "qik/strata.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "qik/forms.hpp"
#include "qik/solver.hpp"

namespace qik {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double quiverScale(const Quiver& q) {
  double s = 1.0;
  for (int k = 1; k < q.levels(); ++k) s = std::max({s, q.alpha(k).norm(), q.beta(k).norm()});
  return s;
}

struct Margin {
  double zeroMax = 0;
  double nonzeroMin = kInf;
  void zero(double x) { zeroMax = std::max(zeroMax, x); }
  void nonzero(double x) { nonzeroMin = std::min(nonzeroMin, x); }
  double value(double floor) const {
    if (nonzeroMin == kInf) return 16.0;
    return std::log10(nonzeroMin / std::max(zeroMax, floor));
  }
};

Vec singularValues(const Mat& A) {
  if (A.rows() == 0 || A.cols() == 0) return Vec();
  Eigen::JacobiSVD<Mat> svd(A);
  return svd.singularValues().cast<cplx>();
}

// Left singular vectors spanning the image, rank by absolute threshold.
Mat imageBasis(const Mat& A, double thresh, Margin& m) {
  if (A.rows() == 0) return Mat(0, 0);
  if (A.cols() == 0) return Mat(A.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullU);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > thresh) {
      ++r;
      m.nonzero(sv(i));
    } else {
      m.zero(sv(i));
    }
  }
  return svd.matrixU().leftCols(r);
}

Mat kernelOf(const Mat& A, double thresh, Margin& m) {
  const int c = int(A.cols());
  if (c == 0) return Mat(0, 0);
  if (A.rows() == 0) return Mat::Identity(c, c);
  Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  int r = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > thresh) {
      ++r;
      m.nonzero(sv(i));
    } else {
      m.zero(sv(i));
    }
  }
  return svd.matrixV().rightCols(c - r);
}

Mat inverseOf(const Mat& B, const char* what) {
  if (B.rows() == 0) return B;
  Eigen::FullPivLU<Mat> lu(B);
  if (!lu.isInvertible()) throw NumericalError(what);
  return lu.inverse();
}

Quiver sliceFrom(const Quiver& q, int level) {
  Quiver out;
  out.n = q.n;
  out.dims.assign(q.dims.begin() + (level - 1), q.dims.end());
  out.alphas.assign(q.alphas.begin() + (level - 1), q.alphas.end());
  out.betas.assign(q.betas.begin() + (level - 1), q.betas.end());
  return out;
}

EquivRelation relationFrom(const MomentValue& mu, double tol, bool complexOnly) {
  const int L = mu.size() + 1;
  std::vector<std::pair<int, int>> pairs;
  for (int i = 1; i < L; ++i)
    for (int j = i + 1; j <= L; ++j) {
      Eigen::Vector3d v = mu.partialSum(i, j);
      double x = complexOnly ? std::hypot(v(0), v(1)) : v.norm();
      if (x <= tol) pairs.push_back({i, j});
    }
  return EquivRelation::generatedBy(L, pairs);
}

}  // namespace

EquivRelation equivalenceFromLevels(const MomentValue& mu, double tol) { return relationFrom(mu, tol, false); }

EquivRelation complexEquivalence(const MomentValue& mu, double tol) { return relationFrom(mu, tol, true); }

bool regularLevels(const MomentValue& mu, double tol) {
  const int L = mu.size() + 1;
  for (int i = 1; i < L; ++i)
    for (int j = i + 1; j <= L; ++j) {
      Eigen::Vector3d v = mu.partialSum(i, j);
      if (v.norm() <= tol) continue;
      double xy = std::hypot(v(0), v(1));
      if (xy <= tol || xy < v.norm() / 3.0) return false;
    }
  return true;
}

RotatedQuiver genericRotation(const Quiver& q, double tol, unsigned long long seed) {
  const MomentValue mu = momentValue(q);
  std::mt19937_64 rng(seed);
  UnitQuaternion u;
  for (int attempt = 0; attempt < 200; ++attempt) {
    if (attempt > 0) u = UnitQuaternion::random(rng);
    if (regularLevels(rotateMoment(mu, u), tol)) return {rotateStructure(q, u), u, attempt + 1};
  }
  throw NumericalError("no rotation puts the levels in general position");
}

SubquiverDecomposition decomposeByEigenspaces(const Quiver& q, double tol) {
  q.validate();
  const int L = q.levels();
  const double s = quiverScale(q);
  const ComplexMoment cm = complexMomentResidual(q);
  if (cm.residual > 1e-7 * s * s) throw PreconditionError("complex moment equations do not hold");
  MomentValue mu{cm.lambdaC, std::vector<double>(L - 1, 0.0)};

  SubquiverDecomposition out;
  out.sim = complexEquivalence(mu, tol);
  const auto& classes = out.sim.classes;
  const int nc = int(classes.size());
  const auto nu = mu.nu();

  std::vector<std::vector<int>> mult(nc, std::vector<int>(L + 1, 0));
  for (int c = 0; c < nc; ++c)
    for (int k = 1; k <= L; ++k) {
      bool mine = std::find(classes[c].begin(), classes[c].end(), k) != classes[c].end();
      mult[c][k] = mult[c][k - 1] + (mine ? q.dim(k) - q.dim(k - 1) : 0);
    }

  out.minTargetGap = kInf;
  out.kernelKept = kInf;
  GroupElement g;
  for (int k = 1; k <= L; ++k) {
    const int d = q.dim(k);
    const Mat A = k == 1 ? Mat::Zero(d, d) : Mat(q.alpha(k - 1) * q.beta(k - 1));
    std::vector<cplx> target(nc);
    for (int c = 0; c < nc; ++c) target[c] = nu[k - 1] - nu[classes[c].front() - 1];
    for (int a = 0; a < nc; ++a)
      for (int b = a + 1; b < nc; ++b) {
        if (mult[a][k] == 0 || mult[b][k] == 0) continue;
        const double gap = std::abs(target[a] - target[b]);
        out.minTargetGap = std::min(out.minTargetGap, gap);
        if (gap <= 10 * tol) throw NumericalError("eigenvalue targets closer than 10 tol");
      }
    Mat B(d, d);
    int col = 0;
    for (int c = 0; c < nc; ++c) {
      const int m = mult[c][k];
      if (m == 0) continue;
      const Mat M = matrixPower(A - target[c] * Mat::Identity(d, d), m);
      Vec sv = singularValues(M);
      out.kernelDropped = std::max(out.kernelDropped, sv(d - m).real());
      if (m < d) out.kernelKept = std::min(out.kernelKept, sv(d - m - 1).real());
      B.middleCols(col, m) = kernelBasis(M, m);
      col += m;
    }
    if (col != d) throw NumericalError("eigenspace dimensions do not add up");
    g.factors.push_back(inverseOf(B, "eigenspaces are not independent"));
  }
  out.changeOfBasis = g;
  const Quiver moved = applyGroup(q, g);

  for (int c = 0; c < nc; ++c) {
    SubquiverPiece p;
    p.members = classes[c];
    std::vector<int> dims(mult[c].begin() + 1, mult[c].end());
    p.fragment = zeroQuiver(dims);
    for (int k = 1; k <= L; ++k) p.eigenvalue.push_back(nu[k - 1] - nu[classes[c].front() - 1]);
    out.pieces.push_back(std::move(p));
  }
  for (int k = 1; k < L; ++k) {
    int ro = 0, co = 0;
    Mat ra = moved.alpha(k), rb = moved.beta(k);
    for (int c = 0; c < nc; ++c) {
      const int r = mult[c][k + 1], cl = mult[c][k];
      auto& f = out.pieces[c].fragment;
      f.alpha(k) = moved.alpha(k).block(ro, co, r, cl);
      f.beta(k) = moved.beta(k).block(co, ro, cl, r);
      ra.block(ro, co, r, cl).setZero();
      rb.block(co, ro, cl, r).setZero();
      ro += r;
      co += cl;
    }
    out.offBlock = std::max({out.offBlock, ra.norm(), rb.norm()});
  }
  if (out.offBlock > 10 * tol * s) throw NumericalError("maps do not respect the eigenspace decomposition");
  return out;
}

Contraction contract(const Quiver& p, const std::vector<bool>& contractEdge, const std::vector<cplx>& lambdaC) {
  p.validate();
  const int L = p.levels();
  if (int(contractEdge.size()) != L - 1 || int(lambdaC.size()) != L - 1)
    throw InputError("one flag and one level per edge required");
  for (int k = 1; k < L; ++k) {
    if (!contractEdge[k - 1]) continue;
    const Mat& a = p.alpha(k);
    if (a.rows() != a.cols()) throw PreconditionError("contracted edge is not square");
    if (a.rows() == 0) continue;
    Vec sv = singularValues(a);
    if (sv(sv.size() - 1).real() <= 1e-10 * std::max(1.0, sv(0).real()))
      throw PreconditionError("contracted edge is not invertible");
  }
  Contraction c;
  for (int v = 1; v <= L; ++v)
    if (v == 1 || !contractEdge[v - 2]) c.vertexLevels.push_back(v);
  std::vector<int> dims;
  for (int v : c.vertexLevels) dims.push_back(p.dim(v));
  c.quiver = zeroQuiver(dims);
  for (size_t t = 0; t + 1 < c.vertexLevels.size(); ++t) {
    const int a = c.vertexLevels[t];
    const int b = c.vertexLevels[t + 1] - 1;
    Mat P = Mat::Identity(p.dim(a), p.dim(a));
    cplx lam = 0;
    for (int k = a; k < b; ++k) {
      P = p.alpha(k) * P;
      lam += lambdaC[k - 1];
    }
    lam += lambdaC[b - 1];
    c.quiver.alpha(int(t) + 1) = p.alpha(b) * P;
    c.quiver.beta(int(t) + 1) = P.rows() == 0 ? Mat(p.beta(b)) : Mat(P.fullPivLu().solve(p.beta(b)));
    c.lambdaC.push_back(lam);
  }
  return c;
}

ClosedSplit splitClosedOrbitQuiver(const Quiver& p, double tol) {
  p.validate();
  const int L = p.levels();
  const double s = quiverScale(p);
  const double thresh = std::sqrt(tol) * s;
  Margin m;
  std::vector<Mat> starB, zeroB;
  for (int t = 1; t <= L; ++t) {
    const int d = p.dim(t);
    Mat star, zero;
    if (t == L) {
      star = Mat::Identity(d, d);
      zero = Mat(d, 0);
    } else {
      star = imageBasis(p.beta(t), thresh, m);
      Mat stacked(p.alpha(t).rows() + (t > 1 ? p.beta(t - 1).rows() : 0), d);
      stacked.topRows(p.alpha(t).rows()) = p.alpha(t);
      if (t > 1) stacked.bottomRows(p.beta(t - 1).rows()) = p.beta(t - 1);
      zero = kernelOf(stacked, thresh, m);
    }
    if (star.cols() + zero.cols() != d) throw PreconditionError("no injective/zero splitting: orbit is not closed");
    starB.push_back(star);
    zeroB.push_back(zero);
  }
  ClosedSplit out;
  std::vector<int> sd, zd;
  for (int t = 1; t <= L; ++t) {
    Mat B(p.dim(t), p.dim(t));
    B << starB[t - 1], zeroB[t - 1];
    out.basis.factors.push_back(inverseOf(B, "star and zero parts are not complementary"));
    sd.push_back(int(starB[t - 1].cols()));
    zd.push_back(int(zeroB[t - 1].cols()));
  }
  const Quiver moved = applyGroup(p, out.basis);
  out.star = zeroQuiver(sd);
  out.zero = zeroQuiver(zd);
  for (int k = 1; k < L; ++k) {
    Mat ra = moved.alpha(k), rb = moved.beta(k);
    out.star.alpha(k) = ra.topLeftCorner(sd[k], sd[k - 1]);
    out.star.beta(k) = rb.topLeftCorner(sd[k - 1], sd[k]);
    ra.topLeftCorner(sd[k], sd[k - 1]).setZero();
    rb.topLeftCorner(sd[k - 1], sd[k]).setZero();
    out.residual = std::max({out.residual, ra.norm(), rb.norm()});
  }
  out.minKept = m.nonzeroMin;
  out.maxDropped = m.zeroMax;
  if (out.residual > 10 * tol * s) throw PreconditionError("splitting leaves mixed blocks: orbit is not closed");
  return out;
}

Classification classify(const Quiver& q, double tol, unsigned long long seed) {
  q.validate();
  if (!q.isFullFlag()) throw InputError("classify needs a full flag quiver");
  const int n = q.n;
  const double s = quiverScale(q);
  if (complexMomentResidual(q).residual > 1e-8 * s * s || realMomentResidual(q).residual > 1e-8 * s * s)
    throw PreconditionError("not a point of the level set: moment residual above 1e-8");

  Classification out;
  auto& diag = out.diagnostics;
  Margin margin;
  const RotatedQuiver rot = genericRotation(q, tol, seed);
  diag.rotation = rot.u;
  diag.rotationAttempts = rot.attempts;
  const MomentValue mu = momentValue(rot.quiver);
  const EquivRelation sim = equivalenceFromLevels(mu, tol);
  for (int i = 1; i < n; ++i)
    for (int j = i + 1; j <= n; ++j) {
      const double x = mu.partialSum(i, j).norm();
      if (x <= tol) margin.zero(x);
      else margin.nonzero(x);
    }

  const SubquiverDecomposition dec = decomposeByEigenspaces(rot.quiver, tol);
  if (!(dec.sim == sim)) throw NumericalError("complex and full equivalence relations disagree after rotation");
  diag.offBlock = dec.offBlock;
  margin.zero(dec.kernelDropped);
  if (dec.kernelKept < kInf) margin.nonzero(dec.kernelKept);

  std::vector<std::vector<int>> orbits;
  for (const auto& piece : dec.pieces) {
    const auto& C = piece.members;
    const int r = int(C.size());
    const int c1 = C.front();
    if (piece.fragment.n != r) throw NumericalError("class piece has the wrong top dimension");
    const Quiver sliced = sliceFrom(piece.fragment, c1);
    std::vector<bool> flags;
    std::vector<cplx> lam;
    for (int k = c1; k < n; ++k) {
      flags.push_back(std::find(C.begin(), C.end(), k + 1) == C.end());
      lam.push_back(mu.lambdaC[k - 1]);
    }
    const Contraction con = contract(sliced, flags, lam);
    const Quiver& cq = con.quiver;
    if (!cq.isFullFlag() || cq.n != r) throw NumericalError("contraction is not a full flag quiver");

    const ClosedSplit split = splitClosedOrbitQuiver(cq, tol);
    diag.splitResidual = std::max(diag.splitResidual, split.residual);
    margin.zero(split.maxDropped);
    margin.nonzero(split.minKept);

    const Mat Xc = bigX(cq).X;
    std::vector<int> orbit = partitionAt(Xc, 0.0, r, tol);
    std::vector<int> observed(split.star.dims);
    observed.insert(observed.begin(), 0);
    if (starDims(orbit) != observed) throw NumericalError("star dimensions disagree with the Jordan type of X");
    diag.starDims.push_back(std::vector<int>(observed.begin() + 1, observed.end()));
    orbits.push_back(orbit);
  }
  out.label = labelFromOrbit(sim, orbits);
  diag.margin = margin.value(1e-16 * s);
  return out;
}

std::vector<cplx> kappaValues(const std::vector<cplx>& lambdaC) {
  const int n = int(lambdaC.size()) + 1;
  std::vector<cplx> kappa(n);
  for (int j = 1; j <= n; ++j) {
    cplx v = 0;
    for (int i = 1; i < j; ++i) v += double(i) * lambdaC[i - 1];
    for (int i = j; i < n; ++i) v -= double(n - i) * lambdaC[i - 1];
    kappa[j - 1] = v / double(n);
  }
  return kappa;
}

KostantCheck checkKostantIdentity(const Quiver& q, double tol) {
  q.validate();
  const int L = q.levels();
  const int n = q.n;
  const MomentValue mu = momentValue(q);
  const auto nu = mu.nu();
  const BigX bx = bigX(q);
  KostantCheck out;
  Mat P = bx.X;
  for (int j = 1; j < L; ++j) P = P * (bx.X + nu[j - 1] * Mat::Identity(n, n));
  out.polyResidual = P.norm();

  // X has eigenvalue -nu_j with multiplicity d_j - d_{j-1}.
  cplx mean = 0;
  for (int j = 1; j <= L; ++j)
    for (int c = 0; c < q.dim(j) - q.dim(j - 1); ++c) {
      out.kappa.push_back(-nu[j - 1]);
      mean -= nu[j - 1];
    }
  mean /= double(n);
  for (auto& k : out.kappa) k -= mean;

  const double scale = std::max(1.0, bx.X0.norm());
  const auto clusters = schurEigenCluster(bx.X0, tol);
  double h = 0;
  for (const auto& cl : clusters) {
    double best = kInf;
    int near = 0;
    for (const auto& k : out.kappa) {
      const double d = std::abs(cl.value - k);
      best = std::min(best, d);
      if (d <= 1e-6 * scale) ++near;
    }
    h = std::max(h, best);
    if (near != cl.multiplicity) h = kInf;
  }
  for (const auto& k : out.kappa) {
    double best = kInf;
    for (const auto& cl : clusters) best = std::min(best, std::abs(cl.value - k));
    h = std::max(h, best);
  }
  out.kappaMismatch = h;
  return out;
}

SymplecticStratum symplecticStratum(const std::vector<Mat>& alphas, double tol) {
  if (alphas.empty()) return {{1}, {1}};
  const int L = int(alphas.size()) + 1;
  for (int i = 1; i + 1 < L; ++i)
    if (alphas[i].cols() != alphas[i - 1].rows()) throw InputError("alpha shapes do not chain");
  const int n = int(alphas.back().rows());
  auto rankOf = [&](const Mat& A) { return A.size() == 0 ? 0 : rankAbove(A, tol * std::max(1.0, A.norm())); };
  std::vector<int> e(L);
  e[L - 1] = n;
  for (int i = 1; i < L; ++i) {
    const Mat& A = alphas[i - 1];
    const int d = int(A.cols());
    const int r = rankOf(A);
    if (r == d) {
      e[i - 1] = d;
      continue;
    }
    const int prev = i == 1 ? 0 : rankOf(alphas[i - 2]);
    if (prev + (d - r) != d) throw PreconditionError("V_i is not im alpha_{i-1} + ker alpha_i: orbit not closed");
    if (prev > 0) {
      Eigen::JacobiSVD<Mat> svd(alphas[i - 2], Eigen::ComputeFullU);
      Mat both(d, d);
      both << svd.matrixU().leftCols(prev), kernelBasis(A, d - r);
      if (rankAbove(both, tol) != d) throw PreconditionError("image and kernel intersect: orbit not closed");
    }
    e[i - 1] = prev;
  }
  SymplecticStratum out;
  for (int v : e)
    if (v > 0 && (out.sequence.empty() || v != out.sequence.back())) {
      if (!out.sequence.empty() && v < out.sequence.back()) throw NumericalError("dimension sequence not monotone");
      out.sequence.push_back(v);
    }
  int last = 0;
  for (int v : out.sequence) {
    out.partition.push_back(v - last);
    last = v;
  }
  return out;
}

Quiver buildRepresentative(const StratumLabel& label, std::mt19937_64& rng) {
  const int n = label.sim.n;
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, 2 * M_PI);
  std::vector<cplx> tau(n);
  std::vector<cplx> classTau;
  for (size_t c = 0; c < label.sim.classes.size(); ++c) classTau.push_back(cplx(N(rng), N(rng)));
  for (int m = 1; m <= n; ++m) tau[m - 1] = classTau[label.sim.classOf(m)];
  std::vector<cplx> lam(n - 1);
  for (int k = 1; k < n; ++k) lam[k - 1] = tau[k] - tau[k - 1];
  const std::vector<double> zeroTarget(n - 1, 0.0);
  auto solve = [&](const Quiver& start) {
    Quiver warm = kempfNessFlow(start, zeroTarget, 1e-4, 2000).quiver;
    FlowResult r = gaussNewtonSolve(warm, zeroTarget, 1e-12, 200);
    if (r.report.finalResidual > 1e-10) throw NumericalError("representative did not reach the level set");
    return r.quiver;
  };

  Quiver frag = alphaFromX(parabolicX0(label.mDims, lam, rng), label.mDims, lam);
  frag = solve(frag);

  std::vector<ScalarChain> chains;
  for (size_t h = 0; h < label.S.size(); ++h) {
    ScalarChain c;
    c.i = label.S[h].first;
    c.j = label.S[h].second;
    c.d = label.delta[h];
    cplx p = 0;
    for (int k = c.i; k <= c.j - 2; ++k) {
      p -= lam[k - 1];
      const double mag = std::sqrt(std::abs(p));
      const double phase = U(rng);
      c.alpha.push_back(std::polar(mag, phase));
      c.beta.push_back(std::polar(mag, std::arg(p) - phase));
    }
    chains.push_back(std::move(c));
  }
  Quiver q = directSum(frag, chains);

  GroupElement g;
  for (int k = 1; k < n; ++k) g.factors.push_back(randomSL(q.dim(k), rng, 0.3));
  q = solve(applyGroup(q, g));

  GroupElement top = GroupElement::identity(q, true);
  top.factors.back() = randomUnitary(n, rng);
  return rotateStructure(applyGroup(q, top), UnitQuaternion::random(rng));
}

}  // namespace qik
