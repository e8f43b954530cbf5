#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qik {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

constexpr int kMaxDim = 16;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EigenCluster {
  cplx value;
  int multiplicity = 0;
  Mat basis;  // orthonormal columns spanning the generalised eigenspace
};

struct JordanType {
  cplx eigenvalue;
  std::vector<int> partition;  // weakly decreasing
  bool illConditioned = false;
};

// Eigenvalues via complex Schur form. Throws NumericalError if the QR
// iteration does not converge within Eigen's default cap.
Vec eigenvalues(const Mat& A);

std::vector<EigenCluster> schurEigenCluster(const Mat& A, double tol);
std::vector<JordanType> jordanType(const Mat& A, double tol);
std::vector<Mat> generalizedEigenprojectors(const Mat& A, double tol);

struct JordanBlock {
  cplx eigenvalue;
  int size = 0;
};

// Columns of P are Jordan chains, eigenvector first, so P^{-1} A P is upper
// bidiagonal. Clusters follow schurEigenCluster order, blocks within a
// cluster by decreasing size.
struct JordanBasis {
  Mat P;
  std::vector<JordanBlock> blocks;
};
JordanBasis jordanBasis(const Mat& A, double tol);
// The Jordan matrix with ones on the superdiagonal inside each block.
Mat jordanMatrix(const std::vector<JordanBlock>& blocks);

// Number of singular values above thresh (absolute).
int rankAbove(const Mat& A, double thresh);
// Rank with threshold tol * max(rows, cols) * sigma_max.
int numericalRank(const Mat& A, double tol);

// Orthonormal basis of the kernel, dimension fixed by the caller.
Mat kernelBasis(const Mat& A, int dim);
// Orthonormal basis of the kernel with absolute singular-value threshold.
Mat kernelBasisAbove(const Mat& A, double thresh);

// Partition from the nullity sequence of (A - value I)^k, k = 1..mult.
std::vector<int> partitionAt(const Mat& A, cplx value, int mult, double tol);
std::vector<int> conjugatePartition(const std::vector<int>& p);

Mat matrixPower(const Mat& A, int k);
Mat expm(const Mat& A);

template <typename Derived>
Mat tracelessPart(const Eigen::MatrixBase<Derived>& A) {
  Mat out = A;
  const cplx t = A.trace() / double(A.rows());
  out.diagonal().array() -= t;
  return out;
}

template <typename Derived>
Mat hermitianPart(const Eigen::MatrixBase<Derived>& A) {
  return (A + A.adjoint()) / 2.0;
}

template <typename Derived>
Mat antiHermitianPart(const Eigen::MatrixBase<Derived>& A) {
  return (A - A.adjoint()) / 2.0;
}

inline Mat commutator(const Mat& A, const Mat& B) { return A * B - B * A; }

Mat blockDiagonal(const std::vector<Mat>& blocks);

}  // namespace qik
