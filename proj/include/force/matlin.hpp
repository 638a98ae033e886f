#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>

// Dense symmetric linear algebra primitives. Everything here is a pure value
// operation; matrices are plain Eigen dense types and symmetry is an invariant
// maintained at the boundaries via symmetrize().

namespace force {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

template <typename Scalar>
struct EigDecomp {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> values;   // ascending
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> vectors;  // orthonormal columns
};

// Full spectral decomposition of a symmetric matrix, eigenvalues ascending.
template <typename Derived>
EigDecomp<typename Derived::Scalar> eig_sym(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  if (M.rows() != M.cols())
    throw std::invalid_argument("eig_sym: matrix must be square");
  if (!M.allFinite())
    throw std::invalid_argument("eig_sym: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es(M);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eig_sym: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

template <typename Derived>
typename Derived::Scalar min_eigenvalue(const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  if (M.rows() != M.cols())
    throw std::invalid_argument("min_eigenvalue: matrix must be square");
  if (!M.allFinite())
    throw std::invalid_argument("min_eigenvalue: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> es(
      M, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("min_eigenvalue: eigensolver did not converge");
  return es.eigenvalues()(0);
}

// Trace inner product <A, B> = sum_ij A_ij B_ij.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar trace_inner(const Eigen::MatrixBase<DerivedA>& A,
                                      const Eigen::MatrixBase<DerivedB>& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("trace_inner: dimension mismatch");
  return A.cwiseProduct(B).sum();
}

// Enforce exact symmetry by averaging. Asymmetry beyond tol is an input error
// (the tolerance exists because gradient/projection arithmetic introduces tiny
// asymmetry that is legitimate to repair).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>
symmetrize(const Eigen::MatrixBase<Derived>& M, double tol = 1e-8) {
  if (M.rows() != M.cols())
    throw std::invalid_argument("symmetrize: matrix must be square");
  const double asym = (M - M.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol)
    throw std::invalid_argument("symmetrize: asymmetry " + std::to_string(asym) +
                                " exceeds tolerance " + std::to_string(tol));
  return ((M + M.transpose()) / 2).eval();
}

// A matrix of the form a*I + b*11^T, kept symbolic so products and inverses
// cost O(d^2) instead of a generic factorization. Eigenvalues are a with
// multiplicity dim-1 and a + dim*b with multiplicity 1.
template <typename Scalar>
struct SpectralShift {
  Index dim = 0;
  Scalar a = 0;
  Scalar b = 0;

  Scalar edge_eigenvalue() const { return a + Scalar(dim) * b; }
  bool positive_definite() const { return a > Scalar(0) && edge_eigenvalue() > Scalar(0); }

  // ||M^{-1}||_2 for positive definite M: reciprocal of the smallest eigenvalue.
  Scalar inverse_norm() const {
    require_pd("inverse_norm");
    return Scalar(1) / std::min(a, edge_eigenvalue());
  }

  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> M =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Constant(dim, dim, b);
    M.diagonal().array() += a;
    return M;
  }

  SpectralShift inverse() const {
    require_pd("inverse");
    return {dim, Scalar(1) / a, -b / (a * a + a * b * Scalar(dim))};
  }

  SpectralShift sqrt() const {
    require_pd("sqrt");
    const Scalar ra = std::sqrt(a);
    const Scalar re = std::sqrt(edge_eigenvalue());
    return {dim, ra, (re - ra) / Scalar(dim)};
  }

  SpectralShift inv_sqrt() const {
    require_pd("inv_sqrt");
    const Scalar ra = std::sqrt(a);
    const Scalar re = std::sqrt(edge_eigenvalue());
    return {dim, Scalar(1) / ra, -(re - ra) / (Scalar(dim) * std::sqrt(a * a + Scalar(dim) * a * b))};
  }

  // (a*I + b*11^T) X
  template <typename Derived>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
  apply(const Eigen::MatrixBase<Derived>& X) const {
    if (X.rows() != dim) throw std::invalid_argument("SpectralShift::apply: dimension mismatch");
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> R = a * X;
    R.rowwise() += (b * X.colwise().sum()).eval();
    return R;
  }

  // S * M * S for symmetric M (both factors are this shift).
  template <typename Derived>
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>
  conjugate(const Eigen::MatrixBase<Derived>& M) const {
    if (M.rows() != dim || M.cols() != dim)
      throw std::invalid_argument("SpectralShift::conjugate: dimension mismatch");
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> rs = M.rowwise().sum();
    const Scalar total = rs.sum();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> R = (a * a) * M;
    R.noalias() += (a * b) * (rs * Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(dim).transpose());
    R.noalias() += (a * b) * (Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(dim) * rs.transpose());
    R.array() += b * b * total;
    return R;
  }

 private:
  void require_pd(const char* what) const {
    if (!positive_definite())
      throw std::invalid_argument(std::string("SpectralShift::") + what +
                                  ": matrix is not positive definite (a=" + std::to_string(double(a)) +
                                  ", a+d*b=" + std::to_string(double(edge_eigenvalue())) + ")");
  }
};

template <typename Scalar>
struct StructuredForms {
  SpectralShift<Scalar> inverse;
  SpectralShift<Scalar> sqrt;
  SpectralShift<Scalar> inv_sqrt;
};

template <typename Scalar>
StructuredForms<Scalar> structured_forms(const SpectralShift<Scalar>& S) {
  return {S.inverse(), S.sqrt(), S.inv_sqrt()};
}

using SpectralShiftd = SpectralShift<double>;

}  // namespace force
