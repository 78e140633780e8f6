#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "sktlab/config.hpp"

namespace sktlab {

/// Orthonormal column basis of the span of M, rank cut at rel_tol * sigma_max.
inline Eigen::MatrixXd orthonormal_span(const Eigen::MatrixXd& M, double rel_tol = 1e-9) {
  if (M.cols() == 0) return Eigen::MatrixXd(M.rows(), 0);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  const double cut = s.size() ? s(0) * rel_tol : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  return svd.matrixU().leftCols(rank);
}

/// Orthonormal basis of the kernel of M (columns), via SVD.
inline Eigen::MatrixXd null_space(const Eigen::MatrixXd& M, double rel_tol = 1e-9) {
  if (M.rows() == 0) return Eigen::MatrixXd::Identity(M.cols(), M.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = (s.size() ? s(0) : 0.0) * rel_tol;
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cut) ++rank;
  return svd.matrixV().rightCols(M.cols() - rank);
}

/// A linear subspace carried as an orthonormal column frame.
class Subspace {
 public:
  explicit Subspace(int ambient) : basis_(ambient, 0) {}
  explicit Subspace(Eigen::MatrixXd orthonormal_columns) : basis_(std::move(orthonormal_columns)) {
    const Eigen::MatrixXd gram = basis_.transpose() * basis_;
    if ((gram - Eigen::MatrixXd::Identity(basis_.cols(), basis_.cols())).norm() > 1e-10)
      throw std::invalid_argument("Subspace: columns not orthonormal");
  }

  static Subspace span_of(const Eigen::MatrixXd& spanning, double rel_tol = 1e-9) {
    Subspace s(static_cast<int>(spanning.rows()));
    s.basis_ = orthonormal_span(spanning, rel_tol);
    return s;
  }

  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }
  bool is_zero() const { return basis_.cols() == 0; }
  const Eigen::MatrixXd& basis() const { return basis_; }

  /// Orthogonal projector onto the subspace.
  Eigen::MatrixXd projector() const { return basis_ * basis_.transpose(); }

  /// Distance from v to the subspace (norm of the orthogonal residual).
  double residual(const Eigen::VectorXd& v) const {
    return (v - basis_ * (basis_.transpose() * v)).norm();
  }

  bool contains(const Eigen::VectorXd& v, double tol) const {
    const double n = v.norm();
    return residual(v) <= tol * (n > 1.0 ? n : 1.0);
  }

  Subspace orthogonal_complement() const {
    const int n = ambient_dim();
    Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n) - projector();
    return Subspace::span_of(M, 1e-9);
  }

  static Subspace sum(const Subspace& a, const Subspace& b) {
    Eigen::MatrixXd M(a.ambient_dim(), a.dim() + b.dim());
    M << a.basis_, b.basis_;
    return Subspace::span_of(M, 1e-9);
  }

 private:
  Eigen::MatrixXd basis_;
};

/// Largest principal angle between two subspaces of equal dimension,
/// measured through sines so angles near zero stay resolvable.
inline double max_principal_angle(const Subspace& a, const Subspace& b) {
  if (a.ambient_dim() != b.ambient_dim()) throw std::invalid_argument("principal angle: ambient mismatch");
  if (a.dim() != b.dim()) return 1.57079632679489662;  // dimension mismatch: right angle
  if (a.dim() == 0) return 0.0;
  const Eigen::MatrixXd ra = b.basis() - a.projector() * b.basis();
  const Eigen::MatrixXd rb = a.basis() - b.projector() * a.basis();
  const double s = std::max(ra.operatorNorm(), rb.operatorNorm());
  return std::asin(std::min(1.0, s));
}

/// Symmetric positive-definite square root.
inline Eigen::MatrixXd symmetric_sqrt(const Eigen::MatrixXd& G) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("symmetric_sqrt: matrix not positive definite");
  return es.operatorSqrt();
}

inline Eigen::MatrixXd symmetric_inv_sqrt(const Eigen::MatrixXd& G) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::invalid_argument("symmetric_inv_sqrt: matrix not positive definite");
  return es.operatorInverseSqrt();
}

inline double min_eigenvalue(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace sktlab
