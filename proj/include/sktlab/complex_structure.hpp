#pragma once

#include <Eigen/Dense>
#include <stdexcept>

#include "sktlab/config.hpp"
#include "sktlab/lie_algebra.hpp"
#include "sktlab/linalg.hpp"

namespace sktlab {

/// An almost-complex structure J on R^{2n}, J^2 = -Id enforced at construction.
class ComplexStructure {
 public:
  explicit ComplexStructure(Eigen::MatrixXd J) : J_(std::move(J)) {
    const int n = static_cast<int>(J_.rows());
    if (J_.cols() != n || n % 2 != 0)
      throw std::invalid_argument("ComplexStructure: matrix must be square of even size");
    if ((J_ * J_ + Eigen::MatrixXd::Identity(n, n)).norm() >= 1e-12)
      throw std::invalid_argument("ComplexStructure: J^2 != -Id");
  }

  /// The block structure J e_i = e_{n+i}, J e_{n+i} = -e_i (split layout).
  static ComplexStructure split(int dim2n) {
    const int n = dim2n / 2;
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim2n, dim2n);
    for (int i = 0; i < n; ++i) {
      J(n + i, i) = 1.0;
      J(i, n + i) = -1.0;
    }
    return ComplexStructure(J);
  }

  /// J e_{2k-1} = e_{2k} in 1-based terms (interleaved layout).
  static ComplexStructure interleaved(int dim2n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim2n, dim2n);
    for (int k = 0; k < dim2n / 2; ++k) {
      J(2 * k + 1, 2 * k) = 1.0;
      J(2 * k, 2 * k + 1) = -1.0;
    }
    return ComplexStructure(J);
  }

  int dim() const { return static_cast<int>(J_.rows()); }
  const Eigen::MatrixXd& matrix() const { return J_; }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return J_ * x; }

 private:
  Eigen::MatrixXd J_;
};

/// Max-norm of the integrability tensor J[x,y] - [Jx,y] - [x,Jy] - J[Jx,Jy]
/// over basis pairs; zero exactly when J is integrable.
inline double nijenhuis_residual(const LieAlgebra& L, const ComplexStructure& J) {
  const int n = L.dim();
  const Eigen::MatrixXd& Jm = J.matrix();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd x = L.basis_vec(i), y = L.basis_vec(j);
      const Eigen::VectorXd jx = Jm * x, jy = Jm * y;
      const Eigen::VectorXd r =
          Jm * L.bracket(x, y) - L.bracket(jx, y) - L.bracket(x, jy) - Jm * L.bracket(jx, jy);
      worst = std::max(worst, r.norm());
    }
  return worst;
}

inline bool is_integrable(const LieAlgebra& L, const ComplexStructure& J,
                          double tol = tols().exact_zero) {
  return nijenhuis_residual(L, J) < tol;
}

/// Max-norm of [Jx, Jy] - [x, y] over basis pairs.
inline double abelian_residual(const LieAlgebra& L, const ComplexStructure& J) {
  const int n = L.dim();
  const Eigen::MatrixXd& Jm = J.matrix();
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd r =
          L.bracket(Eigen::VectorXd(Jm.col(i)), Eigen::VectorXd(Jm.col(j))) - L.bracket_basis(i, j);
      worst = std::max(worst, r.norm());
    }
  return worst;
}

inline bool is_abelian(const LieAlgebra& L, const ComplexStructure& J,
                       double tol = tols().exact_zero) {
  return abelian_residual(L, J) < tol;
}

/// The ideal g^1_J = [g,g] + J[g,g].
inline Subspace g1J(const LieAlgebra& L, const ComplexStructure& J, double rel_tol = 1e-9) {
  const int n = L.dim();
  Eigen::MatrixXd M(n, 2 * n * n);
  int col = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXd b = L.bracket_basis(i, j);
      M.col(col++) = b;
      M.col(col++) = J.matrix() * b;
    }
  return Subspace::span_of(M, rel_tol);
}

/// g-orthonormal basis (eps_1..eps_2n) with J eps_i = eps_{n+i} for i <= n,
/// built greedily over coordinate directions in index order. G must be
/// J-Hermitian positive definite. Returns the basis as matrix columns.
inline Eigen::MatrixXd adapted_basis(const ComplexStructure& J, const Eigen::MatrixXd& G) {
  const int dim = J.dim();
  const int n = dim / 2;
  if ((J.matrix().transpose() * G * J.matrix() - G).norm() > tols().exact_zero * G.norm())
    throw std::invalid_argument("adapted_basis: metric is not J-Hermitian");
  Eigen::MatrixXd first(dim, n);   // eps_1..eps_n
  Eigen::MatrixXd span(dim, 0);    // running span of {eps_k, J eps_k}
  int picked = 0;
  for (int i = 0; i < dim && picked < n; ++i) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(dim, i);
    // g-orthogonal projection away from the running span
    for (int c = 0; c < span.cols(); ++c) {
      const Eigen::VectorXd u = span.col(c);
      v -= u * (u.dot(G * v));
    }
    const double nv = std::sqrt(v.dot(G * v));
    if (nv < 1e-8) continue;  // direction already captured
    v /= nv;
    const Eigen::VectorXd jv = J.matrix() * v;
    first.col(picked++) = v;
    span.conservativeResize(Eigen::NoChange, span.cols() + 2);
    span.col(span.cols() - 2) = v;
    span.col(span.cols() - 1) = jv;
  }
  if (picked < n)
    throw std::runtime_error("adapted_basis: numerically degenerate metric, basis incomplete");
  Eigen::MatrixXd basis(dim, dim);
  basis.leftCols(n) = first;
  basis.rightCols(n) = J.matrix() * first;
  return basis;
}

/// A real frame (v_1..v_n, J v_1..J v_n), no metric involved; any such frame
/// works for bidegree splitting. Deterministic greedy over coordinate axes.
inline Eigen::MatrixXd j_adapted_frame(const ComplexStructure& J) {
  const int dim = J.dim();
  const int n = dim / 2;
  Eigen::MatrixXd cols(dim, 0);
  Eigen::MatrixXd first(dim, n);
  int picked = 0;
  for (int i = 0; i < dim && picked < n; ++i) {
    const Eigen::VectorXd e = Eigen::VectorXd::Unit(dim, i);
    Eigen::VectorXd w = e;
    if (cols.cols() > 0) {
      const Eigen::MatrixXd Q = orthonormal_span(cols);
      w -= Q * (Q.transpose() * e);
    }
    if (w.norm() < 1e-8) continue;
    first.col(picked++) = e;
    cols.conservativeResize(Eigen::NoChange, cols.cols() + 2);
    cols.col(cols.cols() - 2) = e;
    cols.col(cols.cols() - 1) = J.matrix() * e;
  }
  if (picked < n) throw std::runtime_error("j_adapted_frame: could not complete frame");
  Eigen::MatrixXd frame(dim, dim);
  frame.leftCols(n) = first;
  frame.rightCols(n) = J.matrix() * first;
  return frame;
}

}  // namespace sktlab
