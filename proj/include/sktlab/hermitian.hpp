#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <optional>
#include <random>
#include <vector>

#include "sktlab/complex_structure.hpp"
#include "sktlab/config.hpp"
#include "sktlab/exterior.hpp"
#include "sktlab/kform.hpp"
#include "sktlab/lie_algebra.hpp"
#include "sktlab/linalg.hpp"

namespace sktlab {

/// A left-invariant inner product as a symmetric positive-definite Gram matrix.
class Metric {
 public:
  explicit Metric(Eigen::MatrixXd G) : G_(std::move(G)) {
    if (G_.rows() != G_.cols()) throw std::invalid_argument("Metric: matrix must be square");
    if ((G_ - G_.transpose()).norm() > 1e-12 * std::max(1.0, G_.norm()))
      throw std::invalid_argument("Metric: matrix must be symmetric");
    G_ = 0.5 * (G_ + G_.transpose());
    if (min_eigenvalue(G_) <= 1e-10 * G_.trace())
      throw std::invalid_argument("Metric: matrix must be positive definite");
  }

  static Metric identity(int dim) { return Metric(Eigen::MatrixXd::Identity(dim, dim)); }

  int dim() const { return static_cast<int>(G_.rows()); }
  const Eigen::MatrixXd& matrix() const { return G_; }
  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    return x.dot(G_ * y);
  }

 private:
  Eigen::MatrixXd G_;
};

inline double hermitian_pair_residual(const Metric& g, const ComplexStructure& J) {
  return (J.matrix().transpose() * g.matrix() * J.matrix() - g.matrix()).norm();
}

inline bool is_hermitian_pair(const Metric& g, const ComplexStructure& J,
                              double tol = tols().exact_zero) {
  return hermitian_pair_residual(g, J) < tol * std::max(1.0, g.matrix().norm());
}

inline void require_hermitian_pair(const Metric& g, const ComplexStructure& J) {
  if (!is_hermitian_pair(g, J))
    throw std::invalid_argument("metric is not Hermitian for the given complex structure");
}

/// Fundamental form omega(x, y) = g(Jx, y).
inline KForm fundamental_form(const Metric& g, const ComplexStructure& J) {
  require_hermitian_pair(g, J);
  const Eigen::MatrixXd O = J.matrix().transpose() * g.matrix();  // O_ij = g(Je_i, e_j)
  const int n = g.dim();
  KForm w(n, 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) w.set_on_basis({i, j}, O(i, j));
  return w;
}

/// Bismut torsion as a 3-form. For abelian J this is the closed form
/// T(x,y,z) = -g([x,y],z) - g([y,z],x) - g([z,x],y); in general it is
/// recovered from d omega with every slot rotated by J, and the two routes
/// are cross-checked whenever J is abelian.
inline KForm bismut_torsion(const LieAlgebra& L, const ComplexStructure& J, const Metric& g) {
  require_hermitian_pair(g, J);
  if (!is_integrable(L, J))
    throw std::invalid_argument("bismut_torsion: complex structure is not integrable");
  const KForm via_domega = j_pullback(ce_differential(fundamental_form(g, J), L), J);
  if (!is_abelian(L, J)) return via_domega;

  const int n = L.dim();
  KForm T(n, 3);
  const auto& G = g.matrix();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const double v = -L.bracket_basis(i, j).dot(G * L.basis_vec(k)) -
                         L.bracket_basis(j, k).dot(G * L.basis_vec(i)) -
                         L.bracket_basis(k, i).dot(G * L.basis_vec(j));
        T.set_on_basis({i, j, k}, v);
      }
  const double scale = 1.0 + T.max_abs();
  if ((T - via_domega).max_abs() > 1e-11 * scale)
    throw InconsistencyError("bismut_torsion: closed form and d-omega route disagree");
  return T;
}

/// The quadruple expression whose vanishing characterizes pluriclosed inner
/// products under abelian J (linear in the metric).
inline double pluriclosed_quadruple(const LieAlgebra& L, const Eigen::MatrixXd& G, int w, int x,
                                    int y, int z) {
  return L.bracket_basis(y, z).dot(G * L.bracket_basis(w, x)) -
         L.bracket_basis(x, z).dot(G * L.bracket_basis(w, y)) +
         L.bracket_basis(x, y).dot(G * L.bracket_basis(w, z));
}

/// Max-norm of d J d omega. For abelian J the quadruple characterization is
/// evaluated as well and the identity dT = 2 * quadruple expression is
/// asserted coefficientwise.
inline double pluriclosed_residual(const LieAlgebra& L, const ComplexStructure& J,
                                   const Metric& g) {
  if (!is_integrable(L, J))
    throw std::invalid_argument("pluriclosed_residual: complex structure is not integrable");
  const KForm djd = d_J_d(fundamental_form(g, J), L, J);
  const double res = djd.max_abs();
  if (is_abelian(L, J) && L.dim() >= 4) {
    const KForm dT = ce_differential(bismut_torsion(L, J, g), L);
    const int n = L.dim();
    double worst = 0.0;
    std::vector<int> q(4);
    const Combinations combos(n, 4);
    combos.first(q);
    do {
      const double e = pluriclosed_quadruple(L, g.matrix(), q[0], q[1], q[2], q[3]);
      const Complex dt = dT.coef(q);
      worst = std::max(worst, std::abs(dt - 2.0 * e));
    } while (combos.next(q));
    if (worst > 1e-10 * (1.0 + res))
      throw InconsistencyError("pluriclosed_residual: dT != 2x quadruple expression");
    if (std::abs(dT.max_abs() - res) > 1e-10 * (1.0 + res))
      throw InconsistencyError("pluriclosed_residual: dT and dJd omega norms disagree");
  }
  return res;
}

inline bool is_pluriclosed(const LieAlgebra& L, const ComplexStructure& J, const Metric& g,
                           double gate = tols().derived) {
  return pluriclosed_residual(L, J, g) < gate;
}

/// ||[x,y]||^2 + ||[x,Jy]||^2 - g([x,Jx],[y,Jy]); zero for pluriclosed
/// abelian-J inputs.
inline double corollary_identity_residual(const LieAlgebra& L, const ComplexStructure& J,
                                          const Metric& g, const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y) {
  if (!is_abelian(L, J))
    throw std::invalid_argument("corollary_identity_residual: J must be abelian");
  if (!is_pluriclosed(L, J, g))
    throw std::invalid_argument("corollary_identity_residual: metric must be pluriclosed");
  const auto& G = g.matrix();
  const Eigen::VectorXd jx = J.matrix() * x, jy = J.matrix() * y;
  const Eigen::VectorXd bxy = L.bracket(x, y), bxjy = L.bracket(x, jy);
  return bxy.dot(G * bxy) + bxjy.dot(G * bxjy) -
         L.bracket(x, jx).dot(G * L.bracket(y, jy));
}

/// Center recovered from the torsion characterization {x : [x, Jx] = 0},
/// solved through the polarized bilinear map B(x,y) = [x,Jy] + [y,Jx]; the
/// result is cross-checked against the bracket-kernel center.
inline Subspace center_via_torsion(const LieAlgebra& L, const ComplexStructure& J,
                                   const Metric& g) {
  if (!is_abelian(L, J))
    throw std::invalid_argument("center_via_torsion: J must be abelian");
  if (!is_pluriclosed(L, J, g))
    throw std::invalid_argument("center_via_torsion: metric must be pluriclosed");
  const int n = L.dim();
  // B(x, e_j) = [x, J e_j] + [e_j, J x] is linear in x; stack over j.
  Eigen::MatrixXd A(n * n, n);
  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXd Mj =
        -L.ad(Eigen::VectorXd(J.matrix().col(j))) + L.ad_basis(j) * J.matrix();
    A.middleRows(j * n, n) = Mj;
  }
  const Subspace zt(null_space(A, 1e-9));
  // verification on the quadratic map itself
  for (int a = 0; a < zt.dim(); ++a) {
    const Eigen::VectorXd u = zt.basis().col(a);
    if (L.bracket(u, Eigen::VectorXd(J.matrix() * u)).norm() > tols().derived)
      throw InconsistencyError("center_via_torsion: null vector fails [x,Jx]=0");
  }
  const Subspace zc = center(L);
  if (max_principal_angle(zt, zc) > 1e-8)
    throw InconsistencyError(
        "center_via_torsion: disagreement with the bracket-kernel center");
  return zt;
}

/// Max complex-coefficient norm of del delbar (omega^{n-2}); requires n >= 3.
inline double astheno_residual(const LieAlgebra& L, const ComplexStructure& J, const Metric& g) {
  const int n = L.dim() / 2;
  if (n < 3) throw std::invalid_argument("astheno_residual: requires complex dimension >= 3");
  if (!is_integrable(L, J))
    throw std::invalid_argument("astheno_residual: complex structure is not integrable");
  const KForm w = fundamental_form(g, J);
  const KForm wp = wedge_power(w, n - 2);
  const ComplexFrame frame(J);
  const KForm ddbar = dolbeault_op(dolbeault_op(wp, L, frame, true), L, frame, false);
  return ddbar.max_abs();
}

/// A left-invariant connection: gamma[i] has column j equal to nabla_{e_i} e_j.
struct Connection {
  std::vector<Eigen::MatrixXd> gamma;
  int dim() const { return static_cast<int>(gamma.size()); }
  const Eigen::MatrixXd& operator[](int i) const { return gamma[i]; }
};

inline double metric_compat_residual(const Connection& C, const Metric& g) {
  double worst = 0.0;
  for (int i = 0; i < C.dim(); ++i) {
    const Eigen::MatrixXd M = g.matrix() * C[i];
    worst = std::max(worst, (M + M.transpose()).norm());
  }
  return worst;
}

inline double nabla_j_residual(const Connection& C, const ComplexStructure& J) {
  double worst = 0.0;
  for (int i = 0; i < C.dim(); ++i)
    worst = std::max(worst, (C[i] * J.matrix() - J.matrix() * C[i]).norm());
  return worst;
}

/// Connection torsion nabla_x y - nabla_y x - [x, y], lowered by the metric.
/// Only the strictly increasing components are kept; for the Bismut
/// connection these determine the full 3-form.
inline KForm connection_torsion_lowered(const Connection& C, const LieAlgebra& L,
                                        const Metric& g) {
  const int n = L.dim();
  KForm T(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd t = C[i].col(j) - C[j].col(i) - L.bracket_basis(i, j);
      const Eigen::VectorXd lowered = g.matrix() * t;
      for (int k = j + 1; k < n; ++k) T.set_on_basis({i, j, k}, lowered(k));
    }
  return T;
}

/// Levi-Civita connection via the Koszul formula on a left-invariant frame.
inline Connection levi_civita(const LieAlgebra& L, const Metric& g) {
  const int n = L.dim();
  const Eigen::LLT<Eigen::MatrixXd> llt(g.matrix());
  Connection C;
  C.gamma.assign(n, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd rhs(n);
      for (int k = 0; k < n; ++k)
        rhs(k) = 0.5 * (L.bracket_basis(i, j).dot(g.matrix() * L.basis_vec(k)) -
                        L.bracket_basis(j, k).dot(g.matrix() * L.basis_vec(i)) +
                        L.bracket_basis(k, i).dot(g.matrix() * L.basis_vec(j)));
      C.gamma[i].col(j) = llt.solve(rhs);
    }
  return C;
}

/// Bismut connection nabla^B = nabla^{LC} + (1/2) g^{-1} T^B(., ., .).
/// Postconditions nabla g = 0, nabla J = 0 and the torsion round-trip are
/// asserted at construction.
inline Connection bismut_connection(const LieAlgebra& L, const ComplexStructure& J,
                                    const Metric& g) {
  const int n = L.dim();
  const KForm T = bismut_torsion(L, J, g);
  const Connection lc = levi_civita(L, g);
  const Eigen::LLT<Eigen::MatrixXd> llt(g.matrix());
  Connection C;
  C.gamma.assign(n, Eigen::MatrixXd::Zero(n, n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::VectorXd t(n);
      for (int k = 0; k < n; ++k)
        t(k) = (i == j || j == k || k == i) ? 0.0 : T.on_basis({i, j, k}).real();
      C.gamma[i].col(j) = lc.gamma[i].col(j) + 0.5 * llt.solve(t);
    }
  const double scale = 1.0 + g.matrix().norm() + T.max_abs();
  if (metric_compat_residual(C, g) > 1e-10 * scale)
    throw InconsistencyError("bismut_connection: nabla g != 0");
  if (nabla_j_residual(C, J) > 1e-10 * scale)
    throw InconsistencyError("bismut_connection: nabla J != 0");
  // torsion round-trip, every component (the k-slot need not be skew a priori)
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd lowered =
          g.matrix() * (C[i].col(j) - C[j].col(i) - L.bracket_basis(i, j));
      for (int k = 0; k < n; ++k) {
        const double want = (k == i || k == j) ? 0.0 : T.on_basis({i, j, k}).real();
        if (std::abs(lowered(k) - want) > 1e-10 * scale)
          throw InconsistencyError("bismut_connection: torsion round-trip failed");
      }
    }
  return C;
}

/// Curvature of a left-invariant connection:
/// R(e_i, e_j) = A_i A_j - A_j A_i - sum_m c_{ij}^m A_m as endomorphisms,
/// plus the metric for lowering.
class CurvatureTensor {
 public:
  CurvatureTensor(const Connection& C, const LieAlgebra& L, const Metric& g)
      : n_(L.dim()), G_(g.matrix()) {
    S_.assign(n_ * n_, Eigen::MatrixXd::Zero(n_, n_));
    for (int i = 0; i < n_; ++i)
      for (int j = i + 1; j < n_; ++j) {
        Eigen::MatrixXd S = C[i] * C[j] - C[j] * C[i];
        const Eigen::VectorXd br = L.bracket_basis(i, j);
        for (int m = 0; m < n_; ++m)
          if (br(m) != 0.0) S -= br(m) * C[m];
        S_[i * n_ + j] = S;
        S_[j * n_ + i] = -S;
      }
  }

  int dim() const { return n_; }

  /// Endomorphism R(e_i, e_j).
  const Eigen::MatrixXd& endo(int i, int j) const { return S_[i * n_ + j]; }

  /// Lowered tensor R(e_i, e_j, e_k, e_l) = g(R(e_i,e_j) e_k, e_l).
  double operator()(int i, int j, int k, int l) const {
    return G_.row(l).dot(S_[i * n_ + j].col(k));
  }

  /// R(e_i, e_j, u, v) for arbitrary last-slot vectors.
  double last_slots(int i, int j, const Eigen::VectorXd& u, const Eigen::VectorXd& v) const {
    return v.dot(G_ * (S_[i * n_ + j] * u));
  }

 private:
  int n_;
  Eigen::MatrixXd G_;
  std::vector<Eigen::MatrixXd> S_;
};

inline CurvatureTensor curvature(const Connection& C, const LieAlgebra& L, const Metric& g) {
  return CurvatureTensor(C, L, g);
}

struct SklResiduals {
  double bianchi = 0.0;
  double type = 0.0;
  double nabla_t = 0.0;
  double pluriclosed = 0.0;
  bool is_skl(double tol = tols().derived) const {
    return bianchi < tol && type < tol && nabla_t < tol && pluriclosed < tol;
  }
};

/// The four residuals entering the Strominger Kaehler-like verdict:
/// first Bianchi identity for R^B, (J,J)-invariance of R^B in the first two
/// slots, nabla^B T^B, and the pluriclosed residual. The equivalence
/// (pluriclosed and nabla T = 0) <=> (Bianchi and type) is asserted whenever
/// both sides are numerically decisive.
inline SklResiduals skl_residuals(const LieAlgebra& L, const ComplexStructure& J,
                                  const Metric& g) {
  const int n = L.dim();
  SklResiduals out;
  out.pluriclosed = pluriclosed_residual(L, J, g);
  const Connection B = bismut_connection(L, J, g);
  const CurvatureTensor R(B, L, g);
  const KForm T = bismut_torsion(L, J, g);

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double cyc = R(i, j, k, l) + R(j, k, i, l) + R(k, i, j, l);
          out.bianchi = std::max(out.bianchi, std::abs(cyc));
        }

  const Eigen::MatrixXd& Jm = J.matrix();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      // R(J e_i, J e_j) as an endomorphism, by bilinearity
      Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
      for (int a = 0; a < n; ++a) {
        if (Jm(a, i) == 0.0) continue;
        for (int b = 0; b < n; ++b)
          if (Jm(b, j) != 0.0) S += Jm(a, i) * Jm(b, j) * R.endo(a, b);
      }
      const Eigen::MatrixXd D = g.matrix() * (S - R.endo(i, j));
      out.type = std::max(out.type, D.cwiseAbs().maxCoeff());
    }

  // dense torsion components for the nabla T contraction
  std::vector<double> Td(n * n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        Td[(i * n + j) * n + k] = (i == j || j == k || k == i) ? 0.0 : T.on_basis({i, j, k}).real();
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd& A = B[i];
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k)
        for (int l = k + 1; l < n; ++l) {
          double v = 0.0;
          for (int m = 0; m < n; ++m)
            v -= A(m, j) * Td[(m * n + k) * n + l] + A(m, k) * Td[(j * n + m) * n + l] +
                 A(m, l) * Td[(j * n + k) * n + m];
          out.nabla_t = std::max(out.nabla_t, std::abs(v));
        }
  }

  // cross-check of the two characterizations when both are decisive
  const double tol = tols().derived;
  const auto decisive = [tol](double a, double b, bool& yes) {
    if (a < tol && b < tol) {
      yes = true;
      return true;
    }
    if (a > 10 * tol || b > 10 * tol) {
      yes = false;
      return true;
    }
    return false;
  };
  bool lhs = false, rhs = false;
  if (decisive(out.pluriclosed, out.nabla_t, lhs) && decisive(out.bianchi, out.type, rhs) &&
      lhs != rhs)
    throw InconsistencyError("skl_residuals: torsion-parallel and curvature checks disagree");
  return out;
}

/// Bismut Ricci form rho^B(x, y) = (1/2) sum_{k<=n} R^B(x, y, eps_k, J eps_k)
/// over a g-orthonormal adapted basis. The overall sign is calibrated so the
/// single-bracket 4-dimensional algebra [e1,e3] = lambda e2 with g = Id gets
/// rho^B(e1, e3) = +lambda^2/2.
inline KForm bismut_ricci(const LieAlgebra& L, const ComplexStructure& J, const Metric& g) {
  const int dim = L.dim();
  const int n = dim / 2;
  const CurvatureTensor R(bismut_connection(L, J, g), L, g);
  const Eigen::MatrixXd basis = adapted_basis(J, g.matrix());
  KForm rho(dim, 2);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k)
        v += R.last_slots(i, j, Eigen::VectorXd(basis.col(k)), Eigen::VectorXd(basis.col(n + k)));
      rho.set_on_basis({i, j}, 0.5 * v);
    }
  return rho;
}

/// Data of the orthonormal normal form for Strominger Kaehler-like metrics on
/// 2-step nilpotent algebras: J eps_i = eps_{n+i}; g^1 + J g^1 spanned by the
/// last n-r index pairs; the only brackets are [eps_i, eps_{n+i}] = lambda_i x_i.
struct CanonicalSklData {
  int n = 0, r = 0, s = 0;
  Eigen::VectorXd lambdas;       // descending
  Eigen::MatrixXd x_vectors;     // columns, original coordinates
  std::vector<int> x_assign;     // signed 1-based index into the new basis; 0 = not axis-aligned
  Eigen::MatrixXd basis_change;  // columns: new basis in original coordinates
};

namespace detail {

/// Splits the column space E into J-invariant 2-planes on which the brackets
/// act with a single lambda, using weighted combinations of the symmetric
/// forms H_k(u, v) = <[u, Jv], x_k>. Returns false when no clean split exists.
inline bool split_into_planes(const LieAlgebra& L, const Eigen::MatrixXd& Jm,
                              const Eigen::MatrixXd& xs, const Eigen::MatrixXd& E,
                              std::vector<Eigen::MatrixXd>& planes, int round = 0) {
  const int d = static_cast<int>(E.cols());
  if (d == 0) return true;
  if (d == 2) {
    planes.push_back(E);
    return true;
  }
  if (d % 2 == 1 || round > 8) return false;
  const int s = static_cast<int>(xs.cols());
  std::mt19937_64 gen(1234 + round);
  std::uniform_real_distribution<double> uni(0.5, 2.0);
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(d, d);
  for (int k = 0; k < s; ++k) {
    const double wk = (round == 0) ? double(k + 1) : uni(gen);
    Eigen::MatrixXd H(d, d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        H(a, b) = L.bracket(Eigen::VectorXd(E.col(a)), Eigen::VectorXd(Jm * E.col(b)))
                      .dot(xs.col(k));
    W += wk * 0.5 * (H + H.transpose());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  // cluster eigenvalues
  std::vector<std::pair<int, int>> clusters;  // [begin, end)
  int begin = 0;
  for (int i = 1; i <= d; ++i) {
    if (i == d || std::abs(ev(i) - ev(i - 1)) > 1e-7 * scale) {
      clusters.emplace_back(begin, i);
      begin = i;
    }
  }
  if (clusters.size() <= 1) return false;  // no progress; give up on this branch
  for (const auto& [b, e] : clusters) {
    const Eigen::MatrixXd sub = E * es.eigenvectors().middleCols(b, e - b);
    if (!split_into_planes(L, Jm, xs, sub, planes, round + 1)) return false;
  }
  return true;
}

/// Deterministic unit vector inside a 2-plane: largest-abs coordinate made positive.
inline Eigen::VectorXd plane_representative(const Eigen::MatrixXd& plane) {
  Eigen::VectorXd v = plane.col(0);
  int imax = 0;
  for (int i = 1; i < v.size(); ++i)
    if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
  if (v(imax) < 0) v = -v;
  return v / v.norm();
}

}  // namespace detail

/// Attempts to put (L, J, g) into the orthonormal normal form. Returns
/// nullopt ("not found") when the verification of the bracket pattern fails;
/// throws InconsistencyError when that happens even though all four SKL
/// residuals vanish.
inline std::optional<CanonicalSklData> skl_normal_form(const LieAlgebra& L,
                                                       const ComplexStructure& J,
                                                       const Metric& g) {
  const int dim = L.dim();
  const int n = dim / 2;
  const auto step = nilpotency_step(L);
  if (!step || *step > 2)
    throw std::invalid_argument("skl_normal_form: algebra is not 2-step nilpotent");
  if (!is_abelian(L, J)) throw std::invalid_argument("skl_normal_form: J must be abelian");
  if (!is_pluriclosed(L, J, g))
    throw std::invalid_argument("skl_normal_form: metric must be pluriclosed");

  const auto fail = [&]() -> std::optional<CanonicalSklData> {
    if (skl_residuals(L, J, g).is_skl())
      throw InconsistencyError("skl_normal_form: no normal form found for an SKL input");
    return std::nullopt;
  };

  // move to a g-orthonormal frame
  const Eigen::MatrixXd U = symmetric_inv_sqrt(g.matrix());
  const Eigen::MatrixXd Uinv = symmetric_sqrt(g.matrix());
  std::vector<BracketTerm> terms;
  for (int a = 0; a < dim; ++a)
    for (int b = a + 1; b < dim; ++b) {
      const Eigen::VectorXd br = Uinv * L.bracket(Eigen::VectorXd(U.col(a)), Eigen::VectorXd(U.col(b)));
      for (int c = 0; c < dim; ++c)
        if (std::abs(br(c)) > 0.0) terms.push_back({a, b, c, br(c)});
    }
  const LieAlgebra Lf(dim, terms);
  const Eigen::MatrixXd Jf = Uinv * J.matrix() * U;

  const Subspace g1 = derived_subalgebra(Lf);
  const int s = g1.dim();
  Eigen::MatrixXd W(dim, 2 * s);
  W << g1.basis(), Jf * g1.basis();
  const Subspace w = Subspace::span_of(W);
  if (w.dim() % 2 != 0) return fail();
  const int r = n - w.dim() / 2;
  const Subspace v = w.orthogonal_complement();
  if (v.dim() != 2 * r) return fail();
  if (!(n - r <= s && s <= std::min(r, 2 * (n - r)))) return fail();

  // PSD operator P = sum_k B_k B_k^T on V over an orthonormal basis of g^1
  const Eigen::MatrixXd xs = g1.basis();
  const int dv = v.dim();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(dv, dv);
  for (int k = 0; k < s; ++k) {
    Eigen::MatrixXd Bk(dv, dv);
    for (int a = 0; a < dv; ++a)
      for (int b = 0; b < dv; ++b)
        Bk(a, b) =
            Lf.bracket(Eigen::VectorXd(v.basis().col(a)), Eigen::VectorXd(v.basis().col(b)))
                .dot(xs.col(k));
    P += Bk * Bk.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(P);
  const Eigen::VectorXd ev = es.eigenvalues();
  const double pscale = std::max(1.0, ev.cwiseAbs().maxCoeff());

  // group eigenvalues, split each group into J-invariant 2-planes
  struct Pair {
    Eigen::VectorXd eps;
    double lambda = 0.0;
    Eigen::VectorXd x;  // frame coordinates, empty when lambda = 0
  };
  std::vector<Pair> bracket_pairs, zero_pairs;
  int begin = 0;
  for (int i = 1; i <= dv; ++i) {
    if (i != dv && std::abs(ev(i) - ev(i - 1)) <= 1e-8 * pscale) continue;
    const Eigen::MatrixXd E = v.basis() * es.eigenvectors().middleCols(begin, i - begin);
    const bool zero_group = std::abs(ev(begin)) <= 1e-8 * pscale;
    if (zero_group) {
      // any J-adapted orthonormal basis works here
      Eigen::MatrixXd picked(dim, 0);
      for (int c = 0; c < E.cols(); ++c) {
        Eigen::VectorXd cand = E.col(c);
        if (picked.cols() > 0) cand -= picked * (picked.transpose() * cand);
        if (cand.norm() < 1e-8) continue;
        cand /= cand.norm();
        Pair p;
        p.eps = cand;
        zero_pairs.push_back(p);
        picked.conservativeResize(Eigen::NoChange, picked.cols() + 2);
        picked.col(picked.cols() - 2) = cand;
        picked.col(picked.cols() - 1) = Jf * cand;
      }
    } else {
      std::vector<Eigen::MatrixXd> planes;
      if (!detail::split_into_planes(Lf, Jf, xs, E, planes)) return fail();
      for (const auto& plane : planes) {
        Pair p;
        p.eps = detail::plane_representative(plane);
        const Eigen::VectorXd u = Lf.bracket(p.eps, Eigen::VectorXd(Jf * p.eps));
        p.lambda = u.norm();
        if (p.lambda < 1e-9) return fail();
        p.x = u / p.lambda;
        bracket_pairs.push_back(p);
      }
    }
    begin = i;
  }
  if (static_cast<int>(bracket_pairs.size()) != s) return fail();
  if (static_cast<int>(bracket_pairs.size() + zero_pairs.size()) != r) return fail();
  std::stable_sort(bracket_pairs.begin(), bracket_pairs.end(),
                   [](const Pair& a, const Pair& b) { return a.lambda > b.lambda; });

  // W-part basis, incorporating the x vectors as axes where possible
  Eigen::MatrixXd wfirst(dim, n - r);
  Eigen::MatrixXd picked(dim, 0);
  int wc = 0;
  const auto try_add = [&](const Eigen::VectorXd& cand_in) {
    if (wc >= n - r) return;
    Eigen::VectorXd cand = cand_in;
    if (picked.cols() > 0) cand -= picked * (picked.transpose() * cand);
    if (cand.norm() < 1e-6) return;
    cand /= cand.norm();
    wfirst.col(wc++) = cand;
    picked.conservativeResize(Eigen::NoChange, picked.cols() + 2);
    picked.col(picked.cols() - 2) = cand;
    picked.col(picked.cols() - 1) = Jf * cand;
  };
  for (const auto& p : bracket_pairs) {
    // only incorporate when (numerically) fully outside the current span
    Eigen::VectorXd resid = p.x;
    if (picked.cols() > 0) resid -= picked * (picked.transpose() * p.x);
    if (resid.norm() > 1.0 - 1e-9) try_add(p.x);
  }
  for (int c = 0; c < w.basis().cols() && wc < n - r; ++c) try_add(w.basis().col(c));
  if (wc != n - r) return fail();

  // assemble the new basis in the orthonormal frame
  Eigen::MatrixXd first(dim, n);
  int col = 0;
  for (const auto& p : bracket_pairs) first.col(col++) = p.eps;
  for (const auto& p : zero_pairs) first.col(col++) = p.eps;
  for (int c = 0; c < n - r; ++c) first.col(col++) = wfirst.col(c);
  Eigen::MatrixXd basis(dim, dim);
  basis.leftCols(n) = first;
  basis.rightCols(n) = Jf * first;

  if ((basis.transpose() * basis - Eigen::MatrixXd::Identity(dim, dim)).norm() > 1e-8)
    return fail();

  // re-evaluate every bracket against the canonical pattern
  Eigen::VectorXd lambdas(s);
  Eigen::MatrixXd xmat(dim, s);
  for (int k = 0; k < s; ++k) {
    lambdas(k) = bracket_pairs[k].lambda;
    xmat.col(k) = bracket_pairs[k].x;
  }
  double worst = 0.0;
  for (int a = 0; a < dim; ++a)
    for (int b = a + 1; b < dim; ++b) {
      const Eigen::VectorXd br =
          Lf.bracket(Eigen::VectorXd(basis.col(a)), Eigen::VectorXd(basis.col(b)));
      Eigen::VectorXd expect = Eigen::VectorXd::Zero(dim);
      if (b == a + n && a < s) expect = lambdas(a) * xmat.col(a);
      worst = std::max(worst, (br - expect).norm());
    }
  const double bscale = std::max(1.0, lambdas.size() ? lambdas.maxCoeff() : 1.0);
  if (worst > 1e-10 * bscale) return fail();

  // verify item 2: the span statement for g^1 + J g^1
  if (w.dim() > 0) {
    Eigen::MatrixXd wcols(dim, 2 * (n - r));
    wcols << basis.middleCols(r, n - r), basis.middleCols(n + r, n - r);
    if (max_principal_angle(w, Subspace::span_of(wcols)) > 1e-8) return fail();
  }

  CanonicalSklData data;
  data.n = n;
  data.r = r;
  data.s = s;
  data.lambdas = lambdas;
  data.basis_change = U * basis;
  data.x_vectors = U * xmat;
  data.x_assign.assign(s, 0);
  for (int k = 0; k < s; ++k)
    for (int j = 0; j < dim; ++j) {
      const double dot = xmat.col(k).dot(basis.col(j));
      if (std::abs(std::abs(dot) - 1.0) < 1e-9) data.x_assign[k] = (dot > 0 ? 1 : -1) * (j + 1);
    }
  return data;
}

}  // namespace sktlab
