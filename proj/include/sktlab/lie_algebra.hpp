#pragma once

#include <Eigen/Dense>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sktlab/config.hpp"
#include "sktlab/linalg.hpp"

namespace sktlab {

/// One structure-constant term: [e_i, e_j] += c * e_k (0-based indices).
struct BracketTerm {
  int i, j, k;
  double c;
};

/// A real Lie algebra on a fixed basis, carried by its structure constants
/// c_{ij}^k with [e_i, e_j] = sum_k c_{ij}^k e_k. Stored antisymmetrized in
/// (i, j) exactly; construction validates the Jacobi identity unless the
/// unvalidated factory is used.
class LieAlgebra {
 public:
  LieAlgebra(int dim, const std::vector<BracketTerm>& terms, bool validate = true)
      : dim_(dim), c_(dim, Eigen::MatrixXd::Zero(dim, dim)) {
    for (const auto& t : terms) {
      if (t.i < 0 || t.i >= dim || t.j < 0 || t.j >= dim || t.k < 0 || t.k >= dim)
        throw std::invalid_argument("LieAlgebra: bracket index out of range");
      if (t.i == t.j) continue;
      c_[t.k](t.i, t.j) += t.c;
      c_[t.k](t.j, t.i) -= t.c;
    }
    if (validate) {
      const double r = jacobi_residual(*this);
      if (r >= 1e-10)
        throw std::invalid_argument("LieAlgebra: Jacobi identity violated, residual " +
                                    std::to_string(r));
    }
  }

  static LieAlgebra abelian(int dim) { return LieAlgebra(dim, {}); }
  static LieAlgebra unvalidated(int dim, const std::vector<BracketTerm>& terms) {
    return LieAlgebra(dim, terms, false);
  }

  int dim() const { return dim_; }
  double c(int i, int j, int k) const { return c_[k](i, j); }

  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const {
    Eigen::VectorXd z(dim_);
    for (int k = 0; k < dim_; ++k) z(k) = x.dot(c_[k] * y);
    return z;
  }

  Eigen::VectorXcd bracket_complex(const Eigen::VectorXcd& x, const Eigen::VectorXcd& y) const {
    Eigen::VectorXcd z(dim_);
    for (int k = 0; k < dim_; ++k) z(k) = x.transpose() * (c_[k] * y);
    return z;
  }

  Eigen::VectorXd bracket_basis(int i, int j) const {
    Eigen::VectorXd z(dim_);
    for (int k = 0; k < dim_; ++k) z(k) = c_[k](i, j);
    return z;
  }

  /// Matrix of ad_x: (ad_x)_{kj} = sum_i x_i c_{ij}^k.
  Eigen::MatrixXd ad(const Eigen::VectorXd& x) const {
    Eigen::MatrixXd A(dim_, dim_);
    for (int k = 0; k < dim_; ++k) A.row(k) = x.transpose() * c_[k];
    return A;
  }

  Eigen::MatrixXd ad_basis(int i) const {
    Eigen::MatrixXd A(dim_, dim_);
    for (int k = 0; k < dim_; ++k) A.row(k) = c_[k].row(i);
    return A;
  }

  /// Nonzero terms with i < j, for serialization.
  std::vector<BracketTerm> bracket_terms(double drop_tol = 0.0) const {
    std::vector<BracketTerm> out;
    for (int i = 0; i < dim_; ++i)
      for (int j = i + 1; j < dim_; ++j)
        for (int k = 0; k < dim_; ++k)
          if (std::abs(c_[k](i, j)) > drop_tol) out.push_back({i, j, k, c_[k](i, j)});
    return out;
  }

  friend double jacobi_residual(const LieAlgebra& L) {
    double worst = 0.0;
    for (int i = 0; i < L.dim_; ++i)
      for (int j = i + 1; j < L.dim_; ++j)
        for (int k = j + 1; k < L.dim_; ++k) {
          const Eigen::VectorXd r = L.bracket(L.bracket_basis(i, j), L.basis_vec(k)) +
                                    L.bracket(L.bracket_basis(j, k), L.basis_vec(i)) +
                                    L.bracket(L.bracket_basis(k, i), L.basis_vec(j));
          worst = std::max(worst, r.norm());
        }
    return worst;
  }

  Eigen::VectorXd basis_vec(int i) const { return Eigen::VectorXd::Unit(dim_, i); }

 private:
  int dim_;
  std::vector<Eigen::MatrixXd> c_;  // c_[k](i,j) = c_{ij}^k
};

inline bool is_unimodular(const LieAlgebra& L, double tol = tols().exact_zero) {
  double worst = 0.0;
  for (int i = 0; i < L.dim(); ++i) worst = std::max(worst, std::abs(L.ad_basis(i).trace()));
  return worst < tol;
}

/// Span of [g, S] for a subspace S (whole algebra when S is not given).
inline Subspace bracket_span(const LieAlgebra& L, const Subspace& S, double rel_tol = 1e-9) {
  const int n = L.dim();
  std::vector<Eigen::VectorXd> gens;
  for (int i = 0; i < n; ++i)
    for (int a = 0; a < S.dim(); ++a) gens.push_back(L.ad_basis(i) * S.basis().col(a));
  Eigen::MatrixXd M(n, static_cast<Eigen::Index>(gens.size()));
  for (std::size_t t = 0; t < gens.size(); ++t) M.col(static_cast<Eigen::Index>(t)) = gens[t];
  return Subspace::span_of(M, rel_tol);
}

inline Subspace derived_subalgebra(const LieAlgebra& L, double rel_tol = 1e-9) {
  const int n = L.dim();
  Eigen::MatrixXd M(n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M.col(i * n + j) = L.bracket_basis(i, j);
  return Subspace::span_of(M, rel_tol);
}

/// Lower central series g^1 = [g,g], g^{i+1} = [g, g^i]; stops once the
/// dimension stabilizes or hits zero. The last entry is the stable term.
inline std::vector<Subspace> lower_central_series(const LieAlgebra& L, double rel_tol = 1e-9) {
  std::vector<Subspace> series;
  series.push_back(derived_subalgebra(L, rel_tol));
  while (series.back().dim() > 0) {
    Subspace next = bracket_span(L, series.back(), rel_tol);
    if (next.dim() >= series.back().dim()) break;  // stabilized above zero
    series.push_back(std::move(next));
  }
  return series;
}

/// k for k-step nilpotent algebras; nullopt when not nilpotent.
inline std::optional<int> nilpotency_step(const LieAlgebra& L, double rel_tol = 1e-9) {
  const auto series = lower_central_series(L, rel_tol);
  if (series.back().dim() > 0) return std::nullopt;
  return static_cast<int>(series.size());
}

/// Derived series g^{(1)} = [g,g], g^{(i+1)} = [g^{(i)}, g^{(i)}].
inline std::vector<Subspace> derived_series(const LieAlgebra& L, double rel_tol = 1e-9) {
  std::vector<Subspace> series;
  series.push_back(derived_subalgebra(L, rel_tol));
  while (series.back().dim() > 0) {
    const Subspace& S = series.back();
    const int d = S.dim();
    Eigen::MatrixXd M(L.dim(), d * d);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        M.col(a * d + b) = L.bracket(Eigen::VectorXd(S.basis().col(a)), Eigen::VectorXd(S.basis().col(b)));
    Subspace next = Subspace::span_of(M, rel_tol);
    if (next.dim() >= S.dim()) break;
    series.push_back(std::move(next));
  }
  return series;
}

inline std::optional<int> solvability_step(const LieAlgebra& L, double rel_tol = 1e-9) {
  const auto series = derived_series(L, rel_tol);
  if (series.back().dim() > 0) return std::nullopt;
  return static_cast<int>(series.size());
}

/// Center as the kernel of x -> ad_x, via the stacked bracket matrix.
inline Subspace center(const LieAlgebra& L, double rel_tol = 1e-9) {
  const int n = L.dim();
  Eigen::MatrixXd A(n * n, n);
  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXd adj = L.ad_basis(j);
    A.col(j) = Eigen::Map<const Eigen::VectorXd>(adj.data(), n * n);
  }
  return Subspace(null_space(A, rel_tol));
}

/// Restriction of the bracket to a subalgebra S, in the orthonormal frame of
/// S's columns. Throws when S is not closed under the bracket.
inline LieAlgebra restrict_to(const LieAlgebra& L, const Subspace& S,
                              double tol = tols().derived) {
  const int d = S.dim();
  std::vector<BracketTerm> terms;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      const Eigen::VectorXd br =
          L.bracket(Eigen::VectorXd(S.basis().col(a)), Eigen::VectorXd(S.basis().col(b)));
      if (S.residual(br) > tol * std::max(1.0, br.norm()))
        throw std::invalid_argument("restrict_to: subspace is not a subalgebra");
      for (int c = 0; c < d; ++c) {
        const double v = S.basis().col(c).dot(br);
        if (v != 0.0) terms.push_back({a, b, c, v});
      }
    }
  return LieAlgebra(d, terms);
}

}  // namespace sktlab
