#pragma once

#include <Eigen/Dense>

#include "sktlab/complex_structure.hpp"
#include "sktlab/kform.hpp"
#include "sktlab/lie_algebra.hpp"

namespace sktlab {

/// Chevalley-Eilenberg differential of a left-invariant k-form:
/// da(x_0,...,x_k) = sum_{p<q} (-1)^{p+q} a([x_p,x_q], x_0,...,^x_p,...,^x_q,...).
/// In particular da(x,y) = -a([x,y]) on 1-forms.
inline KForm ce_differential(const KForm& a, const LieAlgebra& L) {
  if (a.dim() != L.dim()) throw std::invalid_argument("ce_differential: dimension mismatch");
  const int k = a.degree();
  KForm out(a.dim(), k + 1);
  if (k + 1 > a.dim()) return out;
  const Combinations combos(a.dim(), k + 1);
  std::vector<int> K(k + 1), rest(k > 0 ? k - 1 : 0), args(k);
  std::size_t r = 0;
  combos.first(K);
  do {
    Complex acc = 0.0;
    for (int p = 0; p < k + 1; ++p)
      for (int q = p + 1; q < k + 1; ++q) {
        const Eigen::VectorXd br = L.bracket_basis(K[p], K[q]);
        if (br.isZero(0.0)) continue;
        // remaining arguments with positions p, q removed
        int t = 0;
        for (int s = 0; s < k + 1; ++s)
          if (s != p && s != q) rest[t++] = K[s];
        Complex inner = 0.0;
        for (int m = 0; m < a.dim(); ++m) {
          if (br(m) == 0.0) continue;
          args[0] = m;
          for (int s = 0; s + 1 < k; ++s) args[s + 1] = rest[s];
          const Complex v = a.on_basis(args);
          if (v != 0.0) inner += br(m) * v;
        }
        const int sgn = ((p + q) % 2 == 0) ? 1 : -1;
        acc += double(sgn) * inner;
      }
    out.coefficients()(static_cast<Eigen::Index>(r++)) = acc;
  } while (combos.next(K));
  return out;
}

/// Slotwise action of J on forms: (Ja)(x_1,...,x_k) = a(Jx_1,...,Jx_k).
inline KForm j_pullback(const KForm& a, const ComplexStructure& J) {
  if (a.dim() != J.dim()) throw std::invalid_argument("j_pullback: dimension mismatch");
  return a.pullback(J.matrix());
}

/// Complex frame Z_k = (v_k - i J v_k)/2 over a J-adapted real frame; columns
/// 0..n-1 hold the Z_k, columns n..2n-1 their conjugates.
class ComplexFrame {
 public:
  explicit ComplexFrame(const ComplexStructure& J) {
    const int dim = J.dim();
    const int n = dim / 2;
    const Eigen::MatrixXd B = j_adapted_frame(J);
    Z_ = Eigen::MatrixXcd(dim, dim);
    for (int k = 0; k < n; ++k) {
      const Eigen::VectorXcd z =
          0.5 * (B.col(k).cast<Complex>() - Complex(0, 1) * B.col(n + k).cast<Complex>());
      Z_.col(k) = z;
      Z_.col(n + k) = z.conjugate();
    }
    Zinv_ = Z_.inverse();
    n_ = n;
  }

  int n() const { return n_; }
  const Eigen::MatrixXcd& matrix() const { return Z_; }

  /// Coefficients of `a` in the complex coframe (phi, phibar).
  KForm to_frame(const KForm& a) const { return a.pullback(Z_); }
  KForm from_frame(const KForm& a) const { return a.pullback(Zinv_); }

 private:
  int n_;
  Eigen::MatrixXcd Z_, Zinv_;
};

/// Zeroes every frame coefficient whose holomorphic index count differs from
/// p. `f` must already be expressed in the complex coframe.
inline void mask_bidegree_in_frame(KForm& f, int n, int p) {
  if (f.degree() == 0) {
    if (p != 0) f.coefficients().setZero();
    return;
  }
  const Combinations& combos = f.combinations();
  std::vector<int> idx(f.degree());
  std::size_t r = 0;
  combos.first(idx);
  do {
    int holo = 0;
    for (int v : idx)
      if (v < n) ++holo;
    if (holo != p) f.coefficients()(static_cast<Eigen::Index>(r)) = 0.0;
    ++r;
  } while (combos.next(idx));
}

inline KForm bidegree_project(const KForm& a, const ComplexFrame& frame, int p, int q) {
  if (p < 0 || q < 0 || p + q != a.degree())
    throw std::invalid_argument("bidegree_project: p+q must equal the degree");
  KForm f = frame.to_frame(a);
  mask_bidegree_in_frame(f, frame.n(), p);
  return frame.from_frame(f);
}

/// Projection onto the (p, q)-component of a complexified k-form.
inline KForm bidegree_project(const KForm& a, const ComplexStructure& J, int p, int q) {
  return bidegree_project(a, ComplexFrame(J), p, q);
}

/// Dolbeault operators for integrable J, applied componentwise over the
/// bidegree split: del = sum_pq P^{p+1,q} d P^{p,q}, delbar likewise.
inline KForm dolbeault_op(const KForm& a, const LieAlgebra& L, const ComplexFrame& frame,
                          bool bar) {
  KForm out(a.dim(), a.degree() + 1);
  for (int p = 0; p <= a.degree(); ++p) {
    const int q = a.degree() - p;
    KForm comp = bidegree_project(a, frame, p, q);
    if (comp.is_zero(0.0)) continue;
    KForm dcomp = frame.to_frame(ce_differential(comp, L));
    mask_bidegree_in_frame(dcomp, frame.n(), bar ? p : p + 1);
    out += frame.from_frame(dcomp);
  }
  return out;
}

inline KForm dolbeault_del(const KForm& a, const LieAlgebra& L, const ComplexStructure& J) {
  return dolbeault_op(a, L, ComplexFrame(J), false);
}

inline KForm dolbeault_delbar(const KForm& a, const LieAlgebra& L, const ComplexStructure& J) {
  return dolbeault_op(a, L, ComplexFrame(J), true);
}

/// The operator a -> d(J(d a)) whose vanishing on the fundamental form is the
/// pluriclosed condition.
inline KForm d_J_d(const KForm& a, const LieAlgebra& L, const ComplexStructure& J) {
  return ce_differential(j_pullback(ce_differential(a, L), J), L);
}

}  // namespace sktlab
