#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <vector>

#include "sktlab/multi_index.hpp"

namespace sktlab {

using Complex = std::complex<double>;

/// Alternating k-linear form on R^dim (complexified), stored densely on
/// strictly increasing multi-indices in the coordinate coframe.
///
/// Conventions: (e^{i1} ^ ... ^ e^{ik})(v_1,...,v_k) = det(e^{ia}(v_b)),
/// so e^1 ^ e^2 evaluated on (e_1, e_2) gives 1 and on (e_2, e_1) gives -1.
class KForm {
 public:
  /// Degrees above the ambient dimension are allowed and identically zero
  /// (the coefficient vector is empty); d of a top form then stays total.
  KForm(int dim, int degree)
      : dim_(dim), degree_(degree), combos_(dim, degree),
        coef_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(combos_.count()))) {
    if (degree < 0) throw std::invalid_argument("KForm: negative degree");
  }

  /// The basis covector e^i.
  static KForm covector(int dim, int i) {
    KForm f(dim, 1);
    f.coef_(i) = 1.0;
    return f;
  }

  /// e^{i1} ^ ... ^ e^{ik} for an arbitrary (possibly unsorted) index tuple.
  static KForm wedge_basis(int dim, std::vector<int> idx, Complex c = 1.0) {
    KForm f(dim, static_cast<int>(idx.size()));
    const int sign = sort_with_sign(idx);
    if (sign != 0) f.coef_(static_cast<Eigen::Index>(f.combos_.rank(idx))) = c * double(sign);
    return f;
  }

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  const Eigen::VectorXcd& coefficients() const { return coef_; }
  Eigen::VectorXcd& coefficients() { return coef_; }
  const Combinations& combinations() const { return combos_; }

  /// Coefficient on a strictly increasing multi-index.
  Complex coef(std::span<const int> increasing) const {
    return coef_(static_cast<Eigen::Index>(combos_.rank(increasing)));
  }

  /// Value on an arbitrary (possibly unsorted, possibly repeating) basis
  /// tuple; handles the antisymmetry sign.
  Complex on_basis(std::vector<int> idx) const {
    const int sign = sort_with_sign(idx);
    if (sign == 0) return 0.0;
    return double(sign) * coef_(static_cast<Eigen::Index>(combos_.rank(idx)));
  }

  void set_on_basis(std::vector<int> idx, Complex v) {
    const int sign = sort_with_sign(idx);
    if (sign == 0) {
      if (std::abs(v) != 0.0) throw std::invalid_argument("KForm: degenerate index tuple");
      return;
    }
    coef_(static_cast<Eigen::Index>(combos_.rank(idx))) = double(sign) * v;
  }

  /// Full multilinear evaluation: columns of V are the argument vectors.
  Complex eval(const Eigen::MatrixXcd& V) const {
    if (V.rows() != dim_ || V.cols() != degree_)
      throw std::invalid_argument("KForm::eval: argument shape mismatch");
    if (coef_.size() == 0) return 0.0;
    if (degree_ == 0) return coef_(0);
    Complex acc = 0.0;
    std::vector<int> idx(degree_);
    Eigen::MatrixXcd sub(degree_, degree_);
    std::size_t r = 0;
    if (!combos_.first(idx)) return 0.0;
    do {
      const Complex c = coef_(static_cast<Eigen::Index>(r++));
      if (c != 0.0) {
        for (int a = 0; a < degree_; ++a)
          for (int b = 0; b < degree_; ++b) sub(a, b) = V(idx[a], b);
        acc += c * sub.determinant();
      }
    } while (combos_.next(idx));
    return acc;
  }

  Complex eval(const Eigen::MatrixXd& V) const { return eval(Eigen::MatrixXcd(V.cast<Complex>())); }

  /// Pullback along the linear map with matrix M (columns = images of the
  /// basis): (M^* a)(v_1,...) = a(M v_1, ...).
  KForm pullback(const Eigen::MatrixXcd& M) const {
    if (M.rows() != dim_ || M.cols() != dim_)
      throw std::invalid_argument("KForm::pullback: matrix shape mismatch");
    KForm out(dim_, degree_);
    if (degree_ == 0) {
      out.coef_ = coef_;
      return out;
    }
    const int k = degree_;
    std::vector<int> I(k), J(k);
    Eigen::MatrixXcd cols(dim_, k), sub(k, k);
    std::size_t ri = 0;
    if (!combos_.first(I)) return out;
    do {
      for (int b = 0; b < k; ++b) cols.col(b) = M.col(I[b]);
      Complex acc = 0.0;
      std::size_t rj = 0;
      combos_.first(J);
      do {
        const Complex c = coef_(static_cast<Eigen::Index>(rj++));
        if (c != 0.0) {
          for (int a = 0; a < k; ++a) sub.row(a) = cols.row(J[a]);
          acc += c * sub.determinant();
        }
      } while (combos_.next(J));
      out.coef_(static_cast<Eigen::Index>(ri++)) = acc;
    } while (combos_.next(I));
    return out;
  }

  KForm pullback(const Eigen::MatrixXd& M) const { return pullback(Eigen::MatrixXcd(M.cast<Complex>())); }

  KForm conjugate() const {
    KForm out(dim_, degree_);
    out.coef_ = coef_.conjugate();
    return out;
  }

  double max_abs() const { return coef_.size() ? coef_.cwiseAbs().maxCoeff() : 0.0; }
  double max_imag() const { return coef_.size() ? coef_.imag().cwiseAbs().maxCoeff() : 0.0; }
  bool is_zero(double tol) const { return max_abs() <= tol; }

  KForm& operator+=(const KForm& o) {
    check_same(o);
    coef_ += o.coef_;
    return *this;
  }
  KForm& operator-=(const KForm& o) {
    check_same(o);
    coef_ -= o.coef_;
    return *this;
  }
  KForm& operator*=(Complex s) {
    coef_ *= s;
    return *this;
  }
  friend KForm operator+(KForm a, const KForm& b) { return a += b; }
  friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
  friend KForm operator*(Complex s, KForm a) { return a *= s; }
  friend KForm operator*(KForm a, Complex s) { return a *= s; }
  friend KForm operator-(KForm a) { return a *= Complex(-1.0); }

  friend KForm wedge(const KForm& a, const KForm& b) {
    if (a.dim_ != b.dim_) throw std::invalid_argument("wedge: dimension mismatch");
    if (a.degree_ + b.degree_ > a.dim_)
      throw std::invalid_argument("wedge: degrees sum beyond ambient dimension");
    KForm out(a.dim_, a.degree_ + b.degree_);
    std::vector<int> I(a.degree_), J(b.degree_), K;
    std::size_t ri = 0;
    if (a.degree_ == 0 || b.degree_ == 0) {
      // scalar times form
      const KForm& f = a.degree_ == 0 ? b : a;
      const Complex s = (a.degree_ == 0 ? a.coef_(0) : b.coef_(0));
      out.coef_ = f.coef_ * s;
      return out;
    }
    if (!a.combos_.first(I)) return out;
    do {
      const Complex ca = a.coef_(static_cast<Eigen::Index>(ri++));
      if (ca == 0.0) continue;
      std::size_t rj = 0;
      b.combos_.first(J);
      do {
        const Complex cb = b.coef_(static_cast<Eigen::Index>(rj++));
        if (cb == 0.0) continue;
        const int sign = merge_with_sign(I, J, K);
        if (sign != 0)
          out.coef_(static_cast<Eigen::Index>(out.combos_.rank(K))) += double(sign) * ca * cb;
      } while (b.combos_.next(J));
    } while (a.combos_.next(I));
    return out;
  }

  /// k-fold wedge power.
  friend KForm wedge_power(const KForm& a, int k) {
    KForm out(a.dim(), 0);
    out.coefficients()(0) = 1.0;
    for (int i = 0; i < k; ++i) out = wedge(out, a);
    return out;
  }

 private:
  void check_same(const KForm& o) const {
    if (dim_ != o.dim_ || degree_ != o.degree_)
      throw std::invalid_argument("KForm: dimension/degree mismatch");
  }

  int dim_, degree_;
  Combinations combos_;
  Eigen::VectorXcd coef_;
};

}  // namespace sktlab
