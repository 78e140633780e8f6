#pragma once

// Shared generators and brute-force oracles for the test suites. Everything
// here is independent of the library's computational paths: evaluation goes
// through permutation sums and direct formula transcription, never through
// the coefficient pipelines under test.

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

#include "sktlab/complex_structure.hpp"
#include "sktlab/kform.hpp"
#include "sktlab/lie_algebra.hpp"

namespace oracle {

using sktlab::Complex;
using sktlab::KForm;

inline int permutation_sign(std::vector<int> p) {
  int sign = 1;
  for (std::size_t i = 0; i < p.size(); ++i)
    while (p[i] != static_cast<int>(i)) {
      std::swap(p[i], p[p[i]]);
      sign = -sign;
    }
  return sign;
}

/// Wedge by explicit antisymmetrization:
/// (a ^ b)(v_1..v_{p+q}) = (1/p!q!) sum_sigma sgn(sigma) a(v_sigma..) b(v_sigma..).
inline Complex wedge_eval(const KForm& a, const KForm& b, const Eigen::MatrixXcd& V) {
  const int p = a.degree(), q = b.degree();
  std::vector<int> perm(p + q);
  std::iota(perm.begin(), perm.end(), 0);
  Complex acc = 0.0;
  double fact = 1.0;
  for (int i = 2; i <= p; ++i) fact *= i;
  for (int i = 2; i <= q; ++i) fact *= i;
  do {
    Eigen::MatrixXcd Va(V.rows(), p), Vb(V.rows(), q);
    for (int i = 0; i < p; ++i) Va.col(i) = V.col(perm[i]);
    for (int i = 0; i < q; ++i) Vb.col(i) = V.col(perm[p + i]);
    acc += double(permutation_sign(perm)) * a.eval(Va) * b.eval(Vb);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return acc / fact;
}

/// Chevalley-Eilenberg differential evaluated pointwise on vectors.
inline Complex ce_eval(const KForm& a, const sktlab::LieAlgebra& L, const Eigen::MatrixXd& V) {
  const int k = a.degree();
  Complex acc = 0.0;
  for (int p = 0; p <= k; ++p)
    for (int q = p + 1; q <= k; ++q) {
      Eigen::MatrixXd args(V.rows(), k);
      args.col(0) = L.bracket(Eigen::VectorXd(V.col(p)), Eigen::VectorXd(V.col(q)));
      int t = 1;
      for (int s = 0; s <= k; ++s)
        if (s != p && s != q) args.col(t++) = V.col(s);
      const double sgn = ((p + q) % 2 == 0) ? 1.0 : -1.0;
      acc += sgn * a.eval(args);
    }
  return acc;
}

/// Koszul formula for the Levi-Civita connection on a left-invariant frame:
/// 2 g(nabla_x y, z) = g([x,y],z) - g([y,z],x) + g([z,x],y).
inline double koszul(const sktlab::LieAlgebra& L, const Eigen::MatrixXd& G, int i, int j, int k) {
  const Eigen::VectorXd ei = L.basis_vec(i), ej = L.basis_vec(j), ek = L.basis_vec(k);
  return 0.5 * (L.bracket_basis(i, j).dot(G * ek) - L.bracket_basis(j, k).dot(G * ei) +
                L.bracket_basis(k, i).dot(G * ej));
}

/// The quadruple expression whose vanishing characterizes pluriclosed inner
/// products under an abelian complex structure:
/// g([y,z],[w,x]) - g([x,z],[w,y]) + g([x,y],[w,z]).
inline double quadruple_expression(const sktlab::LieAlgebra& L, const Eigen::MatrixXd& G, int w,
                                   int x, int y, int z) {
  const auto g = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v) { return u.dot(G * v); };
  return g(L.bracket_basis(y, z), L.bracket_basis(w, x)) -
         g(L.bracket_basis(x, z), L.bracket_basis(w, y)) +
         g(L.bracket_basis(x, y), L.bracket_basis(w, z));
}

struct Rng {
  explicit Rng(unsigned seed) : gen(seed) {}
  std::mt19937_64 gen;
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }

  Eigen::VectorXd vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  Eigen::MatrixXd matrix(int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = normal();
    return m;
  }

  /// Random positive-definite matrix with a safe eigenvalue floor.
  Eigen::MatrixXd spd(int n, double ridge = 0.5) {
    const Eigen::MatrixXd A = matrix(n, n);
    return A * A.transpose() / n + ridge * Eigen::MatrixXd::Identity(n, n);
  }

  /// Random J-Hermitian positive-definite metric.
  Eigen::MatrixXd hermitian_metric(const sktlab::ComplexStructure& J, double ridge = 0.5) {
    const Eigen::MatrixXd G0 = spd(J.dim(), ridge);
    return 0.5 * (G0 + J.matrix().transpose() * G0 * J.matrix());
  }

  /// Random k-form with N(0,1) complex coefficients.
  KForm form(int dim, int k) {
    KForm f(dim, k);
    for (Eigen::Index i = 0; i < f.coefficients().size(); ++i)
      f.coefficients()(i) = Complex(normal(), normal());
    return f;
  }

  KForm real_form(int dim, int k) {
    KForm f(dim, k);
    for (Eigen::Index i = 0; i < f.coefficients().size(); ++i)
      f.coefficients()(i) = Complex(normal(), 0.0);
    return f;
  }

  /// Random 2-step nilpotent bracket: [g, g] lands in the span of the last
  /// `central` basis vectors, which are central.
  sktlab::LieAlgebra two_step(int dim, int central) {
    std::vector<sktlab::BracketTerm> terms;
    const int head = dim - central;
    for (int i = 0; i < head; ++i)
      for (int j = i + 1; j < head; ++j)
        for (int k = head; k < dim; ++k)
          if (integer(0, 2) == 0) terms.push_back({i, j, k, normal()});
    return sktlab::LieAlgebra(dim, terms);
  }

  /// Random orthogonal matrix (QR of a Gaussian matrix).
  Eigen::MatrixXd orthogonal(int n) {
    const Eigen::MatrixXd A = matrix(n, n);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    Eigen::MatrixXd Q = qr.householderQ();
    // fix determinant signs for determinism of span, not required but tidy
    return Q;
  }
};

}  // namespace oracle
