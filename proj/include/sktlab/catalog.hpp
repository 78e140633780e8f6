#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "sktlab/complex_structure.hpp"
#include "sktlab/exterior.hpp"
#include "sktlab/hermitian.hpp"
#include "sktlab/lie_algebra.hpp"
#include "sktlab/structeq.hpp"

namespace sktlab {

// ---------------------------------------------------------------------------
// Realification of complex structure equations.
//
// Conventions (locked by the round-trip test below): Z_k = (e_{2k-1} - i e_{2k})/2
// with J e_{2k-1} = e_{2k}, so e_{2k-1} = Z_k + conj(Z_k) and
// e_{2k} = i (Z_k - conj(Z_k)); the coframe is phi^k = e^{2k-1} + i e^{2k};
// d alpha(x, y) = -alpha([x, y]).
// ---------------------------------------------------------------------------

namespace catalog_detail {

/// Value of the 2-form phi^{pair} on complex basis vectors (W_a, W_b) where
/// W_a = Z_a for a < n and conj(Z_{a-n}) otherwise.
inline Complex pair_eval(const WedgePair& p, int n, int a, int b) {
  const int x = p.a_bar ? n + p.a - 1 : p.a - 1;
  const int y = p.b_bar ? n + p.b - 1 : p.b - 1;
  const double d1 = (x == a && y == b) ? 1.0 : 0.0;
  const double d2 = (x == b && y == a) ? 1.0 : 0.0;
  return Complex(d1 - d2, 0.0);
}

}  // namespace catalog_detail

/// The complex frame matrix of the interleaved layout: column k holds
/// Z_k = (e_{2k} - i e_{2k+1})/2 (0-based), column n+k its conjugate.
inline Eigen::MatrixXcd interleaved_complex_frame(int n) {
  Eigen::MatrixXcd Z = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    Z(2 * k, k) = Complex(0.5, 0.0);
    Z(2 * k + 1, k) = Complex(0.0, -0.5);
    Z(2 * k, n + k) = Complex(0.5, 0.0);
    Z(2 * k + 1, n + k) = Complex(0.0, 0.5);
  }
  return Z;
}

/// phi^k of the interleaved layout as a complex-valued covector.
inline KForm interleaved_coframe(int n, int k) {
  KForm f = KForm::covector(2 * n, 2 * k);
  f += Complex(0, 1) * KForm::covector(2 * n, 2 * k + 1);
  return f;
}

/// Converts structure equations dphi^k = sum c * phi^{..} into a real Lie
/// algebra with the interleaved complex structure. Throws when the equations
/// violate d^2 = 0 (equivalently the Jacobi identity on the recovered brackets).
inline std::pair<LieAlgebra, ComplexStructure> realify(const StructureEquationSpec& spec) {
  const int n = spec.n;
  const int dim = 2 * n;

  // dphi^c evaluated on the complex basis (W_a, W_b)
  const auto dphi_val = [&](int c, int a, int b) -> Complex {
    Complex acc = 0.0;
    for (const auto& t : spec.equations[c]) {
      const Complex coef = t.param.empty() ? t.literal : spec.param_value(t.param) * t.literal;
      acc += coef * catalog_detail::pair_eval(t.pair, n, a, b);
    }
    return acc;
  };
  const auto conj_index = [&](int a) { return a < n ? a + n : a - n; };
  // [W_a, W_b] components: alpha_c along Z_c, beta_c along conj(Z_c)
  const auto complex_bracket = [&](int a, int b, Eigen::VectorXcd& alpha,
                                   Eigen::VectorXcd& beta) {
    alpha.setZero(n);
    beta.setZero(n);
    for (int c = 0; c < n; ++c) {
      alpha(c) = -dphi_val(c, a, b);
      beta(c) = -std::conj(dphi_val(c, conj_index(a), conj_index(b)));
    }
  };

  // expansion coefficients of real basis vectors over (Z, conj Z)
  Eigen::MatrixXcd coords = Eigen::MatrixXcd::Zero(2 * n, dim);  // rows: W index, cols: e index
  for (int k = 0; k < n; ++k) {
    coords(k, 2 * k) = 1.0;
    coords(n + k, 2 * k) = 1.0;
    coords(k, 2 * k + 1) = Complex(0, 1);
    coords(n + k, 2 * k + 1) = Complex(0, -1);
  }

  std::vector<BracketTerm> terms;
  Eigen::VectorXcd alpha(n), beta(n);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      Eigen::VectorXcd acc_alpha = Eigen::VectorXcd::Zero(n);
      Eigen::VectorXcd acc_beta = Eigen::VectorXcd::Zero(n);
      for (int a = 0; a < 2 * n; ++a) {
        if (coords(a, i) == Complex(0.0)) continue;
        for (int b = 0; b < 2 * n; ++b) {
          if (coords(b, j) == Complex(0.0)) continue;
          complex_bracket(a, b, alpha, beta);
          acc_alpha += coords(a, i) * coords(b, j) * alpha;
          acc_beta += coords(a, i) * coords(b, j) * beta;
        }
      }
      // reality: beta must be the conjugate of alpha
      if ((acc_beta - acc_alpha.conjugate()).norm() > 1e-10)
        throw std::invalid_argument("realify: non-real bracket, equations are inconsistent");
      for (int c = 0; c < n; ++c) {
        const double re = acc_alpha(c).real(), im = acc_alpha(c).imag();
        if (re != 0.0) terms.push_back({i, j, 2 * c, re});
        if (im != 0.0) terms.push_back({i, j, 2 * c + 1, im});
      }
    }

  const LieAlgebra unchecked = LieAlgebra::unvalidated(dim, terms);
  const double jr = jacobi_residual(unchecked);
  if (jr >= 1e-10)
    throw std::invalid_argument(
        "realify: structure equations violate d^2 = 0 (Jacobi residual " + std::to_string(jr) +
        ")");
  return {LieAlgebra(dim, terms), ComplexStructure::interleaved(dim)};
}

/// Max deviation between the stated equations and the Chevalley-Eilenberg
/// differential of the recovered coframe, coefficientwise over the complex
/// frame. Zero (to roundoff) certifies the realification round-trip.
inline double structure_equation_residual(const StructureEquationSpec& spec, const LieAlgebra& L) {
  const int n = spec.n;
  const Eigen::MatrixXcd Z = interleaved_complex_frame(n);
  double worst = 0.0;
  for (int k = 0; k < n; ++k) {
    const KForm dphi = ce_differential(interleaved_coframe(n, k), L);
    const KForm in_frame = dphi.pullback(Z);
    // expected coefficients on increasing complex-frame index pairs
    KForm expected(2 * n, 2);
    for (const auto& t : spec.equations[k]) {
      const Complex coef = t.param.empty() ? t.literal : spec.param_value(t.param) * t.literal;
      const int x = t.pair.a_bar ? n + t.pair.a - 1 : t.pair.a - 1;
      const int y = t.pair.b_bar ? n + t.pair.b - 1 : t.pair.b - 1;
      expected.set_on_basis({x, y}, expected.on_basis({x, y}) + coef);
    }
    worst = std::max(worst, (in_frame - expected).max_abs());
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Catalog entries
// ---------------------------------------------------------------------------

struct ExpectedProps {
  std::optional<int> step;
  std::optional<bool> unimodular;
  std::optional<bool> abelian_j;
  std::optional<bool> skl_with_default_metric;
};

struct CatalogEntry {
  std::string name;
  std::string params;
  LieAlgebra algebra;
  ComplexStructure J;
  Metric default_metric;
  ExpectedProps expected;

  /// Re-verifies the declared properties with the corresponding checkers.
  void verify() const {
    if (expected.step) {
      const auto s = nilpotency_step(algebra);
      if (!s || *s != *expected.step)
        throw InconsistencyError("catalog " + name + ": nilpotency step mismatch");
    }
    if (expected.unimodular && is_unimodular(algebra) != *expected.unimodular)
      throw InconsistencyError("catalog " + name + ": unimodularity mismatch");
    if (expected.abelian_j && is_abelian(algebra, J) != *expected.abelian_j)
      throw InconsistencyError("catalog " + name + ": abelian-J mismatch");
    if (expected.skl_with_default_metric &&
        skl_residuals(algebra, J, default_metric).is_skl() != *expected.skl_with_default_metric)
      throw InconsistencyError("catalog " + name + ": SKL verdict mismatch");
  }
};

/// The 2n-dimensional abelian algebra with the split complex structure.
inline CatalogEntry abelian_entry(int n) {
  CatalogEntry e{"abelian",
                 "n=" + std::to_string(n),
                 LieAlgebra::abelian(2 * n),
                 ComplexStructure::split(2 * n),
                 Metric::identity(2 * n),
                 {}};
  e.expected.step = 1;
  e.expected.unimodular = true;
  e.expected.abelian_j = true;
  e.expected.skl_with_default_metric = true;
  return e;
}

/// Canonical 2-step family in normal form: J eps_i = eps_{n+i}, the only
/// brackets are [eps_i, eps_{n+i}] = lambda_i x_i with x_i distinct basis
/// directions in the g^1 + J g^1 block. `x_assign` uses 1-based basis
/// indices in {r+1..n} u {n+r+1..2n}; empty selects the default assignment.
inline CatalogEntry canonical_skl(int n, int r, int s, std::vector<double> lambdas,
                                  std::vector<int> x_assign = {}) {
  if (!(n - r <= s && s <= std::min(r, 2 * (n - r))) || r < 0 || r > n)
    throw std::invalid_argument("canonical_skl: need n - r <= s <= min(r, 2(n-r))");
  if (static_cast<int>(lambdas.size()) != s)
    throw std::invalid_argument("canonical_skl: need s lambda values");
  for (double l : lambdas)
    if (l <= 0.0) throw std::invalid_argument("canonical_skl: lambdas must be positive");
  if (x_assign.empty()) {
    for (int i = 0; i < s; ++i)
      x_assign.push_back(i < n - r ? r + 1 + i : n + r + 1 + (i - (n - r)));
  }
  if (static_cast<int>(x_assign.size()) != s)
    throw std::invalid_argument("canonical_skl: need s assignment indices");
  std::vector<bool> used(2 * n + 1, false);
  for (int idx : x_assign) {
    const bool in_w =
        (idx >= r + 1 && idx <= n) || (idx >= n + r + 1 && idx <= 2 * n);
    if (!in_w || used[idx])
      throw std::invalid_argument("canonical_skl: x assignment must pick distinct directions in "
                                  "the g1+Jg1 block");
    used[idx] = true;
  }
  std::vector<BracketTerm> terms;
  for (int i = 0; i < s; ++i) terms.push_back({i, n + i, x_assign[i] - 1, lambdas[i]});
  std::string p = "n=" + std::to_string(n) + ",r=" + std::to_string(r) + ",s=" + std::to_string(s);
  CatalogEntry e{"canonical_skl",
                 p,
                 LieAlgebra(2 * n, terms),
                 ComplexStructure::split(2 * n),
                 Metric::identity(2 * n),
                 {}};
  e.expected.step = s > 0 ? 2 : 1;
  e.expected.unimodular = true;
  e.expected.abelian_j = true;
  e.expected.skl_with_default_metric = true;
  return e;
}

/// Kodaira-Thurston algebra [e1, e3] = lambda e2 with J e1 = e3, J e2 = e4:
/// the minimal canonical entry, canonical_skl(2, 1, 1, {lambda}).
inline CatalogEntry kodaira_thurston(double lambda) {
  CatalogEntry e = canonical_skl(2, 1, 1, {lambda});
  e.name = "kt";
  e.params = "lambda=" + std::to_string(lambda);
  return e;
}

/// The 2-dimensional non-unimodular algebra [e1, e2] = e2 with J e1 = e2.
inline CatalogEntry aff2() {
  CatalogEntry e{"aff2",
                 "",
                 LieAlgebra(2, {{0, 1, 1, 1.0}}),
                 ComplexStructure::interleaved(2),
                 Metric::identity(2),
                 {}};
  e.expected.unimodular = false;
  e.expected.abelian_j = true;
  return e;
}

/// Structure equations of the 8-dimensional 3-step example:
/// dphi1 = dphi2 = 0, dphi3 = phi1^phibar1,
/// dphi4 = B11 phi1^phibar1 + B13 (phi1^phibar2 + phi1^phibar3)
///       + D31 (phi2^phibar1 + phi3^phibar1).
inline StructureEquationSpec example8_spec(Complex B11, Complex B13, Complex D31) {
  StructureEquationSpec spec;
  spec.n = 4;
  spec.params = {{"B11", B11}, {"B13", B13}, {"D31", D31}};
  spec.equations.assign(4, {});
  const auto mixed = [](int a, int b) {
    WedgePair p;
    p.a = a;
    p.b = b;
    p.a_bar = false;
    p.b_bar = true;
    return p;
  };
  spec.equations[2].push_back({Complex(1.0), "", mixed(1, 1)});
  spec.equations[3].push_back({Complex(1.0), "B11", mixed(1, 1)});
  spec.equations[3].push_back({Complex(1.0), "B13", mixed(1, 2)});
  spec.equations[3].push_back({Complex(1.0), "B13", mixed(1, 3)});
  spec.equations[3].push_back({Complex(1.0), "D31", mixed(2, 1)});
  spec.equations[3].push_back({Complex(1.0), "D31", mixed(3, 1)});
  return spec;
}

/// The realified 8-dimensional 3-step nilpotent entry. D31 must be nonzero;
/// D31 = 0 degenerates to step <= 2 and is rejected for this entry.
inline CatalogEntry example_8dim(Complex B11 = 0.0, Complex B13 = 0.0, Complex D31 = 1.0) {
  if (std::abs(D31) == 0.0)
    throw std::invalid_argument("example_8dim: D31 must be nonzero (otherwise step <= 2)");
  auto [L, J] = realify(example8_spec(B11, B13, D31));
  CatalogEntry e{"example8", "D31=...", std::move(L), std::move(J), Metric::identity(8), {}};
  e.expected.step = 3;
  e.expected.unimodular = true;
  e.expected.abelian_j = true;
  return e;
}

/// Parameters of the diagonal-plus-off-diagonal metric family on the
/// 8-dimensional example: omega = i x11 phi^{1 1b} + i x22 phi^{2 2b}
/// + i x33 phi^{3 3b} + sum_{k<l<=3} (x_kl phi^{k lb} - conj(x_kl) phi^{l kb})
/// + (i/2) phi^{4 4b}.
struct Example8MetricParams {
  double x11 = 1.0, x22 = 1.0, x33 = 1.0;
  Complex x12 = 0.0, x13 = 0.0, x23 = 0.0;
};

inline KForm example8_omega(const Example8MetricParams& p) {
  const int n = 4;
  std::vector<KForm> phi, phibar;
  for (int k = 0; k < n; ++k) {
    phi.push_back(interleaved_coframe(n, k));
    phibar.push_back(phi.back().conjugate());
  }
  const auto pq = [&](int k, int l) { return wedge(phi[k], phibar[l]); };
  const Complex I(0, 1);
  KForm w(2 * n, 2);
  w += I * double(p.x11) * pq(0, 0);
  w += I * double(p.x22) * pq(1, 1);
  w += I * double(p.x33) * pq(2, 2);
  w += Complex(0, 0.5) * pq(3, 3);
  const auto off = [&](int k, int l, Complex x) {
    w += x * pq(k, l);
    w -= std::conj(x) * pq(l, k);
  };
  off(0, 1, p.x12);
  off(0, 2, p.x13);
  off(1, 2, p.x23);
  return w;
}

/// Gram matrix of the family member via g(x, y) = omega(x, Jy); no
/// positivity check here so boundary points can be examined.
inline Eigen::MatrixXd example8_gram(const Example8MetricParams& p) {
  const KForm w = example8_omega(p);
  const ComplexStructure J = ComplexStructure::interleaved(8);
  Eigen::MatrixXd G(8, 8);
  Eigen::MatrixXcd V(8, 2);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) {
      V.col(0) = Eigen::VectorXd::Unit(8, i).cast<Complex>();
      V.col(1) = (J.matrix() * Eigen::VectorXd::Unit(8, j)).cast<Complex>();
      const Complex v = w.eval(V);
      G(i, j) = v.real();
    }
  return 0.5 * (G + G.transpose());
}

/// Member of the metric family; throws unless the Gram matrix is positive
/// definite.
inline Metric example8_metric(const Example8MetricParams& p) { return Metric(example8_gram(p)); }

/// The linear functional on the family parameters whose vanishing is the
/// astheno-Kaehler condition for this example (the coefficient pattern is
/// pinned by the exterior-calculus oracle in the test suite).
inline double example8_astheno_constraint(const Example8MetricParams& p) {
  return p.x22 + p.x33 - 2.0 * p.x23.imag();
}

/// The extreme point of the astheno slice: x22 = x33 = t, x23 = i t. The
/// Gram matrix there is positive semidefinite with a two-dimensional kernel,
/// never positive definite; see the catalog tests for the verification.
inline Example8MetricParams example8_astheno_boundary(double t = 1.0) {
  Example8MetricParams p;
  p.x11 = 1.0;
  p.x22 = t;
  p.x33 = t;
  p.x23 = Complex(0.0, t);
  return p;
}

}  // namespace sktlab
