#include <catch2/catch_amalgamated.hpp>

#include "sktlab/complex_structure.hpp"
#include "sktlab/exterior.hpp"
#include "test_support.hpp"

using namespace sktlab;

namespace {
LieAlgebra kodaira_thurston(double lambda) { return LieAlgebra(4, {{0, 2, 1, lambda}}); }
}  // namespace

TEST_CASE("J^2 = -Id is enforced") {
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(4, 4);
  CHECK_THROWS_AS(ComplexStructure(bad), std::invalid_argument);
  CHECK_NOTHROW(ComplexStructure::split(6));
  CHECK_NOTHROW(ComplexStructure::interleaved(6));
}

TEST_CASE("nijenhuis residual") {
  const LieAlgebra ab = LieAlgebra::abelian(4);
  CHECK(nijenhuis_residual(ab, ComplexStructure::split(4)) < 1e-15);

  const LieAlgebra kt = kodaira_thurston(1.0);
  CHECK(nijenhuis_residual(kt, ComplexStructure::split(4)) < 1e-15);
  // Je1 = e2, Je3 = e4 is not integrable on this algebra
  CHECK(nijenhuis_residual(kt, ComplexStructure::interleaved(4)) > 0.5);
}

TEST_CASE("abelian complex structures") {
  const LieAlgebra kt = kodaira_thurston(2.0);
  const ComplexStructure J = ComplexStructure::split(4);
  CHECK(is_abelian(kt, J));
  CHECK(is_abelian(LieAlgebra::abelian(4), J));
  // abelian implies integrable
  CHECK(nijenhuis_residual(kt, J) < 1e-14);
  // and 2-step solvability
  CHECK(solvability_step(kt).value() <= 2);
}

TEST_CASE("adapted basis") {
  const ComplexStructure J = ComplexStructure::split(4);

  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(4, 4);
  CHECK((adapted_basis(J, id) - id).norm() < 1e-14);

  Eigen::VectorXd d(4);
  d << 4.0, 1.0, 4.0, 1.0;
  const Eigen::MatrixXd basis = adapted_basis(J, Eigen::MatrixXd(d.asDiagonal()));
  Eigen::MatrixXd expected(4, 4);
  expected.setZero();
  expected(0, 0) = 0.5;   // e1 / 2
  expected(1, 1) = 1.0;   // e2
  expected(2, 2) = 0.5;   // e3 / 2
  expected(3, 3) = 1.0;   // e4
  CHECK((basis - expected).norm() < 1e-14);

  const ComplexStructure J2 = ComplexStructure::interleaved(2);
  const Eigen::MatrixXd b2 = adapted_basis(J2, Eigen::MatrixXd::Identity(2, 2));
  CHECK((b2 - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);

  // orthonormality and the pairing J eps_i = eps_{n+i} on random Hermitian metrics
  oracle::Rng rng(21);
  for (int t = 0; t < 8; ++t) {
    const int dim = 2 * rng.integer(2, 4);
    const ComplexStructure Jr = ComplexStructure::split(dim);
    const Eigen::MatrixXd G = rng.hermitian_metric(Jr);
    const Eigen::MatrixXd B = adapted_basis(Jr, G);
    CHECK((B.transpose() * G * B - Eigen::MatrixXd::Identity(dim, dim)).norm() < 1e-10);
    const int n = dim / 2;
    CHECK((Jr.matrix() * B.leftCols(n) - B.rightCols(n)).norm() < 1e-12);
  }
}

TEST_CASE("holomorphic frame closure characterizes integrability and abelianity") {
  const int dim = 4;
  const LieAlgebra kt = kodaira_thurston(1.5);

  const auto closure_residuals = [&](const LieAlgebra& L, const ComplexStructure& J) {
    const Eigen::MatrixXd B = adapted_basis(J, Eigen::MatrixXd::Identity(dim, dim));
    const int n = dim / 2;
    Eigen::MatrixXcd Z(dim, n);
    for (int k = 0; k < n; ++k)
      Z.col(k) = B.col(k).cast<Complex>() - Complex(0, 1) * B.col(n + k).cast<Complex>();
    // anti-holomorphic projector: components along conj(Z)
    Eigen::MatrixXcd full(dim, 2 * n);
    full << Z, Z.conjugate();
    const Eigen::MatrixXcd fullinv = full.inverse();
    double closed = 0.0, nonab = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const Eigen::VectorXcd br = L.bracket_complex(Z.col(a), Z.col(b));
        const Eigen::VectorXcd coords = fullinv * br;
        closed = std::max(closed, coords.tail(n).norm());  // leakage into conj(Z)
        nonab = std::max(nonab, br.norm());
      }
    return std::pair<double, double>(closed, nonab);
  };

  const auto [closed_ok, abelian_ok] = closure_residuals(kt, ComplexStructure::split(4));
  CHECK(closed_ok < 1e-12);   // integrable: g^{1,0} closed under bracket
  CHECK(abelian_ok < 1e-12);  // abelian: g^{1,0} an abelian subalgebra

  const auto [closed_bad, abelian_bad] = closure_residuals(kt, ComplexStructure::interleaved(4));
  CHECK(closed_bad > 1e-3);  // non-integrable J leaks into the conjugate frame
  (void)abelian_bad;
}
