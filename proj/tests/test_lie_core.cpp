#include <catch2/catch_amalgamated.hpp>

#include "sktlab/complex_structure.hpp"
#include "sktlab/lie_algebra.hpp"
#include "test_support.hpp"

using namespace sktlab;

namespace {
LieAlgebra kodaira_thurston(double lambda) { return LieAlgebra(4, {{0, 2, 1, lambda}}); }
}  // namespace

TEST_CASE("jacobi residual") {
  CHECK(jacobi_residual(LieAlgebra::abelian(6)) == 0.0);
  CHECK(jacobi_residual(kodaira_thurston(2.0)) == 0.0);
}

TEST_CASE("unimodularity") {
  CHECK(is_unimodular(LieAlgebra::abelian(4)));
  CHECK(is_unimodular(kodaira_thurston(1.0)));
  // [e1, e2] = e2 has tr ad_{e1} = 1
  const LieAlgebra aff(2, {{0, 1, 1, 1.0}});
  CHECK_FALSE(is_unimodular(aff));
  CHECK(std::abs(aff.ad_basis(0).trace() - 1.0) < 1e-15);
}

TEST_CASE("lower central series and nilpotency step") {
  CHECK(nilpotency_step(LieAlgebra::abelian(4)) == 1);

  const LieAlgebra kt = kodaira_thurston(3.0);
  const auto series = lower_central_series(kt);
  REQUIRE(series.size() == 2);
  CHECK(series[0].dim() == 1);
  CHECK(series[0].contains(Eigen::VectorXd::Unit(4, 1), 1e-12));
  CHECK(series[1].dim() == 0);
  CHECK(nilpotency_step(kt) == 2);

  const LieAlgebra aff(2, {{0, 1, 1, 1.0}});
  CHECK_FALSE(nilpotency_step(aff).has_value());

  // 3-step: [e1,e2]=e3, [e1,e3]=e4
  const LieAlgebra threestep(4, {{0, 1, 2, 1.0}, {0, 2, 3, 1.0}});
  CHECK(nilpotency_step(threestep) == 3);

  // monotone decreasing dimensions
  const auto s3 = lower_central_series(threestep);
  for (std::size_t i = 1; i < s3.size(); ++i) CHECK(s3[i].dim() < s3[i - 1].dim());
}

TEST_CASE("derived series and solvability") {
  const LieAlgebra aff(2, {{0, 1, 1, 1.0}});
  CHECK(solvability_step(aff) == 2);
  CHECK(solvability_step(kodaira_thurston(1.0)) == 2);
  CHECK(solvability_step(LieAlgebra::abelian(2)) == 1);
}

TEST_CASE("center") {
  const LieAlgebra ab = LieAlgebra::abelian(4);
  CHECK(center(ab).dim() == 4);

  const LieAlgebra kt = kodaira_thurston(1.5);
  const Subspace z = center(kt);
  CHECK(z.dim() == 2);
  CHECK(z.contains(Eigen::VectorXd::Unit(4, 1), 1e-12));
  CHECK(z.contains(Eigen::VectorXd::Unit(4, 3), 1e-12));
  // null-space oracle: [u, e_j] = 0 for all basis vectors
  for (int a = 0; a < z.dim(); ++a)
    for (int j = 0; j < 4; ++j)
      CHECK(kt.bracket(Eigen::VectorXd(z.basis().col(a)), kt.basis_vec(j)).norm() < 1e-14);
  // [center, g] = 0 exactly at tolerance on randoms
  oracle::Rng rng(3);
  for (int t = 0; t < 5; ++t) {
    const LieAlgebra L = rng.two_step(6, 2);
    const Subspace zc = center(L);
    for (int a = 0; a < zc.dim(); ++a)
      for (int j = 0; j < 6; ++j)
        CHECK(L.bracket(Eigen::VectorXd(zc.basis().col(a)), L.basis_vec(j)).norm() < 1e-12);
  }
}

TEST_CASE("g1J") {
  const ComplexStructure J = ComplexStructure::split(4);
  CHECK(g1J(LieAlgebra::abelian(4), J).dim() == 0);

  const LieAlgebra kt = kodaira_thurston(2.0);
  const Subspace s = g1J(kt, J);
  CHECK(s.dim() == 2);
  CHECK(s.contains(Eigen::VectorXd::Unit(4, 1), 1e-12));
  CHECK(s.contains(Eigen::VectorXd::Unit(4, 3), 1e-12));
  CHECK(s.dim() < kt.dim());  // proper ideal for unimodular abelian-J inputs
}

TEST_CASE("restrict to a subalgebra") {
  const LieAlgebra kt = kodaira_thurston(1.0);
  // the center span{e2, e4} restricts to an abelian algebra
  Eigen::MatrixXd cols(4, 2);
  cols.col(0) = Eigen::VectorXd::Unit(4, 1);
  cols.col(1) = Eigen::VectorXd::Unit(4, 3);
  const LieAlgebra restricted = restrict_to(kt, Subspace(cols));
  CHECK(restricted.dim() == 2);
  CHECK(jacobi_residual(restricted) == 0.0);
  CHECK(restricted.bracket_terms(0.0).empty());

  // span{e1, e3} is not closed: [e1, e3] escapes into e2
  Eigen::MatrixXd bad(4, 2);
  bad.col(0) = Eigen::VectorXd::Unit(4, 0);
  bad.col(1) = Eigen::VectorXd::Unit(4, 2);
  CHECK_THROWS_AS(restrict_to(kt, Subspace(bad)), std::invalid_argument);
}

TEST_CASE("commutator relations under abelian J") {
  // [g1, g1] = 0 and for 2-step inputs also [g1, J g1] = 0
  const ComplexStructure J = ComplexStructure::split(4);
  const LieAlgebra kt = kodaira_thurston(1.25);
  const Subspace d = derived_subalgebra(kt);
  for (int a = 0; a < d.dim(); ++a)
    for (int b = 0; b < d.dim(); ++b) {
      const Eigen::VectorXd u = d.basis().col(a), v = d.basis().col(b);
      CHECK(kt.bracket(u, v).norm() < 1e-13);
      CHECK(kt.bracket(u, Eigen::VectorXd(J.matrix() * v)).norm() < 1e-13);
    }
}

TEST_CASE("subspace utilities") {
  oracle::Rng rng(9);
  const Eigen::MatrixXd M = rng.matrix(6, 3);
  const Subspace s = Subspace::span_of(M);
  CHECK(s.dim() == 3);
  CHECK(s.contains(Eigen::VectorXd(M.col(1)), 1e-10));
  const Subspace sp = s.orthogonal_complement();
  CHECK(sp.dim() == 3);
  CHECK((s.basis().transpose() * sp.basis()).norm() < 1e-12);
  CHECK(max_principal_angle(s, s) < 1e-12);
  CHECK(max_principal_angle(s, sp) > 1.0);
  CHECK(Subspace::sum(s, sp).dim() == 6);
}
