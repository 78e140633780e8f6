// Temporary development probe; not part of the deliverable.
#include <cstdio>

#include "sktlab/catalog.hpp"
#include "sktlab/exterior.hpp"
#include "sktlab/hermitian.hpp"

using namespace sktlab;

int main() {
  // --- KT torsion ---
  const auto kt = kodaira_thurston(2.0);
  const Metric id4 = Metric::identity(4);
  const KForm T = bismut_torsion(kt.algebra, kt.J, id4);
  std::printf("T(e1,e3,e2) = %.6f (expect -2)\n", T.on_basis({0, 2, 1}).real());

  // --- pluriclosed residual on KT ---
  std::printf("pluriclosed(KT) = %.3e\n", pluriclosed_residual(kt.algebra, kt.J, id4));

  // --- levi-civita example ---
  const Connection lc = levi_civita(kt.algebra, id4);
  std::printf("nabla_e1 e3 = (%.3f, %.3f, %.3f, %.3f) (expect lambda/2 e2 = e2)\n",
              lc[0].col(2)(0), lc[0].col(2)(1), lc[0].col(2)(2), lc[0].col(2)(3));

  // --- bismut ricci calibration ---
  const KForm rho = bismut_ricci(kt.algebra, kt.J, id4);
  std::printf("rho(e1,e3) = %.6f (expect lambda^2/2 = 2)\n", rho.on_basis({0, 2}).real());

  Eigen::VectorXd d(4);
  double a = 3.0;
  d << a, 1.0, a, 1.0;
  const Metric gd = Metric(Eigen::MatrixXd(d.asDiagonal()));
  const KForm rhod = bismut_ricci(kt.algebra, kt.J, gd);
  std::printf("rho_diag(e1,e3) = %.6f (expect lambda^2/(2a) = %.6f)\n",
              rhod.on_basis({0, 2}).real(), 4.0 / (2 * a));

  // --- SKL residuals on KT ---
  const SklResiduals r = skl_residuals(kt.algebra, kt.J, id4);
  std::printf("skl residuals: bianchi %.2e type %.2e nablaT %.2e pluri %.2e\n", r.bianchi, r.type,
              r.nabla_t, r.pluriclosed);

  // --- astheno slice on the 8-dim example ---
  const auto ex8 = example_8dim();
  std::printf("example8: step=%d unimod=%d abelian=%d jacobi=%.2e\n",
              nilpotency_step(ex8.algebra).value_or(-1), int(is_unimodular(ex8.algebra)),
              int(is_abelian(ex8.algebra, ex8.J)), jacobi_residual(ex8.algebra));

  const auto residual_at = [&](const Example8MetricParams& p) {
    const KForm w = example8_omega(p);
    const KForm wp = wedge_power(w, 2);
    const ComplexFrame frame(ex8.J);
    return dolbeault_op(dolbeault_op(wp, ex8.algebra, frame, true), ex8.algebra, frame, false)
        .max_abs();
  };

  {
    Example8MetricParams p;  // all diagonal ones
    std::printf("astheno residual at x=Id: %.6f  constraint=%.3f\n", residual_at(p),
                example8_astheno_constraint(p));
    Example8MetricParams q = p;
    q.x22 = 1.3;
    std::printf("residual x22=1.3: %.6f  constraint=%.3f\n", residual_at(q),
                example8_astheno_constraint(q));
    Example8MetricParams r2 = p;
    r2.x23 = Complex(0.0, 1.0);  // Im = 1: constraint 1+1-2 = 0
    std::printf("residual x23=i: %.6f  constraint=%.3f\n", residual_at(r2),
                example8_astheno_constraint(r2));
    Example8MetricParams r3 = p;
    r3.x23 = Complex(0.0, -1.0);
    std::printf("residual x23=-i: %.6f  constraint=%.3f\n", residual_at(r3),
                example8_astheno_constraint(r3));
    Example8MetricParams r4 = p;
    r4.x23 = Complex(0.7, 0.0);
    r4.x12 = Complex(0.1, 0.2);
    std::printf("residual Re-only x23: %.6f  constraint=%.3f\n", residual_at(r4),
                example8_astheno_constraint(r4));
    // boundary point
    const auto b = example8_astheno_boundary(1.0);
    const Eigen::MatrixXd G = example8_gram(b);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    std::printf("boundary: residual %.3e, eigs min %.3e max %.3e\n", residual_at(b),
                es.eigenvalues().minCoeff(), es.eigenvalues().maxCoeff());
  }
  return 0;
}
