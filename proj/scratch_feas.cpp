// Temporary development probe; not part of the deliverable.
#include <cstdio>

#include "sktlab/catalog.hpp"
#include "sktlab/feasibility.hpp"

using namespace sktlab;

int main() {
  {
    const auto kt = kodaira_thurston(1.0);
    const auto prob = build_constraints(kt.algebra, kt.J, FeasibilityMode::Pluriclosed);
    std::printf("KT: rows %ld (cond %d)\n", long(prob.A.rows()), prob.condition_rows);
    const auto res = decide_feasibility(kt.algebra, kt.J, FeasibilityMode::Pluriclosed);
    std::printf("KT verdict: %s, best min eig %.6f, iters %ld\n", to_string(res.verdict),
                res.best_min_eigenvalue, res.iterations);
    if (res.witness)
      std::printf("  witness residual %.3e, min eig %.6f\n",
                  pluriclosed_residual(kt.algebra, kt.J, *res.witness),
                  min_eigenvalue(res.witness->matrix()));
  }
  {
    const auto ab = abelian_entry(2);
    const auto res = decide_feasibility(ab.algebra, ab.J, FeasibilityMode::Pluriclosed);
    std::printf("abelian verdict: %s best %.6f iters %ld\n", to_string(res.verdict),
                res.best_min_eigenvalue, res.iterations);
  }
  {
    const auto ex8 = example_8dim();
    const auto res = decide_feasibility(ex8.algebra, ex8.J, FeasibilityMode::Pluriclosed);
    std::printf("example8 verdict: %s best %.3e iters %ld cap=%d\n", to_string(res.verdict),
                res.best_min_eigenvalue, res.iterations, int(res.cap_reached));
    std::printf("  certificate: %s\n", res.certificate.c_str());
  }
  {
    // canonical 6-dim, astheno mode (n = 3)
    const auto c = canonical_skl(3, 2, 2, {1.0, 2.0});
    const auto res = decide_feasibility(c.algebra, c.J, FeasibilityMode::Astheno);
    std::printf("canonical(3,2,2) astheno verdict: %s best %.6f\n", to_string(res.verdict),
                res.best_min_eigenvalue);
  }
  {
    const auto aff = aff2();
    const auto res = decide_feasibility(aff.algebra, aff.J, FeasibilityMode::Pluriclosed);
    std::printf("aff2 verdict: %s best %.6f (certificate empty: %d)\n", to_string(res.verdict),
                res.best_min_eigenvalue, int(res.certificate.empty()));
  }
  return 0;
}
