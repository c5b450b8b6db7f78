// Lowest levels of the deformed infinite well, closed form against the u-space solver.

#include <cstdio>

#include "gamma_qm/gamma_qm.hpp"

int main() {
  for (double gamma : {-0.5, 0.0, 0.5}) {
    const auto spec = gqm::WellSpec::make(gamma, 1.0);
    const auto sol = gqm::solve_bound_states(gqm::PotentialSpec::infinite_well(spec), 5, 4000, {.richardson = true});
    std::printf("gamma = %+.2f  L' = %.6f\n", gamma, gqm::effective_length(spec));
    for (int n = 1; n <= 5; ++n) {
      const double exact = gqm::well_energy(n, spec);
      std::printf("  n=%d  E=%.10f  numeric=%.10f  <x>=%.6f\n", n, exact, sol.energies[n - 1], gqm::well_mean_x(n, spec));
    }
  }
}
