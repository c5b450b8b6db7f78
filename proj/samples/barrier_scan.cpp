// Transmission through a V0 = 18, a = 1 barrier for a few deformations.

#include <cstdio>

#include "gamma_qm/gamma_qm.hpp"

int main() {
  const double V0 = 18.0;
  for (double gamma : {-0.5, 0.0, 0.5}) {
    const auto b = gqm::BarrierSpec::make(gamma, V0, 1.0);
    std::printf("gamma = %+.2f  first resonance E/V0 = %.6f\n", gamma, gqm::barrier_resonance_energy(1, b) / V0);
    for (double r : {0.25, 0.5, 1.0, 2.0})
      std::printf("  E/V0 = %.2f  T = %.6e\n", r, gqm::transfer_matrix_transmission(r * V0, b));
  }
}
