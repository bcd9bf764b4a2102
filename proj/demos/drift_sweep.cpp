// Sweep the temperature change and print Sagnac vs. single-path drift as CSV.
//   drift_sweep [length_mm] [max_delta_T_K]

#include <cstdlib>
#include <iostream>
#include <numbers>

#include "sagnac/thermal_optics.hpp"

int main(int argc, char** argv) {
  using namespace sagnac::thermal;
  const double length = argc > 1 ? std::atof(argv[1]) : 8.0;
  const double max_dT = argc > 2 ? std::atof(argv[2]) : 5.0;

  std::cout << "delta_T_K,sagnac_over_pi,mach_zehnder_532_over_pi\n";
  for (int k = 0; k <= 20; ++k) {
    const double dT = max_dT * k / 20.0;
    const DriftScenario s{bk7(), length, dT, nominal_triple()};
    std::cout << dT << ',' << sagnac_drift(s) / std::numbers::pi << ','
              << mach_zehnder_drift(s, 532.0) / std::numbers::pi << '\n';
  }
}
