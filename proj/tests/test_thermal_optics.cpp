#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sagnac/errors.hpp"
#include "sagnac/random.hpp"
#include "sagnac/thermal_optics.hpp"

using namespace sagnac;
using namespace sagnac::thermal;

namespace {

constexpr double kPi = std::numbers::pi;

// Hand evaluation: 2 pi (L / lambda) (dn/dT + n alpha) dT, with the table row typed in.
double hand_phase(double length_m, double lambda_m, double n, double dn_dT, double alpha, double dT) {
  return 2.0 * kPi * (length_m / lambda_m) * (dn_dT + n * alpha) * dT;
}

DriftScenario published_scenario(double length = 8.0, double dT = 1.0) { return {bk7(), length, dT, nominal_triple()}; }

}  // namespace

TEST(LookupThermal, TableRows) {
  const auto c810 = lookup_thermal(bk7(), 810.0);
  EXPECT_DOUBLE_EQ(c810.n, 1.5106);
  EXPECT_DOUBLE_EQ(c810.dn_dT_per_K, 1.095e-6);
  const auto c532 = lookup_thermal(bk7(), 532.0);
  EXPECT_DOUBLE_EQ(c532.n, 1.5195);
  EXPECT_DOUBLE_EQ(c532.dn_dT_per_K, 1.55e-6);
  EXPECT_DOUBLE_EQ(lookup_thermal(bk7(), 1550.005).n, 1.5007);
}

TEST(LookupThermal, MidpointInterpolation) {
  const auto c = lookup_thermal(bk7(), 1180.0);
  EXPECT_NEAR(c.n, (1.5106 + 1.5007) / 2.0, 1e-15);
  EXPECT_NEAR(c.dn_dT_per_K, (1.095e-6 + 8.633e-7) / 2.0, 1e-20);
}

TEST(LookupThermal, NoExtrapolation) {
  EXPECT_THROW(lookup_thermal(bk7(), 400.0), RangeError);
  EXPECT_THROW(lookup_thermal(bk7(), 1600.0), RangeError);
  EXPECT_THROW(phase_drift_single(bk7(), 2000.0, 8.0, 1.0), RangeError);
  EXPECT_THROW(sagnac_drift({bk7(), 8.0, 1.0, {532.0, 810.0, 1700.0}}), RangeError);
}

TEST(PhaseDriftSingle, HandValues) {
  const double p532 = phase_drift_single(bk7(), 532.0, 8.0, 1.0);
  EXPECT_NEAR(p532, hand_phase(0.008, 532e-9, 1.5195, 1.55e-6, 7.1e-6, 1.0), 1e-12);
  EXPECT_NEAR(p532 / kPi, 0.371, 0.002);
  const double p810 = phase_drift_single(bk7(), 810.0, 8.0, 1.0);
  EXPECT_NEAR(p810, hand_phase(0.008, 810e-9, 1.5106, 1.095e-6, 7.1e-6, 1.0), 1e-12);
  EXPECT_NEAR(p810 / kPi, 0.2335, 0.002);
  EXPECT_EQ(phase_drift_single(bk7(), 810.0, 8.0, 0.0), 0.0);
  EXPECT_THROW(phase_drift_single(bk7(), 810.0, 0.0, 1.0), DomainError);
}

TEST(SagnacDrift, WorkedExample) {
  const double hand = hand_phase(0.008, 810e-9, 1.5106, 1.095e-6, 7.1e-6, 1.0) +
                      hand_phase(0.008, 1550e-9, 1.5007, 8.633e-7, 7.1e-6, 1.0) -
                      hand_phase(0.008, 532e-9, 1.5195, 1.55e-6, 7.1e-6, 1.0);
  const double d = sagnac_drift(published_scenario());
  EXPECT_NEAR(d, hand, 1e-12);
  EXPECT_NEAR(std::abs(d) / kPi, 0.019, 0.001);
  EXPECT_EQ(sagnac_drift(published_scenario(8.0, 0.0)), 0.0);
}

TEST(SagnacDrift, TermsAreConsistent) {
  const auto t = drift_terms(published_scenario());
  EXPECT_DOUBLE_EQ(t.pump_rad, phase_drift_single(bk7(), 532.0, 8.0, 1.0));
  EXPECT_DOUBLE_EQ(t.sagnac_rad(), t.signal_rad + t.idler_rad - t.pump_rad);
}

TEST(SagnacDrift, LinearInTemperatureAndLength) {
  rng::Generator gen(4);
  for (int k = 0; k < 50; ++k) {
    const double l = 1.0 + 20.0 * gen.uniform();
    const double dT = -3.0 + 6.0 * gen.uniform();
    const double base = sagnac_drift(published_scenario(l, dT));
    EXPECT_NEAR(sagnac_drift(published_scenario(2.0 * l, dT)), 2.0 * base, 1e-12 * std::abs(base));
    EXPECT_NEAR(sagnac_drift(published_scenario(l, 2.0 * dT)), 2.0 * base, 1e-12 * std::abs(base));
  }
}

TEST(SagnacDrift, SignAntisymmetry) {
  rng::Generator gen(6);
  for (int k = 0; k < 50; ++k) {
    const double dT = 10.0 * gen.uniform();
    EXPECT_EQ(sagnac_drift(published_scenario(8.0, -dT)), -sagnac_drift(published_scenario(8.0, dT)));
  }
}

TEST(SagnacDrift, BeatsSinglePath) {
  rng::Generator gen(7);
  for (int k = 0; k < 100; ++k) {
    double dT = -50.0 + 100.0 * gen.uniform();
    if (dT == 0.0) dT = 1e-3;
    const auto s = published_scenario(8.0, dT);
    EXPECT_LT(std::abs(sagnac_drift(s)), std::abs(mach_zehnder_drift(s, 532.0)));
  }
}

TEST(SagnacDrift, DispersionFreeNull) {
  const MaterialThermalData flat("flat", {{300.0, 1.6, 2e-5}, {2500.0, 1.6, 2e-5}}, 8e-6);
  rng::Generator gen(9);
  for (int k = 0; k < 200; ++k) {
    const double pump = 350.0 + 300.0 * gen.uniform();
    const double signal = pump * (1.2 + 0.7 * gen.uniform());
    const double idler = idler_from_energy_conservation(pump, signal);
    if (idler > 2500.0) continue;
    const DriftScenario s{flat, 0.5 + 30.0 * gen.uniform(), -10.0 + 20.0 * gen.uniform(), {pump, signal, idler}};
    EXPECT_LE(std::abs(sagnac_drift(s)), 1e-12);
  }
}

TEST(MachZehnder, Examples) {
  EXPECT_NEAR(mach_zehnder_drift(published_scenario(), 532.0) / kPi, 0.371, 0.002);
  EXPECT_NEAR(mach_zehnder_drift(published_scenario(), 810.0) / kPi, 0.2335, 0.002);
  EXPECT_EQ(mach_zehnder_drift(published_scenario(8.0, 0.0), 532.0), 0.0);
}

TEST(IdlerFromEnergyConservation, Examples) {
  EXPECT_NEAR(idler_from_energy_conservation(532.0, 810.0), 1.0 / (1.0 / 532.0 - 1.0 / 810.0), 1e-9);
  EXPECT_NEAR(idler_from_energy_conservation(532.0, 810.0), 1550.07, 0.01);
  EXPECT_NEAR(idler_from_energy_conservation(532.0, 1064.0), 1064.0, 1e-9);
  EXPECT_NEAR(idler_from_energy_conservation(400.0, 800.0), 800.0, 1e-9);
  EXPECT_THROW(idler_from_energy_conservation(532.0, 532.0), DomainError);
  EXPECT_THROW(idler_from_energy_conservation(532.0, 400.0), DomainError);
}

TEST(WavelengthTriple, EnergyResidual) {
  EXPECT_NEAR(nominal_triple().energy_residual_per_nm(), std::abs(1 / 532.0 - 1 / 810.0 - 1 / 1550.0), 1e-18);
  const WavelengthTriple exact{532.0, 810.0, idler_from_energy_conservation(532.0, 810.0)};
  EXPECT_LT(exact.energy_residual_per_nm(), 1e-18);
}

TEST(MaterialThermalData, Validation) {
  EXPECT_THROW(MaterialThermalData("x", {}, 1e-6), DomainError);
  EXPECT_THROW(MaterialThermalData("x", {{800.0, 1.5, 1e-6}, {700.0, 1.5, 1e-6}}, 1e-6), DomainError);
  EXPECT_THROW(MaterialThermalData("x", {{800.0, 0.9, 1e-6}}, 1e-6), DomainError);
  EXPECT_THROW(MaterialThermalData("x", {{800.0, 1.5, NAN}}, 1e-6), DomainError);
  EXPECT_THROW(sagnac_drift({bk7(), -1.0, 1.0, nominal_triple()}), DomainError);
}
