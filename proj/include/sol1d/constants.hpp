#ifndef SOL1D_CONSTANTS_HPP
#define SOL1D_CONSTANTS_HPP

// Physical constants. Internal unit system: lengths in cm, densities in
// cm^-3, energies in eV, potentials in V, current densities in mA/cm^2.

namespace sol1d::constants {

inline constexpr double q_C = 1.602176634e-19;           // elementary charge [C]
inline constexpr double k_eV_per_K = 8.617333262e-5;     // Boltzmann constant [eV/K]
inline constexpr double eps0_F_per_cm = 8.8541878128e-14;// vacuum permittivity [F/cm]
inline constexpr double h_Js = 6.62607015e-34;           // Planck constant [J s]
inline constexpr double c_m_per_s = 2.99792458e8;        // speed of light [m/s]
inline constexpr double hc_eV_nm = 1239.842;             // photon energy: E[eV] = hc/lambda[nm]

inline constexpr double thermal_voltage_V(double temperature_K) {
  return k_eV_per_K * temperature_K;
}

}  // namespace sol1d::constants

#endif
