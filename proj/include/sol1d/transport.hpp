#ifndef SOL1D_TRANSPORT_HPP
#define SOL1D_TRANSPORT_HPP

#include <vector>

#include "sol1d/device.hpp"

namespace sol1d {

/// Scharfetter-Gummel weighting function B(x) = x/(e^x - 1), B(0) = 1.
/// Uses a series branch for |x| < 1e-4 to avoid cancellation.
double bernoulli(double x);

/// Intrinsic carrier density ni = sqrt(Nc*Nv) * exp(-Eg/(2kT)) [cm^-3].
double intrinsic_density_cm3(const Material& m, double temperature_K);

struct CarrierPair {
  double n_cm3 = 0.0;
  double p_cm3 = 0.0;
};

/// Charge-neutral equilibrium densities for a uniformly doped material:
/// n0 - p0 = N_D - N_A with n0*p0 = ni^2.
CarrierPair equilibrium_carriers(const Material& m, DopingType type, double doping_cm3,
                                 double temperature_K);

/// Shockley-Read-Hall net recombination rate [cm^-3 s^-1]:
///   R = (n*p - ni^2) / (tau_p*(n + n1) + tau_n*(p + p1))
/// with tau = 1/(sigma*vth*Nt), n1 = ni*exp(Et/kT), p1 = ni*exp(-Et/kT).
double srh_recombination_cm3_s(double n_cm3, double p_cm3, double ni_cm3, const TrapSpec& trap,
                               double vth_e_cm_s, double vth_h_cm_s, double temperature_K);

enum class Carrier { electron, hole };

/// Scharfetter-Gummel discrete drift-diffusion flux on one edge, positive
/// from node i to node j [mA/cm^2]. Electrons:
///   Jn = (q*mu*Vt/h) * [B(dpsi/Vt)*n_j - B(-dpsi/Vt)*n_i],   dpsi = psi_j - psi_i
/// Holes are mirrored. Exact for Boltzmann-exponential carrier profiles.
double sg_flux_mA_cm2(double psi_i_V, double psi_j_V, double c_i_cm3, double c_j_cm3,
                      double mobility_cm2_Vs, double spacing_cm, double thermal_voltage_V,
                      Carrier carrier);

/// Per-node band structure tables for a stack/mesh pair. Band edges are
/// reported at psi = 0 (vacuum reference): Ec = -chi, Ev = -chi - Eg; the
/// electron-affinity rule sets the offsets at heterointerfaces. Boundary
/// nodes belong to the layer on their back (lower-x) side.
struct BandParams {
  std::vector<double> Ec0_eV;         // conduction band edge at psi = 0
  std::vector<double> Ev0_eV;         // valence band edge at psi = 0
  std::vector<double> Nc_cm3;
  std::vector<double> Nv_cm3;
  std::vector<double> ni_cm3;
  std::vector<double> mu_e_cm2_Vs;
  std::vector<double> mu_h_cm2_Vs;
  std::vector<double> net_doping_cm3;  // N_D - N_A
};

BandParams build_band_params(const DeviceStack& stack, const Mesh& mesh);

}  // namespace sol1d

#endif
