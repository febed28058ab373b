#include "sol1d/transport.hpp"

#include <cmath>

#include "sol1d/constants.hpp"
#include "sol1d/errors.hpp"

namespace sol1d {

double bernoulli(double x) {
  if (std::abs(x) < 1e-4) {
    // B(x) = 1 - x/2 + x^2/12 - x^4/720 + ...
    return 1.0 - x / 2.0 + x * x / 12.0;
  }
  return x / std::expm1(x);
}

double intrinsic_density_cm3(const Material& m, double temperature_K) {
  if (!(temperature_K > 0)) throw ValidationError("intrinsic density: T must be > 0");
  const double kt = constants::k_eV_per_K * temperature_K;
  return std::sqrt(m.Nc_cm3 * m.Nv_cm3) * std::exp(-m.bandgap_eV / (2.0 * kt));
}

CarrierPair equilibrium_carriers(const Material& m, DopingType type, double doping_cm3,
                                 double temperature_K) {
  if (doping_cm3 < 0) throw ValidationError("equilibrium carriers: doping must be >= 0");
  const double ni = intrinsic_density_cm3(m, temperature_K);
  // Solve the majority side of n0 - p0 = N_D - N_A, n0*p0 = ni^2; the
  // minority side via mass action avoids cancellation for N >> ni.
  const double N = doping_cm3;
  const double majority = 0.5 * (N + std::sqrt(N * N + 4.0 * ni * ni));
  CarrierPair out;
  if (type == DopingType::donor) {
    out.n_cm3 = majority;
    out.p_cm3 = ni * ni / majority;
  } else {
    out.p_cm3 = majority;
    out.n_cm3 = ni * ni / majority;
  }
  return out;
}

double srh_recombination_cm3_s(double n_cm3, double p_cm3, double ni_cm3, const TrapSpec& trap,
                               double vth_e_cm_s, double vth_h_cm_s, double temperature_K) {
  if (trap.density_cm3 <= 0) return 0.0;
  const double kt = constants::k_eV_per_K * temperature_K;
  const double tau_n = 1.0 / (trap.sigma_e_cm2 * vth_e_cm_s * trap.density_cm3);
  const double tau_p = 1.0 / (trap.sigma_p_cm2 * vth_h_cm_s * trap.density_cm3);
  const double n1 = ni_cm3 * std::exp(trap.energy_level_eV / kt);
  const double p1 = ni_cm3 * std::exp(-trap.energy_level_eV / kt);
  return (n_cm3 * p_cm3 - ni_cm3 * ni_cm3) /
         (tau_p * (n_cm3 + n1) + tau_n * (p_cm3 + p1));
}

double sg_flux_mA_cm2(double psi_i_V, double psi_j_V, double c_i_cm3, double c_j_cm3,
                      double mobility_cm2_Vs, double spacing_cm, double thermal_voltage_V,
                      Carrier carrier) {
  if (!(spacing_cm > 0)) throw ValidationError("sg_flux: spacing must be > 0");
  const double x = (psi_j_V - psi_i_V) / thermal_voltage_V;
  const double b = bernoulli(x);
  // B(-x) = B(x) + x exactly; using the identity keeps the zero-field case
  // an exact central difference and preserves antisymmetry.
  const double k = constants::q_C * mobility_cm2_Vs * thermal_voltage_V / spacing_cm;
  double amps_cm2;
  if (carrier == Carrier::electron) {
    amps_cm2 = k * (c_j_cm3 * b - c_i_cm3 * (b + x));
  } else {
    amps_cm2 = k * (c_i_cm3 * b - c_j_cm3 * (b + x));
  }
  return amps_cm2 * 1e3;
}

BandParams build_band_params(const DeviceStack& stack, const Mesh& mesh) {
  const std::size_t n = mesh.node_count();
  BandParams bp;
  bp.Ec0_eV.resize(n);
  bp.Ev0_eV.resize(n);
  bp.Nc_cm3.resize(n);
  bp.Nv_cm3.resize(n);
  bp.ni_cm3.resize(n);
  bp.mu_e_cm2_Vs.resize(n);
  bp.mu_h_cm2_Vs.resize(n);
  bp.net_doping_cm3.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Layer& layer = stack.layers[mesh.layer_of_node[i]];
    const Material& m = layer.material;
    bp.Ec0_eV[i] = -m.electron_affinity_eV;
    bp.Ev0_eV[i] = -m.electron_affinity_eV - m.bandgap_eV;
    bp.Nc_cm3[i] = m.Nc_cm3;
    bp.Nv_cm3[i] = m.Nv_cm3;
    bp.ni_cm3[i] = intrinsic_density_cm3(m, stack.temperature_K);
    bp.mu_e_cm2_Vs[i] = m.mu_e_cm2_Vs;
    bp.mu_h_cm2_Vs[i] = m.mu_h_cm2_Vs;
    bp.net_doping_cm3[i] = layer.net_doping_cm3();
  }
  return bp;
}

}  // namespace sol1d
