#ifndef SOL1D_OPTICS_HPP
#define SOL1D_OPTICS_HPP

#include <filesystem>
#include <vector>

#include "sol1d/device.hpp"

namespace sol1d {

/// Solar spectrum as tabulated spectral irradiance, or as a set of discrete
/// lines when delta_lines is set (then irradiance_W_m2_nm holds the total
/// line power in W/m^2).
struct SolarSpectrum {
  struct Sample {
    double wavelength_nm = 0.0;
    double irradiance_W_m2_nm = 0.0;
  };
  std::vector<Sample> samples;
  bool delta_lines = false;

  /// Integrated power [mW/cm^2] (trapezoidal; plain sum for delta lines).
  double total_power_mW_cm2() const;

  /// Photon flux [cm^-2 s^-1] carried by photons with energy above the
  /// given threshold.
  double photon_flux_above_cm2_s(double min_photon_eV) const;

  /// Scales every sample by the given factor.
  SolarSpectrum scaled(double factor) const;

  void validate() const;
};

/// Bundled AM1.5G reference table (1 sun, ~100 mW/cm^2 over 280-4000 nm).
const SolarSpectrum& bundled_am15g();

/// Reads a two-column (wavelength_nm, irradiance_W_per_m2_per_nm) text file.
/// '#' starts a comment. With delta_lines, each row is a monochromatic line
/// and the second column is its power in W/m^2.
SolarSpectrum load_spectrum(const std::filesystem::path& path, bool delta_lines = false);

/// Single line carrying the given photon flux.
SolarSpectrum monochromatic_spectrum(double wavelength_nm, double photon_flux_cm2_s);

/// Direct-gap absorption model: alpha = A*sqrt(E - Eg) for E > Eg, else 0,
/// with A = 1e5 cm^-1 eV^-1/2 and E = 1239.842/lambda[nm].
double absorption_coefficient_cm(const Material& m, double wavelength_nm);

/// Photogeneration rate aligned to mesh nodes (control-volume averages).
struct GenerationProfile {
  std::vector<double> rate_cm3_s;
  double incident_flux_cm2_s = 0.0;     // in-window photon flux entering the stack
  double absorbed_flux_cm2_s = 0.0;
  double transmitted_flux_cm2_s = 0.0;  // photons leaving through the far contact

  /// Integral of G over the stack [cm^-2 s^-1].
  double integrated_rate_cm2_s() const;
};

/// Wavelength window for the spectral quadrature.
struct OpticsWindow {
  double min_nm = 300.0;
  double max_nm = 1300.0;
};

/// Beer-Lambert generation profile: unit quantum yield, no front-surface
/// reflection, flux attenuated along the path from the illuminated side.
GenerationProfile generation_profile(const DeviceStack& stack, const Mesh& mesh,
                                     const SolarSpectrum& spectrum, const OpticsWindow& window = {});

}  // namespace sol1d

#endif
