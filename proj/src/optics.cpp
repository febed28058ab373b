#include "sol1d/optics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sol1d/constants.hpp"
#include "sol1d/errors.hpp"

namespace sol1d {

namespace {

#include "am15g_table.inc"

// photon energy in joules at a given wavelength
double photon_energy_J(double wavelength_nm) {
  return constants::h_Js * constants::c_m_per_s / (wavelength_nm * 1e-9);
}

// photons per second per m^2 per nm carried by irradiance I at wavelength lam
double photon_flux_density(double irradiance_W_m2_nm, double wavelength_nm) {
  return irradiance_W_m2_nm / photon_energy_J(wavelength_nm);
}

}  // namespace

double SolarSpectrum::total_power_mW_cm2() const {
  if (samples.empty()) return 0.0;
  double watts_m2 = 0.0;
  if (delta_lines) {
    for (const auto& s : samples) watts_m2 += s.irradiance_W_m2_nm;
  } else {
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
      const double dl = samples[k + 1].wavelength_nm - samples[k].wavelength_nm;
      watts_m2 += 0.5 * (samples[k].irradiance_W_m2_nm + samples[k + 1].irradiance_W_m2_nm) * dl;
    }
  }
  return watts_m2 * 0.1;  // W/m^2 -> mW/cm^2
}

double SolarSpectrum::photon_flux_above_cm2_s(double min_photon_eV) const {
  const double lam_max = constants::hc_eV_nm / min_photon_eV;
  double flux_m2 = 0.0;
  if (delta_lines) {
    for (const auto& s : samples)
      if (s.wavelength_nm <= lam_max)
        flux_m2 += s.irradiance_W_m2_nm / photon_energy_J(s.wavelength_nm);
  } else {
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
      double l0 = samples[k].wavelength_nm, l1 = samples[k + 1].wavelength_nm;
      if (l0 >= lam_max) break;
      double f0 = photon_flux_density(samples[k].irradiance_W_m2_nm, l0);
      double f1 = photon_flux_density(samples[k + 1].irradiance_W_m2_nm, l1);
      if (l1 > lam_max) {  // clip the last interval at the threshold
        const double t = (lam_max - l0) / (l1 - l0);
        f1 = f0 + t * (f1 - f0);
        l1 = lam_max;
      }
      flux_m2 += 0.5 * (f0 + f1) * (l1 - l0);
    }
  }
  return flux_m2 * 1e-4;  // m^-2 -> cm^-2
}

SolarSpectrum SolarSpectrum::scaled(double factor) const {
  SolarSpectrum out = *this;
  for (auto& s : out.samples) s.irradiance_W_m2_nm *= factor;
  return out;
}

void SolarSpectrum::validate() const {
  if (samples.empty()) throw ValidationError("spectrum: empty");
  if (!delta_lines && samples.size() < 2)
    throw ValidationError("spectrum: a tabulated spectrum needs at least 2 samples "
                          "(use delta-line mode for monochromatic input)");
  for (std::size_t k = 0; k < samples.size(); ++k) {
    if (!(samples[k].wavelength_nm > 0))
      throw ValidationError("spectrum: wavelength must be > 0 at row " + std::to_string(k));
    if (samples[k].irradiance_W_m2_nm < 0)
      throw ValidationError("spectrum: negative irradiance at row " + std::to_string(k));
    if (k > 0 && !(samples[k].wavelength_nm > samples[k - 1].wavelength_nm))
      throw ValidationError("spectrum: wavelengths must be strictly increasing (row " +
                            std::to_string(k) + ")");
  }
}

const SolarSpectrum& bundled_am15g() {
  static const SolarSpectrum spectrum = [] {
    SolarSpectrum s;
    const std::size_t n = sizeof(kAm15gTable) / sizeof(kAm15gTable[0]);
    s.samples.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
      s.samples.push_back({kAm15gTable[k][0], kAm15gTable[k][1]});
    s.validate();
    return s;
  }();
  return spectrum;
}

SolarSpectrum load_spectrum(const std::filesystem::path& path, bool delta_lines) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open spectrum file '" + path.string() + "'");
  SolarSpectrum s;
  s.delta_lines = delta_lines;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream row(line);
    double lam, irr;
    if (!(row >> lam)) continue;  // blank or comment-only line
    if (!(row >> irr))
      throw ParseError("spectrum file '" + path.string() + "' line " + std::to_string(lineno) +
                       ": expected two columns (wavelength_nm irradiance)");
    s.samples.push_back({lam, irr});
  }
  if (s.samples.empty())
    throw ParseError("spectrum file '" + path.string() + "': no data rows");
  try {
    s.validate();
  } catch (const ValidationError& e) {
    throw ParseError("spectrum file '" + path.string() + "': " + e.what());
  }
  return s;
}

SolarSpectrum monochromatic_spectrum(double wavelength_nm, double photon_flux_cm2_s) {
  SolarSpectrum s;
  s.delta_lines = true;
  const double power_W_m2 = photon_flux_cm2_s * 1e4 * photon_energy_J(wavelength_nm);
  s.samples.push_back({wavelength_nm, power_W_m2});
  return s;
}

double absorption_coefficient_cm(const Material& m, double wavelength_nm) {
  if (!(wavelength_nm > 0)) throw ValidationError("absorption: wavelength must be > 0");
  const double e_photon = constants::hc_eV_nm / wavelength_nm;
  if (e_photon <= m.bandgap_eV) return 0.0;
  constexpr double prefactor = 1e5;  // cm^-1 eV^-1/2
  return prefactor * std::sqrt(e_photon - m.bandgap_eV);
}

double GenerationProfile::integrated_rate_cm2_s() const {
  return absorbed_flux_cm2_s;
}

GenerationProfile generation_profile(const DeviceStack& stack, const Mesh& mesh,
                                     const SolarSpectrum& spectrum, const OpticsWindow& window) {
  spectrum.validate();
  const std::size_t n = mesh.node_count();
  if (n < 2 || mesh.layer_of_edge.size() != n - 1 ||
      mesh.layer_of_node.back() + 1 != static_cast<int>(stack.layers.size()))
    throw ValidationError("generation: mesh does not match stack");

  // Spectral components (wavelength, photon flux per component [cm^-2 s^-1]).
  std::vector<std::pair<double, double>> components;
  if (spectrum.delta_lines) {
    for (const auto& s : spectrum.samples) {
      if (s.wavelength_nm < window.min_nm || s.wavelength_nm > window.max_nm) continue;
      components.emplace_back(s.wavelength_nm,
                              s.irradiance_W_m2_nm / photon_energy_J(s.wavelength_nm) * 1e-4);
    }
  } else {
    // trapezoidal weights over the sample grid clipped to the window
    const auto& ss = spectrum.samples;
    for (std::size_t k = 0; k < ss.size(); ++k) {
      const double lam = ss[k].wavelength_nm;
      if (lam < window.min_nm || lam > window.max_nm) continue;
      double w = 0.0;
      if (k > 0) w += 0.5 * (lam - std::max(ss[k - 1].wavelength_nm, window.min_nm));
      if (k + 1 < ss.size()) w += 0.5 * (std::min(ss[k + 1].wavelength_nm, window.max_nm) - lam);
      if (w <= 0) continue;
      components.emplace_back(lam, photon_flux_density(ss[k].irradiance_W_m2_nm, lam) * w * 1e-4);
    }
  }

  GenerationProfile prof;
  prof.rate_cm3_s.assign(n, 0.0);
  std::vector<double> deposited(n, 0.0);

  const bool from_front = stack.illumination_side == Side::front;
  // per-component Beer-Lambert march from the illuminated contact
  for (const auto& [lam, flux0] : components) {
    prof.incident_flux_cm2_s += flux0;
    if (flux0 <= 0) continue;
    double phi = flux0;
    const std::size_t n_edges = mesh.edge_count();
    for (std::size_t s = 0; s < n_edges; ++s) {
      const std::size_t e = from_front ? n_edges - 1 - s : s;
      const int layer = mesh.layer_of_edge[e];
      const double alpha = absorption_coefficient_cm(stack.layers[layer].material, lam);
      const double h = mesh.spacing_cm(e);
      const double phi_mid = phi * std::exp(-alpha * h * 0.5);
      const double phi_out = phi_mid * std::exp(-alpha * h * 0.5);
      const std::size_t near_node = from_front ? e + 1 : e;
      const std::size_t far_node = from_front ? e : e + 1;
      deposited[near_node] += phi - phi_mid;
      deposited[far_node] += phi_mid - phi_out;
      phi = phi_out;
    }
    prof.transmitted_flux_cm2_s += phi;
  }

  for (std::size_t i = 0; i < n; ++i) {
    double w = 0.0;
    if (i > 0) w += 0.5 * mesh.spacing_cm(i - 1);
    if (i + 1 < n) w += 0.5 * mesh.spacing_cm(i);
    prof.rate_cm3_s[i] = deposited[i] / w;
    prof.absorbed_flux_cm2_s += deposited[i];
  }
  return prof;
}

}  // namespace sol1d
