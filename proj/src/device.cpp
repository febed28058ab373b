#include "sol1d/device.hpp"

#include <cmath>
#include <sstream>

#include "sol1d/errors.hpp"

namespace sol1d {

namespace {

TrapSpec default_trap() {
  // Midgap level, Nt = 1e14 cm^-3, sigma = 1e-15 cm^2. With vth = 1e7 cm/s
  // this gives tau = 1/(sigma*vth*Nt) = 1e-6 s for both carriers.
  TrapSpec t;
  t.energy_level_eV = 0.0;
  t.density_cm3 = 1e14;
  t.sigma_e_cm2 = 1e-15;
  t.sigma_p_cm2 = 1e-15;
  return t;
}

Material make_material(std::string name, double eg, double chi, double eps, double nc, double nv,
                       double vth_e, double vth_h, double mu_e, double mu_h) {
  Material m;
  m.name = std::move(name);
  m.bandgap_eV = eg;
  m.electron_affinity_eV = chi;
  m.rel_permittivity = eps;
  m.Nc_cm3 = nc;
  m.Nv_cm3 = nv;
  m.vth_e_cm_s = vth_e;
  m.vth_h_cm_s = vth_h;
  m.mu_e_cm2_Vs = mu_e;
  m.mu_h_cm2_Vs = mu_h;
  m.radiative_coeff_cm3_s = 0.0;
  m.trap = default_trap();
  return m;
}

}  // namespace

void Material::validate() const {
  auto fail = [&](const std::string& what) {
    throw ValidationError("material '" + name + "': " + what);
  };
  if (!(bandgap_eV > 0)) fail("bandgap must be > 0");
  if (!(Nc_cm3 > 0)) fail("Nc must be > 0");
  if (!(Nv_cm3 > 0)) fail("Nv must be > 0");
  if (!(mu_e_cm2_Vs > 0)) fail("electron mobility must be > 0");
  if (!(mu_h_cm2_Vs > 0)) fail("hole mobility must be > 0");
  if (!(rel_permittivity >= 1)) fail("relative permittivity must be >= 1");
  if (!(vth_e_cm_s > 0)) fail("electron thermal velocity must be > 0");
  if (!(vth_h_cm_s > 0)) fail("hole thermal velocity must be > 0");
  if (radiative_coeff_cm3_s < 0) fail("radiative coefficient must be >= 0");
  if (trap) {
    if (trap->density_cm3 < 0) fail("trap density must be >= 0");
    if (!(trap->sigma_e_cm2 > 0) || !(trap->sigma_p_cm2 > 0))
      fail("trap capture cross-sections must be > 0");
  }
}

double DeviceStack::total_thickness_um() const {
  double t = 0.0;
  for (const auto& l : layers) t += l.thickness_um;
  return t;
}

void DeviceStack::validate() const {
  if (layers.size() < 2) throw ValidationError("stack needs at least 2 layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (!(l.thickness_um > 0)) {
      std::ostringstream os;
      os << "layer " << i << " ('" << l.material.name << "'): thickness must be > 0, got "
         << l.thickness_um << " um";
      throw ValidationError(os.str());
    }
    if (l.doping_cm3 < 0) {
      std::ostringstream os;
      os << "layer " << i << " ('" << l.material.name << "'): doping must be >= 0";
      throw ValidationError(os.str());
    }
    l.material.validate();
  }
  if (!(temperature_K > 0)) throw ValidationError("temperature must be > 0 K");
  if (back_contact.surface_recomb_e_cm_s < 0 || back_contact.surface_recomb_p_cm_s < 0 ||
      front_contact.surface_recomb_e_cm_s < 0 || front_contact.surface_recomb_p_cm_s < 0)
    throw ValidationError("contact recombination velocities must be >= 0");
}

std::map<std::string, Material> default_materials() {
  std::map<std::string, Material> lib;
  lib["p-GaAs"] = make_material("p-GaAs", 1.420, 4.070, 12.900, 2e18, 1e19, 1e7, 1e7, 1e3, 1e2);
  lib["p-CIGS"] = make_material("p-CIGS", 1.100, 4.500, 13.600, 2.2e18, 1.8e19, 1e7, 1e7, 1e2, 1e1);
  lib["n-CdS"] = make_material("n-CdS", 2.450, 4.400, 10.000, 2.2e18, 1.8e19, 1e7, 1e7, 1e2, 1e1);
  lib["n-ZnO"] = make_material("n-ZnO", 3.300, 4.600, 9.000, 2.2e18, 1.8e19, 1e7, 1e7, 1e2, 2.5e1);
  return lib;
}

DeviceStack build_stack(const std::vector<LayerSpec>& specs, double temperature_K,
                        const std::map<std::string, Material>& library) {
  DeviceStack stack;
  stack.temperature_K = temperature_K;
  stack.layers.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    auto it = library.find(s.material);
    if (it == library.end()) {
      std::ostringstream os;
      os << "layer " << i << ": unknown material '" << s.material << "'";
      throw ValidationError(os.str());
    }
    if (!(s.thickness_um > 0)) {
      std::ostringstream os;
      os << "layer " << i << " ('" << s.material << "'): thickness must be > 0, got "
         << s.thickness_um << " um";
      throw ValidationError(os.str());
    }
    Layer l;
    l.material = it->second;
    l.thickness_um = s.thickness_um;
    l.doping_type = s.doping_type;
    l.doping_cm3 = s.doping_cm3;
    stack.layers.push_back(std::move(l));
  }
  stack.validate();
  return stack;
}

DeviceStack preset_stack(std::string_view name) {
  using D = DopingType;
  if (name == "pn-baseline") {
    return build_stack({{"p-CIGS", 0.5, D::acceptor, 1e10},
                        {"n-CdS", 0.5, D::donor, 1e10},
                        {"n-ZnO", 0.5, D::donor, 1e10}},
                       300.0);
  }
  if (name == "pn-optimized") {
    // thickness optimum: 5.0 um absorber, 0.5 um buffer
    return build_stack({{"p-CIGS", 5.0, D::acceptor, 1e10},
                        {"n-CdS", 0.5, D::donor, 1e10},
                        {"n-ZnO", 0.5, D::donor, 1e10}},
                       300.0);
  }
  if (name == "ppn-optimized") {
    // GaAs back layer at its thickness/doping optimum on top of the
    // doping-optimized junction
    return build_stack({{"p-GaAs", 5.0, D::acceptor, 1e20},
                        {"p-CIGS", 5.0, D::acceptor, 1e20},
                        {"n-CdS", 0.5, D::donor, 1e20},
                        {"n-ZnO", 0.5, D::donor, 1e10}},
                       300.0);
  }
  throw ValidationError("unknown preset '" + std::string(name) +
                        "'; available: pn-baseline, pn-optimized, ppn-optimized");
}

std::vector<std::string> preset_names() {
  return {"pn-baseline", "pn-optimized", "ppn-optimized"};
}

}  // namespace sol1d
