#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sol1d/device.hpp"
#include "sol1d/errors.hpp"

namespace sol1d {

namespace {

using nlohmann::json;

json trap_to_json(const TrapSpec& t) {
  return json{{"energy_level_eV", t.energy_level_eV},
              {"density_cm3", t.density_cm3},
              {"sigma_e_cm2", t.sigma_e_cm2},
              {"sigma_p_cm2", t.sigma_p_cm2}};
}

TrapSpec trap_from_json(const json& j) {
  TrapSpec t;
  t.energy_level_eV = j.at("energy_level_eV").get<double>();
  t.density_cm3 = j.at("density_cm3").get<double>();
  t.sigma_e_cm2 = j.at("sigma_e_cm2").get<double>();
  t.sigma_p_cm2 = j.at("sigma_p_cm2").get<double>();
  return t;
}

json material_to_json(const Material& m) {
  json j{{"bandgap_eV", m.bandgap_eV},
         {"electron_affinity_eV", m.electron_affinity_eV},
         {"rel_permittivity", m.rel_permittivity},
         {"Nc_cm3", m.Nc_cm3},
         {"Nv_cm3", m.Nv_cm3},
         {"vth_e_cm_s", m.vth_e_cm_s},
         {"vth_h_cm_s", m.vth_h_cm_s},
         {"mu_e_cm2_Vs", m.mu_e_cm2_Vs},
         {"mu_h_cm2_Vs", m.mu_h_cm2_Vs},
         {"radiative_coeff_cm3_s", m.radiative_coeff_cm3_s}};
  if (m.trap) j["trap"] = trap_to_json(*m.trap);
  return j;
}

Material material_from_json(const std::string& name, const json& j) {
  Material m;
  m.name = name;
  m.bandgap_eV = j.at("bandgap_eV").get<double>();
  m.electron_affinity_eV = j.at("electron_affinity_eV").get<double>();
  m.rel_permittivity = j.at("rel_permittivity").get<double>();
  m.Nc_cm3 = j.at("Nc_cm3").get<double>();
  m.Nv_cm3 = j.at("Nv_cm3").get<double>();
  m.vth_e_cm_s = j.at("vth_e_cm_s").get<double>();
  m.vth_h_cm_s = j.at("vth_h_cm_s").get<double>();
  m.mu_e_cm2_Vs = j.at("mu_e_cm2_Vs").get<double>();
  m.mu_h_cm2_Vs = j.at("mu_h_cm2_Vs").get<double>();
  m.radiative_coeff_cm3_s = j.value("radiative_coeff_cm3_s", 0.0);
  if (j.contains("trap")) m.trap = trap_from_json(j.at("trap"));
  return m;
}

json contact_to_json(const ContactSpec& c) {
  return json{{"kind", "ohmic"},
              {"surface_recomb_e_cm_s", c.surface_recomb_e_cm_s},
              {"surface_recomb_p_cm_s", c.surface_recomb_p_cm_s}};
}

ContactSpec contact_from_json(const json& j) {
  ContactSpec c;
  const std::string kind = j.value("kind", "ohmic");
  if (kind != "ohmic") throw ParseError("contacts: unsupported kind '" + kind + "'");
  c.surface_recomb_e_cm_s = j.value("surface_recomb_e_cm_s", 1e7);
  c.surface_recomb_p_cm_s = j.value("surface_recomb_p_cm_s", 1e7);
  return c;
}

}  // namespace

std::string device_to_json(const DeviceStack& stack) {
  json j;
  j["temperature_K"] = stack.temperature_K;
  j["illumination_side"] = stack.illumination_side == Side::front ? "front" : "back";
  j["contacts"] = json{{"back", contact_to_json(stack.back_contact)},
                       {"front", contact_to_json(stack.front_contact)}};
  json layers = json::array();
  json materials = json::object();
  for (const auto& l : stack.layers) {
    layers.push_back(json{{"material", l.material.name},
                          {"thickness_um", l.thickness_um},
                          {"doping_type", l.doping_type == DopingType::donor ? "donor" : "acceptor"},
                          {"doping_cm3", l.doping_cm3}});
    materials[l.material.name] = material_to_json(l.material);
  }
  j["layers"] = layers;
  j["materials"] = materials;
  return j.dump(2) + "\n";
}

DeviceStack device_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("device file: invalid JSON: ") + e.what());
  }
  try {
    DeviceStack stack;
    stack.temperature_K = j.value("temperature_K", 300.0);
    const std::string side = j.value("illumination_side", "front");
    if (side != "front" && side != "back")
      throw ParseError("device file: field 'illumination_side' must be 'front' or 'back'");
    stack.illumination_side = side == "front" ? Side::front : Side::back;

    auto library = default_materials();
    if (j.contains("materials")) {
      for (auto it = j.at("materials").begin(); it != j.at("materials").end(); ++it) {
        library[it.key()] = material_from_json(it.key(), it.value());
      }
    }
    if (j.contains("contacts")) {
      const auto& c = j.at("contacts");
      if (c.contains("back")) stack.back_contact = contact_from_json(c.at("back"));
      if (c.contains("front")) stack.front_contact = contact_from_json(c.at("front"));
    }
    if (!j.contains("layers"))
      throw ParseError("device file: missing required field 'layers'");
    std::size_t index = 0;
    for (const auto& jl : j.at("layers")) {
      LayerSpec s;
      if (!jl.contains("material"))
        throw ParseError("device file: layer " + std::to_string(index) + ": missing field 'material'");
      s.material = jl.at("material").get<std::string>();
      if (!jl.contains("thickness_um"))
        throw ParseError("device file: layer " + std::to_string(index) + ": missing field 'thickness_um'");
      s.thickness_um = jl.at("thickness_um").get<double>();
      const std::string dt = jl.value("doping_type", "donor");
      if (dt != "donor" && dt != "acceptor")
        throw ParseError("device file: layer " + std::to_string(index) +
                         ": field 'doping_type' must be 'donor' or 'acceptor'");
      s.doping_type = dt == "donor" ? DopingType::donor : DopingType::acceptor;
      s.doping_cm3 = jl.value("doping_cm3", 0.0);
      auto it = library.find(s.material);
      if (it == library.end())
        throw ParseError("device file: layer " + std::to_string(index) + ": unknown material '" +
                         s.material + "' (not built in, not defined under 'materials')");
      Layer l;
      l.material = it->second;
      l.thickness_um = s.thickness_um;
      l.doping_type = s.doping_type;
      l.doping_cm3 = s.doping_cm3;
      stack.layers.push_back(std::move(l));
      ++index;
    }
    stack.validate();
    return stack;
  } catch (const json::exception& e) {
    throw ParseError(std::string("device file: ") + e.what());
  }
}

DeviceStack load_device(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open device file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return device_from_json(buf.str());
}

void save_device(const DeviceStack& stack, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write device file '" + path.string() + "'");
  out << device_to_json(stack);
}

}  // namespace sol1d
