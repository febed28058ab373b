#ifndef SOL1D_DEVICE_HPP
#define SOL1D_DEVICE_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sol1d {

/// Single SRH trap level. Energy is measured from the intrinsic level,
/// positive toward the conduction band.
struct TrapSpec {
  double energy_level_eV = 0.0;
  double density_cm3 = 0.0;
  double sigma_e_cm2 = 1e-15;
  double sigma_p_cm2 = 1e-15;

  bool operator==(const TrapSpec&) const = default;
};

/// Electronic parameter set of one semiconductor.
struct Material {
  std::string name;
  double bandgap_eV = 0.0;
  double electron_affinity_eV = 0.0;
  double rel_permittivity = 1.0;
  double Nc_cm3 = 0.0;  // conduction band effective density of states
  double Nv_cm3 = 0.0;  // valence band effective density of states
  double vth_e_cm_s = 0.0;
  double vth_h_cm_s = 0.0;
  double mu_e_cm2_Vs = 0.0;
  double mu_h_cm2_Vs = 0.0;
  double radiative_coeff_cm3_s = 0.0;
  std::optional<TrapSpec> trap;

  bool operator==(const Material&) const = default;

  /// Throws ValidationError if any parameter is out of range.
  void validate() const;
};

enum class DopingType { donor, acceptor };

struct Layer {
  Material material;
  double thickness_um = 0.0;
  DopingType doping_type = DopingType::donor;
  double doping_cm3 = 0.0;

  bool operator==(const Layer&) const = default;

  /// Signed net doping N_D - N_A [cm^-3].
  double net_doping_cm3() const {
    return doping_type == DopingType::donor ? doping_cm3 : -doping_cm3;
  }
};

struct ContactSpec {
  enum class Kind { ohmic };
  Kind kind = Kind::ohmic;
  double surface_recomb_e_cm_s = 1e7;
  double surface_recomb_p_cm_s = 1e7;

  bool operator==(const ContactSpec&) const = default;
};

enum class Side { front, back };

/// Layer stack. Index 0 sits at the back (left) contact, the last layer at
/// the front (right) contact. Illumination enters through the front side
/// for all bundled presets.
struct DeviceStack {
  std::vector<Layer> layers;
  ContactSpec back_contact;
  ContactSpec front_contact;
  double temperature_K = 300.0;
  Side illumination_side = Side::front;

  bool operator==(const DeviceStack&) const = default;

  double total_thickness_um() const;
  void validate() const;
};

/// The four reference materials with their full parameter sets.
std::map<std::string, Material> default_materials();

struct LayerSpec {
  std::string material;
  double thickness_um = 0.0;
  DopingType doping_type = DopingType::donor;
  double doping_cm3 = 0.0;
};

/// Builds a stack from layer specs, resolving material names against the
/// given library. Layer order is back to front.
DeviceStack build_stack(const std::vector<LayerSpec>& specs, double temperature_K,
                        const std::map<std::string, Material>& library = default_materials());

/// Bundled stacks: "pn-baseline", "pn-optimized", "ppn-optimized".
DeviceStack preset_stack(std::string_view name);
std::vector<std::string> preset_names();

/// Mesh generation policy. Spacing is graded geometrically from min_spacing
/// at layer boundaries up to max_spacing in layer interiors.
struct MeshConfig {
  double min_spacing_um = 5e-4;   // 0.5 nm at interfaces and contacts
  double max_spacing_um = 0.025;  // 25 nm in layer bulk
  double grading_ratio = 1.2;
  std::size_t max_nodes = 20000;

  bool operator==(const MeshConfig&) const = default;
};

/// Node-centered 1D mesh. Positions in cm, x=0 at the back contact.
/// Every layer interface coincides with a node; a boundary node belongs to
/// the layer on its left (lower-x) side, node 0 to layer 0.
struct Mesh {
  std::vector<double> x_cm;
  std::vector<int> layer_of_node;
  std::vector<int> layer_of_edge;  // edge i connects nodes i and i+1
  MeshConfig config;

  std::size_t node_count() const { return x_cm.size(); }
  std::size_t edge_count() const { return x_cm.empty() ? 0 : x_cm.size() - 1; }
  double spacing_cm(std::size_t edge) const { return x_cm[edge + 1] - x_cm[edge]; }
};

Mesh generate_mesh(const DeviceStack& stack, const MeshConfig& cfg = {});

/// Device file I/O (JSON). Unknown material names may be defined inline
/// under a top-level "materials" object.
DeviceStack load_device(const std::filesystem::path& path);
void save_device(const DeviceStack& stack, const std::filesystem::path& path);
std::string device_to_json(const DeviceStack& stack);
DeviceStack device_from_json(const std::string& text);

}  // namespace sol1d

#endif
