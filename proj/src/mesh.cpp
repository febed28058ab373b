#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "sol1d/device.hpp"
#include "sol1d/errors.hpp"

namespace sol1d {

namespace {

// Spacing run growing geometrically from h0, capped at hmax, that fits
// within budget. Returns the spacings, not including any middle fill.
std::vector<double> graded_run(double h0, double hmax, double ratio, double budget) {
  std::vector<double> out;
  double h = h0;
  double pos = 0.0;
  while (true) {
    double hc = std::min(h, hmax);
    if (pos + hc > budget) break;
    out.push_back(hc);
    pos += hc;
    if (hc >= hmax) break;  // reached bulk spacing; middle fill takes over
    h *= ratio;
  }
  return out;
}

// Spacings across one layer of length L: graded from both ends, uniform fill
// in the middle, at least 9 intervals (8 interior nodes).
std::vector<double> layer_spacings(double L, const MeshConfig& cfg_cm) {
  const double hmin = cfg_cm.min_spacing_um;  // already converted to cm by caller
  const double hmax = cfg_cm.max_spacing_um;
  const double ratio = cfg_cm.grading_ratio;

  std::vector<double> left = graded_run(hmin, hmax, ratio, L / 2.0);
  std::vector<double> right = left;  // symmetric
  double used = 0.0;
  for (double h : left) used += h;
  double mid = L - 2.0 * used;
  std::vector<double> spacings = left;
  if (mid > 0) {
    int n_mid = std::max<int>(1, static_cast<int>(std::ceil(mid / hmax - 1e-12)));
    double h_mid = mid / n_mid;
    for (int k = 0; k < n_mid; ++k) spacings.push_back(h_mid);
  }
  spacings.insert(spacings.end(), right.rbegin(), right.rend());

  if (spacings.size() < 9) {
    int n = std::max<int>(9, static_cast<int>(std::ceil(L / hmax - 1e-12)));
    spacings.assign(n, L / n);
  }
  return spacings;
}

}  // namespace

Mesh generate_mesh(const DeviceStack& stack, const MeshConfig& cfg) {
  stack.validate();
  if (!(cfg.min_spacing_um > 0) || !(cfg.max_spacing_um >= cfg.min_spacing_um))
    throw ValidationError("mesh config: need 0 < min_spacing <= max_spacing");
  if (!(cfg.grading_ratio > 1.0))
    throw ValidationError("mesh config: grading ratio must be > 1");

  MeshConfig cfg_cm = cfg;  // local copy with lengths in cm
  cfg_cm.min_spacing_um *= 1e-4;
  cfg_cm.max_spacing_um *= 1e-4;

  Mesh mesh;
  mesh.config = cfg;
  mesh.x_cm.push_back(0.0);
  mesh.layer_of_node.push_back(0);

  double x0 = 0.0;
  for (std::size_t li = 0; li < stack.layers.size(); ++li) {
    const double L = stack.layers[li].thickness_um * 1e-4;
    const auto spacings = layer_spacings(L, cfg_cm);
    double pos = 0.0;
    for (std::size_t k = 0; k < spacings.size(); ++k) {
      pos += spacings[k];
      // pin the layer end exactly to the interface position
      double x = (k + 1 == spacings.size()) ? x0 + L : x0 + pos;
      mesh.x_cm.push_back(x);
      mesh.layer_of_node.push_back(static_cast<int>(li));
      mesh.layer_of_edge.push_back(static_cast<int>(li));
      if (mesh.x_cm.size() > cfg.max_nodes) {
        std::ostringstream os;
        os << "mesh exceeds node budget of " << cfg.max_nodes << " nodes";
        throw ValidationError(os.str());
      }
    }
    x0 += L;
  }
  return mesh;
}

}  // namespace sol1d
