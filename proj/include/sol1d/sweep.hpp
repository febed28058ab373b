#ifndef SOL1D_SWEEP_HPP
#define SOL1D_SWEEP_HPP

#include <optional>
#include <string>
#include <vector>

#include "sol1d/analysis.hpp"
#include "sol1d/device.hpp"

namespace sol1d {

/// One swept parameter: a layer (matched by material name, with or without
/// its "p-"/"n-" prefix) and either its thickness or its doping density.
struct SweepAxis {
  enum class Param { thickness_um, doping_cm3 };

  std::string layer;
  Param param = Param::thickness_um;
  std::vector<double> values;

  static SweepAxis linear(std::string layer, Param param, double start, double stop, double step);
  /// One value per decade, 10^e0 .. 10^e1 inclusive.
  static SweepAxis decades(std::string layer, Param param, int e0, int e1);
  /// Parses "LAYER.PARAM=start:stop:step" (linear) or "LAYER.PARAM=1eA:1eB"
  /// (decade-log), e.g. "CdS.thickness_um=0.5:5.0:0.5", "GaAs.doping_cm3=1e11:1e20".
  static SweepAxis parse(const std::string& text);

  void validate() const;
  std::string param_name() const;
};

enum class Metric { PCE, FF, Voc, Jsc };

Metric metric_from_string(const std::string& name);
std::string metric_name(Metric m);

/// Grid of cell metrics, row index = axis1 value, column index = axis2 value.
/// Failed cells are recorded and left empty; a sweep never aborts on a
/// cell-level solver failure.
struct HeatmapResult {
  SweepAxis axis1, axis2;
  std::vector<std::optional<CellMetrics>> cells;  // row-major |axis1| x |axis2|
  struct Failure {
    std::size_t i = 0, j = 0;
    std::string message;
  };
  std::vector<Failure> failures;

  const std::optional<CellMetrics>& at(std::size_t i, std::size_t j) const {
    return cells[i * axis2.values.size() + j];
  }
};

struct SweepOptions {
  int jobs = 1;
  JvOptions jv;
  MeshConfig mesh;
};

HeatmapResult run_grid_sweep(const DeviceStack& template_stack, const SweepAxis& axis1,
                             const SweepAxis& axis2, const SolverConfig& cfg,
                             const SolarSpectrum& spectrum, const SweepOptions& opts = {});

struct BestCell {
  std::size_t i = 0, j = 0;
  double axis1_value = 0.0;
  double axis2_value = 0.0;
  CellMetrics metrics;
};

/// Argmax over successful cells; ties go to the smaller axis1 value, then
/// the smaller axis2 value.
BestCell best_cell(const HeatmapResult& result, Metric metric);

/// Writes pce.csv, ff.csv, jsc.csv, voc.csv (first row = axis2 values, first
/// column = axis1 values; PCE/FF in percent) plus failures.csv.
void write_heatmap_csvs(const HeatmapResult& result, const std::filesystem::path& dir);

/// best.json: the tie-broken argmax cell for each metric.
void write_best_json(const HeatmapResult& result, const std::filesystem::path& path);

/// Clone of the template with one axis value applied (exposed for tests).
DeviceStack apply_axis_value(const DeviceStack& stack, const SweepAxis& axis, double value);

}  // namespace sol1d

#endif
