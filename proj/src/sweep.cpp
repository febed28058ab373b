#include "sol1d/sweep.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "json.hpp"
#include "sol1d/errors.hpp"

namespace sol1d {

namespace {

bool layer_matches(const Layer& layer, const std::string& token) {
  const std::string& name = layer.material.name;
  if (name == token) return true;
  if ((name.rfind("p-", 0) == 0 || name.rfind("n-", 0) == 0) && name.substr(2) == token)
    return true;
  return false;
}

std::size_t find_layer(const DeviceStack& stack, const std::string& token) {
  std::size_t found = stack.layers.size();
  for (std::size_t i = 0; i < stack.layers.size(); ++i) {
    if (layer_matches(stack.layers[i], token)) {
      if (found != stack.layers.size())
        throw ValidationError("sweep: layer name '" + token + "' is ambiguous");
      found = i;
    }
  }
  if (found == stack.layers.size())
    throw ValidationError("sweep: no layer matches '" + token + "'");
  return found;
}

}  // namespace

SweepAxis SweepAxis::linear(std::string layer, Param param, double start, double stop,
                            double step) {
  SweepAxis axis;
  axis.layer = std::move(layer);
  axis.param = param;
  if (!(step > 0)) throw ValidationError("sweep axis: step must be > 0");
  const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  for (int k = 0; k < n; ++k) axis.values.push_back(start + k * step);
  axis.validate();
  return axis;
}

SweepAxis SweepAxis::decades(std::string layer, Param param, int e0, int e1) {
  SweepAxis axis;
  axis.layer = std::move(layer);
  axis.param = param;
  if (e0 >= e1) throw ValidationError("sweep axis: decade range must be increasing");
  for (int e = e0; e <= e1; ++e) axis.values.push_back(std::pow(10.0, e));
  axis.validate();
  return axis;
}

SweepAxis SweepAxis::parse(const std::string& text) {
  const auto eq = text.find('=');
  const auto dot = text.find('.');
  if (eq == std::string::npos || dot == std::string::npos || dot > eq)
    throw ValidationError("sweep axis '" + text + "': expected LAYER.PARAM=range");
  SweepAxis axis;
  axis.layer = text.substr(0, dot);
  const std::string param = text.substr(dot + 1, eq - dot - 1);
  if (param == "thickness_um")
    axis.param = Param::thickness_um;
  else if (param == "doping_cm3")
    axis.param = Param::doping_cm3;
  else
    throw ValidationError("sweep axis '" + text +
                          "': parameter must be thickness_um or doping_cm3");
  const std::string range = text.substr(eq + 1);
  int ea = 0, eb = 0;
  double start = 0, stop = 0, step = 0;
  char tail = 0;
  if (std::sscanf(range.c_str(), "1e%d:1e%d%c", &ea, &eb, &tail) == 2) {
    return decades(axis.layer, axis.param, ea, eb);
  }
  if (std::sscanf(range.c_str(), "%lf:%lf:%lf%c", &start, &stop, &step, &tail) == 3) {
    return linear(axis.layer, axis.param, start, stop, step);
  }
  throw ValidationError("sweep axis '" + text +
                        "': range must be start:stop:step or 1eA:1eB");
}

void SweepAxis::validate() const {
  if (layer.empty()) throw ValidationError("sweep axis: empty layer name");
  if (values.size() < 2) throw ValidationError("sweep axis: need at least 2 values");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!(values[k] > 0)) throw ValidationError("sweep axis: values must be positive");
    if (k > 0 && !(values[k] > values[k - 1]))
      throw ValidationError("sweep axis: values must be strictly increasing");
  }
}

std::string SweepAxis::param_name() const {
  return param == Param::thickness_um ? "thickness_um" : "doping_cm3";
}

Metric metric_from_string(const std::string& name) {
  if (name == "PCE" || name == "pce") return Metric::PCE;
  if (name == "FF" || name == "ff") return Metric::FF;
  if (name == "Voc" || name == "voc") return Metric::Voc;
  if (name == "Jsc" || name == "jsc") return Metric::Jsc;
  throw ValidationError("unknown metric '" + name + "' (PCE, FF, Voc, Jsc)");
}

std::string metric_name(Metric m) {
  switch (m) {
    case Metric::PCE: return "PCE";
    case Metric::FF: return "FF";
    case Metric::Voc: return "Voc";
    case Metric::Jsc: return "Jsc";
  }
  return "?";
}

DeviceStack apply_axis_value(const DeviceStack& stack, const SweepAxis& axis, double value) {
  DeviceStack out = stack;
  const std::size_t li = find_layer(out, axis.layer);
  if (axis.param == SweepAxis::Param::thickness_um)
    out.layers[li].thickness_um = value;
  else
    out.layers[li].doping_cm3 = value;
  return out;
}

HeatmapResult run_grid_sweep(const DeviceStack& template_stack, const SweepAxis& axis1,
                             const SweepAxis& axis2, const SolverConfig& cfg,
                             const SolarSpectrum& spectrum, const SweepOptions& opts) {
  axis1.validate();
  axis2.validate();
  template_stack.validate();
  // axis targets must exist and be distinct (layer, parameter) pairs
  const std::size_t l1 = find_layer(template_stack, axis1.layer);
  const std::size_t l2 = find_layer(template_stack, axis2.layer);
  if (l1 == l2 && axis1.param == axis2.param)
    throw ValidationError("sweep: the two axes target the same layer parameter");

  const std::size_t n1 = axis1.values.size();
  const std::size_t n2 = axis2.values.size();
  HeatmapResult result;
  result.axis1 = axis1;
  result.axis2 = axis2;
  result.cells.assign(n1 * n2, std::nullopt);

  struct CellError {
    bool failed = false;
    std::string message;
  };
  std::vector<CellError> errors(n1 * n2);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t cell = next.fetch_add(1);
      if (cell >= n1 * n2) break;
      const std::size_t i = cell / n2;
      const std::size_t j = cell % n2;
      try {
        DeviceStack stack = apply_axis_value(template_stack, axis1, axis1.values[i]);
        stack = apply_axis_value(stack, axis2, axis2.values[j]);
        const IVCurve curve = compute_jv(stack, cfg, spectrum, opts.jv, opts.mesh);
        result.cells[cell] = extract_metrics(curve);
      } catch (const std::exception& e) {
        errors[cell] = {true, e.what()};
      }
    }
  };
  const int jobs = std::max(1, opts.jobs);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // deterministic failure ordering regardless of execution order
  for (std::size_t cell = 0; cell < n1 * n2; ++cell)
    if (errors[cell].failed)
      result.failures.push_back({cell / n2, cell % n2, errors[cell].message});
  return result;
}

namespace {

double metric_value(const CellMetrics& m, Metric metric) {
  switch (metric) {
    case Metric::PCE: return m.pce;
    case Metric::FF: return m.ff;
    case Metric::Voc: return m.voc_V;
    case Metric::Jsc: return m.jsc_mA_cm2;
  }
  return 0.0;
}

}  // namespace

BestCell best_cell(const HeatmapResult& result, Metric metric) {
  const std::size_t n2 = result.axis2.values.size();
  bool found = false;
  BestCell best;
  double best_value = 0.0;
  // row-major scan with strict > keeps the first (smallest-axis) maximum
  for (std::size_t i = 0; i < result.axis1.values.size(); ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      const auto& cell = result.at(i, j);
      if (!cell) continue;
      const double v = metric_value(*cell, metric);
      if (!found || v > best_value) {
        found = true;
        best_value = v;
        best = {i, j, result.axis1.values[i], result.axis2.values[j], *cell};
      }
    }
  }
  if (!found) throw ValidationError("best_cell: every cell failed");
  return best;
}

namespace {

void write_metric_csv(const HeatmapResult& r, Metric metric, double scale,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  // header row: axis2 values; first column: axis1 values
  out << r.axis1.layer << "." << r.axis1.param_name() << "\\" << r.axis2.layer << "."
      << r.axis2.param_name();
  for (double v : r.axis2.values) out << "," << format_number(v);
  out << "\n";
  for (std::size_t i = 0; i < r.axis1.values.size(); ++i) {
    out << format_number(r.axis1.values[i]);
    for (std::size_t j = 0; j < r.axis2.values.size(); ++j) {
      const auto& cell = r.at(i, j);
      out << ",";
      if (cell) out << format_number(metric_value(*cell, metric) * scale);
    }
    out << "\n";
  }
}

}  // namespace

void write_heatmap_csvs(const HeatmapResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_metric_csv(result, Metric::PCE, 100.0, dir / "pce.csv");
  write_metric_csv(result, Metric::FF, 100.0, dir / "ff.csv");
  write_metric_csv(result, Metric::Jsc, 1.0, dir / "jsc.csv");
  write_metric_csv(result, Metric::Voc, 1.0, dir / "voc.csv");
  std::ofstream out(dir / "failures.csv", std::ios::binary);
  if (!out) throw Error("cannot write failures.csv");
  out << "axis1_index,axis2_index,axis1_value,axis2_value,message\n";
  for (const auto& f : result.failures) {
    std::string msg = f.message;
    for (auto& ch : msg)
      if (ch == ',' || ch == '\n') ch = ';';
    out << f.i << "," << f.j << "," << format_number(result.axis1.values[f.i]) << ","
        << format_number(result.axis2.values[f.j]) << "," << msg << "\n";
  }
}

void write_best_json(const HeatmapResult& result, const std::filesystem::path& path) {
  nlohmann::json j;
  for (Metric metric : {Metric::PCE, Metric::FF, Metric::Voc, Metric::Jsc}) {
    nlohmann::json cell;
    try {
      const BestCell b = best_cell(result, metric);
      cell["axis1"] = {{"target", result.axis1.layer + "." + result.axis1.param_name()},
                       {"value", b.axis1_value}};
      cell["axis2"] = {{"target", result.axis2.layer + "." + result.axis2.param_name()},
                       {"value", b.axis2_value}};
      cell["metrics"] = {{"jsc_mA_cm2", b.metrics.jsc_mA_cm2}, {"voc_V", b.metrics.voc_V},
                         {"ff_percent", b.metrics.ff * 100.0},  {"pce_percent", b.metrics.pce * 100.0},
                         {"vmp_V", b.metrics.vmp_V},            {"jmp_mA_cm2", b.metrics.jmp_mA_cm2},
                         {"pmax_mW_cm2", b.metrics.pmax_mW_cm2}};
    } catch (const ValidationError&) {
      cell = nullptr;
    }
    j[metric_name(metric)] = cell;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << j.dump(2) << "\n";
}

}  // namespace sol1d
