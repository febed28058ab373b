// sol1d command line front end: device files in, curves/heatmaps/reports out.
//
// Commands:
//   simulate  equilibrium + short-circuit working point, band diagram export
//   jv        illuminated or dark J-V sweep with cell metrics
//   qe        spectral external quantum efficiency
//   sweep     two-parameter grid sweep producing heatmap CSVs

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "sol1d/analysis.hpp"
#include "sol1d/constants.hpp"
#include "sol1d/device.hpp"
#include "sol1d/errors.hpp"
#include "sol1d/optics.hpp"
#include "sol1d/solver.hpp"
#include "sol1d/sweep.hpp"

namespace fs = std::filesystem;
using namespace sol1d;

namespace {

struct GlobalArgs {
  std::string device_path;
  std::string preset;
  std::string spectrum_path;
  std::string out_dir = ".";
  int jobs = 0;  // 0 = hardware concurrency
  double temperature_K = 300.0;
  bool temperature_set = false;
  bool verbose = false;
};

DeviceStack resolve_stack(const GlobalArgs& g) {
  DeviceStack stack;
  if (!g.preset.empty() && !g.device_path.empty())
    throw ValidationError("give either --device or --preset, not both");
  if (!g.preset.empty())
    stack = preset_stack(g.preset);
  else if (!g.device_path.empty())
    stack = load_device(g.device_path);
  else
    throw ValidationError("no device: use --device FILE or --preset NAME");
  if (g.temperature_set) stack.temperature_K = g.temperature_K;
  return stack;
}

SolarSpectrum resolve_spectrum(const GlobalArgs& g) {
  if (g.spectrum_path.empty()) return bundled_am15g();
  return load_spectrum(g.spectrum_path);
}

int effective_jobs(const GlobalArgs& g) {
  if (g.jobs > 0) return g.jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

fs::path ensure_out_dir(const GlobalArgs& g) {
  fs::path dir(g.out_dir);
  fs::create_directories(dir);
  return dir;
}

void add_global_flags(CLI::App* cmd, GlobalArgs& g) {
  cmd->add_option("--device", g.device_path, "device JSON file");
  cmd->add_option("--preset", g.preset, "bundled stack: pn-baseline, pn-optimized, ppn-optimized");
  cmd->add_option("--spectrum", g.spectrum_path, "two-column spectrum file (default: bundled AM1.5G)");
  cmd->add_option("--out", g.out_dir, "output directory (default: current)");
  cmd->add_option("--jobs", g.jobs, "worker threads (default: available cores)");
  cmd->add_option("--temp-K", g.temperature_K, "override stack temperature [K]")
      ->each([&g](const std::string&) { g.temperature_set = true; });
  cmd->add_flag("-v,--verbose", g.verbose, "per-step progress on stderr");
}

void print_stack_summary(const DeviceStack& stack) {
  std::cout << stack.layers.size() << " layers (back -> front), T = " << stack.temperature_K
            << " K:\n";
  for (std::size_t i = 0; i < stack.layers.size(); ++i) {
    const auto& l = stack.layers[i];
    std::cout << "  [" << i << "] " << l.material.name << "  " << l.thickness_um << " um  "
              << (l.doping_type == DopingType::donor ? "donor" : "acceptor") << " "
              << format_number(l.doping_cm3) << " cm^-3\n";
  }
}

nlohmann::json metrics_json(const std::optional<CellMetrics>& m, double pin_mW_cm2) {
  nlohmann::json j;
  if (m) {
    j["jsc_mA_cm2"] = m->jsc_mA_cm2;
    j["voc_V"] = m->voc_V;
    j["ff_percent"] = m->ff * 100.0;
    j["pce_percent"] = m->pce * 100.0;
    j["vmp_V"] = m->vmp_V;
    j["jmp_mA_cm2"] = m->jmp_mA_cm2;
    j["pmax_mW_cm2"] = m->pmax_mW_cm2;
  } else {
    for (const char* key :
         {"jsc_mA_cm2", "voc_V", "ff_percent", "pce_percent", "vmp_V", "jmp_mA_cm2", "pmax_mW_cm2"})
      j[key] = nullptr;
  }
  j["pin_mW_cm2"] = pin_mW_cm2;
  return j;
}

int cmd_simulate(const GlobalArgs& g) {
  const DeviceStack stack = resolve_stack(g);
  const SolarSpectrum spectrum = resolve_spectrum(g);
  const fs::path out = ensure_out_dir(g);

  print_stack_summary(stack);
  auto mesh = std::make_shared<const Mesh>(generate_mesh(stack));
  SolverConfig cfg;
  const SimState eq = solve_equilibrium(stack, mesh, cfg);
  const auto gen = generation_profile(stack, *mesh, spectrum);
  const SimState sc = solve_bias(stack, eq, 0.0, &gen, cfg);

  write_band_csv(band_diagram(stack, eq), out / "band_diagram.csv");
  const double jsc = std::abs(sc.J_mA_cm2);
  nlohmann::json j{{"jsc_mA_cm2", jsc}, {"pin_mW_cm2", spectrum.total_power_mW_cm2()}};
  std::ofstream(out / "metrics.json", std::ios::binary) << j.dump(2) << "\n";

  std::cout << "equilibrium: " << eq.iterations << " Newton iterations, |J| = "
            << format_number(std::abs(eq.J_mA_cm2)) << " mA/cm^2\n";
  std::cout << "short circuit: Jsc = " << format_number(jsc) << " mA/cm^2 ("
            << sc.iterations << " Gummel iterations)\n";
  std::cout << "wrote " << (out / "band_diagram.csv").string() << ", "
            << (out / "metrics.json").string() << "\n";
  return 0;
}

int cmd_jv(const GlobalArgs& g, const JvOptions& opts) {
  const DeviceStack stack = resolve_stack(g);
  const SolarSpectrum spectrum = resolve_spectrum(g);
  const fs::path out = ensure_out_dir(g);

  SolverConfig cfg;
  const IVCurve curve = compute_jv(stack, cfg, spectrum, opts);
  write_iv_csv(curve, out / "jv.csv");
  write_pv_csv(curve, out / "pv.csv");
  if (g.verbose) {
    for (const auto& s : curve.samples)
      std::cerr << "V = " << s.v_V << " V, J = " << format_number(s.j_mA_cm2) << " mA/cm^2\n";
  }

  std::optional<CellMetrics> metrics;
  if (!opts.dark) {
    try {
      metrics = extract_metrics(curve);
    } catch (const ValidationError& e) {
      throw ValidationError(std::string(e.what()) + "; try a higher --vmax");
    }
  }
  std::ofstream(out / "metrics.json", std::ios::binary)
      << metrics_json(metrics, curve.pin_mW_cm2).dump(2) << "\n";

  std::cout << "wrote jv.csv, pv.csv, metrics.json (" << curve.samples.size() << " samples)\n";
  if (metrics) {
    std::cout << "Jsc = " << format_number(metrics->jsc_mA_cm2)
              << " mA/cm^2, Voc = " << format_number(metrics->voc_V)
              << " V, FF = " << format_number(metrics->ff * 100.0)
              << " %, PCE = " << format_number(metrics->pce * 100.0) << " %\n";
  }
  return 0;
}

int cmd_qe(const GlobalArgs& g, double wl_start, double wl_stop, double wl_step) {
  if (!(wl_step > 0)) throw ValidationError("qe: --wl-step must be > 0");
  if (!(wl_start < wl_stop)) throw ValidationError("qe: need --wl-start < --wl-stop");
  const DeviceStack stack = resolve_stack(g);
  const fs::path out = ensure_out_dir(g);

  std::vector<double> wavelengths;
  const int n = static_cast<int>(std::floor((wl_stop - wl_start) / wl_step + 1e-9)) + 1;
  for (int i = 0; i < n; ++i) wavelengths.push_back(wl_start + i * wl_step);

  SolverConfig cfg;
  QeOptions qopts;
  qopts.jobs = effective_jobs(g);
  if (g.verbose)
    std::cerr << wavelengths.size() << " wavelengths, " << qopts.jobs << " worker(s)\n";
  const QECurve curve = compute_qe(stack, wavelengths, cfg, qopts);
  write_qe_csv(curve, out / "qe.csv");
  std::cout << "wrote qe.csv (" << curve.samples.size() << " rows)\n";
  if (!curve.failures.empty()) {
    std::ofstream log(out / "qe_failures.log", std::ios::binary);
    for (const auto& f : curve.failures)
      log << format_number(f.wavelength_nm) << " nm: " << f.message << "\n";
    std::cout << curve.failures.size() << " wavelength(s) failed; see qe_failures.log\n";
  }
  return 0;
}

int cmd_sweep(const GlobalArgs& g, const std::string& axis1_text, const std::string& axis2_text,
              const std::string& metric_name_text) {
  const DeviceStack stack = resolve_stack(g);
  const SolarSpectrum spectrum = resolve_spectrum(g);
  const fs::path out = ensure_out_dir(g);
  const Metric metric = metric_from_string(metric_name_text);

  const SweepAxis axis1 = SweepAxis::parse(axis1_text);
  const SweepAxis axis2 = SweepAxis::parse(axis2_text);

  SolverConfig cfg;
  SweepOptions opts;
  opts.jobs = effective_jobs(g);
  const HeatmapResult result = run_grid_sweep(stack, axis1, axis2, cfg, spectrum, opts);
  write_heatmap_csvs(result, out);
  write_best_json(result, out / "best.json");

  const std::size_t total = axis1.values.size() * axis2.values.size();
  std::cout << "swept " << axis1.values.size() << " x " << axis2.values.size() << " cells, "
            << result.failures.size() << " failed\n";
  const BestCell best = best_cell(result, metric);  // throws if all cells failed
  std::cout << "best " << sol1d::metric_name(metric) << " at " << axis1.layer << "."
            << axis1.param_name() << " = " << format_number(best.axis1_value) << ", "
            << axis2.layer << "." << axis2.param_name() << " = "
            << format_number(best.axis2_value)
            << " (PCE = " << format_number(best.metrics.pce * 100.0) << " %)\n";
  std::cout << "wrote pce.csv ff.csv jsc.csv voc.csv failures.csv best.json ("
            << total - result.failures.size() << "/" << total << " cells)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D drift-diffusion simulator for thin-film solar cell stacks"};
  app.require_subcommand(1);

  GlobalArgs g_sim, g_jv, g_qe, g_sweep;

  auto* sim = app.add_subcommand("simulate", "equilibrium + short-circuit point, band diagram");
  add_global_flags(sim, g_sim);

  auto* jv = app.add_subcommand("jv", "J-V and P-V curves with cell metrics");
  add_global_flags(jv, g_jv);
  JvOptions jv_opts;
  jv->add_option("--vmax", jv_opts.v_max_V, "sweep limit [V] (default 1.3)");
  jv->add_option("--vstep", jv_opts.v_step_V, "voltage increment [V] (default 0.02)");
  jv->add_flag("--dark", jv_opts.dark, "dark curve only, no illumination");

  auto* qe = app.add_subcommand("qe", "spectral external quantum efficiency");
  add_global_flags(qe, g_qe);
  double wl_start = 300.0, wl_stop = 1200.0, wl_step = 10.0;
  qe->add_option("--wl-start", wl_start, "first wavelength [nm] (default 300)");
  qe->add_option("--wl-stop", wl_stop, "last wavelength [nm] (default 1200)");
  qe->add_option("--wl-step", wl_step, "wavelength increment [nm] (default 10)");

  auto* sweep = app.add_subcommand("sweep", "two-parameter grid sweep with heatmap CSVs");
  add_global_flags(sweep, g_sweep);
  std::string axis1_text, axis2_text, metric_text = "PCE";
  sweep->add_option("--axis1", axis1_text, "LAYER.PARAM=start:stop:step or =1eA:1eB")->required();
  sweep->add_option("--axis2", axis2_text, "second axis, same syntax")->required();
  sweep->add_option("--metric", metric_text, "metric reported as best (PCE, FF, Voc, Jsc)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return cmd_simulate(g_sim);
    if (jv->parsed()) return cmd_jv(g_jv, jv_opts);
    if (qe->parsed()) return cmd_qe(g_qe, wl_start, wl_stop, wl_step);
    if (sweep->parsed()) return cmd_sweep(g_sweep, axis1_text, axis2_text, metric_text);
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    if (!e.residual_history.empty()) {
      std::cerr << "residual trace:";
      for (double r : e.residual_history) std::cerr << " " << r;
      std::cerr << "\n";
    }
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
