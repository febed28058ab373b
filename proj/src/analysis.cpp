#include "sol1d/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "sol1d/constants.hpp"
#include "sol1d/errors.hpp"
#include "sol1d/transport.hpp"

namespace sol1d {

namespace {

std::vector<double> voltage_grid(double v_max, double v_step) {
  if (!(v_step > 0)) throw ValidationError("jv: voltage step must be > 0");
  if (!(v_max > 0)) throw ValidationError("jv: v_max must be > 0");
  const int n = static_cast<int>(std::floor(v_max / v_step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = i * v_step;
  return grid;
}

}  // namespace

IVCurve compute_jv(const DeviceStack& stack, const SolverConfig& cfg, const SolarSpectrum& spectrum,
                   const JvOptions& opts, const MeshConfig& mesh_cfg) {
  stack.validate();
  auto mesh = std::make_shared<const Mesh>(generate_mesh(stack, mesh_cfg));
  GenerationProfile gen;
  const GenerationProfile* gen_ptr = nullptr;
  if (!opts.dark) {
    gen = generation_profile(stack, *mesh, spectrum);
    gen_ptr = &gen;
  }
  const auto grid = voltage_grid(opts.v_max_V, opts.v_step_V);
  const auto states = continuation_sweep(stack, mesh, grid, gen_ptr, cfg);

  IVCurve curve;
  curve.pin_mW_cm2 = spectrum.total_power_mW_cm2();
  curve.samples.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    // light convention: extracted photocurrent positive
    curve.samples.push_back({grid[i], -states[i].J_mA_cm2});
  }
  return curve;
}

CellMetrics extract_metrics(const IVCurve& curve) {
  const auto& s = curve.samples;
  if (s.size() < 3) throw ValidationError("metrics: need at least 3 J-V samples");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i].v_V > s[i - 1].v_V))
      throw ValidationError("metrics: voltages must be strictly increasing");
  if (std::abs(s.front().v_V) > 1e-12)
    throw ValidationError("metrics: curve must start at V = 0");
  if (!(curve.pin_mW_cm2 > 0))
    throw ValidationError("metrics: incident power must be > 0");

  CellMetrics m;
  m.jsc_mA_cm2 = s.front().j_mA_cm2;

  // zero crossing (J decreasing through 0)
  std::size_t k = s.size();
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].j_mA_cm2 > 0.0 && s[i + 1].j_mA_cm2 <= 0.0) {
      k = i;
      break;
    }
  }
  if (k == s.size()) {
    std::ostringstream os;
    os << "metrics: J never crosses zero below V_max = " << s.back().v_V
       << " V (Voc out of range; raise the sweep limit)";
    throw ValidationError(os.str());
  }
  const double j0 = s[k].j_mA_cm2, j1 = s[k + 1].j_mA_cm2;
  m.voc_V = s[k].v_V + (s[k + 1].v_V - s[k].v_V) * j0 / (j0 - j1);

  // raw maximum of P = V*J over samples up to the crossing
  std::size_t best = 0;
  double p_best = -1.0;
  for (std::size_t i = 0; i <= k + 1 && i < s.size(); ++i) {
    const double p = s[i].v_V * s[i].j_mA_cm2;
    if (p > p_best) {
      p_best = p;
      best = i;
    }
  }
  m.vmp_V = s[best].v_V;
  m.pmax_mW_cm2 = p_best;

  // parabolic refinement on the bracketing triple; never below the raw best
  if (best > 0 && best + 1 < s.size()) {
    const double v0 = s[best - 1].v_V, v1 = s[best].v_V, v2 = s[best + 1].v_V;
    const double p0 = s[best - 1].v_V * s[best - 1].j_mA_cm2;
    const double p1 = p_best;
    const double p2 = s[best + 1].v_V * s[best + 1].j_mA_cm2;
    const double denom = (v1 - v0) * (p1 - p2) - (v1 - v2) * (p1 - p0);
    if (std::abs(denom) > 0) {
      const double num = (v1 - v0) * (v1 - v0) * (p1 - p2) - (v1 - v2) * (v1 - v2) * (p1 - p0);
      const double v_star = v1 - 0.5 * num / denom;
      if (v_star > v0 && v_star < v2) {
        // evaluate the interpolating parabola at its vertex
        const double l0 = (v_star - v1) * (v_star - v2) / ((v0 - v1) * (v0 - v2));
        const double l1 = (v_star - v0) * (v_star - v2) / ((v1 - v0) * (v1 - v2));
        const double l2 = (v_star - v0) * (v_star - v1) / ((v2 - v0) * (v2 - v1));
        const double p_star = l0 * p0 + l1 * p1 + l2 * p2;
        if (p_star > m.pmax_mW_cm2) {
          m.pmax_mW_cm2 = p_star;
          m.vmp_V = v_star;
        }
      }
    }
  }
  m.jmp_mA_cm2 = m.pmax_mW_cm2 / m.vmp_V;
  m.ff = m.pmax_mW_cm2 / (m.voc_V * m.jsc_mA_cm2);
  m.pce = m.pmax_mW_cm2 / curve.pin_mW_cm2;
  return m;
}

QECurve compute_qe(const DeviceStack& stack, const std::vector<double>& wavelengths_nm,
                   const SolverConfig& cfg, const QeOptions& opts, const MeshConfig& mesh_cfg) {
  stack.validate();
  for (double wl : wavelengths_nm)
    if (wl < 300.0 || wl > 1300.0)
      throw ValidationError("qe: wavelengths must lie within 300-1300 nm");

  auto mesh = std::make_shared<const Mesh>(generate_mesh(stack, mesh_cfg));
  const SimState eq = solve_equilibrium(stack, mesh, cfg);
  // Gummel-refined dark baseline: the lit solves inherit the same iteration
  // floor, so the subtraction cancels it.
  const SimState dark = solve_bias(stack, eq, 0.0, nullptr, cfg);
  const double j_dark = dark.J_mA_cm2;
  const double q_flux_mA = constants::q_C * opts.probe_flux_cm2_s * 1e3;

  struct Slot {
    bool ok = false;
    double eqe = 0.0;
    std::string error;
  };
  std::vector<Slot> slots(wavelengths_nm.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= wavelengths_nm.size()) break;
      try {
        const auto mono = monochromatic_spectrum(wavelengths_nm[i], opts.probe_flux_cm2_s);
        const auto gen = generation_profile(stack, *mesh, mono);
        if (gen.absorbed_flux_cm2_s == 0.0) {
          slots[i].eqe = 0.0;  // transparent at this wavelength
        } else {
          const SimState lit = solve_bias(stack, dark, 0.0, &gen, cfg);
          slots[i].eqe = std::abs(lit.J_mA_cm2 - j_dark) / q_flux_mA;
        }
        slots[i].ok = true;
      } catch (const Error& e) {
        slots[i].error = e.what();
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

  QECurve out;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (slots[i].ok)
      out.samples.push_back({wavelengths_nm[i], slots[i].eqe});
    else
      out.failures.push_back({wavelengths_nm[i], slots[i].error});
  }
  return out;
}

BandDiagram band_diagram(const DeviceStack& stack, const SimState& state) {
  if (!state.converged) throw ValidationError("band diagram: state not converged");
  const Mesh& mesh = *state.mesh;
  const BandParams bp = build_band_params(stack, mesh);
  BandDiagram bd;
  bd.rows.reserve(mesh.node_count());
  for (std::size_t i = 0; i < mesh.node_count(); ++i) {
    BandDiagram::Row r;
    r.x_um = mesh.x_cm[i] * 1e4;
    r.Ec_eV = bp.Ec0_eV[i] - state.psi_V[i];
    r.Ev_eV = bp.Ev0_eV[i] - state.psi_V[i];
    r.EFn_eV = state.EFn_eV[i];
    r.EFp_eV = state.EFp_eV[i];
    bd.rows.push_back(r);
  }
  return bd;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // fixed '\n' endings
  if (!out) throw Error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_iv_csv(const IVCurve& curve, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "V_volt,J_mA_cm2\n";
  for (const auto& s : curve.samples)
    out << format_number(s.v_V) << "," << format_number(s.j_mA_cm2) << "\n";
}

void write_pv_csv(const IVCurve& curve, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "V_volt,P_mW_cm2\n";
  for (const auto& s : curve.samples)
    out << format_number(s.v_V) << "," << format_number(s.v_V * s.j_mA_cm2) << "\n";
}

void write_qe_csv(const QECurve& curve, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "wavelength_nm,EQE\n";
  for (const auto& s : curve.samples)
    out << format_number(s.wavelength_nm) << "," << format_number(s.eqe) << "\n";
}

void write_band_csv(const BandDiagram& bd, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "x_um,Ec_eV,Ev_eV,EFn_eV,EFp_eV\n";
  for (const auto& r : bd.rows)
    out << format_number(r.x_um) << "," << format_number(r.Ec_eV) << "," << format_number(r.Ev_eV)
        << "," << format_number(r.EFn_eV) << "," << format_number(r.EFp_eV) << "\n";
}

}  // namespace sol1d
