#ifndef SOL1D_ANALYSIS_HPP
#define SOL1D_ANALYSIS_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "sol1d/device.hpp"
#include "sol1d/optics.hpp"
#include "sol1d/solver.hpp"

namespace sol1d {

/// Voltage-current samples in the light convention: J > 0 is extracted
/// photocurrent, decreasing through zero at Voc.
struct IVCurve {
  struct Sample {
    double v_V = 0.0;
    double j_mA_cm2 = 0.0;
  };
  std::vector<Sample> samples;
  double pin_mW_cm2 = 0.0;  // incident optical power for PCE
};

struct CellMetrics {
  double jsc_mA_cm2 = 0.0;
  double voc_V = 0.0;
  double ff = 0.0;           // fraction
  double pce = 0.0;          // fraction
  double vmp_V = 0.0;
  double jmp_mA_cm2 = 0.0;
  double pmax_mW_cm2 = 0.0;
};

struct JvOptions {
  double v_max_V = 1.3;
  double v_step_V = 0.02;
  bool dark = false;
};

/// Illuminated (or dark) J-V characteristic from 0 to v_max via warm-started
/// continuation.
IVCurve compute_jv(const DeviceStack& stack, const SolverConfig& cfg, const SolarSpectrum& spectrum,
                   const JvOptions& opts = {}, const MeshConfig& mesh_cfg = {});

/// Jsc at V=0, Voc by linear interpolation of the zero crossing, maximum
/// power point by parabolic refinement of the best sampled triple,
/// FF = Pmax/(Voc*Jsc), PCE = Pmax/Pin.
CellMetrics extract_metrics(const IVCurve& curve);

struct QECurve {
  struct Sample {
    double wavelength_nm = 0.0;
    double eqe = 0.0;
  };
  std::vector<Sample> samples;
  struct Failure {
    double wavelength_nm = 0.0;
    std::string message;
  };
  std::vector<Failure> failures;  // wavelengths whose solve failed (gaps)
};

struct QeOptions {
  double probe_flux_cm2_s = 1e16;
  int jobs = 1;
};

/// External quantum efficiency: monochromatic short-circuit current at a
/// small probe flux against the dark baseline, EQE = |J - J_dark| / (q*flux).
QECurve compute_qe(const DeviceStack& stack, const std::vector<double>& wavelengths_nm,
                   const SolverConfig& cfg, const QeOptions& opts = {},
                   const MeshConfig& mesh_cfg = {});

struct BandDiagram {
  struct Row {
    double x_um = 0.0;
    double Ec_eV = 0.0;
    double Ev_eV = 0.0;
    double EFn_eV = 0.0;
    double EFp_eV = 0.0;
  };
  std::vector<Row> rows;
};

/// Band edges from the electrostatic potential and the electron-affinity
/// rule; requires a converged state.
BandDiagram band_diagram(const DeviceStack& stack, const SimState& state);

// CSV exports (headers per file format: V_volt,J_mA_cm2 / wavelength_nm,EQE /
// x_um,Ec_eV,Ev_eV,EFn_eV,EFp_eV)
void write_iv_csv(const IVCurve& curve, const std::filesystem::path& path);
void write_pv_csv(const IVCurve& curve, const std::filesystem::path& path);
void write_qe_csv(const QECurve& curve, const std::filesystem::path& path);
void write_band_csv(const BandDiagram& bd, const std::filesystem::path& path);

/// Fixed-format float for byte-reproducible CSV output.
std::string format_number(double v);

}  // namespace sol1d

#endif
