#ifndef SOL1D_SOLVER_HPP
#define SOL1D_SOLVER_HPP

#include <memory>
#include <vector>

#include "sol1d/device.hpp"
#include "sol1d/optics.hpp"

namespace sol1d {

struct SolverConfig {
  double potential_tol_V = 1e-10;   // max |dpsi| per Gummel cycle at convergence
  double residual_tol = 1e-9;       // max relative carrier update at convergence
  int max_gummel_iterations = 600;
  int max_newton_iterations = 200;  // inner nonlinear-Poisson Newton
  double damping_clamp_V = 0.0517;  // ~2*kT/q at 300 K, per-update psi clamp
  double voltage_step_V = 0.02;     // continuation step
  double J_tol_mA_cm2 = 1e-6;
};

/// Mesh-resolved solution at one bias/illumination point.
struct SimState {
  std::shared_ptr<const Mesh> mesh;
  std::vector<double> psi_V;
  std::vector<double> n_cm3;
  std::vector<double> p_cm3;
  std::vector<double> EFn_eV;
  std::vector<double> EFp_eV;
  double J_mA_cm2 = 0.0;   // terminal current density, positive back->front
  double bias_V = 0.0;
  bool illuminated = false;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;
};

/// Self-consistent dark equilibrium (V = 0): Newton on the nonlinear Poisson
/// equation with Boltzmann carrier closures, flat quasi-Fermi levels.
SimState solve_equilibrium(const DeviceStack& stack, std::shared_ptr<const Mesh> mesh,
                           const SolverConfig& cfg = {});

/// Damped Gummel iteration at one bias point, warm-started from prev:
/// nonlinear Poisson, then electron and hole continuity with SG fluxes,
/// SRH recombination, and optional photogeneration. The caller keeps
/// |bias_V - prev.bias_V| within the continuation step.
SimState solve_bias(const DeviceStack& stack, const SimState& prev, double bias_V,
                    const GenerationProfile* generation, const SolverConfig& cfg = {});

/// Warm-started sequence over sorted bias targets; steps larger than
/// cfg.voltage_step_V are internally subdivided.
std::vector<SimState> continuation_sweep(const DeviceStack& stack, std::shared_ptr<const Mesh> mesh,
                                         const std::vector<double>& v_targets,
                                         const GenerationProfile* generation,
                                         const SolverConfig& cfg = {});

/// Total current density Jn + Jp on every edge [mA/cm^2]; constant across
/// edges in a converged steady state.
std::vector<double> edge_current_mA_cm2(const DeviceStack& stack, const SimState& state);

/// Poisson residual per node of a state [V/cm]; near zero at convergence.
std::vector<double> poisson_residual(const DeviceStack& stack, const SimState& state);

}  // namespace sol1d

#endif
