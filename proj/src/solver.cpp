#include "sol1d/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sol1d/constants.hpp"
#include "sol1d/errors.hpp"
#include "sol1d/transport.hpp"
#include "tridiag.hpp"

namespace sol1d {

namespace {

using detail::Tridiagonal;
using detail::solve_tridiagonal;

constexpr double kQOverEps0 = constants::q_C / constants::eps0_F_per_cm;  // [V cm]

// Discretized device: every table the Poisson/continuity assembly needs,
// precomputed once per stack/mesh pair.
//
// Carrier closures use log-offsets a_n, a_p per node so that at flat
// quasi-Fermi level EF = 0:
//   n = exp(psi/Vt + a_n),  p = exp(-psi/Vt + a_p)
// with a_n = chi/Vt + ln(Nc), a_p = -(chi + Eg)/Vt + ln(Nv). Between nodes
// of different materials the SG flux converts node densities into the edge
// layer's bands (electron-affinity rule); the conversion factors are
// exp(a(edge material) - a(node material)) and equal 1 on homogeneous edges.
struct Device1D {
  std::size_t N = 0;
  double vt = 0.0;
  std::vector<double> h;        // edge lengths [cm]
  std::vector<double> w;        // control volume widths [cm]
  // node tables
  std::vector<double> a_n, a_p;
  std::vector<double> ni, ni2;
  std::vector<double> inv_tau_n, inv_tau_p;  // 0 when no trap
  std::vector<double> srh_n1, srh_p1;
  std::vector<double> rad_coeff;
  std::vector<double> w_minus, w_plus;            // half CV widths
  std::vector<double> dop_minus, dop_plus;        // net doping per half CV
  std::vector<double> cnv_n_minus, cnv_n_plus;    // node->side density conversion
  std::vector<double> cnv_p_minus, cnv_p_plus;
  // edge tables
  std::vector<double> eps_h;            // eps_r / h
  std::vector<double> ke, kp;           // q*mu*Vt/h [A cm]
  std::vector<double> ce_i, ce_j;       // electron density conversion at edge endpoints
  std::vector<double> cp_i, cp_j;
  // contacts
  double psi_eq_back = 0.0, psi_eq_front = 0.0;
  double n_back = 0.0, p_back = 0.0, n_front = 0.0, p_front = 0.0;
};

double log_offset_n(const Material& m, double vt) {
  return m.electron_affinity_eV / vt + std::log(m.Nc_cm3);
}

double log_offset_p(const Material& m, double vt) {
  return -(m.electron_affinity_eV + m.bandgap_eV) / vt + std::log(m.Nv_cm3);
}

Device1D build_device(const DeviceStack& stack, const Mesh& mesh) {
  Device1D d;
  d.N = mesh.node_count();
  d.vt = constants::thermal_voltage_V(stack.temperature_K);
  const std::size_t n = d.N;
  const std::size_t ne = mesh.edge_count();

  d.h.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) d.h[e] = mesh.spacing_cm(e);

  d.a_n.resize(n);
  d.a_p.resize(n);
  d.ni.resize(n);
  d.ni2.resize(n);
  d.inv_tau_n.assign(n, 0.0);
  d.inv_tau_p.assign(n, 0.0);
  d.srh_n1.assign(n, 0.0);
  d.srh_p1.assign(n, 0.0);
  d.rad_coeff.assign(n, 0.0);
  d.w.assign(n, 0.0);
  d.w_minus.assign(n, 0.0);
  d.w_plus.assign(n, 0.0);
  d.dop_minus.assign(n, 0.0);
  d.dop_plus.assign(n, 0.0);
  d.cnv_n_minus.assign(n, 1.0);
  d.cnv_n_plus.assign(n, 1.0);
  d.cnv_p_minus.assign(n, 1.0);
  d.cnv_p_plus.assign(n, 1.0);

  const double kt = d.vt;  // numerically identical in eV
  for (std::size_t i = 0; i < n; ++i) {
    const Layer& layer = stack.layers[mesh.layer_of_node[i]];
    const Material& m = layer.material;
    d.a_n[i] = log_offset_n(m, d.vt);
    d.a_p[i] = log_offset_p(m, d.vt);
    d.ni[i] = intrinsic_density_cm3(m, stack.temperature_K);
    d.ni2[i] = d.ni[i] * d.ni[i];
    d.rad_coeff[i] = m.radiative_coeff_cm3_s;
    if (m.trap && m.trap->density_cm3 > 0) {
      d.inv_tau_n[i] = m.trap->sigma_e_cm2 * m.vth_e_cm_s * m.trap->density_cm3;
      d.inv_tau_p[i] = m.trap->sigma_p_cm2 * m.vth_h_cm_s * m.trap->density_cm3;
      d.srh_n1[i] = d.ni[i] * std::exp(m.trap->energy_level_eV / kt);
      d.srh_p1[i] = d.ni[i] * std::exp(-m.trap->energy_level_eV / kt);
    }
  }

  d.eps_h.resize(ne);
  d.ke.resize(ne);
  d.kp.resize(ne);
  d.ce_i.resize(ne);
  d.ce_j.resize(ne);
  d.cp_i.resize(ne);
  d.cp_j.resize(ne);
  for (std::size_t e = 0; e < ne; ++e) {
    const Layer& layer = stack.layers[mesh.layer_of_edge[e]];
    const Material& m = layer.material;
    d.eps_h[e] = m.rel_permittivity / d.h[e];
    d.ke[e] = constants::q_C * m.mu_e_cm2_Vs * d.vt / d.h[e];
    d.kp[e] = constants::q_C * m.mu_h_cm2_Vs * d.vt / d.h[e];
    const double ane = log_offset_n(m, d.vt);
    const double ape = log_offset_p(m, d.vt);
    d.ce_i[e] = std::exp(ane - d.a_n[e]);
    d.ce_j[e] = std::exp(ane - d.a_n[e + 1]);
    d.cp_i[e] = std::exp(ape - d.a_p[e]);
    d.cp_j[e] = std::exp(ape - d.a_p[e + 1]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      d.w_minus[i] = 0.5 * d.h[i - 1];
      const Layer& side = stack.layers[mesh.layer_of_edge[i - 1]];
      d.dop_minus[i] = side.net_doping_cm3();
      d.cnv_n_minus[i] = std::exp(log_offset_n(side.material, d.vt) - d.a_n[i]);
      d.cnv_p_minus[i] = std::exp(log_offset_p(side.material, d.vt) - d.a_p[i]);
    }
    if (i + 1 < n) {
      d.w_plus[i] = 0.5 * d.h[i];
      const Layer& side = stack.layers[mesh.layer_of_edge[i]];
      d.dop_plus[i] = side.net_doping_cm3();
      d.cnv_n_plus[i] = std::exp(log_offset_n(side.material, d.vt) - d.a_n[i]);
      d.cnv_p_plus[i] = std::exp(log_offset_p(side.material, d.vt) - d.a_p[i]);
    }
    d.w[i] = d.w_minus[i] + d.w_plus[i];
  }

  // ohmic contacts: equilibrium densities of the contact layers
  const Layer& back = stack.layers.front();
  const Layer& front = stack.layers.back();
  const auto eq_b = equilibrium_carriers(back.material, back.doping_type, back.doping_cm3,
                                         stack.temperature_K);
  const auto eq_f = equilibrium_carriers(front.material, front.doping_type, front.doping_cm3,
                                         stack.temperature_K);
  d.n_back = eq_b.n_cm3;
  d.p_back = eq_b.p_cm3;
  d.n_front = eq_f.n_cm3;
  d.p_front = eq_f.p_cm3;
  d.psi_eq_back = d.vt * (std::log(eq_b.n_cm3) - d.a_n.front());
  d.psi_eq_front = d.vt * (std::log(eq_f.n_cm3) - d.a_n.back());
  return d;
}

// B(x) and B(-x) = B(x) + x as a pair, per edge
struct EdgeB {
  double bp;  // B(x)
  double bm;  // B(-x)
};

EdgeB edge_bernoulli(double dpsi, double vt) {
  const double x = dpsi / vt;
  const double b = bernoulli(x);
  return {b, b + x};
}

// Electron and hole SG currents on edge e [A/cm^2], positive back->front.
double electron_edge_current(const Device1D& d, const std::vector<double>& psi,
                             const std::vector<double>& n, std::size_t e) {
  const auto b = edge_bernoulli(psi[e + 1] - psi[e], d.vt);
  return d.ke[e] * (d.ce_j[e] * n[e + 1] * b.bp - d.ce_i[e] * n[e] * b.bm);
}

double hole_edge_current(const Device1D& d, const std::vector<double>& psi,
                         const std::vector<double>& p, std::size_t e) {
  const auto b = edge_bernoulli(psi[e + 1] - psi[e], d.vt);
  return d.kp[e] * (d.cp_i[e] * p[e] * b.bp - d.cp_j[e] * p[e + 1] * b.bm);
}

// Space charge q/eps0 * integral over the control volume of node i, with the
// node density converted into each half-volume's material.
double charge_integral(const Device1D& d, std::size_t i, double n_i, double p_i) {
  double q = 0.0;
  q += d.w_minus[i] * (p_i * d.cnv_p_minus[i] - n_i * d.cnv_n_minus[i] + d.dop_minus[i]);
  q += d.w_plus[i] * (p_i * d.cnv_p_plus[i] - n_i * d.cnv_n_plus[i] + d.dop_plus[i]);
  return q;
}

// Effective densities entering d(charge)/d(psi)
double charge_n_weight(const Device1D& d, std::size_t i) {
  return d.w_minus[i] * d.cnv_n_minus[i] + d.w_plus[i] * d.cnv_n_plus[i];
}
double charge_p_weight(const Device1D& d, std::size_t i) {
  return d.w_minus[i] * d.cnv_p_minus[i] + d.w_plus[i] * d.cnv_p_plus[i];
}

// Damped Newton on the nonlinear Poisson equation. In equilibrium mode the
// carriers follow the flat-Fermi-level closure n(psi), p(psi); otherwise
// they respond exponentially around the base state (Gummel's local
// linearization), which the caller then applies to n, p.
struct PoissonResult {
  int iterations = 0;
  double last_update_V = 0.0;
  bool converged = false;
  std::vector<double> update_history_V;
};

PoissonResult newton_poisson(const Device1D& d, std::vector<double>& psi, std::vector<double>& n,
                             std::vector<double>& p, bool equilibrium_mode,
                             const SolverConfig& cfg) {
  const std::size_t N = d.N;
  std::vector<double> psi_base;
  if (!equilibrium_mode) psi_base = psi;

  auto carriers_at = [&](std::size_t i, double psi_i, double& n_i, double& p_i) {
    if (equilibrium_mode) {
      n_i = std::exp(psi_i / d.vt + d.a_n[i]);
      p_i = std::exp(-psi_i / d.vt + d.a_p[i]);
    } else {
      const double shift = (psi_i - psi_base[i]) / d.vt;
      n_i = n[i] * std::exp(shift);
      p_i = p[i] * std::exp(-shift);
    }
  };

  PoissonResult res;
  const double tol = std::max(0.5 * cfg.potential_tol_V, 1e-13);
  for (int it = 0; it < cfg.max_newton_iterations; ++it) {
    Tridiagonal sys(N);
    for (std::size_t i = 0; i < N; ++i) {
      if (i == 0 || i + 1 == N) {  // Dirichlet: psi already holds the BC
        sys.diag[i] = 1.0;
        sys.rhs[i] = 0.0;
        continue;
      }
      double n_i, p_i;
      carriers_at(i, psi[i], n_i, p_i);
      const double resid = d.eps_h[i - 1] * (psi[i] - psi[i - 1]) -
                           d.eps_h[i] * (psi[i + 1] - psi[i]) -
                           kQOverEps0 * charge_integral(d, i, n_i, p_i);
      sys.lower[i] = -d.eps_h[i - 1];
      sys.upper[i] = -d.eps_h[i];
      sys.diag[i] = d.eps_h[i - 1] + d.eps_h[i] +
                    kQOverEps0 * (n_i * charge_n_weight(d, i) + p_i * charge_p_weight(d, i)) / d.vt;
      sys.rhs[i] = -resid;
    }
    std::vector<double> delta = solve_tridiagonal(std::move(sys));
    double dmax = 0.0;
    for (std::size_t i = 1; i + 1 < N; ++i) {
      const double step = std::clamp(delta[i], -cfg.damping_clamp_V, cfg.damping_clamp_V);
      psi[i] += step;
      dmax = std::max(dmax, std::abs(step));
    }
    res.iterations = it + 1;
    res.last_update_V = dmax;
    res.update_history_V.push_back(dmax);
    if (dmax < tol) {
      res.converged = true;
      break;
    }
  }

  // apply the carrier response (or the equilibrium closure) at interior nodes
  for (std::size_t i = 1; i + 1 < N; ++i) carriers_at(i, psi[i], n[i], p[i]);
  if (equilibrium_mode) {
    carriers_at(0, psi[0], n[0], p[0]);
    carriers_at(N - 1, psi[N - 1], n[N - 1], p[N - 1]);
  }
  return res;
}

// SRH denominators, shared by the electron and hole solves of one cycle
void srh_denominators(const Device1D& d, const std::vector<double>& n, const std::vector<double>& p,
                      std::vector<double>& den) {
  den.assign(d.N, 0.0);
  for (std::size_t i = 0; i < d.N; ++i) {
    if (d.inv_tau_n[i] == 0.0 && d.inv_tau_p[i] == 0.0) continue;
    const double tau_n = 1.0 / d.inv_tau_n[i];
    const double tau_p = 1.0 / d.inv_tau_p[i];
    den[i] = tau_p * (n[i] + d.srh_n1[i]) + tau_n * (p[i] + d.srh_p1[i]);
  }
}

// Linear continuity solve for one carrier given psi and the other carrier.
// M-matrix assembly: strictly positive diagonal, nonpositive off-diagonals,
// nonnegative right-hand side, so the Thomas solve preserves positivity.
std::vector<double> solve_continuity(const Device1D& d, Carrier carrier,
                                     const std::vector<double>& psi, const std::vector<double>& n,
                                     const std::vector<double>& p, const std::vector<double>& den,
                                     const GenerationProfile* gen) {
  const std::size_t N = d.N;
  Tridiagonal sys(N);
  const bool electrons = carrier == Carrier::electron;
  for (std::size_t i = 0; i < N; ++i) {
    if (i == 0 || i + 1 == N) {
      sys.diag[i] = 1.0;
      sys.rhs[i] = electrons ? (i == 0 ? d.n_back : d.n_front) : (i == 0 ? d.p_back : d.p_front);
      continue;
    }
    const auto bl = edge_bernoulli(psi[i] - psi[i - 1], d.vt);    // edge i-1
    const auto br = edge_bernoulli(psi[i + 1] - psi[i], d.vt);    // edge i
    if (electrons) {
      sys.lower[i] = -d.ke[i - 1] * d.ce_i[i - 1] * bl.bm;
      sys.upper[i] = -d.ke[i] * d.ce_j[i] * br.bp;
      sys.diag[i] = d.ke[i] * d.ce_i[i] * br.bm + d.ke[i - 1] * d.ce_j[i - 1] * bl.bp;
    } else {
      sys.lower[i] = -d.kp[i - 1] * d.cp_i[i - 1] * bl.bp;
      sys.upper[i] = -d.kp[i] * d.cp_j[i] * br.bm;
      sys.diag[i] = d.kp[i] * d.cp_i[i] * br.bp + d.kp[i - 1] * d.cp_j[i - 1] * bl.bm;
    }
    // recombination, linearized in the solved carrier; generation on the RHS
    const double qw = constants::q_C * d.w[i];
    double gain = gen ? gen->rate_cm3_s[i] : 0.0;
    double loss_coeff = 0.0;
    if (den[i] > 0.0) {
      loss_coeff += (electrons ? p[i] : n[i]) / den[i];
      gain += d.ni2[i] / den[i];
    }
    if (d.rad_coeff[i] > 0.0) {
      loss_coeff += d.rad_coeff[i] * (electrons ? p[i] : n[i]);
      gain += d.rad_coeff[i] * d.ni2[i];
    }
    sys.diag[i] += qw * loss_coeff;
    sys.rhs[i] = qw * gain;
  }
  return solve_tridiagonal(std::move(sys));
}

void derive_fermi_levels(const Device1D& d, SimState& st) {
  const std::size_t N = d.N;
  st.EFn_eV.resize(N);
  st.EFp_eV.resize(N);
  for (std::size_t i = 0; i < N; ++i) {
    st.EFn_eV[i] = d.vt * (std::log(st.n_cm3[i]) - d.a_n[i]) - st.psi_V[i];
    st.EFp_eV[i] = -d.vt * (std::log(st.p_cm3[i]) - d.a_p[i]) - st.psi_V[i];
  }
}

// Terminal current, evaluated at the front contact edge where carrier
// densities are modest; interior edges near 1e20 cm^-3 junctions carry a
// larger floating-point cancellation floor.
double terminal_current_mA(const Device1D& d, const SimState& st) {
  const std::size_t e = d.N - 2;
  return (electron_edge_current(d, st.psi_V, st.n_cm3, e) +
          hole_edge_current(d, st.psi_V, st.p_cm3, e)) *
         1e3;
}

SimState run_gummel(const Device1D& d, SimState state, double bias_V,
                    const GenerationProfile* gen, const SolverConfig& cfg) {
  const std::size_t N = d.N;
  state.bias_V = bias_V;
  state.illuminated = gen != nullptr;
  state.converged = false;

  // bias enters through the back contact; front contact grounded
  state.psi_V[0] = d.psi_eq_back + bias_V;
  state.psi_V[N - 1] = d.psi_eq_front;
  state.n_cm3[0] = d.n_back;
  state.p_cm3[0] = d.p_back;
  state.n_cm3[N - 1] = d.n_front;
  state.p_cm3[N - 1] = d.p_front;

  std::vector<double> history;
  std::vector<double> den;
  std::vector<double> psi_before(N);

  // Strongly heterogeneous stacks carry a floating-point conditioning floor
  // (flux chains across depleted wide-gap windows scale like exp(dpsi/Vt)),
  // so the update norms may bottom out above the nominal tolerances. A
  // stalled iteration at a small residual is accepted as converged and the
  // floor is reported in SimState::residual.
  constexpr int kStallWindow = 40;
  constexpr double kStallAcceptTol = 1e-4;
  double best_residual = std::numeric_limits<double>::infinity();
  int best_iteration = 0;

  for (int outer = 0; outer < cfg.max_gummel_iterations; ++outer) {
    psi_before = state.psi_V;
    newton_poisson(d, state.psi_V, state.n_cm3, state.p_cm3, /*equilibrium=*/false, cfg);
    double dpsi = 0.0;
    for (std::size_t i = 0; i < N; ++i)
      dpsi = std::max(dpsi, std::abs(state.psi_V[i] - psi_before[i]));

    srh_denominators(d, state.n_cm3, state.p_cm3, den);
    std::vector<double> n_new =
        solve_continuity(d, Carrier::electron, state.psi_V, state.n_cm3, state.p_cm3, den, gen);
    double dn = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      if (!(n_new[i] > 0.0)) {
        std::ostringstream os;
        os << "electron density non-positive at node " << i << " (V = " << bias_V
           << " V); reduce the voltage step or tighten damping";
        throw SolverError(os.str(), bias_V, history);
      }
      dn = std::max(dn, std::abs(n_new[i] - state.n_cm3[i]) / n_new[i]);
    }
    state.n_cm3 = std::move(n_new);

    std::vector<double> p_new =
        solve_continuity(d, Carrier::hole, state.psi_V, state.n_cm3, state.p_cm3, den, gen);
    double dp = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      if (!(p_new[i] > 0.0)) {
        std::ostringstream os;
        os << "hole density non-positive at node " << i << " (V = " << bias_V
           << " V); reduce the voltage step or tighten damping";
        throw SolverError(os.str(), bias_V, history);
      }
      dp = std::max(dp, std::abs(p_new[i] - state.p_cm3[i]) / p_new[i]);
    }
    state.p_cm3 = std::move(p_new);

    const double res = std::max(dpsi / d.vt, std::max(dn, dp));
    history.push_back(res);
    state.iterations = outer + 1;
    state.residual = res;
    if (dpsi < cfg.potential_tol_V && std::max(dn, dp) < cfg.residual_tol) {
      state.converged = true;
      break;
    }
    if (res < best_residual * (1.0 - 1e-3)) {
      best_residual = res;
      best_iteration = outer;
    } else if (outer - best_iteration >= kStallWindow && best_residual < kStallAcceptTol) {
      state.converged = true;  // stationary at the conditioning floor
      break;
    }
  }
  if (!state.converged) {
    std::ostringstream os;
    os << "Gummel iteration did not converge in " << cfg.max_gummel_iterations
       << " iterations at V = " << bias_V << " V (residual " << state.residual << ")";
    throw SolverError(os.str(), bias_V, history);
  }
  state.J_mA_cm2 = terminal_current_mA(d, state);
  derive_fermi_levels(d, state);
  return state;
}

}  // namespace

SimState solve_equilibrium(const DeviceStack& stack, std::shared_ptr<const Mesh> mesh,
                           const SolverConfig& cfg) {
  stack.validate();
  const Device1D d = build_device(stack, *mesh);
  const std::size_t N = d.N;

  SimState st;
  st.mesh = std::move(mesh);
  st.psi_V.resize(N);
  st.n_cm3.resize(N);
  st.p_cm3.resize(N);

  // charge-neutral initial guess per node
  for (std::size_t i = 0; i < N; ++i) {
    const double dop = d.w[i] > 0 ? (d.w_minus[i] * d.dop_minus[i] + d.w_plus[i] * d.dop_plus[i]) / d.w[i]
                                  : 0.0;
    const double majority = 0.5 * (std::abs(dop) + std::sqrt(dop * dop + 4.0 * d.ni2[i]));
    const double n0 = dop >= 0 ? majority : d.ni2[i] / majority;
    st.psi_V[i] = d.vt * (std::log(n0) - d.a_n[i]);
  }
  st.psi_V[0] = d.psi_eq_back;
  st.psi_V[N - 1] = d.psi_eq_front;

  PoissonResult res = newton_poisson(d, st.psi_V, st.n_cm3, st.p_cm3, /*equilibrium=*/true, cfg);
  st.iterations = res.iterations;
  st.residual = res.last_update_V / d.vt;
  st.converged = res.converged;
  if (!st.converged)
    throw SolverError("equilibrium Newton did not converge in " + std::to_string(res.iterations) +
                          " iterations",
                      0.0, res.update_history_V);

  st.n_cm3[0] = d.n_back;
  st.p_cm3[0] = d.p_back;
  st.n_cm3[N - 1] = d.n_front;
  st.p_cm3[N - 1] = d.p_front;
  st.J_mA_cm2 = terminal_current_mA(d, st);
  derive_fermi_levels(d, st);
  return st;
}

SimState solve_bias(const DeviceStack& stack, const SimState& prev, double bias_V,
                    const GenerationProfile* generation, const SolverConfig& cfg) {
  if (!prev.converged) throw ValidationError("solve_bias: previous state not converged");
  const Device1D d = build_device(stack, *prev.mesh);
  return run_gummel(d, prev, bias_V, generation, cfg);
}

std::vector<SimState> continuation_sweep(const DeviceStack& stack, std::shared_ptr<const Mesh> mesh,
                                         const std::vector<double>& v_targets,
                                         const GenerationProfile* generation,
                                         const SolverConfig& cfg) {
  const Device1D d = build_device(stack, *mesh);
  std::vector<SimState> out;
  out.reserve(v_targets.size());

  SimState cur = solve_equilibrium(stack, mesh, cfg);
  double v_cur = 0.0;
  bool refined = false;  // cur has been through run_gummel with this generation term

  for (double v_target : v_targets) {
    // subdivide into continuation steps no larger than cfg.voltage_step_V
    while (true) {
      const double dv = v_target - v_cur;
      const bool final_step = std::abs(dv) <= cfg.voltage_step_V * (1.0 + 1e-9);
      const double v_next =
          final_step ? v_target : v_cur + std::copysign(cfg.voltage_step_V, dv);
      if (std::abs(dv) > 0 || !refined) {
        cur = run_gummel(d, cur, v_next, generation, cfg);
        refined = true;
        v_cur = v_next;
      }
      if (final_step) break;
    }
    out.push_back(cur);
  }
  return out;
}

std::vector<double> edge_current_mA_cm2(const DeviceStack& stack, const SimState& state) {
  const Device1D d = build_device(stack, *state.mesh);
  std::vector<double> out(d.N - 1);
  for (std::size_t e = 0; e + 1 < d.N; ++e) {
    out[e] = (electron_edge_current(d, state.psi_V, state.n_cm3, e) +
              hole_edge_current(d, state.psi_V, state.p_cm3, e)) *
             1e3;
  }
  return out;
}

std::vector<double> poisson_residual(const DeviceStack& stack, const SimState& state) {
  const Device1D d = build_device(stack, *state.mesh);
  std::vector<double> out(d.N, 0.0);
  for (std::size_t i = 1; i + 1 < d.N; ++i) {
    out[i] = d.eps_h[i] * (state.psi_V[i + 1] - state.psi_V[i]) -
             d.eps_h[i - 1] * (state.psi_V[i] - state.psi_V[i - 1]) +
             kQOverEps0 * charge_integral(d, i, state.n_cm3[i], state.p_cm3[i]);
  }
  return out;
}

}  // namespace sol1d
