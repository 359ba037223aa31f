#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "bvpb/solver.hpp"

namespace bvpb {

// Convex entropy kernel Psi(s) = s - ln s - 1.
inline double entropy_kernel(double s) { return s - std::log(s) - 1.0; }

// Relative entropy pair around a reference state:
//   eta = rho theta_b Psi(rho_b/rho) + 3/2 rho theta_b Psi(theta/theta_b)
//         + 3/4 rho |u - u_b|^2,
//   q = u1 eta + (u1 - u1_b)(rho theta - rho_b theta_b).
struct EntropyPoint {
  double eta = 0.0;
  double q = 0.0;
};
EntropyPoint entropy_pair(const FluidState& state, const FluidState& reference);

// --- micro parts ------------------------------------------------------------

struct MicroPartsCell {
  std::vector<double> G;       // F1 - Mhat (Mhat = discrete Maxwellian of F1)
  std::vector<double> Gtilde;  // G minus the background micro reference
  std::vector<double> PcF2;    // F2 - (n2/rho) Mhat
  double n2 = 0.0;
};

// Closed-form BGK Chapman-Enskog micro part
//   -(1/nu) [ (theta_x/theta) A1hat + (3 u1_x/(2 theta)) B11hat ]
// at an analytic Maxwellian of `state`; equals L_M^{-1}[P1(v1 M_x)] for a
// background with gradients only in (u1, theta).
void ce_micro_closed(const FluidState& state, double u1_x, double theta_x,
                     const CollisionModel& model, const VelocityGrid& grid,
                     std::span<double> out);

// Background micro reference subtracted from G to form Gtilde: the shifted
// shock-profile Chapman-Enskog parts (two-shock runs) or the smooth-wave
// correction Gbar (rarefaction runs); zero for constant backgrounds.
void micro_reference_cell(const WaveAnsatz& ansatz, int cell, double x, double t,
                          const CollisionModel& model, const VelocityGrid& grid,
                          std::span<double> out);

// Mhat must be the discrete Maxwellian of f1's moments (so G is exactly
// microscopic on the grid); rho its density.
MicroPartsCell micro_parts_cell(std::span<const double> f1, std::span<const double> f2,
                                std::span<const double> micro_ref,
                                std::span<const double> mhat, double rho,
                                const VelocityGrid& grid);

// Gamma = L_M^{-1}[G_t + P1(v1 G_x) + P1(Pi_x d_{v1} F2)]; G_t is a backward
// difference of stored snapshots (the 2Q(G,G) term vanishes identically in
// the BGK surrogate).
std::vector<double> gamma_cell(std::span<const double> g_now, std::span<const double> g_prev,
                               double dt, std::span<const double> g_left,
                               std::span<const double> g_right, double dx,
                               std::span<const double> f2, double pi_x, const ChiBasis& basis,
                               const CollisionModel& model, const VelocityGrid& grid);

// Chapman-Enskog leading-term prediction L_M^{-1}[P1(v1 M_x)] with M_x a
// central difference of the neighbor Maxwellian fields.
std::vector<double> chapman_enskog_prediction_cell(std::span<const double> m_left,
                                                   std::span<const double> m_right, double dx,
                                                   const ChiBasis& basis,
                                                   const CollisionModel& model,
                                                   const VelocityGrid& grid);

// d/dv1 by central differences (one-sided at the v1 box edges).
std::vector<double> dv1(std::span<const double> f, const VelocityGrid& grid);

// --- perturbation variables -------------------------------------------------

// Conserved-variable perturbation and anti-derivatives (two-shock analysis):
// (phi, psi, omega) = (rho, m, E + Pi_x^2/4) - (rho~, m~, E~), with
// (Phi, Psi, W) their symmetric-gauge anti-derivatives and the tilde
// variables Psi = rho~ PsiT + u~ Phi, W = rho~ WT + rho~ u~.PsiT
// + (theta~ + |u~|^2/2) Phi.
struct PerturbationFields {
  std::vector<double> phi, psi1, psi2, psi3, omega;
  std::vector<double> Phi, Psi1, Psi2, Psi3, W;
  std::vector<double> PsiT1, WT;    // tilde variables
  std::vector<double> psiT1, omegaT;  // their x-derivatives
  std::array<double, 3> total_mass{};  // discrete integrals of (phi, psi1, omega)
  bool zero_mass_ok = true;

  double sup_norm() const;
};

PerturbationFields perturbation_conserved(const SimulationState& state, const WaveAnsatz& ansatz,
                                          const SpaceGrid& grid, double zero_mass_tol = 1e-8);

// Primitive perturbation (rarefaction analysis): (rho-rho_b, u-u_b, theta-theta_b).
struct PrimitivePerturbation {
  std::vector<double> phi, psi1, psi2, psi3, omega;
  double sup_norm() const;
  double l2_norm(double dx) const;
  double h1_norm(double dx) const;  // adds central-difference first derivatives
};
PrimitivePerturbation perturbation_primitive(const SimulationState& state,
                                             const WaveAnsatz& ansatz);

// --- characteristic variables and weights ------------------------------------

struct CharacteristicVars {
  std::vector<double> Z1, Z2, Z3;
  std::vector<double> alpha, beta;  // Goodman weights rho^{S1}/rho#, rho^{S3}/rho#
  std::vector<double> h, eta1, eta2;
  double N = 1.0;  // 1/sqrt(delta0)
  double roundtrip_error = 0.0;  // max |R Z - V|
  // Weighted norms reported to the CSV: ||b^{-N/2} Z1||, ||a^{N/2} b^{-N/2} Z2||,
  // ||a^{N/2} Z3|| (the combined weight each component carries in the two
  // characteristic energy estimates).
  double z1_weighted = 0.0, z2_weighted = 0.0, z3_weighted = 0.0;
};

CharacteristicVars characteristic_vars(const PerturbationFields& pf, const WaveAnsatz& ansatz,
                                       const SpaceGrid& grid, double t);

// --- energy functionals -------------------------------------------------------

struct EnergyBlocks {
  double macro = 0.0;   // H^2 of (Phi,Psi,W) (two-shock) or H^1 of (phi,psi,omega)
  double field = 0.0;   // ||(Pi_x, n2, n2x)||^2
  double micro0 = 0.0;  // |beta|=0 weighted micro block
  double micro_v = 0.0;     // 1 <= |beta| <= 2
  double micro_xt = 0.0;    // |alpha|=1, |beta| <= 1
  double second_order = 0.0;  // |alpha|=2 of (F1~, F2)
  bool heavy_blocks_available = false;
  bool accuracy_flag = false;  // second v-derivative stencil sensitivity

  double total() const { return macro + field + micro0 + micro_v + micro_xt + second_order; }
};

// --- decay fits ---------------------------------------------------------------

enum class DecayFlag { ok, no_signal, nonmonotone };

struct DecayFit {
  double rate = 0.0;       // ln-linear slope magnitude (positive = decaying)
  double intercept = 0.0;
  double rmse = 0.0;
  int transient_index = 0;
  bool monotone_after_transient = false;
  DecayFlag flag = DecayFlag::ok;
};

// Log-linear fit of the post-peak tail; nonpositive samples are skipped.
DecayFit fit_decay(std::span<const double> times, std::span<const double> values);

// --- conservation audit ---------------------------------------------------------

struct AuditReport {
  double mass_drift = 0.0;
  double mom1_drift = 0.0;
  double energy_drift = 0.0;
  double n2_drift = 0.0;  // absolute (the seed may be exactly neutral)
};

AuditReport conservation_audit(const ConservationTotals& first, const ConservationTotals& last,
                               const BoundaryFluxTotals& outflow);

// --- per-snapshot record and engine ----------------------------------------------

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0, mom1 = 0.0, energy_total = 0.0;
  double n2_l2 = 0.0, n2_linf = 0.0, pix_l2 = 0.0, pix_linf = 0.0;
  double pert_linf = 0.0;
  double e_t = 0.0;  // running sup of the (light) energy functional
  double eta_total = 0.0;
  double z1_w = 0.0, z2_w = 0.0, z3_w = 0.0;
  long step = 0;
  double dt = 0.0;
  double n2_total = 0.0;
  double mass_drift = 0.0, mom1_drift = 0.0, energy_drift = 0.0, n2_drift = 0.0;
  double micro_l2 = 0.0;
  double clipped_v1_flux = 0.0;

  static std::string csv_header();
  std::string csv_row() const;
};



// Snapshot-cadence diagnostics: rebuilds the moving ansatz, computes norms,
// perturbations, weights and the light energy functional, and accumulates
// the running sup.
class DiagnosticsEngine {
 public:
  DiagnosticsEngine(const KineticSolver* solver, WaveKind kind, WaveAnsatz initial_ansatz,
                    GlobalReference ref);

  DiagnosticsRecord record(const SimulationState& state);
  WaveAnsatz ansatz_at(double t) const;
  const GlobalReference& reference() const { return ref_; }
  const std::vector<DiagnosticsRecord>& history() const { return rows_; }

 private:
  const KineticSolver* solver_;
  WaveKind kind_;
  WaveAnsatz ansatz0_;
  GlobalReference ref_;
  std::vector<double> inv_mstar_;
  std::optional<ConservationTotals> first_totals_;
  double e_sup_ = 0.0;
  std::vector<DiagnosticsRecord> rows_;
};

// Dissipativity constant via Rayleigh quotients over random microscopic g:
// returns min over samples of -<g, Op g>_{M*} / <nu P g, P g>_{M*}.
double measure_sigma_tilde(const ChiBasis& basis, std::span<const double> inv_mstar,
                           const CollisionModel& model, const VelocityGrid& grid, bool use_L_M,
                           int samples, unsigned seed);

}  // namespace bvpb
