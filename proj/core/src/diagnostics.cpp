#include "bvpb/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

namespace bvpb {

EntropyPoint entropy_pair(const FluidState& s, const FluidState& b) {
  s.require_valid("entropy_pair");
  b.require_valid("entropy_pair");
  const double du2 = (s.u[0] - b.u[0]) * (s.u[0] - b.u[0]) +
                     (s.u[1] - b.u[1]) * (s.u[1] - b.u[1]) +
                     (s.u[2] - b.u[2]) * (s.u[2] - b.u[2]);
  EntropyPoint p;
  p.eta = s.rho * b.theta * entropy_kernel(b.rho / s.rho) +
          1.5 * s.rho * b.theta * entropy_kernel(s.theta / b.theta) + 0.75 * s.rho * du2;
  p.q = s.u[0] * p.eta + (s.u[0] - b.u[0]) * (s.rho * s.theta - b.rho * b.theta);
  return p;
}

void ce_micro_closed(const FluidState& st, double u1_x, double theta_x,
                     const CollisionModel& model, const VelocityGrid& grid,
                     std::span<double> out) {
  const double nu = model.nu(st.rho);
  const double rt = kGasConstant * st.theta;
  const MaxwellianFactors mf = maxwellian_factors(st, grid);
  const int n1 = grid.axis(0).count, n2 = grid.axis(1).count, n3 = grid.axis(2).count;
  const double ct = theta_x / st.theta;
  const double cu = 3.0 * u1_x / (2.0 * st.theta);
  std::size_t n = 0;
  for (int i = 0; i < n1; ++i) {
    const double c1 = grid.v1(i) - st.u[0];
    const double f1 = mf.prefac * mf.axis[0][i];
    for (int j = 0; j < n2; ++j) {
      const double c2 = grid.v2(j) - st.u[1];
      const double f12 = f1 * mf.axis[1][j];
      for (int k = 0; k < n3; ++k, ++n) {
        const double c3 = grid.v3(k) - st.u[2];
        const double m = f12 * mf.axis[2][k];
        const double csq = c1 * c1 + c2 * c2 + c3 * c3;
        const double a1 = c1 * (csq / (2.0 * rt) - 2.5) * m;
        const double b11 = (c1 * c1 - csq / 3.0) * m;
        out[n] = -(ct * a1 + cu * b11) / nu;
      }
    }
  }
}

void micro_reference_cell(const WaveAnsatz& ansatz, int cell, double x, double t,
                          const CollisionModel& model, const VelocityGrid& grid,
                          std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  if (ansatz.kind == WaveKind::two_shock && ansatz.two_shock) {
    const TwoShockMeta& m = *ansatz.two_shock;
    std::vector<double> tmp(out.size());
    for (const auto* pr : {m.prof1.get(), m.prof3.get()}) {
      const ShockData& sd = pr->shock();
      const WaveSample ws = pr->eval(x - sd.speed * t + sd.shift);
      const FluidState st{ws.rho, {ws.u1, 0.0, 0.0}, ws.theta};
      ce_micro_closed(st, ws.u1_x, ws.theta_x, model, grid, tmp);
      for (std::size_t n = 0; n < out.size(); ++n) out[n] += tmp[n];
    }
  } else if (ansatz.kind == WaveKind::rarefaction && ansatz.rarefaction) {
    const WaveSample ws = rarefaction_sample(*ansatz.rarefaction, x, t);
    const FluidState st{ws.rho, {ws.u1, 0.0, 0.0}, ws.theta};
    ce_micro_closed(st, ws.u1_x, ws.theta_x, model, grid, out);
  }
  (void)cell;
}

MicroPartsCell micro_parts_cell(std::span<const double> f1, std::span<const double> f2,
                                std::span<const double> micro_ref,
                                std::span<const double> mhat, double rho,
                                const VelocityGrid& grid) {
  MicroPartsCell mp;
  const std::size_t nn = grid.node_count();
  mp.G.resize(nn);
  mp.Gtilde.resize(nn);
  mp.PcF2.resize(nn);
  mp.n2 = integrate_velocity(f2, grid);
  const double c = mp.n2 / rho;
  for (std::size_t n = 0; n < nn; ++n) {
    mp.G[n] = f1[n] - mhat[n];
    mp.Gtilde[n] = mp.G[n] - (micro_ref.empty() ? 0.0 : micro_ref[n]);
    mp.PcF2[n] = f2[n] - c * mhat[n];
  }
  return mp;
}

std::vector<double> dv1(std::span<const double> f, const VelocityGrid& grid) {
  const int n1 = grid.axis(0).count, n2 = grid.axis(1).count, n3 = grid.axis(2).count;
  const double dv = grid.axis(0).dv;
  const std::size_t plane = std::size_t(n2) * n3;
  std::vector<double> out(f.size());
  for (int i = 0; i < n1; ++i) {
    const double* fm = f.data() + std::size_t(std::max(i - 1, 0)) * plane;
    const double* fp = f.data() + std::size_t(std::min(i + 1, n1 - 1)) * plane;
    const double scale = (i == 0 || i == n1 - 1) ? 1.0 / dv : 0.5 / dv;
    double* o = out.data() + std::size_t(i) * plane;
    for (std::size_t p = 0; p < plane; ++p) o[p] = (fp[p] - fm[p]) * scale;
  }
  return out;
}

std::vector<double> gamma_cell(std::span<const double> g_now, std::span<const double> g_prev,
                               double dt, std::span<const double> g_left,
                               std::span<const double> g_right, double dx,
                               std::span<const double> f2, double pi_x, const ChiBasis& basis,
                               const CollisionModel& model, const VelocityGrid& grid) {
  const std::size_t nn = grid.node_count();
  std::vector<double> bracket(nn);
  const std::vector<double> df2 = dv1(f2, grid);
  const int n1 = grid.axis(0).count, n2 = grid.axis(1).count, n3 = grid.axis(2).count;
  std::size_t n = 0;
  for (int i = 0; i < n1; ++i) {
    const double v1 = grid.v1(i);
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k, ++n) {
        bracket[n] = (g_now[n] - g_prev[n]) / dt +
                     v1 * (g_right[n] - g_left[n]) / (2.0 * dx) + pi_x * df2[n];
      }
  }
  std::vector<double> micro(nn), out(nn);
  basis.project_P1(bracket, micro, grid);
  invert_L_M(micro, basis, model, grid, out);
  return out;
}

std::vector<double> chapman_enskog_prediction_cell(std::span<const double> m_left,
                                                   std::span<const double> m_right, double dx,
                                                   const ChiBasis& basis,
                                                   const CollisionModel& model,
                                                   const VelocityGrid& grid) {
  const std::size_t nn = grid.node_count();
  std::vector<double> w(nn);
  const int n1 = grid.axis(0).count, n2 = grid.axis(1).count, n3 = grid.axis(2).count;
  std::size_t n = 0;
  for (int i = 0; i < n1; ++i) {
    const double v1 = grid.v1(i);
    for (int j = 0; j < n2; ++j)
      for (int k = 0; k < n3; ++k, ++n) w[n] = v1 * (m_right[n] - m_left[n]) / (2.0 * dx);
  }
  std::vector<double> micro(nn), out(nn);
  basis.project_P1(w, micro, grid);
  invert_L_M(micro, basis, model, grid, out);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> central_diff(std::span<const double> f, double dx) {
  const int n = int(f.size());
  std::vector<double> out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const int m = std::max(i - 1, 0), p = std::min(i + 1, n - 1);
    out[i] = (f[p] - f[m]) / ((p - m) * dx);
  }
  return out;
}

double l2_sq(std::span<const double> f, double dx) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return s * dx;
}

double sup_abs(std::span<const double> f) {
  double s = 0.0;
  for (double v : f) s = std::max(s, std::abs(v));
  return s;
}

}  // namespace

double PerturbationFields::sup_norm() const {
  return std::max({sup_abs(phi), sup_abs(psi1), sup_abs(psi2), sup_abs(psi3), sup_abs(omega)});
}

PerturbationFields perturbation_conserved(const SimulationState& state, const WaveAnsatz& ansatz,
                                          const SpaceGrid& grid, double zero_mass_tol) {
  const int n = grid.cells;
  PerturbationFields pf;
  pf.phi.resize(n);
  pf.psi1.resize(n);
  pf.psi2.resize(n);
  pf.psi3.resize(n);
  pf.omega.resize(n);
  for (int i = 0; i < n; ++i) {
    const FluidState& st = state.cell_states[i];
    const double pix = state.efield.pi_x[i];
    pf.phi[i] = st.rho - ansatz.rho[i];
    pf.psi1[i] = st.momentum1() - ansatz.m1[i];
    pf.psi2[i] = st.rho * st.u[1];
    pf.psi3[i] = st.rho * st.u[2];
    pf.omega[i] = st.total_energy() + 0.25 * pix * pix - ansatz.E[i];
  }
  pf.total_mass = {std::accumulate(pf.phi.begin(), pf.phi.end(), 0.0) * grid.dx,
                   std::accumulate(pf.psi1.begin(), pf.psi1.end(), 0.0) * grid.dx,
                   std::accumulate(pf.omega.begin(), pf.omega.end(), 0.0) * grid.dx};
  pf.zero_mass_ok = std::abs(pf.total_mass[0]) <= zero_mass_tol &&
                    std::abs(pf.total_mass[1]) <= zero_mass_tol &&
                    std::abs(pf.total_mass[2]) <= zero_mass_tol;

  pf.Phi = symmetric_antiderivative(pf.phi, grid);
  pf.Psi1 = symmetric_antiderivative(pf.psi1, grid);
  pf.Psi2 = symmetric_antiderivative(pf.psi2, grid);
  pf.Psi3 = symmetric_antiderivative(pf.psi3, grid);
  pf.W = symmetric_antiderivative(pf.omega, grid);

  pf.PsiT1.resize(n);
  pf.WT.resize(n);
  for (int i = 0; i < n; ++i) {
    const double rho_b = ansatz.rho[i], u_b = ansatz.u1[i], th_b = ansatz.theta[i];
    pf.PsiT1[i] = (pf.Psi1[i] - u_b * pf.Phi[i]) / rho_b;
    pf.WT[i] =
        (pf.W[i] - rho_b * u_b * pf.PsiT1[i] - (th_b + 0.5 * u_b * u_b) * pf.Phi[i]) / rho_b;
  }
  pf.psiT1 = central_diff(pf.PsiT1, grid.dx);
  pf.omegaT = central_diff(pf.WT, grid.dx);
  return pf;
}

double PrimitivePerturbation::sup_norm() const {
  return std::max({sup_abs(phi), sup_abs(psi1), sup_abs(psi2), sup_abs(psi3), sup_abs(omega)});
}

double PrimitivePerturbation::l2_norm(double dx) const {
  return std::sqrt(l2_sq(phi, dx) + l2_sq(psi1, dx) + l2_sq(psi2, dx) + l2_sq(psi3, dx) +
                   l2_sq(omega, dx));
}

double PrimitivePerturbation::h1_norm(double dx) const {
  double s = l2_sq(phi, dx) + l2_sq(psi1, dx) + l2_sq(psi2, dx) + l2_sq(psi3, dx) +
             l2_sq(omega, dx);
  for (const auto* f : {&phi, &psi1, &psi2, &psi3, &omega}) {
    const auto d = central_diff(*f, dx);
    s += l2_sq(d, dx);
  }
  return std::sqrt(s);
}

PrimitivePerturbation perturbation_primitive(const SimulationState& state,
                                             const WaveAnsatz& ansatz) {
  const int n = int(ansatz.rho.size());
  PrimitivePerturbation p;
  p.phi.resize(n);
  p.psi1.resize(n);
  p.psi2.resize(n);
  p.psi3.resize(n);
  p.omega.resize(n);
  for (int i = 0; i < n; ++i) {
    const FluidState& st = state.cell_states[i];
    p.phi[i] = st.rho - ansatz.rho[i];
    p.psi1[i] = st.u[0] - ansatz.u1[i];
    p.psi2[i] = st.u[1];
    p.psi3[i] = st.u[2];
    p.omega[i] = st.theta - ansatz.theta[i];
  }
  return p;
}

CharacteristicVars characteristic_vars(const PerturbationFields& pf, const WaveAnsatz& ansatz,
                                       const SpaceGrid& grid, double t) {
  if (ansatz.kind != WaveKind::two_shock || !ansatz.two_shock)
    throw ConfigError("characteristic_vars: two-shock ansatz required");
  const TwoShockMeta& meta = *ansatz.two_shock;
  const int n = grid.cells;
  CharacteristicVars cv;
  cv.Z1.resize(n);
  cv.Z2.resize(n);
  cv.Z3.resize(n);
  cv.alpha.resize(n);
  cv.beta.resize(n);
  cv.h.resize(n);
  cv.eta1.resize(n);
  cv.eta2.resize(n);
  const double delta0 =
      meta.s1.strength + meta.s3.strength + std::abs(meta.diffusion.alpha2);
  cv.N = delta0 > 0.0 ? 1.0 / std::sqrt(delta0) : 1.0;

  const double rho_sharp = meta.sharp.rho;
  const double a = meta.diffusion.a, us = meta.sharp.u[0];
  double eta2_edge = 0.0;
  double sum1 = 0.0, sum2 = 0.0, sum3 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = grid.center(i);
    const auto es = eigen_system(ansatz.state(i));
    const std::array<double, 3> V = {pf.Phi[i], pf.PsiT1[i], pf.WT[i]};
    std::array<double, 3> Z{};
    for (int r = 0; r < 3; ++r)
      Z[r] = es.L[r][0] * V[0] + es.L[r][1] * V[1] + es.L[r][2] * V[2];
    cv.Z1[i] = Z[0];
    cv.Z2[i] = Z[1];
    cv.Z3[i] = Z[2];
    for (int r = 0; r < 3; ++r) {
      const double vr = es.R[r][0] * Z[0] + es.R[r][1] * Z[1] + es.R[r][2] * Z[2];
      cv.roundtrip_error = std::max(cv.roundtrip_error, std::abs(vr - V[r]));
    }
    cv.alpha[i] =
        meta.prof1->eval(x - meta.s1.speed * t + meta.s1.shift).rho / rho_sharp;
    cv.beta[i] = meta.prof3->eval(x - meta.s3.speed * t + meta.s3.shift).rho / rho_sharp;
    const double z = x - us * t;
    cv.h[i] = 1.0 / std::sqrt(16.0 * M_PI * a * (1.0 + t)) *
              std::exp(-z * z / (16.0 * a * (1.0 + t)));
    cv.eta2[i] = eta2_edge + 0.5 * cv.h[i] * grid.dx;
    eta2_edge += cv.h[i] * grid.dx;
    cv.eta1[i] = std::exp(cv.eta2[i]);

    const double aN = std::pow(cv.alpha[i], cv.N);
    const double bN = std::pow(cv.beta[i], -cv.N);
    sum1 += bN * Z[0] * Z[0];
    sum2 += aN * bN * Z[1] * Z[1];
    sum3 += aN * Z[2] * Z[2];
  }
  cv.z1_weighted = std::sqrt(sum1 * grid.dx);
  cv.z2_weighted = std::sqrt(sum2 * grid.dx);
  cv.z3_weighted = std::sqrt(sum3 * grid.dx);
  return cv;
}

DecayFit fit_decay(std::span<const double> times, std::span<const double> values) {
  DecayFit fit;
  if (times.size() != values.size() || times.size() < 3)
    throw NumericsError("fit_decay: need at least 3 samples");
  // Transient = running peak.
  std::size_t peak = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[peak]) peak = i;
  fit.transient_index = int(peak);

  double vmax = 0.0, vmin = std::numeric_limits<double>::infinity();
  for (double v : values) {
    vmax = std::max(vmax, v);
    if (v > 0.0) vmin = std::min(vmin, v);
  }
  if (!(vmax > 0.0) || vmax < 1e-13 || vmax / vmin < 1.02) {
    fit.flag = DecayFlag::no_signal;
    return fit;
  }

  // ln-linear least squares over the post-peak tail, skipping nonpositive
  // samples.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = peak; i < values.size(); ++i) {
    if (values[i] <= 0.0) continue;
    const double x = times[i], y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 3) {
    fit.flag = DecayFlag::no_signal;
    return fit;
  }
  const double det = m * sxx - sx * sx;
  if (std::abs(det) < 1e-300) {
    fit.flag = DecayFlag::no_signal;
    return fit;
  }
  const double slope = (m * sxy - sx * sy) / det;
  fit.rate = -slope;
  fit.intercept = (sy - slope * sx) / m;
  double sse = 0.0;
  int mono_violations = 0;
  double prev = -1.0;
  for (std::size_t i = peak; i < values.size(); ++i) {
    if (values[i] <= 0.0) continue;
    const double pred = fit.intercept + slope * times[i];
    const double r = std::log(values[i]) - pred;
    sse += r * r;
    if (prev >= 0.0 && values[i] > prev * 1.0000001) ++mono_violations;
    prev = values[i];
  }
  fit.rmse = std::sqrt(sse / m);
  fit.monotone_after_transient = mono_violations <= std::max(1, m / 10);
  if (!fit.monotone_after_transient && fit.rate <= 0.0) fit.flag = DecayFlag::nonmonotone;
  return fit;
}

AuditReport conservation_audit(const ConservationTotals& first, const ConservationTotals& last,
                               const BoundaryFluxTotals& outflow) {
  AuditReport r;
  r.mass_drift = std::abs(last.mass - first.mass + outflow.mass) / std::abs(first.mass);
  const double mom_scale = std::max(std::abs(first.mom1), first.mass);
  r.mom1_drift =
      std::abs(last.mom1 - first.mom1 + outflow.mom1 - outflow.field_work) / mom_scale;
  r.energy_drift = std::abs(last.energy_total() - first.energy_total() + outflow.energy) /
                   std::abs(first.energy_total());
  r.n2_drift = std::abs(last.n2 - first.n2 + outflow.n2);
  return r;
}

std::string DiagnosticsRecord::csv_header() {
  return "t,mass,mom1,energy_total,n2_L2,n2_Linf,Pix_L2,Pix_Linf,pert_Linf,E_t,eta_total,"
         "Z1_w,Z2_w,Z3_w,step,dt,n2_total,mass_drift,mom1_drift,energy_drift,n2_drift,"
         "micro_L2,clipped_v1_flux";
}

std::string DiagnosticsRecord::csv_row() const {
  char buf[1024];
  std::snprintf(buf, sizeof buf,
                "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                "%.17g,%.17g,%ld,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g",
                t, mass, mom1, energy_total, n2_l2, n2_linf, pix_l2, pix_linf, pert_linf, e_t,
                eta_total, z1_w, z2_w, z3_w, step, dt, n2_total, mass_drift, mom1_drift,
                energy_drift, n2_drift, micro_l2, clipped_v1_flux);
  return buf;
}

DiagnosticsEngine::DiagnosticsEngine(const KineticSolver* solver, WaveKind kind,
                                     WaveAnsatz initial_ansatz, GlobalReference ref)
    : solver_(solver), kind_(kind), ansatz0_(std::move(initial_ansatz)), ref_(ref) {
  inv_mstar_ = ref_.inv_mstar(solver_->velocity());
}

WaveAnsatz DiagnosticsEngine::ansatz_at(double t) const {
  switch (kind_) {
    case WaveKind::two_shock:
      return composite_ansatz(*ansatz0_.two_shock, solver_->space(), t);
    case WaveKind::rarefaction:
      return rarefaction_ansatz(ansatz0_.rarefaction->left, ansatz0_.rarefaction->right,
                                solver_->space(), t);
    case WaveKind::constant:
    default:
      return ansatz0_;
  }
}

DiagnosticsRecord DiagnosticsEngine::record(const SimulationState& state) {
  const SpaceGrid& grid = solver_->space();
  const VelocityGrid& vel = solver_->velocity();
  DiagnosticsRecord rec;
  rec.t = state.time();
  rec.step = state.step;
  rec.dt = state.dt_last;
  rec.clipped_v1_flux = state.clipped_v1_flux;

  const ConservationTotals tot = solver_->totals(state);
  if (!first_totals_) first_totals_ = tot;
  rec.mass = tot.mass;
  rec.mom1 = tot.mom1;
  rec.energy_total = tot.energy_total();
  rec.n2_total = tot.n2;
  const AuditReport audit = conservation_audit(*first_totals_, tot, state.outflow);
  rec.mass_drift = audit.mass_drift;
  rec.mom1_drift = audit.mom1_drift;
  rec.energy_drift = audit.energy_drift;
  rec.n2_drift = audit.n2_drift;

  rec.n2_l2 = std::sqrt(l2_sq(state.n2, grid.dx));
  rec.n2_linf = sup_abs(state.n2);
  rec.pix_l2 = std::sqrt(l2_sq(state.efield.pi_x, grid.dx));
  rec.pix_linf = state.efield.max_abs();

  const WaveAnsatz ansatz = ansatz_at(rec.t);
  const PrimitivePerturbation prim = perturbation_primitive(state, ansatz);
  rec.pert_linf = prim.sup_norm();

  double eta_total = 0.0;
  for (int i = 0; i < grid.cells; ++i)
    eta_total += entropy_pair(state.cell_states[i], ansatz.state(i)).eta;
  rec.eta_total = eta_total * grid.dx;

  // |beta| = 0 micro block against the global reference weight.
  double micro0 = 0.0;
  {
    std::vector<double> ref_micro(vel.node_count());
    const auto& w = vel.flat_weights();
    for (int i = 0; i < grid.cells; ++i) {
      const auto f1 = state.field.f1.cell_span(i);
      const auto f2 = state.field.f2.cell_span(i);
      const RawMoments rm = raw_moments(f1, vel);
      const DiscreteMaxwellian dm = DiscreteMaxwellian::match(rm, vel);
      std::vector<double> mhat(vel.node_count());
      dm.eval_into(mhat, vel);
      micro_reference_cell(ansatz, i, grid.center(i), rec.t, solver_->model(), vel, ref_micro);
      const double c2 = state.n2[i] / rm.rho;
      double acc = 0.0;
      for (std::size_t n = 0; n < mhat.size(); ++n) {
        const double gt = f1[n] - mhat[n] - ref_micro[n];
        const double pc = f2[n] - c2 * mhat[n];
        acc += (gt * gt + pc * pc) * inv_mstar_[n] * w[n];
      }
      micro0 += acc;
    }
    micro0 *= grid.dx;
  }
  rec.micro_l2 = std::sqrt(micro0);

  double macro = 0.0;
  if (kind_ == WaveKind::two_shock) {
    const PerturbationFields pf = perturbation_conserved(state, ansatz, grid);
    const CharacteristicVars cv = characteristic_vars(pf, ansatz, grid, rec.t);
    rec.z1_w = cv.z1_weighted;
    rec.z2_w = cv.z2_weighted;
    rec.z3_w = cv.z3_weighted;
    // H^2 of (Phi, Psi, W): antiderivatives + their first two derivatives
    // (the first derivative is the perturbation itself).
    for (const auto* f : {&pf.Phi, &pf.Psi1, &pf.Psi2, &pf.Psi3, &pf.W}) macro += l2_sq(*f, grid.dx);
    for (const auto* f : {&pf.phi, &pf.psi1, &pf.psi2, &pf.psi3, &pf.omega}) {
      macro += l2_sq(*f, grid.dx);
      macro += l2_sq(central_diff(*f, grid.dx), grid.dx);
    }
  } else {
    const double h1 = prim.h1_norm(grid.dx);
    macro = h1 * h1;
  }
  const auto n2x = central_diff(state.n2, grid.dx);
  const double field_block =
      l2_sq(state.efield.pi_x, grid.dx) + l2_sq(state.n2, grid.dx) + l2_sq(n2x, grid.dx);

  e_sup_ = std::max(e_sup_, macro + field_block + micro0);
  rec.e_t = e_sup_;

  rows_.push_back(rec);
  return rec;
}

double measure_sigma_tilde(const ChiBasis& basis, std::span<const double> inv_mstar,
                           const CollisionModel& model, const VelocityGrid& grid, bool use_L_M,
                           int samples, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const std::size_t nn = grid.node_count();
  const auto& w = grid.flat_weights();
  const double nu = model.nu(basis.state().rho);
  double sigma = std::numeric_limits<double>::infinity();
  std::vector<double> raw(nn), g(nn), op(nn);
  for (int s = 0; s < samples; ++s) {
    // Smooth random micro input: low-degree polynomial times the local
    // Maxwellian, projected onto the microscopic subspace.
    const double a1 = uni(rng), a2 = uni(rng), a3 = uni(rng), a4 = uni(rng), a5 = uni(rng);
    const int n1 = grid.axis(0).count, n2 = grid.axis(1).count, n3 = grid.axis(2).count;
    std::size_t n = 0;
    for (int i = 0; i < n1; ++i)
      for (int j = 0; j < n2; ++j)
        for (int k = 0; k < n3; ++k, ++n) {
          const double v1 = grid.v1(i), v2 = grid.v2(j), v3 = grid.v3(k);
          raw[n] = (a1 * v1 + a2 * v2 * v3 + a3 * v1 * v1 * v3 + a4 * v2 + a5 * v1 * v2 * v2) *
                   basis.m_field()[n];
        }
    if (use_L_M) {
      basis.project_P1(raw, g, grid);
      apply_L_M(g, basis, model, grid, op);
    } else {
      basis.project_Pc(raw, g, grid);
      apply_N_M(g, basis, model, grid, op);
    }
    double num = 0.0, den = 0.0;
    for (std::size_t m = 0; m < nn; ++m) {
      num -= g[m] * op[m] * inv_mstar[m] * w[m];
      den += nu * g[m] * g[m] * inv_mstar[m] * w[m];
    }
    if (den > 0.0) sigma = std::min(sigma, num / den);
  }
  return sigma;
}

}  // namespace bvpb
