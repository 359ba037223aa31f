#include "bvpb/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "bvpb/checkpoint.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace bvpb {

namespace {

using nlohmann::json;

json fit_to_json(const DecayFit& f) {
  json j;
  j["rate"] = f.rate;
  j["intercept"] = f.intercept;
  j["rmse"] = f.rmse;
  j["transient_index"] = f.transient_index;
  j["monotone_after_transient"] = f.monotone_after_transient;
  j["flag"] = f.flag == DecayFlag::ok ? "ok"
              : f.flag == DecayFlag::no_signal ? "no_signal"
                                               : "nonmonotone";
  return j;
}

// "Decreasing after transient": the running peak is reached before 75% of
// the run and the final value sits below 95% of it.
bool decreasing_after_transient(std::span<const double> v, std::string* why) {
  if (v.size() < 4) {
    if (why) *why = "too few samples";
    return false;
  }
  std::size_t peak = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[peak]) peak = i;
  if (peak + 1 == v.size()) {
    if (why) *why = "still growing at the end of the run";
    return false;
  }
  if (double(peak) > 0.75 * double(v.size())) {
    if (why) *why = "transient peak too late in the run";
    return false;
  }
  if (!(v.back() <= 0.95 * v[peak])) {
    if (why) *why = "final value not below 95% of the transient peak";
    return false;
  }
  return true;
}

}  // namespace

std::string describe_experiment(const MaterializedExperiment& mx) {
  char buf[512];
  std::string out;
  auto add = [&](const char* fmt, auto... args) {
    std::snprintf(buf, sizeof buf, fmt, args...);
    out += buf;
  };
  add("preset: %s\n", to_string(mx.cfg.preset).c_str());
  add("space grid: %d cells on [%g, %g], dx = %g, %s\n", mx.space.cells, mx.space.x_lo,
      mx.space.x_hi, mx.space.dx, mx.space.periodic ? "periodic" : "far-field");
  add("velocity grid: %d^3 nodes, v1 in [%g, %g]\n", mx.velocity.axis(0).count,
      mx.velocity.axis(0).nodes.front(), mx.velocity.axis(0).nodes.back());
  add("collision: bgk, nu = nu0 rho with nu0 = %g\n", mx.model.nu0);
  for (std::size_t i = 0; i < mx.far_states.size(); ++i) {
    const auto& s = mx.far_states[i];
    const auto lam = euler_eigenvalues(s);
    add("state %zu: rho = %.12g, u1 = %.12g, theta = %.12g, lambda = (%.12g, %.12g, %.12g)\n",
        i, s.rho, s.u[0], s.theta, lam[0], lam[1], lam[2]);
  }
  if (mx.kind == WaveKind::two_shock) {
    const auto& m = *mx.ansatz0.two_shock;
    add("1-shock: speed %.12g, strength %.12g, Lax %s\n", m.s1.speed, m.s1.strength,
        m.s1.lax_strict() ? "strict" : "VIOLATED");
    add("3-shock: speed %.12g, strength %.12g, Lax %s\n", m.s3.speed, m.s3.strength,
        m.s3.lax_strict() ? "strict" : "VIOLATED");
    add("diffusion wave: a = %.12g carried at u1# = %.12g\n", m.diffusion.a,
        m.diffusion.u1_sharp);
  }
  if (mx.kind == WaveKind::rarefaction) {
    const auto& m = *mx.ansatz0.rarefaction;
    add("3-rarefaction: w- = %.12g, w+ = %.12g, Sigma3 = %.12g, S = %.12g\n",
        m.burgers.w_minus, m.burgers.w_plus, m.sigma1, m.entropy);
  }
  return out;
}

RunResult run_experiment(const MaterializedExperiment& mx, const std::string& out_dir,
                         int threads_override, int snapshot_override) {
  namespace fs = std::filesystem;
  RunResult rr;
  rr.out_dir = out_dir;
  fs::create_directories(out_dir);

  SolverConfig scfg = mx.cfg.solver;
  if (threads_override >= 0) scfg.threads = threads_override;
  if (snapshot_override >= 1) scfg.snapshot_every = snapshot_override;
#ifdef _OPENMP
  if (scfg.threads > 0) omp_set_num_threads(scfg.threads);
#endif

  {
    std::ofstream echo(out_dir + "/config_echo.ini");
    echo << mx.cfg.emit();
    if (!mx.cfg.defaults_applied.empty()) {
      echo << "\n# defaults applied:\n";
      for (const auto& d : mx.cfg.defaults_applied) echo << "#   " << d << "\n";
    }
  }

  json summary;
  summary["preset"] = to_string(mx.cfg.preset);
  std::ofstream csv(out_dir + "/diagnostics.csv");
  csv << DiagnosticsRecord::csv_header() << "\n";

  try {
    const KineticSolver solver(mx.space, mx.velocity, mx.model, scfg);
    SimulationState state = solver.initialize(mx.ansatz0, mx.pert);

    // Two-shock runs: distribute the measured initial excess mass over
    // (r1, r2, r3), shift the shock profiles and inject the diffusion wave,
    // then verify the shifted ansatz carries zero excess mass.
    WaveAnsatz ansatz = mx.ansatz0;
    if (mx.kind == WaveKind::two_shock) {
      const PerturbationFields bare =
          perturbation_conserved(state, mx.ansatz0, mx.space, 1e300);
      TwoShockMeta meta = *mx.ansatz0.two_shock;
      rr.alphas = decompose_initial_mass(bare.total_mass, meta.s1, meta.s3, meta.sharp.u[0]);
      meta.s1.shift = rr.alphas[0];
      meta.diffusion.alpha2 = rr.alphas[1];
      meta.s3.shift = rr.alphas[2];
      ansatz = composite_ansatz(meta, mx.space, 0.0);
      const PerturbationFields shifted = perturbation_conserved(state, ansatz, mx.space);
      rr.zero_mass_residual =
          std::max({std::abs(shifted.total_mass[0]), std::abs(shifted.total_mass[1]),
                    std::abs(shifted.total_mass[2])});
      summary["alphas"] = {rr.alphas[0], rr.alphas[1], rr.alphas[2]};
      summary["zero_mass_residual"] = rr.zero_mass_residual;
    }

    // Reference Maxwellian band from the ansatz plus the perturbed data.
    std::vector<FluidState> band = mx.far_states;
    for (const auto& s : state.cell_states) band.push_back(s);
    const GlobalReference ref = select_global_reference(band);
    summary["reference"] = {
        {"rho", ref.star.rho}, {"u1", ref.star.u[0]}, {"theta", ref.star.theta}};

    DiagnosticsEngine engine(&solver, mx.kind, ansatz, ref);
    auto emit_row = [&](const DiagnosticsRecord& r) { csv << r.csv_row() << "\n"; };
    emit_row(engine.record(state));

    bool aborted = false;
    std::string abort_reason;
    try {
      while (state.time() < scfg.t_end - 1e-12 && state.step < scfg.max_steps) {
        solver.step(state, scfg.t_end - state.time());
        if (state.step % scfg.snapshot_every == 0 || state.time() >= scfg.t_end - 1e-12)
          emit_row(engine.record(state));
      }
    } catch (const std::exception& e) {
      aborted = true;
      abort_reason = e.what();
      summary["abort_reason"] = abort_reason;
    }

    write_checkpoint(out_dir + "/final_state.ckpt", state, mx.space, mx.velocity);
    rr.rows = engine.history();

    // Decay fits over the emitted series.
    std::vector<double> ts, n2s, pixs, perts, etas;
    for (const auto& r : rr.rows) {
      ts.push_back(r.t);
      n2s.push_back(r.n2_l2);
      pixs.push_back(r.pix_l2);
      perts.push_back(r.pert_linf);
      etas.push_back(r.eta_total);
    }
    if (rr.rows.size() >= 3) {
      rr.n2_fit = fit_decay(ts, n2s);
      rr.pix_fit = fit_decay(ts, pixs);
      rr.pert_fit = fit_decay(ts, perts);
      summary["n2_decay"] = fit_to_json(rr.n2_fit);
      summary["pix_decay"] = fit_to_json(rr.pix_fit);
      summary["pert_decay"] = fit_to_json(rr.pert_fit);
    }
    const auto& last = rr.rows.back();
    rr.final_audit = {last.mass_drift, last.mom1_drift, last.energy_drift, last.n2_drift};
    summary["drifts"] = {{"mass", last.mass_drift},
                         {"mom1", last.mom1_drift},
                         {"energy", last.energy_drift},
                         {"n2", last.n2_drift}};
    summary["clipped_v1_flux"] = last.clipped_v1_flux;
    summary["t_final"] = last.t;
    summary["steps"] = last.step;

    // Preset invariant suite.
    auto fail = [&](const std::string& msg) {
      rr.invariants_pass = false;
      rr.invariant_messages.push_back(msg);
    };
    if (aborted) fail("solver aborted: " + abort_reason);
    switch (mx.cfg.preset) {
      case PresetKind::equilibrium_sanity: {
        if (last.mass_drift > 1e-12) fail("mass drift above 1e-12");
        if (last.mom1_drift > 1e-12) fail("momentum drift above 1e-12");
        if (last.energy_drift > 1e-12) fail("energy drift above 1e-12");
        if (last.n2_drift > 1e-12) fail("n2 drift above 1e-12");
        if (last.pert_linf > 1e-12) fail("equilibrium drifted from the Maxwellian");
        break;
      }
      case PresetKind::neutrality_decay: {
        if (!(rr.n2_fit.rate > 0.0)) fail("n2 decay rate not positive");
        if (!(rr.pix_fit.rate > 0.0)) fail("Pi_x decay rate not positive");
        if (!(n2s.back() <= 0.1 * n2s.front())) fail("n2 final/initial above 0.1");
        if (!(pixs.back() <= 0.1 * pixs.front())) fail("Pi_x final/initial above 0.1");
        break;
      }
      case PresetKind::rarefaction_stability: {
        const double peak = *std::max_element(perts.begin(), perts.end());
        if (!(perts.back() <= peak / 3.0))
          fail("perturbation sup-norm at t_end above 1/3 of its running peak");
        std::string why;
        if (!decreasing_after_transient(etas, &why)) fail("eta integral: " + why);
        const double n2_ratio = rr.rows.back().n2_linf / rr.rows.front().n2_linf;
        const double pix_ratio = rr.rows.back().pix_linf / rr.rows.front().pix_linf;
        if (!(n2_ratio <= 0.1 && pix_ratio <= 0.1))
          fail("(Pi_x, n2) sup norms did not decay to 0.1 of initial");
        break;
      }
      case PresetKind::two_shock_stability: {
        if (!(rr.zero_mass_residual <= 1e-10))
          fail("shifted-ansatz zero-mass residual above 1e-10");
        std::string why;
        if (!decreasing_after_transient(perts, &why)) fail("perturbation norms: " + why);
        // Goodman weights at the final time.
        const WaveAnsatz wa = engine.ansatz_at(last.t);
        const PerturbationFields pf = perturbation_conserved(state, wa, mx.space, 1e300);
        const CharacteristicVars cv = characteristic_vars(pf, wa, mx.space, last.t);
        const auto& meta = *wa.two_shock;
        const double amin = *std::min_element(cv.alpha.begin(), cv.alpha.end());
        const double amax = *std::max_element(cv.alpha.begin(), cv.alpha.end());
        const double bmin = *std::min_element(cv.beta.begin(), cv.beta.end());
        const double bmax = *std::max_element(cv.beta.begin(), cv.beta.end());
        const double ca = meta.s1.strength / meta.sharp.rho;
        const double cb = meta.s3.strength / meta.sharp.rho;
        if (!(amax <= 1.0 + 1e-12 && amin >= 1.0 - ca - 1e-9))
          fail("alpha weight outside (1 - C delta, 1]");
        if (!(bmax <= 1.0 + 1e-12 && bmin >= 1.0 - cb - 1e-9))
          fail("beta weight outside (1 - C delta, 1]");
        const double e1min = *std::min_element(cv.eta1.begin(), cv.eta1.end());
        const double e1max = *std::max_element(cv.eta1.begin(), cv.eta1.end());
        if (!(e1min >= 1.0 - 1e-12 && e1max <= M_E + 1e-12)) fail("eta1 outside [1, e]");
        summary["weights"] = {{"alpha_min", amin}, {"alpha_max", amax}, {"beta_min", bmin},
                              {"beta_max", bmax},  {"eta1_min", e1min}, {"eta1_max", e1max}};
        break;
      }
    }
    if (aborted) rr.status = RunStatus::run_error;
    else if (!rr.invariants_pass) rr.status = RunStatus::invariant_failure;
  } catch (const ConfigError& e) {
    rr.status = RunStatus::config_error;
    rr.invariants_pass = false;
    summary["error"] = e.what();
  } catch (const std::exception& e) {
    rr.status = RunStatus::run_error;
    rr.invariants_pass = false;
    summary["error"] = e.what();
  }

  summary["status"] = rr.invariants_pass && rr.status == RunStatus::ok ? "pass" : "fail";
  summary["invariant_messages"] = rr.invariant_messages;
  rr.summary_json = out_dir + "/summary.json";
  std::ofstream js(rr.summary_json);
  js << summary.dump(2) << "\n";
  return rr;
}

}  // namespace bvpb
