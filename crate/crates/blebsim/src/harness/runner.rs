//! Study drivers: each runs one verification suite, writes CSV/JSON
//! artifacts into the output directory and returns a machine-readable
//! summary with per-check pass/fail.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;
use serde_json::json;

use crate::asymptotics::{
    concentration_integral, coupling_force_study, e_coefficients, gl_force_study, localized_blob,
    optimal_profile_ode_residual, radial_bump, rotational_bump, s1_check, willmore_force_study,
    CouplingStudyConfig, ExpansionSeries, SurfaceQuadrature,
};
use crate::energies::ModelParams;
use crate::fields::{BoundaryKind, Grid, ScalarField};
use crate::geometry::{
    build_phase_field, optimal_profile, Profile, ProfileGrid, Surface, Z_CONSTANT,
};
use crate::solver::{run as solver_run, PhaseState, StepConfig};
use crate::util::vec3;

use super::config::RunConfig;
use super::HarnessError;

/// One named check with its measured value and threshold.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl Check {
    pub fn leq(name: &str, measured: f64, threshold: f64) -> Self {
        Self { name: name.into(), measured, threshold, pass: measured <= threshold }
    }

    pub fn within(name: &str, measured: f64, target: f64, rel_tol: f64) -> Self {
        let rel = (measured - target).abs() / target.abs().max(1e-300);
        Self { name: name.into(), measured: rel, threshold: rel_tol, pass: rel <= rel_tol }
    }
}

/// Summary of one subcommand run.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub command: String,
    pub checks: Vec<Check>,
    pub pass: bool,
    pub provenance: serde_json::Value,
}

impl Summary {
    fn new(command: &str, checks: Vec<Check>, cfg: &RunConfig) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self { command: command.into(), checks, pass, provenance: cfg.provenance() }
    }

    pub fn write(&self, out_dir: &Path) -> Result<(), HarnessError> {
        fs::create_dir_all(out_dir)?;
        let f = File::create(out_dir.join("summary.json"))?;
        serde_json::to_writer_pretty(BufWriter::new(f), self)?;
        Ok(())
    }
}

fn write_csv(path: &Path, header: &str, rows: &[Vec<f64>]) -> Result<(), HarnessError> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

/// `profile-check`: the 1D transverse suite (sixth-order ODE residual, Z,
/// s₁ ansatz, e-coefficients at the acceptance curvature pairs).
pub fn profile_check(cfg: &RunConfig, out_dir: &Path) -> Result<Summary, HarnessError> {
    fs::create_dir_all(out_dir)?;
    let grid = ProfileGrid::default_grid();
    let mut checks = Vec::new();

    let g = optimal_profile_ode_residual(grid);
    checks.push(Check::leq("profile_ode_residual_sup", g.sup_norm(), 1e-5));

    let z = Profile::sample(grid, |z| optimal_profile(z).d1.powi(2)).integrate();
    checks.push(Check::within("z_constant", z, 2.0 * 2f64.sqrt() / 3.0, 1e-8));

    checks.push(Check::leq("s1_residual_sup", s1_check(grid).sup_norm(), 1e-5));

    for (h, k) in [(0.0, 0.0), (2.0, 1.0), (2.0 / 0.3, 1.0 / 0.09)] {
        let series = ExpansionSeries::with_curvatures(grid, h, k);
        let e = e_coefficients(&series);
        let tag = format!("H{h:.3}_K{k:.3}");
        checks.push(Check::leq(&format!("e_m3_sup_{tag}"), e.e_m3.sup_norm(), 1e-5));
        checks.push(Check::leq(&format!("e_m2_sup_{tag}"), e.e_m2.sup_norm(), 1e-5));
        checks.push(Check::leq(&format!("e_m1_sup_{tag}"), e.e_m1.sup_norm(), 1e-5));
    }

    // Profile exports as two-column CSV.
    let phi0 = Profile::sample(grid, |z| optimal_profile(z).value);
    let rows: Vec<Vec<f64>> = phi0.csv_rows().step_by(100).map(|(z, v)| vec![z, v]).collect();
    write_csv(&out_dir.join("phi0.csv"), "z,value", &rows)?;

    let summary = Summary::new("profile-check", checks, cfg);
    summary.write(out_dir)?;
    Ok(summary)
}

/// `geometry-check`: curvature identities (closed form vs finite
/// differences) on sphere and torus plus the tubular expansion order.
pub fn geometry_check(cfg: &RunConfig, out_dir: &Path) -> Result<Summary, HarnessError> {
    fs::create_dir_all(out_dir)?;
    let mut checks = Vec::new();
    let h = 1e-3;
    let cases = [
        ("sphere", Surface::sphere([0.0; 3], 1.0), [1.02, 0.1, 0.2]),
        ("torus", Surface::torus([0.0; 3], 2.0, 0.5), [2.52 * 0.4f64.cos(), 2.52 * 0.4f64.sin(), 0.03]),
    ];
    for (name, surface, x) in cases {
        let ids = surface.curvature_identities(x, h)?;
        let rel1 = (ids.normal_deriv_fd - ids.normal_deriv_closed).abs()
            / ids.normal_deriv_closed.abs().max(1e-300);
        let rel2 = (ids.hessian_normal_fd - ids.hessian_normal_closed).abs()
            / ids.hessian_normal_closed.abs().max(1e-300);
        checks.push(Check::leq(&format!("{name}_normal_deriv_rel"), rel1, 1e-4));
        checks.push(Check::leq(&format!("{name}_hessian_rel"), rel2, 1e-3));
    }

    // Tubular expansion |H̄ - (Σκ̂ + dΣκ̂²)| = O(d²) on the torus.
    let surface = Surface::torus([0.0; 3], 2.0, 0.5);
    let p = [2.5 * 0.7f64.cos(), 2.5 * 0.7f64.sin(), 0.0];
    let nu = surface.normal_at(p);
    let ks = surface.principal_curvatures(p);
    let mut rows = Vec::new();
    let mut ds = Vec::new();
    let mut errs = Vec::new();
    for d in [0.02, 0.01, 0.005, 0.0025] {
        let x = vec3::add(p, vec3::scale(nu, d));
        let ext = surface.extended_curvatures(x)?;
        let first = ks[0] + ks[1] + d * (ks[0] * ks[0] + ks[1] * ks[1]);
        let err = (ext.h_mean - first).abs();
        rows.push(vec![d, err]);
        ds.push(d);
        errs.push(err);
    }
    write_csv(&out_dir.join("tubular_expansion.csv"), "d,error", &rows)?;
    let slope = crate::util::fitted_order(&ds, &errs);
    checks.push(Check {
        name: "tubular_expansion_slope".into(),
        measured: slope,
        threshold: 0.1,
        pass: (slope - 2.0).abs() <= 0.1,
    });

    let summary = Summary::new("geometry-check", checks, cfg);
    summary.write(out_dir)?;
    Ok(summary)
}

/// `concentration`: the concentration-lemma ε study with `p = (φ₀')²` and a
/// smooth `f` on the configured surface.
pub fn concentration_study(cfg: &RunConfig, out_dir: &Path) -> Result<Summary, HarnessError> {
    fs::create_dir_all(out_dir)?;
    let surface = cfg
        .surface
        .as_ref()
        .map(|s| s.build())
        .transpose()?
        .unwrap_or_else(|| Surface::sphere([0.0; 3], 1.0));
    let p = |z: f64| optimal_profile(z).d1.powi(2);
    let f = |x: [f64; 3]| 1.0 + 0.5 * x[1] + 0.25 * x[0];
    let quad = SurfaceQuadrature::build(&surface, if surface.dim() == 2 { 512 } else { 64 });
    let sharp = Z_CONSTANT * quad.integrate(|n| f(n.pos));

    let mut rows = Vec::new();
    let mut rel_prev = f64::INFINITY;
    let mut monotone = true;
    let mut rel_last = f64::NAN;
    for &eps in &cfg.study.eps_seq {
        let h = eps / cfg.study.eps_over_h;
        let v = concentration_integral(&surface, eps, h, 12.0, p, f);
        let rel = (v - sharp).abs() / sharp.abs();
        monotone &= rel < rel_prev;
        rel_prev = rel;
        rel_last = rel;
        rows.push(vec![eps, v, sharp, rel]);
    }
    write_csv(&out_dir.join("concentration.csv"), "eps,measured,reference,rel_error", &rows)?;

    let checks = vec![
        Check { name: "rel_error_strictly_decreasing".into(), measured: f64::from(u8::from(monotone)), threshold: 1.0, pass: monotone },
        Check::leq("final_rel_error", rel_last, cfg.study.tolerance),
    ];
    let summary = Summary::new("concentration", checks, cfg);
    summary.write(out_dir)?;
    Ok(summary)
}

/// `force-limit`: ε-convergence of one diffuse force functional (or all
/// coupling families) toward its sharp reference.
pub fn force_limit(cfg: &RunConfig, out_dir: &Path) -> Result<Summary, HarnessError> {
    fs::create_dir_all(out_dir)?;
    let kind = cfg.study.kind.as_str();
    let mut checks = Vec::new();

    match kind {
        "gl" => {
            let surface = cfg
                .surface
                .as_ref()
                .map(|s| s.build())
                .transpose()?
                .unwrap_or_else(|| Surface::sphere([0.0; 3], 0.3));
            let r0 = surface.feature_radius().max(0.2);
            let psi = radial_bump(r0, 0.4 * r0);
            let study =
                gl_force_study(&surface, cfg.params.sigma_m, &cfg.study.eps_seq, cfg.study.eps_over_h, psi);
            let rows: Vec<Vec<f64>> = study
                .eps
                .iter()
                .zip(study.measured.iter().zip(&study.rel_errors))
                .map(|(e, (m, r))| vec![*e, *m, study.reference, *r])
                .collect();
            write_csv(&out_dir.join("force_gl.csv"), "eps,measured,reference,rel_error", &rows)?;
            checks.push(Check::leq("gl_final_rel_error", study.final_rel_error(), cfg.study.tolerance));
            checks.push(Check {
                name: "gl_observed_order".into(),
                measured: study.fitted_order,
                threshold: 0.8,
                pass: study.fitted_order >= 0.8,
            });
        }
        "willmore" => {
            let surface = cfg
                .surface
                .as_ref()
                .map(|s| s.build())
                .transpose()?
                .unwrap_or_else(|| Surface::ellipsoid([0.0; 3], [1.5, 1.0, 1.0]));
            let psi = radial_bump(surface.feature_radius().max(0.5), 0.5);
            let study = willmore_force_study(
                &surface,
                cfg.params.bend_m,
                &cfg.study.eps_seq,
                cfg.study.eps_over_h,
                psi,
            );
            let rows: Vec<Vec<f64>> = study
                .eps
                .iter()
                .zip(&study.measured)
                .map(|(e, m)| vec![*e, *m, study.oracle_raw])
                .collect();
            write_csv(&out_dir.join("force_willmore.csv"), "eps,measured,oracle_raw", &rows)?;
            let f = File::create(out_dir.join("willmore_fit.json"))?;
            serde_json::to_writer_pretty(BufWriter::new(f), &study)?;
            if study.oracle_raw.abs() > 1e-12 {
                checks.push(Check::leq(
                    "willmore_final_rel_error_vs_fit",
                    study.final_rel_error,
                    cfg.study.tolerance,
                ));
            } else {
                let decreasing = study.measured.windows(2).all(|w| w[1].abs() < w[0].abs());
                checks.push(Check {
                    name: "willmore_magnitude_decreasing".into(),
                    measured: study.measured.last().unwrap().abs(),
                    threshold: study.measured[0].abs(),
                    pass: decreasing,
                });
            }
        }
        k if k.starts_with("coupling") => {
            let membrane = cfg
                .surface
                .as_ref()
                .map(|s| s.build())
                .transpose()?
                .unwrap_or_else(|| Surface::circle([0.0, 0.0], 0.35));
            let cortex = cfg
                .surface2
                .as_ref()
                .map(|s| s.build())
                .transpose()?
                .unwrap_or_else(|| Surface::circle([0.0, 0.0], 0.15));
            if membrane.dim() != 2 {
                return Err(HarnessError::Config(
                    "coupling force studies run on planar (circle/ellipse) surfaces".into(),
                ));
            }
            let ca = |x: [f64; 3]| {
                let th = x[1].atan2(x[0]);
                1.0 + 0.25 * th.cos() + 0.35 * th.sin()
            };
            let r_psi = cortex.feature_radius() + 0.1;
            let psi_n = radial_bump(r_psi, 0.3);
            let psi_t = rotational_bump(r_psi, 0.3);
            let r_c = cortex.feature_radius();
            let blob = localized_blob([r_c * 0.7f64.cos(), r_c * 0.7f64.sin(), 0.0], 0.18, [1.0, 0.3, 0.0]);
            let study_cfg = CouplingStudyConfig {
                membrane,
                cortex,
                params: &cfg.params,
                eps_seq: &cfg.study.eps_seq,
                eps_over_h: cfg.study.eps_over_h,
                ca: &ca,
                psi_normal: &psi_n,
                psi_tangential: &psi_t,
                psi_localized: &blob,
            };
            let studies = coupling_force_study(&study_cfg);
            for st in &studies {
                if kind != "coupling-all" && kind != format!("coupling-{}", &st.family["coupling_".len()..]).replace('_', "-") {
                    continue;
                }
                let rows: Vec<Vec<f64>> = st
                    .eps
                    .iter()
                    .zip(st.diffuse.iter().zip(&st.ratios))
                    .map(|(e, (d, r))| vec![*e, *d, st.sharp, *r])
                    .collect();
                write_csv(
                    &out_dir.join(format!("force_{}.csv", st.family)),
                    "eps,diffuse,sharp,ratio",
                    &rows,
                )?;
                checks.push(Check::within(
                    &format!("{}_ratio_vs_paper_factor", st.family),
                    st.fitted_ratio,
                    st.paper_factor,
                    cfg.study.tolerance.max(0.05),
                ));
                checks.push(Check::within(
                    &format!("{}_ratio_vs_z_squared", st.family),
                    st.fitted_ratio,
                    st.z_squared,
                    cfg.study.tolerance.max(0.05),
                ));
            }
            let f = File::create(out_dir.join("coupling_studies.json"))?;
            serde_json::to_writer_pretty(BufWriter::new(f), &studies)?;
        }
        other => {
            return Err(HarnessError::Config(format!("unknown force-limit kind '{other}'")));
        }
    }

    let summary = Summary::new("force-limit", checks, cfg);
    summary.write(out_dir)?;
    Ok(summary)
}

/// `simulate`: time integration with the energy monitor, CSV stream,
/// checkpoints and abort dumps.
pub fn simulate(cfg: &RunConfig, out_dir: &Path) -> Result<Summary, HarnessError> {
    fs::create_dir_all(out_dir)?;
    let boundary = if cfg.grid.periodic { BoundaryKind::Periodic } else { BoundaryKind::Physical };
    let grid = Arc::new(Grid::centered(cfg.grid.dim, cfg.grid.side, cfg.grid.cells, boundary)?);
    let membrane = cfg
        .surface
        .as_ref()
        .map(|s| s.build())
        .transpose()?
        .unwrap_or_else(|| Surface::circle([0.0, 0.0], 0.3));
    let cortex = cfg
        .surface2
        .as_ref()
        .map(|s| s.build())
        .transpose()?
        .unwrap_or_else(|| Surface::circle([0.0, 0.0], 0.18));
    let phi_m = build_phase_field(&membrane, cfg.params.eps, &grid);
    let phi_c = build_phase_field(&cortex, cfg.params.eps, &grid);
    let mut state = PhaseState::quiescent(&grid, phi_m, phi_c);
    if cfg.simulate.c_a_init != 0.0 {
        state.c_a = ScalarField::constant(&grid, cfg.simulate.c_a_init);
    }
    if cfg.simulate.c_i_init != 0.0 {
        state.c_i = ScalarField::constant(&grid, cfg.simulate.c_i_init);
    }

    let mut step_cfg = StepConfig::new(cfg.simulate.dt)
        .map_err(|e| HarnessError::Config(format!("step config: {e}")))?;
    step_cfg.evolve_fluid = cfg.simulate.evolve_fluid;
    step_cfg.evolve_species = !cfg.simulate.quasi_static_species;

    let csv = File::create(out_dir.join("energy.csv"))?;
    let mut csv = BufWriter::new(csv);
    writeln!(
        csv,
        "t,kinetic,GL_m,GL_c,Willmore_m,Willmore_c,coupling,total,dissipation_estimate"
    )?;
    let checkpoint_every = cfg.simulate.checkpoint_every;
    let mut csv_err = None;
    let result = solver_run(state, &cfg.params, &step_cfg, cfg.simulate.steps, |rec, st| {
        let r = rec.report;
        if let Err(e) = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{}",
            rec.t, r.kinetic, r.gl_m, r.gl_c, r.willmore_m, r.willmore_c, r.coupling, r.total,
            r.dissipation_estimate
        ) {
            csv_err = Some(e);
        }
        if checkpoint_every > 0 && rec.step % checkpoint_every == 0 {
            let _ = write_state(out_dir, &format!("checkpoint_{:06}", rec.step), st);
        }
    });
    if let Some(e) = csv_err {
        return Err(HarnessError::Io(e));
    }

    match result {
        Ok(traj) => {
            write_state(out_dir, "final", &traj.state)?;
            let first = traj.records.first().unwrap();
            let last = traj.records.last().unwrap();
            let max_div = traj.records.iter().map(|r| r.max_div_u).fold(0.0, f64::max);
            let checks = vec![
                Check::leq("max_div_u", max_div, 1e-8),
                Check {
                    name: "energy_bounded".into(),
                    measured: last.report.total,
                    threshold: 10.0 * first.report.total.abs(),
                    pass: last.report.total <= 10.0 * first.report.total.abs(),
                },
            ];
            let summary = Summary::new("simulate", checks, cfg);
            summary.write(out_dir)?;
            Ok(summary)
        }
        Err((err, last_good)) => {
            write_state(out_dir, "abort_last_good", &last_good)?;
            Err(HarnessError::Numeric(format!("simulation aborted: {err}")))
        }
    }
}

fn write_state(out_dir: &Path, tag: &str, state: &PhaseState) -> Result<(), HarnessError> {
    let fields: Vec<(&str, &ScalarField)> = vec![
        ("phi_m", &state.phi_m),
        ("phi_c", &state.phi_c),
        ("pressure", &state.p),
        ("c_a", &state.c_a),
        ("c_i", &state.c_i),
    ];
    crate::fields::io::write_vtk(&out_dir.join(format!("{tag}.vtk")), &fields, tag)?;
    for (name, f) in &fields {
        crate::fields::io::write_raw(
            &out_dir.join(format!("{tag}_{name}.raw")),
            f,
            name,
            state.t,
        )?;
    }
    Ok(())
}

/// `species-check`: the linker-transport conservation properties at the
/// configured resolution.
pub fn species_check(cfg: &RunConfig, out_dir: &Path) -> Result<Summary, HarnessError> {
    fs::create_dir_all(out_dir)?;
    let grid = Arc::new(Grid::centered(2, 1.0, cfg.grid.cells.max(48), BoundaryKind::Physical)?);
    let eps = cfg.params.eps;
    let cortex = Surface::circle([0.0, 0.0], 0.18);
    let phi_m = build_phase_field(&Surface::circle([0.0, 0.0], 0.3), eps, &grid);
    let phi_c = build_phase_field(&cortex, eps, &grid);

    // Reaction-only exchange conservation.
    let params = ModelParams {
        eps,
        spring_k: 0.0,
        repair_beta: 2.0,
        diff_active: 0.0,
        diff_inactive: 0.0,
        zeta: crate::energies::ZetaParams::Sigmoid { amplitude: 1.0, critical: 0.0, width: 0.05 },
        ..cfg.params
    };
    let mut state = PhaseState::quiescent(&grid, phi_m.clone(), phi_c.clone());
    state.c_a = ScalarField::from_fn(&grid, |x| 1.0 + 0.2 * x[0]);
    state.c_i = ScalarField::constant(&grid, 0.5);
    let mut step_cfg = StepConfig::new(1e-3).map_err(|e| HarnessError::Config(e.to_string()))?;
    step_cfg.evolve_fluid = false;
    step_cfg.evolve_phases = false;

    let e_c = crate::energies::gl_density(&phi_c, &params)?;
    let cutoff = params.tube_cutoff_rel * e_c.max_abs();
    let mask: Vec<bool> = e_c.values().iter().map(|&v| v > cutoff).collect();
    let mass = |ca: &ScalarField, ci: &ScalarField| {
        crate::solver::weighted_species_mass(ca, &e_c, &mask)
            + crate::solver::weighted_species_mass(ci, &e_c, &mask)
    };
    let m0 = mass(&state.c_a, &state.c_i);
    let mut s = state;
    for _ in 0..50 {
        let (next, _) = crate::solver::step(&s, &params, &step_cfg)
            .map_err(|e| HarnessError::Numeric(e.to_string()))?;
        s = next;
    }
    let reaction_drift = ((mass(&s.c_a, &s.c_i) - m0) / m0).abs();

    // Diffusion conservation.
    let params_d = ModelParams {
        repair_beta: 0.0,
        diff_active: 0.5,
        zeta: crate::energies::ZetaParams::Zero,
        ..params
    };
    let mut state = PhaseState::quiescent(&grid, phi_m, phi_c);
    state.c_a = ScalarField::from_fn(&grid, |x| 1.0 + 0.5 * (x[1].atan2(x[0])).sin());
    let m0 = crate::solver::weighted_species_mass(&state.c_a, &e_c, &mask);
    let mut s = state;
    for _ in 0..30 {
        let (next, _) = crate::solver::step(&s, &params_d, &step_cfg)
            .map_err(|e| HarnessError::Numeric(e.to_string()))?;
        s = next;
    }
    let diffusion_drift =
        ((crate::solver::weighted_species_mass(&s.c_a, &e_c, &mask) - m0) / m0).abs();

    let checks = vec![
        Check::leq("reaction_mass_exchange_drift", reaction_drift, 1e-10),
        Check::leq("weighted_diffusion_mass_drift", diffusion_drift, 1e-8),
    ];
    let summary = Summary::new("species-check", checks, cfg);
    summary.write(out_dir)?;
    Ok(summary)
}
