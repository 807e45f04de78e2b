//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured values. Tolerances are pinned here, in code.
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the lines.

use std::sync::Arc;
use std::time::Instant;

use blebsim::asymptotics::{
    concentration_integral, coupling_force_study, e_coefficients, gl_force_study, localized_blob,
    optimal_profile_ode_residual, radial_bump, rotational_bump, s1_check, willmore_force_study,
    CouplingStudyConfig, ExpansionSeries, SurfaceQuadrature,
};
use blebsim::energies::{
    chemical_potential, coupling_energy, coupling_gradient_cortex, coupling_gradient_membrane,
    gl_energy, willmore_energy, willmore_gradient, ModelParams,
};
use blebsim::fields::{integrate, BoundaryKind, Grid, ScalarField, VectorField};
use blebsim::geometry::{build_phase_field, optimal_profile, Profile, ProfileGrid, Surface, Z_CONSTANT};
use blebsim::solver::{run, step, weighted_species_mass, PhaseState, StepConfig};
use blebsim::util::vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn verdict(criterion: &str, pass: bool, detail: &str, started: Instant) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {criterion}: {status} ({detail}) [{:.1}s]",
        started.elapsed().as_secs_f64()
    );
    assert!(pass, "criterion {criterion} failed: {detail}");
}

#[test]
fn c01_optimal_profile_residual() {
    let t0 = Instant::now();
    let grid = ProfileGrid::new(10.0, 1e-3).unwrap();
    let g = optimal_profile_ode_residual(grid);
    let sup = g.sup_norm();
    verdict("1 (optimal profile ODE)", sup <= 1e-5, &format!("sup residual {sup:.3e} <= 1e-5"), t0);
}

#[test]
fn c02_z_constant() {
    let t0 = Instant::now();
    let grid = ProfileGrid::new(10.0, 1e-3).unwrap();
    let z = Profile::sample(grid, |z| {
        let t = (z / 2f64.sqrt()).tanh();
        0.5 * (1.0 - t * t) * (1.0 - t * t)
    })
    .integrate();
    let target = 2.0 * 2f64.sqrt() / 3.0;
    let err = (z - target).abs();
    verdict("2 (constant Z)", err <= 1e-8, &format!("|Z - 2sqrt(2)/3| = {err:.3e}"), t0);
}

#[test]
fn c03_expansion_coefficients() {
    let t0 = Instant::now();
    let grid = ProfileGrid::new(10.0, 1e-3).unwrap();
    let mut worst = 0.0f64;
    for (h, k) in [(0.0, 0.0), (2.0, 1.0), (2.0 / 0.3, 1.0 / 0.09)] {
        let e = e_coefficients(&ExpansionSeries::with_curvatures(grid, h, k));
        worst = worst.max(e.e_m2.sup_norm()).max(e.e_m1.sup_norm());
    }
    let s1 = s1_check(grid).sup_norm();
    let pass = worst <= 1e-5 && s1 <= 1e-5;
    verdict(
        "3 (expansion coefficients)",
        pass,
        &format!("max(e_m2, e_m1) sup {worst:.3e}, s1 residual {s1:.3e}"),
        t0,
    );
}

#[test]
fn c04_curvature_lemma() {
    let t0 = Instant::now();
    let h = 1e-3;
    let mut worst_nd = 0.0f64;
    let mut worst_hess = 0.0f64;
    let cases = [
        (Surface::sphere([0.0; 3], 1.0), [1.03, 0.2, -0.1]),
        (Surface::torus([0.0; 3], 2.0, 0.5), [2.52 * 0.4f64.cos(), 2.52 * 0.4f64.sin(), 0.04]),
    ];
    for (surface, x) in cases {
        let ids = surface.curvature_identities(x, h).unwrap();
        worst_nd = worst_nd.max(
            (ids.normal_deriv_fd - ids.normal_deriv_closed).abs() / ids.normal_deriv_closed.abs(),
        );
        worst_hess = worst_hess.max(
            (ids.hessian_normal_fd - ids.hessian_normal_closed).abs()
                / ids.hessian_normal_closed.abs(),
        );
    }

    let surface = Surface::torus([0.0; 3], 2.0, 0.5);
    let p = [2.5 * 0.7f64.cos(), 2.5 * 0.7f64.sin(), 0.0];
    let nu = surface.normal_at(p);
    let ks = surface.principal_curvatures(p);
    let (mut ds, mut errs) = (Vec::new(), Vec::new());
    for d in [0.02, 0.01, 0.005, 0.0025] {
        let x = vec3::add(p, vec3::scale(nu, d));
        let ext = surface.extended_curvatures(x).unwrap();
        let first = ks[0] + ks[1] + d * (ks[0] * ks[0] + ks[1] * ks[1]);
        ds.push(d);
        errs.push((ext.h_mean - first).abs());
    }
    let slope = blebsim::util::fitted_order(&ds, &errs);
    let pass = worst_nd <= 1e-4 && worst_hess <= 1e-4 && (slope - 2.0).abs() <= 0.1;
    verdict(
        "4 (curvature lemma)",
        pass,
        &format!("rel errors {worst_nd:.3e}/{worst_hess:.3e} <= 1e-4, tubular slope {slope:.3}"),
        t0,
    );
}

#[test]
fn c05_concentration_lemma() {
    let t0 = Instant::now();
    let p = |z: f64| optimal_profile(z).d1.powi(2);
    // The quadratic term gives f a genuine transverse variation; a purely
    // linear f is integrated exactly on a centered circle and leaves only
    // round-off, with nothing left to decrease.
    let f = |x: [f64; 3]| 1.0 + 0.5 * x[1] + 0.3 * x[0] * x[0];

    // 2D circle variant (cheap), then the 3D headline numbers.
    for (name, surface, order) in [
        ("circle", Surface::circle([0.0, 0.0], 1.0), 512usize),
        ("sphere", Surface::sphere([0.0; 3], 1.0), 64),
    ] {
        let quad = SurfaceQuadrature::build(&surface, order);
        let p_mass = Profile::sample(ProfileGrid::new(20.0, 1e-3).unwrap(), p).integrate();
        let sharp = p_mass * quad.integrate(|n| f(n.pos));
        let mut rels = Vec::new();
        for eps in [0.04, 0.02, 0.01] {
            let v = concentration_integral(&surface, eps, eps / 5.0, 12.0, p, f);
            rels.push((v - sharp).abs() / sharp.abs());
        }
        let decreasing = rels.windows(2).all(|w| w[1] < w[0]);
        let pass = decreasing && *rels.last().unwrap() <= 0.02;
        verdict(
            &format!("5 (concentration, {name})"),
            pass,
            &format!("rel errors {rels:?}, strictly decreasing {decreasing}"),
            t0,
        );
    }
}

#[test]
fn c06_gl_force_limit() {
    let t0 = Instant::now();
    let radius = 0.3;
    let surface = Surface::sphere([0.0; 3], radius);
    let sigma = 1.0;
    let psi = radial_bump(radius, 0.12);
    let study = gl_force_study(&surface, sigma, &[0.04, 0.02, 0.01], 5.0, psi);
    let final_err = study.final_rel_error();
    let pass = final_err <= 0.03 && study.fitted_order >= 0.8;
    verdict(
        "6 (GL force limit)",
        pass,
        &format!(
            "rel errors {:?}, final {final_err:.3e} <= 3e-2, order {:.2} >= 0.8",
            study.rel_errors, study.fitted_order
        ),
        t0,
    );
}

#[test]
fn c07_willmore_force_limit() {
    let t0 = Instant::now();
    // Sphere: the sharp value is 0 (H² = 4K, Δ_Γ H = 0); |diffuse| decreases.
    let sphere = Surface::sphere([0.0; 3], 0.3);
    let psi_s = radial_bump(0.3, 0.12);
    let sphere_study = willmore_force_study(&sphere, 1.0, &[0.04, 0.02, 0.01], 5.0, psi_s);
    let decreasing = sphere_study.measured.windows(2).all(|w| w[1].abs() < w[0].abs());

    // Ellipsoid: fit the limit constant on the coarse runs and check the
    // finest against the prediction built on the Δ_Γ H + H(H²-4K) oracle.
    let ellipsoid = Surface::ellipsoid([0.0; 3], [1.5, 1.0, 1.0]);
    let psi_e = radial_bump(1.1, 0.5);
    let ell_study = willmore_force_study(&ellipsoid, 1.0, &[0.08, 0.04, 0.02], 5.0, psi_e);
    let pass = decreasing && ell_study.final_rel_error <= 0.05;
    verdict(
        "7 (Willmore force limit)",
        pass,
        &format!(
            "sphere magnitudes {:?} decreasing {decreasing}; ellipsoid C_fit {:.4}, final rel err {:.3e} <= 5e-2 (Z-based candidates {:?})",
            sphere_study.measured, ell_study.fitted_constant, ell_study.final_rel_error,
            ell_study.z_candidates
        ),
        t0,
    );
}

#[test]
fn c08_coupling_factor_identities() {
    let t0 = Instant::now();
    let params = ModelParams { spring_k: 1.0, omega_std: 2.0, ..ModelParams::default() };
    let eps_seq = [0.04, 0.02, 0.01];
    let ca = |x: [f64; 3]| {
        let th = x[1].atan2(x[0]);
        1.0 + 0.25 * th.cos() + 0.35 * th.sin()
    };
    let psi_n = radial_bump(0.27, 0.3);
    let psi_t = rotational_bump(0.27, 0.3);
    let blob = localized_blob([0.15 * 0.7f64.cos(), 0.15 * 0.7f64.sin(), 0.0], 0.18, [1.0, 0.3, 0.0]);

    // Concentric circles for the ν-paired families; the tangential and
    // normal-variation references vanish by symmetry there, so those two
    // run on the eccentric configuration.
    let concentric = CouplingStudyConfig {
        membrane: Surface::circle([0.0, 0.0], 0.35),
        cortex: Surface::circle([0.0, 0.0], 0.15),
        params: &params,
        eps_seq: &eps_seq,
        eps_over_h: 5.0,
        ca: &ca,
        psi_normal: &psi_n,
        psi_tangential: &psi_t,
        psi_localized: &blob,
    };
    let eccentric = CouplingStudyConfig {
        membrane: Surface::circle([0.12, 0.0], 0.4),
        cortex: Surface::circle([0.0, 0.0], 0.15),
        ..concentric
    };

    let con = coupling_force_study(&concentric);
    let ecc = coupling_force_study(&eccentric);
    let picks = [
        (&con[0], "membrane (A+B vs I)"),
        (&con[1], "cortex (C+D vs J)"),
        (&con[3], "species curvature (G vs K)"),
        (&ecc[2], "normal variation (E vs M)"),
        (&ecc[4], "species tangential (H vs L)"),
    ];
    let mut all_pass = true;
    let mut details = Vec::new();
    for (st, label) in picks {
        let vs_paper = (st.fitted_ratio / st.paper_factor - 1.0).abs();
        let vs_z2 = (st.fitted_ratio / st.z_squared - 1.0).abs();
        let pass = vs_paper <= 0.05;
        all_pass &= pass;
        details.push(format!(
            "{label}: fitted {:.4}, /paper {:.4} (off {:.1}%), /Z^2 {:.4} (off {:.1}%)",
            st.fitted_ratio,
            st.fitted_ratio / st.paper_factor,
            vs_paper * 100.0,
            st.fitted_ratio / st.z_squared,
            vs_z2 * 100.0
        ));
    }
    for d in &details {
        println!("  {d}");
    }
    verdict(
        "8 (coupling factor identities)",
        all_pass,
        "fitted ratios must match the printed factors 3Z^2/2 resp. (3Z/2)^2 within 5%; \
         the measured limits land on Z^2 instead (see the per-family lines above and the \
         decisions ledger)",
        t0,
    );
}

#[test]
fn c09_variational_consistency() {
    let t0 = Instant::now();
    let n = 128;
    let grid = Arc::new(Grid::centered(2, 1.0, n, BoundaryKind::Periodic).unwrap());
    // Tight tube cutoff removes mask-boundary jumps from the coupling
    // energies (cells crossing the cutoff under the ±τ perturbation cost a
    // cutoff-sized discontinuity each).
    let params = ModelParams {
        eps: 0.04,
        spring_k: 2.0,
        omega_std: 1.0,
        tube_cutoff_rel: 1e-10,
        ..ModelParams::default()
    };
    let phi_m = build_phase_field(&Surface::circle([0.0, 0.0], 0.25), params.eps, &grid);
    let phi_c = build_phase_field(&Surface::circle([0.0, 0.0], 0.12), params.eps, &grid);
    let ca = ScalarField::from_fn(&grid, |x| 1.0 + 0.3 * (x[0] * 6.0).sin());

    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    let side = grid.extent()[0];
    let dirs: Vec<ScalarField> = (0..20)
        .map(|_| {
            let modes: Vec<(f64, f64, f64, f64)> = (0..6)
                .map(|_| {
                    (
                        rng.gen_range(-3i32..=3) as f64,
                        rng.gen_range(-3i32..=3) as f64,
                        rng.gen_range(0.0..std::f64::consts::TAU),
                        rng.gen_range(0.2..1.0),
                    )
                })
                .collect();
            ScalarField::from_fn(&grid, |x| {
                modes
                    .iter()
                    .map(|(kx, ky, ph, amp)| {
                        amp * (std::f64::consts::TAU * (kx * x[0] + ky * x[1]) / side + ph).sin()
                    })
                    .sum()
            })
        })
        .collect();

    let tau = 2e-5;
    let vol = grid.cell_volume();
    let check = |energy: &dyn Fn(&ScalarField) -> f64, grad: &ScalarField, base: &ScalarField| -> f64 {
        let mut worst = 0.0f64;
        for v in &dirs {
            let shift = |s: f64| {
                ScalarField::from_values(
                    &grid,
                    base.values().iter().zip(v.values()).map(|(a, b)| a + s * b).collect(),
                )
                .unwrap()
            };
            let fd = (energy(&shift(tau)) - energy(&shift(-tau))) / (2.0 * tau);
            let ip: f64 = grad
                .values()
                .iter()
                .zip(v.values())
                .map(|(a, b)| a * b)
                .sum::<f64>()
                * vol;
            worst = worst.max((fd - ip).abs() / fd.abs().max(ip.abs()).max(1e-12));
        }
        worst
    };

    let sigma = 1.0;
    let mu = chemical_potential(&phi_m, &params).unwrap();
    let e_gl = check(&|f| gl_energy(f, sigma, &params).unwrap(), &mu, &phi_m);

    let b = 0.02;
    let w = willmore_gradient(&phi_m, &params).unwrap();
    let grad_w =
        ScalarField::from_values(&grid, w.values().iter().map(|v| b * v).collect()).unwrap();
    let e_wil = check(&|f| willmore_energy(f, b, &params).unwrap(), &grad_w, &phi_m);

    let gm = coupling_gradient_membrane(&phi_m, &phi_c, &ca, &params).unwrap();
    let e_cm = check(&|f| coupling_energy(f, &phi_c, &ca, &params).unwrap(), &gm.total, &phi_m);

    let gc = coupling_gradient_cortex(&phi_m, &phi_c, &ca, &params).unwrap();
    let e_cc = check(&|f| coupling_energy(&phi_m, f, &ca, &params).unwrap(), &gc.total, &phi_c);

    let worst = e_gl.max(e_wil).max(e_cm).max(e_cc);
    verdict(
        "9 (variational consistency)",
        worst <= 1e-4,
        &format!("rel errors: GL {e_gl:.3e}, Willmore {e_wil:.3e}, coupling-m {e_cm:.3e}, coupling-c {e_cc:.3e} (20 directions, <= 1e-4)"),
        t0,
    );
}

#[test]
fn c10_solver_conservation_dissipation() {
    let t0 = Instant::now();
    let eps = 0.05;
    let grid = Arc::new(Grid::centered(2, 1.0, 64, BoundaryKind::Physical).unwrap());
    let phi_m = build_phase_field(&Surface::circle([0.0, 0.0], 0.3), eps, &grid);
    let phi_c = build_phase_field(&Surface::circle([0.0, 0.0], 0.18), eps, &grid);
    let state = PhaseState::quiescent(&grid, phi_m, phi_c);
    let params = ModelParams {
        eps,
        spring_k: 0.0,
        bend_m: 0.005,
        bend_c: 0.005,
        ..ModelParams::default()
    };
    let mut cfg = StepConfig::new(2e-6).unwrap();
    cfg.evolve_species = false;
    let m0 = integrate(&state.phi_m);
    let traj = run(state, &params, &cfg, 100, |_, _| {}).map_err(|(e, _)| e).unwrap();
    let drift = (integrate(&traj.state.phi_m) - m0).abs() / m0.abs();
    let max_div = traj.records.iter().map(|r| r.max_div_u).fold(0.0, f64::max);
    let f0 = traj.records[0].report.free();
    let slack = 1e-6 * f0;
    let monotone = traj
        .records
        .windows(2)
        .all(|w| w[1].report.free() <= w[0].report.free() + slack);

    // Reaction-only species exchange.
    let phi_m = build_phase_field(&Surface::circle([0.0, 0.0], 0.3), eps, &grid);
    let phi_c = build_phase_field(&Surface::circle([0.0, 0.0], 0.18), eps, &grid);
    let mut st = PhaseState::quiescent(&grid, phi_m, phi_c.clone());
    st.c_a = ScalarField::from_fn(&grid, |x| 1.0 + 0.2 * x[0]);
    st.c_i = ScalarField::constant(&grid, 0.5);
    let rparams = ModelParams {
        repair_beta: 2.0,
        diff_active: 0.0,
        diff_inactive: 0.0,
        zeta: blebsim::energies::ZetaParams::Sigmoid { amplitude: 1.5, critical: 0.0, width: 0.05 },
        ..params
    };
    let mut rcfg = StepConfig::new(1e-3).unwrap();
    rcfg.evolve_fluid = false;
    rcfg.evolve_phases = false;
    let e_c = blebsim::energies::gl_density(&phi_c, &rparams).unwrap();
    let cutoff = rparams.tube_cutoff_rel * e_c.max_abs();
    let mask: Vec<bool> = e_c.values().iter().map(|&v| v > cutoff).collect();
    let s0 = weighted_species_mass(&st.c_a, &e_c, &mask) + weighted_species_mass(&st.c_i, &e_c, &mask);
    let mut s = st;
    for _ in 0..100 {
        let (next, _) = step(&s, &rparams, &rcfg).unwrap();
        s = next;
    }
    let s1 = weighted_species_mass(&s.c_a, &e_c, &mask) + weighted_species_mass(&s.c_i, &e_c, &mask);
    let rdrift = ((s1 - s0) / s0).abs();

    let pass = drift <= 1e-10 && max_div <= 1e-8 && monotone && rdrift <= 1e-10;
    verdict(
        "10 (solver conservation/dissipation)",
        pass,
        &format!("phase mass drift {drift:.3e} <= 1e-10, max div u {max_div:.3e} <= 1e-8, free energy non-increasing {monotone}, reaction drift {rdrift:.3e} <= 1e-10"),
        t0,
    );
}

#[test]
fn c11_advection_limit() {
    let t0 = Instant::now();
    let vel = [0.31, 0.22];
    let eps = 0.08;
    let errs: Vec<f64> = [48usize, 96]
        .iter()
        .map(|&n| {
            let grid = Arc::new(Grid::centered(2, 1.0, n, BoundaryKind::Periodic).unwrap());
            let phi_m = build_phase_field(&Surface::circle([0.0, 0.0], 0.3), eps, &grid);
            let phi_c = build_phase_field(&Surface::circle([0.0, 0.0], 0.18), eps, &grid);
            let mut state = PhaseState::quiescent(&grid, phi_m, phi_c);
            state.u = VectorField::from_fn(&grid, |_| [vel[0], vel[1], 0.0]);
            let h = grid.spacing(0);
            let params = ModelParams { eps, spring_k: 0.0, ..ModelParams::default() };
            // Δt ∝ h² so both error contributions refine together.
            let mut cfg = StepConfig::new(0.4 * h * h).unwrap();
            cfg.mobility_override = Some(0.0);
            cfg.evolve_fluid = false;
            cfg.evolve_species = false;
            let steps = 50;
            let mut s = state;
            for _ in 0..steps {
                let (next, _) = step(&s, &params, &cfg).unwrap();
                s = next;
            }
            let t_end = cfg.dt * steps as f64;
            let (mut cx, mut cy, mut mass) = (0.0, 0.0, 0.0);
            let [nx, ny, _] = grid.cells();
            for j in 0..ny {
                for i in 0..nx {
                    let v = s.phi_m.at(i, j, 0);
                    if v < 0.0 {
                        let x = grid.cell_center(i, j, 0);
                        cx -= v * x[0];
                        cy -= v * x[1];
                        mass -= v;
                    }
                }
            }
            cx /= mass;
            cy /= mass;
            ((cx - vel[0] * t_end).powi(2) + (cy - vel[1] * t_end).powi(2)).sqrt()
        })
        .collect();
    let gain = errs[0] / errs[1];
    verdict(
        "11 (advection limit)",
        gain >= 3.0,
        &format!("center errors {errs:?}, refinement gain {gain:.2} >= 3"),
        t0,
    );
}
