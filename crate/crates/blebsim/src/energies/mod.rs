//! Energy functionals of the model and their L² gradients: Ginzburg–Landau
//! surface energy, Willmore bending energy, the Hookean linker coupling, and
//! the momentum-balance force assembled from them.

mod coupling;
mod double_well;
mod force;
mod gl;
mod params;

pub use coupling::{
    coupling_energy, coupling_gradient_cortex, coupling_gradient_membrane, coupling_weight,
    linker_forces, tube_cells, CortexCouplingGradient, LinkerForces, MembraneCouplingGradient,
    TubeCells, TUBE_CUTOFF_REL,
};
pub use double_well::double_well;
pub use force::{force_k, scaled_surface_gradient, total_energy, EnergyReport};
pub use gl::{
    chemical_potential, diffuse_normal_and_curvature, gl_density, gl_energy, willmore_energy,
    willmore_gradient, willmore_gradient_from_mu,
};
pub use params::{ModelParams, WeightExponentSign, ZetaParams};

pub(crate) use coupling::{
    coupling_gradient_cortex_from, coupling_gradient_membrane_with, linker_forces_from,
    CouplingContext,
};
pub(crate) use gl::phase_bc;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EnergyError {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),
    #[error("double-well derivative order {0} not available (max 5)")]
    DerivativeOrder(u32),
    #[error("coupling weight undefined for coincident points")]
    CoincidentPoints,
    #[error(transparent)]
    Field(#[from] crate::fields::FieldError),
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::fields::{integrate, BoundaryKind, Grid, ScalarField, VectorField};
    use crate::geometry::{build_phase_field, optimal_profile, Surface, Z_CONSTANT};

    fn periodic_grid_2d(n: usize, side: f64) -> Arc<Grid> {
        Arc::new(Grid::centered(2, side, n, BoundaryKind::Periodic).unwrap())
    }

    fn params_2d(eps: f64) -> ModelParams {
        ModelParams { eps, ..ModelParams::default() }
    }

    /// Smooth random direction field from a handful of Fourier modes.
    fn random_direction(grid: &Arc<Grid>, rng: &mut ChaCha8Rng) -> ScalarField {
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
        let side = grid.extent()[0];
        ScalarField::from_fn(grid, |x| {
            modes
                .iter()
                .map(|(kx, ky, ph, amp)| {
                    amp * (std::f64::consts::TAU * (kx * x[0] + ky * x[1]) / side + ph).sin()
                })
                .sum()
        })
    }

    #[test]
    fn gl_density_of_pure_phase_vanishes() {
        let grid = periodic_grid_2d(32, 1.0);
        let params = params_2d(0.05);
        let phi = ScalarField::constant(&grid, 1.0);
        let e = gl_density(&phi, &params).unwrap();
        assert!(e.max_abs() < 1e-15);
    }

    #[test]
    fn gl_density_nonnegative_and_equipartitioned_on_profile() {
        // 1D planar optimal profile: ∫ e_ε dz = Z for every ε, and
        // (ε/2)|∇φ|² = W(φ)/ε pointwise up to discretization error.
        for eps in [0.02, 0.04] {
            let grid = Arc::new(Grid::new_1d(4096, -0.5, 1.0, BoundaryKind::Physical).unwrap());
            let params = params_2d(eps);
            let phi = ScalarField::from_fn(&grid, |x| (x[0] / (eps * 2f64.sqrt())).tanh());
            let e = gl_density(&phi, &params).unwrap();
            assert!(e.values().iter().all(|v| *v >= 0.0));
            let total = integrate(&e);
            assert!((total - Z_CONSTANT).abs() < 2e-4 * Z_CONSTANT, "∫e = {total}");
        }
    }

    #[test]
    fn chemical_potential_of_pure_phase_vanishes() {
        let grid = periodic_grid_2d(24, 1.0);
        let params = params_2d(0.05);
        for v in [-1.0, 1.0] {
            let mu = chemical_potential(&ScalarField::constant(&grid, v), &params).unwrap();
            assert!(mu.max_abs() < 1e-13);
        }
    }

    #[test]
    fn chemical_potential_vanishes_on_planar_profile() {
        let eps = 0.02;
        let grid = Arc::new(Grid::new_1d(2048, -0.5, 1.0, BoundaryKind::Physical).unwrap());
        let params = params_2d(eps);
        let phi = ScalarField::from_fn(&grid, |x| (x[0] / (eps * 2f64.sqrt())).tanh());
        let mu = chemical_potential(&phi, &params).unwrap();
        // Continuum value is 0; the discrete sup-norm is O(h²/ε³).
        let h: f64 = grid.spacing(0);
        assert!(mu.max_abs() < 2.0 * h * h / (eps * eps * eps), "‖μ‖ = {}", mu.max_abs());
    }

    #[test]
    fn chemical_potential_sees_curvature() {
        // Spherical profile: -μ/φ₀' weighted by (φ₀')² averages to ~ 2/R.
        let radius = 0.5;
        let eps = 0.02;
        let grid = Arc::new(Grid::centered(3, 1.6, 160, BoundaryKind::Physical).unwrap());
        let params = params_2d(eps);
        let surface = Surface::sphere([0.0; 3], radius);
        let phi = build_phase_field(&surface, eps, &grid);
        let mu = chemical_potential(&phi, &params).unwrap();
        let [nx, ny, nz] = grid.cells();
        let mut num = 0.0;
        let mut den = 0.0;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let x = grid.cell_center(i, j, k);
                    let d = surface.signed_distance(x).unwrap();
                    let z = d / eps;
                    if z.abs() > 4.0 {
                        continue;
                    }
                    let p = optimal_profile(z);
                    let wgt = p.d1 * p.d1;
                    num += wgt * (-mu.at(i, j, k) / p.d1);
                    den += wgt;
                }
            }
        }
        let avg = num / den;
        let target = 2.0 / radius;
        assert!((avg - target).abs() < 0.05 * target, "avg = {avg}, target = {target}");
    }

    #[test]
    fn willmore_gradient_vanishes_on_pure_phase_and_profile() {
        let grid = periodic_grid_2d(24, 1.0);
        let params = params_2d(0.05);
        let w = willmore_gradient(&ScalarField::constant(&grid, -1.0), &params).unwrap();
        assert!(w.max_abs() < 1e-12);

        // Planar profile: continuum Willmore gradient is 0; discrete residual
        // shrinks at second order as the profile is refined at fixed ε. The
        // box is wide enough that the tanh tails saturate exactly at the
        // walls (otherwise the mirror ghosts introduce a kink).
        let eps = 0.05;
        let mut errs = Vec::new();
        let mut hs = Vec::new();
        for n in [3072usize, 6144, 12288] {
            let grid = Arc::new(Grid::new_1d(n, -1.5, 3.0, BoundaryKind::Physical).unwrap());
            let params = params_2d(eps);
            let phi = ScalarField::from_fn(&grid, |x| (x[0] / (eps * 2f64.sqrt())).tanh());
            let w = willmore_gradient(&phi, &params).unwrap();
            errs.push(w.max_abs());
            hs.push(grid.spacing(0));
        }
        let order = crate::util::fitted_order(&hs, &errs);
        assert!((1.7..=2.3).contains(&order), "order = {order}, errs = {errs:?}");
    }

    #[test]
    fn diffuse_normal_matches_plane_and_sphere() {
        let eps = 0.03;
        let params = params_2d(eps);
        // Plane x = 0 in a 2D box: normal is exactly e_x.
        let grid = periodic_grid_2d(64, 1.0);
        let phi = ScalarField::from_fn(&grid, |x| (x[0] / (eps * 2f64.sqrt())).tanh());
        let (n, _) = diffuse_normal_and_curvature(&phi, &params).unwrap();
        let idx = grid.idx(32, 10, 0);
        assert!((n.comp(0)[idx] - 1.0).abs() < 1e-12);
        assert!(n.comp(1)[idx].abs() < 1e-12);

        // Sphere: angle error below 1 degree inside the tube.
        let grid3 = Arc::new(Grid::centered(3, 1.4, 140, BoundaryKind::Physical).unwrap());
        let surface = Surface::sphere([0.0; 3], 0.5);
        let phi3 = build_phase_field(&surface, eps, &grid3);
        let (n3, h3) = diffuse_normal_and_curvature(&phi3, &params).unwrap();
        let [nx, ny, nz] = grid3.cells();
        let mut max_angle: f64 = 0.0;
        let mut curv_num = 0.0;
        let mut curv_den = 0.0;
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let x = grid3.cell_center(i, j, k);
                    let d = surface.signed_distance(x).unwrap();
                    let z = d / eps;
                    if z.abs() > 2.5 {
                        continue;
                    }
                    let idx = grid3.idx(i, j, k);
                    let nu = crate::util::vec3::normalize(x);
                    let dot = (0..3).map(|c| n3.comp(c)[idx] * nu[c]).sum::<f64>();
                    max_angle = max_angle.max(dot.clamp(-1.0, 1.0).acos().to_degrees());
                    let p = optimal_profile(z);
                    curv_num += p.d1 * p.d1 * (-eps * h3.values()[idx] / (p.d1 * p.d1));
                    curv_den += p.d1 * p.d1;
                }
            }
        }
        assert!(max_angle < 1.0, "max angle error {max_angle} deg");
        let avg_h = curv_num / curv_den;
        let target = 2.0 / 0.5;
        assert!((avg_h - target).abs() < 0.05 * target, "H = {avg_h} vs {target}");
    }

    #[test]
    fn coupling_weight_values() {
        let params = ModelParams::default();
        // r = 1: maximal alignment, ω = ω̂.
        let w = coupling_weight([1.0, 0.0, 0.0], [0.0, 0.0, 0.0], [1.0, 0.0, 0.0], &params).unwrap();
        assert!((w - params.omega_hat).abs() < 1e-15);
        // r = 1 - s (default negative exponent): ω = ω̂/e.
        let r = 1.0 - params.omega_std;
        let n = [1.0, 0.0, 0.0];
        let x = [r, (1.0 - r * r).sqrt(), 0.0]; // unit vector with x·n = r
        let w = coupling_weight(x, [0.0; 3], n, &params).unwrap();
        assert!((w - params.omega_hat * (-1.0f64).exp()).abs() < 1e-14);
        // Paper-literal sign grows instead.
        let lit = ModelParams { weight_sign: WeightExponentSign::PaperLiteral, ..params };
        let w = coupling_weight(x, [0.0; 3], n, &lit).unwrap();
        assert!((w - params.omega_hat * (1.0f64).exp()).abs() < 1e-14);
        // Rotation about n leaves ω unchanged: mirror y across a plane
        // containing n.
        let w1 = coupling_weight([1.0, 0.0, 0.0], [0.3, 0.5, 0.1], n, &params).unwrap();
        let w2 = coupling_weight([1.0, 0.0, 0.0], [0.3, -0.5, 0.1], n, &params).unwrap();
        assert!((w1 - w2).abs() < 1e-14);
        assert!(coupling_weight([1.0, 0.0, 0.0], [1.0, 0.0, 0.0], n, &params).is_err());
    }

    #[test]
    fn coupling_energy_trivial_zeros() {
        let grid = periodic_grid_2d(48, 1.0);
        let params = params_2d(0.04);
        let s_m = Surface::circle([0.0, 0.0], 0.35);
        let phi_m = build_phase_field(&s_m, params.eps, &grid);
        let phi_c = build_phase_field(&Surface::circle([0.0, 0.0], 0.22), params.eps, &grid);
        let zero = ScalarField::zeros(&grid);
        assert_eq!(coupling_energy(&phi_m, &phi_c, &zero, &params).unwrap(), 0.0);
        // No interface on one side: e_ε ≡ 0 kills the double sum.
        let pure = ScalarField::constant(&grid, 1.0);
        let ca = ScalarField::constant(&grid, 2.0);
        assert_eq!(coupling_energy(&pure, &phi_c, &ca, &params).unwrap(), 0.0);
        let e = coupling_energy(&phi_m, &phi_c, &ca, &params).unwrap();
        assert!(e > 0.0);
    }

    #[test]
    fn concentric_sphere_coupling_energy_matches_sharp_limit() {
        // ω ≡ ω̂ (s → ∞), c_a ≡ c̄: C → (k/2) c̄ ω̂ Z² ∬ |x-y|² dH² dH².
        // For concentric spheres radii a, b the double surface integral is
        // (4π a b)² (a² + b²+ ... ) / ...; computed here by quadrature.
        let eps = 0.02;
        let (r_c, r_m) = (0.3, 0.4);
        let grid = Arc::new(Grid::centered(3, 1.1, 220, BoundaryKind::Physical).unwrap());
        let params = ModelParams {
            eps,
            omega_std: f64::INFINITY,
            spring_k: 2.0,
            ..ModelParams::default()
        };
        let phi_m = build_phase_field(&Surface::sphere([0.0; 3], r_m), eps, &grid);
        let phi_c = build_phase_field(&Surface::sphere([0.0; 3], r_c), eps, &grid);
        let cbar = 1.5;
        let ca = ScalarField::constant(&grid, cbar);
        let diffuse = coupling_energy(&phi_m, &phi_c, &ca, &params).unwrap();

        // Sharp double integral over two spheres: ∬ |x-y|² = A_1 A_2 (r_1² + r_2²)
        // since the cross term integrates to zero.
        let a1 = 4.0 * std::f64::consts::PI * r_c * r_c;
        let a2 = 4.0 * std::f64::consts::PI * r_m * r_m;
        let sharp = 0.5 * params.spring_k * cbar * params.omega_hat
            * Z_CONSTANT * Z_CONSTANT
            * a1 * a2 * (r_c * r_c + r_m * r_m);
        let rel = (diffuse - sharp).abs() / sharp;
        assert!(rel < 0.05, "diffuse {diffuse} vs sharp {sharp} (rel {rel})");
    }

    #[test]
    fn cortex_gradient_third_term_vanishes_for_isotropic_weight() {
        let grid = periodic_grid_2d(64, 1.0);
        // A weight independent of n: make ω'(r) ≡ 0 via enormous std.
        let params = ModelParams { eps: 0.04, omega_std: 1e12, ..ModelParams::default() };
        let phi_m = build_phase_field(&Surface::circle([0.0, 0.0], 0.35), params.eps, &grid);
        let phi_c = build_phase_field(&Surface::circle([0.0, 0.0], 0.22), params.eps, &grid);
        let ca = ScalarField::constant(&grid, 1.0);
        let g = coupling_gradient_cortex(&phi_m, &phi_c, &ca, &params).unwrap();
        assert!(g.normal_variation.max_abs() < 1e-10 * g.smooth.max_abs());
        // c_a ≡ 0 zeroes everything.
        let zero = ScalarField::zeros(&grid);
        let g0 = coupling_gradient_cortex(&phi_m, &phi_c, &zero, &params).unwrap();
        assert_eq!(g0.total.max_abs(), 0.0);
    }

    #[test]
    fn radial_symmetry_of_coupling_fields() {
        // Concentric circles: the membrane coupling gradient (a scalar field)
        // must be a function of radius alone; compare symmetric cells.
        let grid = periodic_grid_2d(96, 1.0);
        let params = ModelParams { eps: 0.05, ..ModelParams::default() };
        let phi_m = build_phase_field(&Surface::circle([0.0, 0.0], 0.33), params.eps, &grid);
        let phi_c = build_phase_field(&Surface::circle([0.0, 0.0], 0.2), params.eps, &grid);
        let ca = ScalarField::constant(&grid, 1.0);
        let g = coupling_gradient_membrane(&phi_m, &phi_c, &ca, &params).unwrap();
        let n = 96;
        let scale = g.total.max_abs();
        for (i, j) in [(70, 48), (60, 60), (48, 75)] {
            let v = g.total.at(i, j, 0);
            // Mirror across both axes (the grid is symmetric about 0).
            let vm = g.total.at(n - 1 - i, j, 0);
            assert!((v - vm).abs() <= 1e-8 * scale, "asymmetry {v} vs {vm}");
        }
    }

    fn directional_derivative_error(
        energy: &dyn Fn(&ScalarField) -> f64,
        grad: &ScalarField,
        base: &ScalarField,
        dirs: &[ScalarField],
        tau: f64,
    ) -> f64 {
        let vol = base.grid().cell_volume();
        let mut worst = 0.0f64;
        for v in dirs {
            let plus = ScalarField::from_values(
                base.grid(),
                base.values().iter().zip(v.values()).map(|(a, b)| a + tau * b).collect(),
            )
            .unwrap();
            let minus = ScalarField::from_values(
                base.grid(),
                base.values().iter().zip(v.values()).map(|(a, b)| a - tau * b).collect(),
            )
            .unwrap();
            let fd = (energy(&plus) - energy(&minus)) / (2.0 * tau);
            let ip = crate::util::chunk_sum_with(grad.values().len(), |i| {
                grad.values()[i] * v.values()[i]
            }) * vol;
            let denom = fd.abs().max(ip.abs()).max(1e-12);
            worst = worst.max((fd - ip).abs() / denom);
        }
        worst
    }

    #[test]
    fn variational_consistency_gl_and_willmore() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let grid = periodic_grid_2d(64, 1.0);
        let params = params_2d(0.06);
        let phi = build_phase_field(&Surface::circle([0.0, 0.0], 0.3), params.eps, &grid);
        let dirs: Vec<_> = (0..5).map(|_| random_direction(&grid, &mut rng)).collect();

        let sigma = 1.3;
        let mu = chemical_potential(&phi, &params).unwrap();
        let grad_gl = ScalarField::from_values(
            &grid,
            mu.values().iter().map(|v| sigma * v).collect(),
        )
        .unwrap();
        let err = directional_derivative_error(
            &|f| gl_energy(f, sigma, &params).unwrap(),
            &grad_gl,
            &phi,
            &dirs,
            2e-5,
        );
        assert!(err < 1e-5, "GL gradient mismatch {err}");

        let b = 0.02;
        let w = willmore_gradient(&phi, &params).unwrap();
        let grad_w =
            ScalarField::from_values(&grid, w.values().iter().map(|v| b * v).collect()).unwrap();
        let err = directional_derivative_error(
            &|f| willmore_energy(f, b, &params).unwrap(),
            &grad_w,
            &phi,
            &dirs,
            2e-5,
        );
        assert!(err < 1e-5, "Willmore gradient mismatch {err}");
    }

    #[test]
    fn variational_consistency_coupling_gradients() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let grid = periodic_grid_2d(64, 1.0);
        // The tight tube cutoff keeps cells from crossing the mask boundary
        // under the ±τ perturbations (each crossing costs a cutoff-sized
        // jump in the energy).
        let params = ModelParams {
            eps: 0.06,
            spring_k: 2.0,
            tube_cutoff_rel: 1e-10,
            ..ModelParams::default()
        };
        let phi_m = build_phase_field(&Surface::circle([0.0, 0.0], 0.33), params.eps, &grid);
        let phi_c = build_phase_field(&Surface::circle([0.0, 0.0], 0.2), params.eps, &grid);
        let ca = ScalarField::from_fn(&grid, |x| 1.0 + 0.3 * (x[0] * 6.0).sin());
        let dirs: Vec<_> = (0..4).map(|_| random_direction(&grid, &mut rng)).collect();

        let gm = coupling_gradient_membrane(&phi_m, &phi_c, &ca, &params).unwrap();
        let err = directional_derivative_error(
            &|f| coupling_energy(f, &phi_c, &ca, &params).unwrap(),
            &gm.total,
            &phi_m,
            &dirs,
            1e-4,
        );
        assert!(err < 1e-5, "membrane coupling gradient mismatch {err}");

        let gc = coupling_gradient_cortex(&phi_m, &phi_c, &ca, &params).unwrap();
        let err = directional_derivative_error(
            &|f| coupling_energy(&phi_m, f, &ca, &params).unwrap(),
            &gc.total,
            &phi_c,
            &dirs,
            2e-5,
        );
        assert!(err < 1e-4, "cortex coupling gradient mismatch {err}");
    }

    #[test]
    fn force_isolation_with_gl_only() {
        let grid = periodic_grid_2d(48, 1.0);
        let params = ModelParams {
            eps: 0.05,
            bend_m: 0.0,
            bend_c: 0.0,
            spring_k: 0.0,
            sigma_m: 1.4,
            sigma_c: 0.7,
            ..ModelParams::default()
        };
        let phi_m = build_phase_field(&Surface::circle([0.0, 0.0], 0.3), params.eps, &grid);
        let phi_c = build_phase_field(&Surface::circle([0.0, 0.0], 0.18), params.eps, &grid);
        let ca = ScalarField::zeros(&grid);
        let k = force_k(None, &phi_m, &phi_c, &ca, &params).unwrap();

        let mu_m = chemical_potential(&phi_m, &params).unwrap();
        let mu_c = chemical_potential(&phi_c, &params).unwrap();
        let gm = crate::fields::gradient(&phi_m, crate::fields::BoundaryCondition::Periodic).unwrap();
        let gc = crate::fields::gradient(&phi_c, crate::fields::BoundaryCondition::Periodic).unwrap();
        for idx in 0..grid.len() {
            for a in 0..2 {
                let want = params.sigma_m * mu_m.values()[idx] * gm.at(a, idx)
                    + params.sigma_c * mu_c.values()[idx] * gc.at(a, idx);
                let got = k.at(a, idx);
                assert!((want - got).abs() < 1e-12 * (1.0 + want.abs()));
            }
        }
    }

    #[test]
    fn force_zero_for_pure_phases() {
        let grid = periodic_grid_2d(16, 1.0);
        let params = ModelParams::default();
        let pure = ScalarField::constant(&grid, 1.0);
        let ca = ScalarField::zeros(&grid);
        let k = force_k(None, &pure, &pure, &ca, &params).unwrap();
        for a in 0..2 {
            assert!(k.comp(a).iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn total_energy_report() {
        let grid = periodic_grid_2d(32, 1.0);
        let params = ModelParams { rho: 2.0, spring_k: 0.0, ..ModelParams::default() };
        // Zero state.
        let zero_u = VectorField::zeros(&grid);
        let pure = ScalarField::constant(&grid, 1.0);
        let ca = ScalarField::zeros(&grid);
        let rep = total_energy(&zero_u, &pure, &pure, &ca, &params).unwrap();
        assert_eq!(rep.total, 0.0);
        // Kinetic of u ≡ (1,0) with ρ = 2 on the unit box: ½·2·1 = 1.
        let u = VectorField::from_fn(&grid, |_| [1.0, 0.0, 0.0]);
        let rep = total_energy(&u, &pure, &pure, &ca, &params).unwrap();
        assert!((rep.kinetic - 1.0).abs() < 1e-12);
        assert!((rep.total - rep.kinetic).abs() < 1e-12);
    }

    #[test]
    fn gl_energy_concentrates_on_sphere_area() {
        // Optimal-profile sphere: GL energy ≈ Z σ · 4πR².
        let eps = 0.02;
        let radius = 0.3;
        let grid = Arc::new(Grid::centered(3, 0.9, 180, BoundaryKind::Physical).unwrap());
        let params = params_2d(eps);
        let phi = build_phase_field(&Surface::sphere([0.0; 3], radius), eps, &grid);
        let e = gl_energy(&phi, 1.0, &params).unwrap();
        let sharp = Z_CONSTANT * 4.0 * std::f64::consts::PI * radius * radius;
        assert!((e - sharp).abs() < 0.02 * sharp, "E = {e} vs {sharp}");
    }
}
