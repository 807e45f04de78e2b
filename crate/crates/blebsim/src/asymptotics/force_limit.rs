//! ε → 0 convergence studies of diffuse interfacial forces against their
//! sharp-interface references.
//!
//! Each study runs a decreasing ε sequence with the grid tied to ε
//! (`ε/h` fixed), so the observed convergence is in ε alone. The Willmore
//! study fits its undetermined limit constant from the coarse runs and
//! checks the finest run against the prediction; the coupling studies fit
//! the ratio diffuse/sharp and report it next to the claimed factors
//! `3Z²/2` and `(3Z/2)²` (and next to `Z²`).

use serde::Serialize;

use crate::energies::{
    phase_bc, CouplingContext, ModelParams,
};
use crate::fields::{gradient, ScalarField, VectorField};
use crate::geometry::{build_phase_field, Surface, Z_CONSTANT};
use crate::util::{chunk_sum_with, fitted_order, vec3};

use super::diffuse::{diffuse_surface_force, tube_grid, SurfaceForceKind};
use super::oracle::SurfaceQuadrature;
use super::sharp::SharpCoupling;

/// Result of one ε-refinement study.
#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceStudy {
    pub kind: String,
    pub eps: Vec<f64>,
    pub measured: Vec<f64>,
    pub reference: f64,
    pub rel_errors: Vec<f64>,
    pub fitted_order: f64,
}

impl ConvergenceStudy {
    fn new(kind: &str, eps: Vec<f64>, measured: Vec<f64>, reference: f64) -> Self {
        let rel_errors: Vec<f64> = measured
            .iter()
            .map(|m| (m - reference).abs() / reference.abs().max(1e-300))
            .collect();
        let order = fitted_order(&eps, &rel_errors);
        Self { kind: kind.into(), eps, measured, reference, rel_errors, fitted_order: order }
    }

    pub fn final_rel_error(&self) -> f64 {
        *self.rel_errors.last().unwrap()
    }
}

/// Gaussian radial bump test field centered on radius `r0`.
pub fn radial_bump(r0: f64, width: f64) -> impl Fn([f64; 3]) -> [f64; 3] + Sync + Copy {
    move |x: [f64; 3]| {
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt().max(1e-12);
        let bump = (-((r - r0) / width).powi(2)).exp();
        [bump * x[0] / r, bump * x[1] / r, bump * x[2] / r]
    }
}

/// In-plane rotational bump (2D), tangential to circles about the origin.
pub fn rotational_bump(r0: f64, width: f64) -> impl Fn([f64; 3]) -> [f64; 3] + Sync + Copy {
    move |x: [f64; 3]| {
        let r = x[0].hypot(x[1]).max(1e-12);
        let bump = (-((r - r0) / width).powi(2)).exp();
        [-bump * x[1] / r, bump * x[0] / r, 0.0]
    }
}

/// Localized constant-direction blob. The normal-variation family needs
/// `ψ·ν` to vary along the interface (for any field with constant normal
/// trace, `M̄₀ = ∮ ∂_s(∇_n C⁰·t̂)(ψ·ν) ds` integrates to zero).
pub fn localized_blob(
    center: [f64; 3],
    width: f64,
    dir: [f64; 3],
) -> impl Fn([f64; 3]) -> [f64; 3] + Sync + Copy {
    move |x: [f64; 3]| {
        let d2 = (x[0] - center[0]).powi(2) + (x[1] - center[1]).powi(2) + (x[2] - center[2]).powi(2);
        let bump = (-d2 / (width * width)).exp();
        [bump * dir[0], bump * dir[1], bump * dir[2]]
    }
}

/// GL force study: `σ ∫ μ ∇φ·ψ` against `-Zσ ∫_Γ H ν·ψ`.
pub fn gl_force_study(
    surface: &Surface,
    sigma: f64,
    eps_seq: &[f64],
    eps_over_h: f64,
    psi: impl Fn([f64; 3]) -> [f64; 3] + Sync + Copy,
) -> ConvergenceStudy {
    let quad = SurfaceQuadrature::build(surface, quad_order(surface));
    let sharp = -Z_CONSTANT * sigma * quad.integrate(|n| n.h_mean * vec3::dot(psi(n.pos), n.normal));
    let measured: Vec<f64> = eps_seq
        .iter()
        .map(|&eps| {
            diffuse_surface_force(
                surface,
                eps,
                eps / eps_over_h,
                SurfaceForceKind::GinzburgLandau,
                sigma,
                psi,
            )
        })
        .collect();
    ConvergenceStudy::new("gl", eps_seq.to_vec(), measured, sharp)
}

/// Willmore force study. The lemma's limit constant is not pinned, so the
/// study fits it from the two coarsest ε (Richardson in ε) and reports the
/// finest run against the fitted prediction; `Z`-based candidate values are
/// reported alongside.
#[derive(Debug, Clone, Serialize)]
pub struct WillmoreStudy {
    pub eps: Vec<f64>,
    pub measured: Vec<f64>,
    /// Raw oracle `∫ (2Δ_Γ H + H(H² - 4K)) ν·ψ` (geometry-positive H).
    pub oracle_raw: f64,
    pub fitted_constant: f64,
    /// |measured - C_fit·oracle| / |C_fit·oracle| at the finest ε.
    pub final_rel_error: f64,
    /// Candidate predictions for C in units of the rigidity: Z/2, Z, 3Z/2.
    pub z_candidates: [f64; 3],
}

pub fn willmore_force_study(
    surface: &Surface,
    rigidity: f64,
    eps_seq: &[f64],
    eps_over_h: f64,
    psi: impl Fn([f64; 3]) -> [f64; 3] + Sync + Copy,
) -> WillmoreStudy {
    let quad = SurfaceQuadrature::build(surface, quad_order(surface));
    let oracle_raw = quad.integrate(|n| {
        let w = 2.0 * n.lb_h + n.h_mean * (n.h_mean * n.h_mean - 4.0 * n.k_gauss);
        w * vec3::dot(psi(n.pos), n.normal)
    });
    let measured: Vec<f64> = eps_seq
        .iter()
        .map(|&eps| {
            diffuse_surface_force(
                surface,
                eps,
                eps / eps_over_h,
                SurfaceForceKind::Willmore,
                rigidity,
                psi,
            )
        })
        .collect();

    let n = measured.len();
    let (fitted_constant, final_rel_error) = if oracle_raw.abs() > 1e-12 && n >= 3 {
        // Fit C on the two coarser runs: assume measured = C·oracle + a·ε.
        let (e0, e1) = (eps_seq[n - 3], eps_seq[n - 2]);
        let (m0, m1) = (measured[n - 3], measured[n - 2]);
        let limit = m1 + (m1 - m0) * e1 / (e0 - e1);
        let c_fit = limit / oracle_raw;
        let pred = c_fit * oracle_raw;
        let err = (measured[n - 1] - pred).abs() / pred.abs();
        (c_fit, err)
    } else {
        // Sphere-like: the sharp value is 0; report the decreasing magnitude.
        (0.0, measured.last().unwrap().abs())
    };
    WillmoreStudy {
        eps: eps_seq.to_vec(),
        measured,
        oracle_raw,
        fitted_constant,
        final_rel_error,
        z_candidates: [
            rigidity * Z_CONSTANT / 2.0,
            rigidity * Z_CONSTANT,
            rigidity * 1.5 * Z_CONSTANT,
        ],
    }
}

/// The five coupling force families of the momentum balance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingFamily {
    /// Membrane gradient force (Ā + B̄) vs Ī₀.
    Membrane,
    /// Smooth cortex gradient force (C̄ + D̄) vs J̄₀.
    Cortex,
    /// Normal-variation cortex force (Ē) vs M̄₀.
    NormalVariation,
    /// Curvature-weighted species force (Ḡ) vs K̄₀.
    SpeciesCurvature,
    /// Tangential species force (H̄) vs L̄₀.
    SpeciesTangential,
}

impl CouplingFamily {
    pub fn name(self) -> &'static str {
        match self {
            CouplingFamily::Membrane => "coupling_membrane",
            CouplingFamily::Cortex => "coupling_cortex",
            CouplingFamily::NormalVariation => "coupling_normal_variation",
            CouplingFamily::SpeciesCurvature => "coupling_species_curvature",
            CouplingFamily::SpeciesTangential => "coupling_species_tangential",
        }
    }

    /// Factor the paper's limit identities claim for this family.
    pub fn paper_factor(self) -> f64 {
        let z = Z_CONSTANT;
        match self {
            CouplingFamily::Membrane
            | CouplingFamily::Cortex
            | CouplingFamily::SpeciesCurvature => 1.5 * z * z,
            CouplingFamily::NormalVariation | CouplingFamily::SpeciesTangential => {
                (1.5 * z) * (1.5 * z)
            }
        }
    }
}

/// One family's ratio study.
#[derive(Debug, Clone, Serialize)]
pub struct CouplingStudy {
    pub family: String,
    pub eps: Vec<f64>,
    pub diffuse: Vec<f64>,
    pub sharp: f64,
    pub ratios: Vec<f64>,
    /// Richardson extrapolation of the ratio from the two finest runs.
    pub fitted_ratio: f64,
    pub paper_factor: f64,
    pub z_squared: f64,
}

/// Configuration of a coupling-force convergence study on a two-surface
/// setup.
pub struct CouplingStudyConfig<'a> {
    pub membrane: Surface,
    pub cortex: Surface,
    pub params: &'a ModelParams,
    pub eps_seq: &'a [f64],
    pub eps_over_h: f64,
    /// Active-linker surface density on the cortex.
    pub ca: &'a (dyn Fn([f64; 3]) -> f64 + Sync),
    /// Test field paired with ν-directed families.
    pub psi_normal: &'a (dyn Fn([f64; 3]) -> [f64; 3] + Sync),
    /// Test field paired with the tangential family.
    pub psi_tangential: &'a (dyn Fn([f64; 3]) -> [f64; 3] + Sync),
    /// Test field paired with the normal-variation family (its normal trace
    /// must vary along the cortex).
    pub psi_localized: &'a (dyn Fn([f64; 3]) -> [f64; 3] + Sync),
}

/// Run all five families in one sweep (shared double integrals per ε).
pub fn coupling_force_study(cfg: &CouplingStudyConfig) -> Vec<CouplingStudy> {
    let quad_m = SurfaceQuadrature::build(&cfg.membrane, 384);
    let quad_c = SurfaceQuadrature::build(&cfg.cortex, 384);
    let sharp = SharpCoupling::new(&quad_m, &quad_c, |x| (cfg.ca)(x), cfg.params);
    let references = [
        sharp.i_bar(|x| (cfg.psi_normal)(x)),
        sharp.j_bar(|x| (cfg.psi_normal)(x)),
        sharp.m_bar(|x| (cfg.psi_localized)(x)),
        sharp.k_bar(|x| (cfg.psi_normal)(x)),
        sharp.l_bar(|x| (cfg.psi_tangential)(x)),
    ];

    let families = [
        CouplingFamily::Membrane,
        CouplingFamily::Cortex,
        CouplingFamily::NormalVariation,
        CouplingFamily::SpeciesCurvature,
        CouplingFamily::SpeciesTangential,
    ];
    let mut diffuse: Vec<Vec<f64>> = vec![Vec::new(); 5];

    for &eps in cfg.eps_seq {
        let h = eps / cfg.eps_over_h;
        let params = ModelParams { eps, ..*cfg.params };
        // One lattice covering both tubes with saturated margins.
        let grid = shared_grid(&cfg.membrane, &cfg.cortex, eps, h);
        let phi_m = build_phase_field(&cfg.membrane, eps, &grid);
        let phi_c = build_phase_field(&cfg.cortex, eps, &grid);
        let cortex = cfg.cortex;
        let ca_field = ScalarField::from_fn(&grid, |x| {
            match cortex.project(x) {
                Ok(p) => (cfg.ca)(p),
                Err(_) => 0.0,
            }
        });
        let ctx = CouplingContext::new(&phi_m, &phi_c, &ca_field, &params).expect("context");
        let gm = coupling_membrane(&ctx, &phi_m, &params);
        let ints = ctx.membrane_integrals(&params);
        let gc = crate::energies::coupling_gradient_cortex_from(&ctx, &ints, &phi_c, &params)
            .expect("cortex gradient");
        let lf = crate::energies::linker_forces_from(&ctx, &ints, &phi_c, &params)
            .expect("linker forces");

        let grad_m = gradient(&phi_m, phase_bc(&grid)).expect("grad");
        let grad_c = gradient(&phi_c, phase_bc(&grid)).expect("grad");

        diffuse[0].push(pair_scalar(&gm, &grad_m, cfg.psi_normal));
        diffuse[1].push(pair_scalar(&gc.smooth, &grad_c, cfg.psi_normal));
        diffuse[2].push(pair_scalar(&gc.normal_variation, &grad_c, cfg.psi_localized));
        diffuse[3].push(pair_vector(&lf.g_term, cfg.psi_normal));
        diffuse[4].push(pair_vector(&lf.h_term, cfg.psi_tangential));
    }

    families
        .iter()
        .zip(references)
        .zip(diffuse)
        .map(|((family, reference), measured)| {
            let ratios: Vec<f64> = measured.iter().map(|m| m / reference).collect();
            let n = ratios.len();
            let fitted_ratio = if n >= 2 {
                let (e0, e1) = (cfg.eps_seq[n - 2], cfg.eps_seq[n - 1]);
                ratios[n - 1] + (ratios[n - 1] - ratios[n - 2]) * e1 / (e0 - e1)
            } else {
                ratios[n - 1]
            };
            CouplingStudy {
                family: family.name().into(),
                eps: cfg.eps_seq.to_vec(),
                diffuse: measured,
                sharp: reference,
                ratios,
                fitted_ratio,
                paper_factor: family.paper_factor(),
                z_squared: Z_CONSTANT * Z_CONSTANT,
            }
        })
        .collect()
}

fn coupling_membrane(
    ctx: &CouplingContext,
    phi_m: &ScalarField,
    params: &ModelParams,
) -> ScalarField {
    crate::energies::coupling_gradient_membrane_with(ctx, phi_m, params)
        .expect("membrane gradient")
        .total
}

fn pair_scalar(
    w: &ScalarField,
    grad_phi: &VectorField,
    psi: &(dyn Fn([f64; 3]) -> [f64; 3] + Sync),
) -> f64 {
    let grid = w.grid();
    let dim = grid.dim();
    let vol = grid.cell_volume();
    chunk_sum_with(grid.len(), |idx| {
        let wv = w.values()[idx];
        if wv == 0.0 {
            return 0.0;
        }
        let [i, j, k] = grid.coords(idx);
        let p = psi(grid.cell_center(i, j, k));
        let mut gp = 0.0;
        for a in 0..dim {
            gp += grad_phi.at(a, idx) * p[a];
        }
        wv * gp
    }) * vol
}

fn pair_vector(f: &VectorField, psi: &(dyn Fn([f64; 3]) -> [f64; 3] + Sync)) -> f64 {
    let grid = f.grid();
    let dim = grid.dim();
    let vol = grid.cell_volume();
    chunk_sum_with(grid.len(), |idx| {
        let [i, j, k] = grid.coords(idx);
        let p = psi(grid.cell_center(i, j, k));
        let mut acc = 0.0;
        for a in 0..dim {
            acc += f.at(a, idx) * p[a];
        }
        acc
    }) * vol
}

fn shared_grid(
    membrane: &Surface,
    cortex: &Surface,
    eps: f64,
    h: f64,
) -> std::sync::Arc<crate::fields::Grid> {
    // Union of the two tube boxes. The coupling terms are all e_ε-masked, so
    // a modest saturation margin suffices.
    let a = tube_grid(membrane, eps, h, 8.0);
    let b = tube_grid(cortex, eps, h, 8.0);
    let dim = a.dim();
    let mut cells = [1usize; 3];
    let mut origin = [0.0; 3];
    let mut extent = [1.0; 3];
    for ax in 0..dim {
        let lo = a.origin()[ax].min(b.origin()[ax]);
        let hi = (a.origin()[ax] + a.extent()[ax]).max(b.origin()[ax] + b.extent()[ax]);
        let n = ((hi - lo) / h).ceil() as usize;
        cells[ax] = n;
        origin[ax] = lo;
        extent[ax] = n as f64 * h;
    }
    std::sync::Arc::new(
        crate::fields::Grid::new(
            dim,
            &cells[..dim],
            &origin[..dim],
            &extent[..dim],
            crate::fields::BoundaryKind::Physical,
        )
        .expect("valid shared grid"),
    )
}

fn quad_order(surface: &Surface) -> usize {
    if surface.dim() == 2 {
        512
    } else {
        64
    }
}
