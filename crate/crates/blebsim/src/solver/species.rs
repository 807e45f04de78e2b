//! GL-weighted linker transport on the diffuse cortex:
//! `e_ε ∂_t c - V_n H_φ c - div(e_ε D ∇c) + div(e_ε u_τ c) = ± e_ε r`.
//!
//! The equation is evolved in its weighted form on the cells where `e_ε`
//! is above the tube cutoff and frozen elsewhere (it carries no meaning in
//! the outer region). Diffusion is implicit with face-averaged weights and
//! zero flux across the mask boundary, so `Σ e_ε c` is conserved exactly by
//! the diffusive and advective fluxes; curvature and reaction terms are
//! explicit.

use std::sync::Arc;

use crate::energies::{
    diffuse_normal_and_curvature, gl_density, ModelParams, ZetaParams,
};
use crate::fields::{Grid, ScalarField, VectorField};

use super::linsolve::conjugate_gradient;
use super::state::StepConfig;
use super::SolverError;

/// Effective reaction rate `r = β c_i - c_a ζ(φ_m, n)`.
///
/// The default ζ is a logistic switch in the stretch proxy
/// `ℓ = ε√2·atanh(φ_m)`, the distance to the membrane mid-surface encoded in
/// the local phase value; the orientation argument is accepted for the
/// model signature but the default ζ does not use it.
pub fn reaction_rate(
    c_a: &ScalarField,
    c_i: &ScalarField,
    phi_m: &ScalarField,
    _normal: Option<&VectorField>,
    params: &ModelParams,
) -> ScalarField {
    let grid = c_a.grid().clone();
    let mut r = ScalarField::zeros(&grid);
    for i in 0..grid.len() {
        let zeta = zeta_of(phi_m.values()[i], params);
        r.values_mut()[i] = params.repair_beta * c_i.values()[i] - c_a.values()[i] * zeta;
    }
    r
}

fn zeta_of(phi_m: f64, params: &ModelParams) -> f64 {
    match params.zeta {
        ZetaParams::Zero => 0.0,
        ZetaParams::Sigmoid { amplitude, critical, width } => {
            let clamped = phi_m.clamp(-1.0 + 1e-12, 1.0 - 1e-12);
            let ell = params.eps * 2f64.sqrt() * clamped.atanh();
            amplitude / (1.0 + (-(ell - critical) / width).exp())
        }
    }
}

pub(crate) struct SpeciesWorkspace {
    pub e_c: ScalarField,
    pub mask: Vec<bool>,
    pub normal: VectorField,
    pub h_phi: ScalarField,
}

impl SpeciesWorkspace {
    pub fn new(phi_c: &ScalarField, params: &ModelParams) -> Result<Self, SolverError> {
        let e_c = gl_density(phi_c, params)?;
        let cutoff = params.tube_cutoff_rel * e_c.max_abs();
        let mask = e_c.values().iter().map(|&v| v > cutoff).collect();
        let (normal, h_phi) = diffuse_normal_and_curvature(phi_c, params)?;
        Ok(Self { e_c, mask, normal, h_phi })
    }
}

/// One semi-implicit step of a single species field. `sign` is `+1` for the
/// active and `-1` for the inactive density.
#[allow(clippy::too_many_arguments)]
pub(crate) fn step_one_species(
    c: &ScalarField,
    ws: &SpeciesWorkspace,
    u: &VectorField,
    reaction: &ScalarField,
    sign: f64,
    diffusivity: f64,
    params: &ModelParams,
    cfg: &StepConfig,
) -> Result<ScalarField, SolverError> {
    let grid = c.grid().clone();
    let dim = grid.dim();
    let n = grid.len();
    let dt = cfg.dt;
    let h = grid.spacings();
    let _ = params;

    // Explicit part: e∂tc ⊇ V_n H_φ c - div(e u_τ c) + sign·e·r
    // with V_n = u·n_φ and u_τ = (I - n⊗n) u on the tube.
    let mut rhs = vec![0.0; n];
    for idx in 0..n {
        if !ws.mask[idx] {
            continue;
        }
        let e = ws.e_c.values()[idx];
        let mut vn = 0.0;
        for a in 0..dim {
            vn += u.at(a, idx) * ws.normal.at(a, idx);
        }
        rhs[idx] = e / dt * c.values()[idx]
            + vn * ws.h_phi.values()[idx] * c.values()[idx]
            + sign * e * reaction.values()[idx];
    }

    // Advective flux divergence (explicit, face-centered averages).
    let u_tau = tangential_velocity(u, &ws.normal, &grid);
    for axis in 0..dim {
        let stride = stride_of(&grid, axis);
        let count = grid.cells()[axis];
        for idx in 0..n {
            if !ws.mask[idx] {
                continue;
            }
            let coord = axis_coord(&grid, idx, axis);
            // Faces to the + and - side; flux only between masked cells.
            for (dir, neigh_ok) in [(1isize, coord + 1 < count), (-1isize, coord > 0)] {
                if !neigh_ok {
                    continue;
                }
                let nidx = (idx as isize + dir * stride as isize) as usize;
                if !ws.mask[nidx] {
                    continue;
                }
                let e_face = 0.5 * (ws.e_c.values()[idx] + ws.e_c.values()[nidx]);
                let u_face = 0.5 * (u_tau.at(axis, idx) + u_tau.at(axis, nidx));
                let c_face = 0.5 * (c.values()[idx] + c.values()[nidx]);
                // Outward flux through this face.
                let flux = e_face * u_face * c_face * dir as f64;
                rhs[idx] -= flux / h[axis];
            }
        }
    }

    // Implicit weighted diffusion: (e/dt) c - div(e D ∇c) on the mask.
    let diag: Vec<f64> = (0..n)
        .map(|i| if ws.mask[i] { ws.e_c.values()[i] / dt } else { 1.0 })
        .collect();
    for (i, r) in rhs.iter_mut().enumerate() {
        if !ws.mask[i] {
            *r = c.values()[i];
        }
    }
    let mask = &ws.mask;
    let e_vals = ws.e_c.values();
    let grid_ref = &grid;
    let apply = |v: &[f64], out: &mut [f64]| {
        for idx in 0..n {
            if !mask[idx] {
                out[idx] = v[idx];
                continue;
            }
            let mut acc = e_vals[idx] / dt * v[idx];
            for axis in 0..dim {
                let stride = stride_of(grid_ref, axis);
                let count = grid_ref.cells()[axis];
                let coord = axis_coord(grid_ref, idx, axis);
                for (dir, ok) in [(1isize, coord + 1 < count), (-1isize, coord > 0)] {
                    if !ok {
                        continue;
                    }
                    let nidx = (idx as isize + dir * stride as isize) as usize;
                    if !mask[nidx] {
                        continue;
                    }
                    let e_face = 0.5 * (e_vals[idx] + e_vals[nidx]);
                    acc -= diffusivity * e_face * (v[nidx] - v[idx]) / (h[axis] * h[axis]);
                }
            }
            out[idx] = acc;
        }
    };

    let mut x = c.values().to_vec();
    conjugate_gradient(apply, &rhs, &mut x, Some(&diag), cfg.implicit_tol, cfg.max_linear_iters)?;
    Ok(ScalarField::from_values(&grid, x).map_err(crate::energies::EnergyError::from)?)
}

fn tangential_velocity(u: &VectorField, normal: &VectorField, grid: &Arc<Grid>) -> VectorField {
    let dim = grid.dim();
    let mut out = VectorField::zeros(grid);
    for idx in 0..grid.len() {
        let mut un = 0.0;
        for a in 0..dim {
            un += u.at(a, idx) * normal.at(a, idx);
        }
        for a in 0..dim {
            out.comp_mut(a)[idx] = u.at(a, idx) - un * normal.at(a, idx);
        }
    }
    out
}

fn stride_of(grid: &Grid, axis: usize) -> usize {
    match axis {
        0 => 1,
        1 => grid.cells()[0],
        _ => grid.cells()[0] * grid.cells()[1],
    }
}

fn axis_coord(grid: &Grid, idx: usize, axis: usize) -> usize {
    grid.coords(idx)[axis]
}

/// `∫ e_ε c` over the masked tube, the conserved quantity of the weighted
/// transport.
pub fn weighted_species_mass(c: &ScalarField, e: &ScalarField, mask: &[bool]) -> f64 {
    let vol = c.grid().cell_volume();
    let mut acc = 0.0;
    for i in 0..c.values().len() {
        if mask[i] {
            acc += e.values()[i] * c.values()[i];
        }
    }
    acc * vol
}
