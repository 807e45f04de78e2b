//! Linker coupling: the generalised Hookean spring energy
//! `C = ∬ e_ε(φ_m)(y) (k/2) e_ε(φ_c)(x) |x-y|² c_a(x) ω(x,y,n_φc(x)) dx dy`
//! and its L² gradients in both phase fields, plus the two species force
//! terms of the momentum balance.
//!
//! The double integral is a direct cell sum restricted to the interface
//! tubes (cells with `e_ε > 10⁻⁶ · max e_ε`); tubes are codimension one, so
//! this stays affordable at study scale. Derivatives of the pair density are
//! analytic closed forms, never numerical differences.

use std::sync::Arc;

use rayon::prelude::*;

use crate::fields::{divergence, gradient, Grid, ScalarField, VectorField};
use crate::util::vec3;

use super::gl::{chemical_potential, gl_density, phase_bc, weighted_gl_gradient};
use super::params::ModelParams;
use super::EnergyError;

/// Default relative `e_ε` cutoff defining the interface tube in the double
/// sums (the `tube_cutoff_rel` model parameter).
pub const TUBE_CUTOFF_REL: f64 = 1e-6;

/// Orientation weight `ω(x, y, n) = ω̂ exp(±(r-1)²/s²)` with
/// `r = (x-y)·n/|x-y|`.
pub fn coupling_weight(
    x: [f64; 3],
    y: [f64; 3],
    n: [f64; 3],
    params: &ModelParams,
) -> Result<f64, EnergyError> {
    let u = vec3::sub(x, y);
    let s = vec3::norm(u);
    if s == 0.0 {
        return Err(EnergyError::CoincidentPoints);
    }
    let r = vec3::dot(u, n) / s;
    Ok(omega(r, params))
}

#[inline]
fn omega(r: f64, params: &ModelParams) -> f64 {
    let q = (r - 1.0) / params.omega_std;
    params.omega_hat * (params.weight_sign.factor() * q * q).exp()
}

/// dω/dr in closed form.
#[inline]
fn omega_prime(r: f64, params: &ModelParams) -> f64 {
    let sgn = params.weight_sign.factor();
    let s2 = params.omega_std * params.omega_std;
    omega(r, params) * sgn * 2.0 * (r - 1.0) / s2
}

/// Per-pair geometric quantities shared by the density and its derivatives.
struct Pair {
    u: [f64; 3],
    dist: f64,
    r: f64,
    w: f64,
    w_prime: f64,
}

impl Pair {
    #[inline]
    fn new(x: [f64; 3], y: [f64; 3], n: [f64; 3], params: &ModelParams) -> Option<Pair> {
        let u = vec3::sub(x, y);
        let dist2 = vec3::dot(u, u);
        if dist2 == 0.0 {
            // |x-y|² ω stays bounded, so the diagonal contributes nothing.
            return None;
        }
        let dist = dist2.sqrt();
        let r = vec3::dot(u, n) / dist;
        Some(Pair { u, dist, r, w: omega(r, params), w_prime: omega_prime(r, params) })
    }

    /// `c(x, y, c_a, n) = (k/2)|x-y|² c_a ω`.
    #[inline]
    fn density(&self, k: f64, ca: f64) -> f64 {
        0.5 * k * self.dist * self.dist * ca * self.w
    }

    /// `∂c/∂c_a`.
    #[inline]
    fn d_ca(&self, k: f64) -> f64 {
        0.5 * k * self.dist * self.dist * self.w
    }

    /// `∇_y c` at fixed `n` and `c_a`.
    #[inline]
    fn grad_y(&self, k: f64, ca: f64, n: [f64; 3]) -> [f64; 3] {
        // ∇_y r = -n/|u| + r u/|u|².
        let mut g = [0.0; 3];
        for a in 0..3 {
            let dr = -n[a] / self.dist + self.r * self.u[a] / (self.dist * self.dist);
            g[a] = 0.5
                * k
                * ca
                * (-2.0 * self.u[a] * self.w + self.dist * self.dist * self.w_prime * dr);
        }
        g
    }

    /// `∇_n c`.
    #[inline]
    fn grad_n(&self, k: f64, ca: f64) -> [f64; 3] {
        let f = 0.5 * k * ca * self.dist * self.dist * self.w_prime / self.dist;
        vec3::scale(self.u, f)
    }

    /// `∇_x (∂c/∂c_a)` at fixed `n` (explicit x-dependence only).
    #[inline]
    fn grad_x_d_ca(&self, k: f64, n: [f64; 3]) -> [f64; 3] {
        let mut g = [0.0; 3];
        for a in 0..3 {
            let dr = n[a] / self.dist - self.r * self.u[a] / (self.dist * self.dist);
            g[a] = 0.5 * k * (2.0 * self.u[a] * self.w + self.dist * self.dist * self.w_prime * dr);
        }
        g
    }
}

/// Cells of one interface tube.
pub struct TubeCells {
    pub indices: Vec<usize>,
    pub pos: Vec<[f64; 3]>,
    pub e: Vec<f64>,
}

/// Tube of a GL density field: cells with `e > cutoff_rel · max(e)`.
pub fn tube_cells(e: &ScalarField, cutoff_rel: f64) -> TubeCells {
    let grid = e.grid();
    let cutoff = cutoff_rel * e.max_abs();
    let mut indices = Vec::new();
    let mut pos = Vec::new();
    let mut vals = Vec::new();
    for (idx, &v) in e.values().iter().enumerate() {
        if v > cutoff {
            let [i, j, k] = grid.coords(idx);
            indices.push(idx);
            pos.push(grid.cell_center(i, j, k));
            vals.push(v);
        }
    }
    TubeCells { indices, pos, e: vals }
}

/// Everything the coupling formulas need about the two phase fields.
///
/// The cortex normal is the smooth regularization
/// `n = ∇φ_c/√(|∇φ_c|² + th²)` with `th` the degeneracy threshold: inside
/// the tube it is the unit normal up to `O(th²/|∇φ|²)`, it decays to zero in
/// flat regions, and it keeps the coupling energy smooth in φ_c (a hard
/// threshold would put jumps into the variational tests). `lambda` is the
/// regularized reciprocal `1/√(|∇φ_c|² + th²)` that stands in for `1/|∇φ_c|`
/// in the normal-variation term.
pub(crate) struct CouplingContext {
    pub grid: Arc<Grid>,
    pub e_m: ScalarField,
    pub e_c: ScalarField,
    pub tube_m: TubeCells,
    pub tube_c: TubeCells,
    /// Regularized diffuse cortex normal per cortex tube cell.
    pub n_c: Vec<[f64; 3]>,
    /// `|∇φ_c|` per cortex tube cell.
    pub grad_c: Vec<f64>,
    /// `1/√(|∇φ_c|² + th²)` per cortex tube cell.
    pub lambda: Vec<f64>,
    /// Active-linker density per cortex tube cell.
    pub ca: Vec<f64>,
}

impl CouplingContext {
    pub fn new(
        phi_m: &ScalarField,
        phi_c: &ScalarField,
        c_a: &ScalarField,
        params: &ModelParams,
    ) -> Result<Self, EnergyError> {
        let grid = phi_m.grid().clone();
        if !grid.same_layout(phi_c.grid()) || !grid.same_layout(c_a.grid()) {
            return Err(EnergyError::Field(crate::fields::FieldError::GridMismatch));
        }
        let e_m = gl_density(phi_m, params)?;
        let e_c = gl_density(phi_c, params)?;
        let tube_m = tube_cells(&e_m, params.tube_cutoff_rel);
        let tube_c = tube_cells(&e_c, params.tube_cutoff_rel);
        let grad = gradient(phi_c, phase_bc(&grid))?;
        let th2 = params.gradient_threshold().powi(2);
        let dim = grid.dim();
        let mut n_c = Vec::with_capacity(tube_c.indices.len());
        let mut grad_c = Vec::with_capacity(tube_c.indices.len());
        let mut lambda = Vec::with_capacity(tube_c.indices.len());
        let mut ca = Vec::with_capacity(tube_c.indices.len());
        for &idx in &tube_c.indices {
            let mut g = [0.0; 3];
            for a in 0..dim {
                g[a] = grad.comp(a)[idx];
            }
            let mag2 = vec3::dot(g, g);
            let lam = 1.0 / (mag2 + th2).sqrt();
            grad_c.push(mag2.sqrt());
            lambda.push(lam);
            n_c.push(vec3::scale(g, lam));
            ca.push(c_a.values()[idx]);
        }
        Ok(Self { grid, e_m, e_c, tube_m, tube_c, n_c, grad_c, lambda, ca })
    }

    /// `C⁰_{Γ²}(y) = ∫ e_ε(φ_c)(x) c(x, y, c_a, n_φc) dx` on the membrane
    /// tube cells (zero elsewhere).
    ///
    /// For an isotropic weight (`s = ∞`, ω ≡ ω̂) the quadratic pair kernel
    /// factorizes exactly into moments of `e_ε c_a`, turning the double sum
    /// into a single pass.
    fn cortex_integral_field(&self, params: &ModelParams) -> ScalarField {
        let vol = self.grid.cell_volume();
        let k = params.spring_k;
        let tc = &self.tube_c;
        let values: Vec<f64> = if params.omega_std.is_infinite() {
            let m = weighted_moments(&tc.pos, &tc.e, &self.ca, vol);
            self.tube_m
                .pos
                .iter()
                .map(|&y| {
                    0.5 * k
                        * params.omega_hat
                        * (m.second - 2.0 * vec3::dot(y, m.first) + vec3::dot(y, y) * m.zeroth)
                })
                .collect()
        } else {
            self.tube_m
                .pos
                .par_iter()
                .map(|&y| {
                    let mut acc = 0.0;
                    for ((&x, &ex), (&nx, &cax)) in tc
                        .pos
                        .iter()
                        .zip(&tc.e)
                        .zip(self.n_c.iter().zip(&self.ca))
                    {
                        if let Some(pair) = Pair::new(x, y, nx, params) {
                            acc += ex * pair.density(k, cax);
                        }
                    }
                    acc * vol
                })
                .collect()
        };
        let mut field = ScalarField::zeros(&self.grid);
        for (&idx, v) in self.tube_m.indices.iter().zip(values) {
            field.values_mut()[idx] = v;
        }
        field
    }

    /// Membrane-side integrals at the cortex tube cells: the scalar
    /// `C⁰_{Γ¹}(x)`, `∂_{c_a} C⁰_{Γ¹}(x)`, and the vectors `∫ e_m ∇_n c dy`
    /// and `∫ e_m ∇_x ∂_{c_a} c dy`.
    pub(crate) fn membrane_integrals(&self, params: &ModelParams) -> MembraneIntegrals {
        let vol = self.grid.cell_volume();
        let k = params.spring_k;
        let tm = &self.tube_m;
        if params.omega_std.is_infinite() {
            // ω ≡ ω̂ and ∇_n c ≡ 0: everything reduces to moments of e_m.
            let ones = vec![1.0; tm.pos.len()];
            let m = weighted_moments(&tm.pos, &tm.e, &ones, vol);
            let per_cell = self
                .tube_c
                .pos
                .iter()
                .enumerate()
                .map(|(ci, &x)| {
                    let quad =
                        m.second - 2.0 * vec3::dot(x, m.first) + vec3::dot(x, x) * m.zeroth;
                    let dca = 0.5 * k * params.omega_hat * quad;
                    let gx = vec3::scale(
                        vec3::sub(vec3::scale(x, m.zeroth), m.first),
                        k * params.omega_hat,
                    );
                    ([dca * self.ca[ci], dca], [0.0; 3], gx)
                })
                .collect();
            return MembraneIntegrals { per_cell };
        }
        let per_cell: Vec<([f64; 2], [f64; 3], [f64; 3])> = self
            .tube_c
            .pos
            .par_iter()
            .enumerate()
            .map(|(ci, &x)| {
                let n = self.n_c[ci];
                let cax = self.ca[ci];
                let mut c0 = 0.0;
                let mut dca = 0.0;
                let mut gn = [0.0; 3];
                let mut gx = [0.0; 3];
                for (&y, &ey) in tm.pos.iter().zip(&tm.e) {
                    if let Some(pair) = Pair::new(x, y, n, params) {
                        c0 += ey * pair.density(k, cax);
                        dca += ey * pair.d_ca(k);
                        let pn = pair.grad_n(k, cax);
                        let px = pair.grad_x_d_ca(k, n);
                        for a in 0..3 {
                            gn[a] += ey * pn[a];
                            gx[a] += ey * px[a];
                        }
                    }
                }
                (
                    [c0 * vol, dca * vol],
                    vec3::scale(gn, vol),
                    vec3::scale(gx, vol),
                )
            })
            .collect();
        MembraneIntegrals { per_cell }
    }
}

/// Masked moments `Σ w e`, `Σ w e x`, `Σ w e |x|²` (times cell volume).
struct Moments {
    zeroth: f64,
    first: [f64; 3],
    second: f64,
}

fn weighted_moments(pos: &[[f64; 3]], e: &[f64], w: &[f64], vol: f64) -> Moments {
    let mut zeroth = 0.0;
    let mut first = [0.0; 3];
    let mut second = 0.0;
    for ((&x, &ev), &wv) in pos.iter().zip(e).zip(w) {
        let q = ev * wv;
        zeroth += q;
        second += q * vec3::dot(x, x);
        for a in 0..3 {
            first[a] += q * x[a];
        }
    }
    Moments { zeroth: zeroth * vol, first: vec3::scale(first, vol), second: second * vol }
}

pub(crate) struct MembraneIntegrals {
    /// Per cortex-tube cell: ([C⁰, ∂_c C⁰], ∫e_m ∇_n c, ∫e_m ∇_x ∂_c c).
    per_cell: Vec<([f64; 2], [f64; 3], [f64; 3])>,
}

/// Total coupling energy (a non-negative scalar).
pub fn coupling_energy(
    phi_m: &ScalarField,
    phi_c: &ScalarField,
    c_a: &ScalarField,
    params: &ModelParams,
) -> Result<f64, EnergyError> {
    let ctx = CouplingContext::new(phi_m, phi_c, c_a, params)?;
    Ok(coupling_energy_with(&ctx, params))
}

pub(crate) fn coupling_energy_with(ctx: &CouplingContext, params: &ModelParams) -> f64 {
    // Σ_y e_m(y) C⁰(y) · vol, with C⁰ the masked cortex integral.
    let c0 = ctx.cortex_integral_field(params);
    energy_from_c0(ctx, &c0)
}

fn energy_from_c0(ctx: &CouplingContext, c0: &ScalarField) -> f64 {
    let vol = ctx.grid.cell_volume();
    let mut acc = 0.0;
    for (&idx, &e) in ctx.tube_m.indices.iter().zip(&ctx.tube_m.e) {
        acc += e * c0.values()[idx];
    }
    acc * vol
}

/// L² gradient of the coupling energy in the membrane phase field, plus the
/// cached inner integral `C⁰_{Γ²}`.
pub struct MembraneCouplingGradient {
    pub total: ScalarField,
    pub c0: ScalarField,
}

pub fn coupling_gradient_membrane(
    phi_m: &ScalarField,
    phi_c: &ScalarField,
    c_a: &ScalarField,
    params: &ModelParams,
) -> Result<MembraneCouplingGradient, EnergyError> {
    let ctx = CouplingContext::new(phi_m, phi_c, c_a, params)?;
    coupling_gradient_membrane_with(&ctx, phi_m, params)
}

pub(crate) fn coupling_gradient_membrane_with(
    ctx: &CouplingContext,
    phi_m: &ScalarField,
    params: &ModelParams,
) -> Result<MembraneCouplingGradient, EnergyError> {
    let c0 = ctx.cortex_integral_field(params);
    let bc = phase_bc(&ctx.grid);
    let phi_p = phi_m.padded(bc)?;
    let w_p = c0.padded(bc)?;
    // μ(φ_m)·C⁰ - ε ∫ e_c ∇_y φ_m·∇_y c dx, assembled in the flux form that
    // is the exact discrete gradient of Σ e_m C⁰.
    let total = weighted_gl_gradient(&phi_p, &w_p, &ctx.grid, params.eps);
    Ok(MembraneCouplingGradient { total, c0 })
}

/// L² gradient in the cortex phase field: the smooth part
/// `μ(φ_c)·C⁰_{Γ¹} - ε ∫ e_m ∇_x c·∇_x φ_c dy` and the normal-variation
/// divergence term, which carries `P_{n_φc}/|∇φ_c|` and is masked to the
/// tube.
pub struct CortexCouplingGradient {
    pub total: ScalarField,
    pub smooth: ScalarField,
    pub normal_variation: ScalarField,
    pub c0: ScalarField,
}

pub fn coupling_gradient_cortex(
    phi_m: &ScalarField,
    phi_c: &ScalarField,
    c_a: &ScalarField,
    params: &ModelParams,
) -> Result<CortexCouplingGradient, EnergyError> {
    let ctx = CouplingContext::new(phi_m, phi_c, c_a, params)?;
    coupling_gradient_cortex_with(&ctx, phi_c, params)
}

pub(crate) fn coupling_gradient_cortex_with(
    ctx: &CouplingContext,
    phi_c: &ScalarField,
    params: &ModelParams,
) -> Result<CortexCouplingGradient, EnergyError> {
    let ints = ctx.membrane_integrals(params);
    coupling_gradient_cortex_from(ctx, &ints, phi_c, params)
}

pub(crate) fn coupling_gradient_cortex_from(
    ctx: &CouplingContext,
    ints: &MembraneIntegrals,
    phi_c: &ScalarField,
    params: &ModelParams,
) -> Result<CortexCouplingGradient, EnergyError> {
    let grid = &ctx.grid;
    let dim = grid.dim();

    let mut c0 = ScalarField::zeros(grid);
    for (&idx, cell) in ctx.tube_c.indices.iter().zip(&ints.per_cell) {
        c0.values_mut()[idx] = cell.0[0];
    }

    let bc = phase_bc(grid);
    let phi_p = phi_c.padded(bc)?;
    let w_p = c0.padded(bc)?;
    let smooth = weighted_gl_gradient(&phi_p, &w_p, grid, params.eps);

    // q = e_c (I - n⊗n)(∫ e_m ∇_n c dy) λ on the tube; term = -div q. This
    // is the exact first variation of the regularized normal.
    let mut q = VectorField::zeros(grid);
    for (slot, (&idx, cell)) in ctx.tube_c.indices.iter().zip(&ints.per_cell).enumerate() {
        let n = ctx.n_c[slot];
        let gn = cell.1;
        let proj = vec3::sub(gn, vec3::scale(n, vec3::dot(gn, n)));
        let f = ctx.tube_c.e[slot] * ctx.lambda[slot];
        for a in 0..dim {
            q.comp_mut(a)[idx] = f * proj[a];
        }
    }
    let div_q = divergence(&q, bc)?;
    let normal_variation = ScalarField::from_values(
        grid,
        div_q.values().iter().map(|v| -v).collect(),
    )?;

    let total = ScalarField::from_values(
        grid,
        smooth
            .values()
            .iter()
            .zip(normal_variation.values())
            .map(|(a, b)| a + b)
            .collect(),
    )?;
    Ok(CortexCouplingGradient { total, smooth, normal_variation, c0 })
}

/// The two species force terms of the momentum balance:
/// `G = -∂_c C⁰_{Γ¹} · H_φc · c_a · n_φc` and
/// `H = -e_ε(φ_c) · c_a · P_{n_φc} ∇_x ∂_c C⁰_{Γ¹}`.
pub struct LinkerForces {
    pub g_term: VectorField,
    pub h_term: VectorField,
}

pub fn linker_forces(
    phi_m: &ScalarField,
    phi_c: &ScalarField,
    c_a: &ScalarField,
    params: &ModelParams,
) -> Result<LinkerForces, EnergyError> {
    let ctx = CouplingContext::new(phi_m, phi_c, c_a, params)?;
    linker_forces_with(&ctx, phi_c, params)
}

pub(crate) fn linker_forces_with(
    ctx: &CouplingContext,
    phi_c: &ScalarField,
    params: &ModelParams,
) -> Result<LinkerForces, EnergyError> {
    let ints = ctx.membrane_integrals(params);
    linker_forces_from(ctx, &ints, phi_c, params)
}

pub(crate) fn linker_forces_from(
    ctx: &CouplingContext,
    ints: &MembraneIntegrals,
    phi_c: &ScalarField,
    params: &ModelParams,
) -> Result<LinkerForces, EnergyError> {
    let grid = &ctx.grid;
    let dim = grid.dim();
    let mu_c = chemical_potential(phi_c, params)?;
    // ∇_x(∂_c C⁰) is the gradient of a composite: the explicit x-dependence
    // plus the chain through the normal field, (∇n)ᵀ ∫ e_m ∇_n ∂_c c dy. The
    // chain carries a curvature-sized factor and survives the tangential
    // projection, so it cannot be dropped.
    let n_field = regularized_normal_field(phi_c, params)?;
    let jac = normal_jacobian(&n_field, grid);
    let mut g_term = VectorField::zeros(grid);
    let mut h_term = VectorField::zeros(grid);
    for (slot, (&idx, cell)) in ctx.tube_c.indices.iter().zip(&ints.per_cell).enumerate() {
        let n = ctx.n_c[slot];
        let ca = ctx.ca[slot];
        let dca = cell.0[1];
        // H_φc = |∇φ_c| μ(φ_c).
        let h_curv = ctx.grad_c[slot] * mu_c.values()[idx];
        // ca·∇_x^expl(∂_c C⁰) + (∇n)ᵀ (∫ e_m ∇_n c dy); the second factor is
        // G_n, which already carries ca.
        let gx = cell.2;
        let gn = cell.1;
        let mut full = [0.0; 3];
        for a in 0..dim {
            let mut chain = 0.0;
            for b in 0..dim {
                // (∇n)ᵀ_{ab} = ∂_a n_b.
                chain += jac[idx][b * 3 + a] * gn[b];
            }
            full[a] = ca * gx[a] + chain;
        }
        let proj = vec3::sub(full, vec3::scale(n, vec3::dot(full, n)));
        let ec = ctx.tube_c.e[slot];
        for a in 0..dim {
            g_term.comp_mut(a)[idx] = -dca * h_curv * ca * n[a];
            h_term.comp_mut(a)[idx] = -ec * proj[a];
        }
    }
    Ok(LinkerForces { g_term, h_term })
}

/// The regularized diffuse normal as a full-grid field (smooth everywhere,
/// decaying to zero in flat regions).
fn regularized_normal_field(
    phi_c: &ScalarField,
    params: &ModelParams,
) -> Result<VectorField, EnergyError> {
    let grid = phi_c.grid().clone();
    let grad = gradient(phi_c, phase_bc(&grid))?;
    let th2 = params.gradient_threshold().powi(2);
    let dim = grid.dim();
    let mut out = VectorField::zeros(&grid);
    for idx in 0..grid.len() {
        let mut g = [0.0; 3];
        for a in 0..dim {
            g[a] = grad.comp(a)[idx];
        }
        let lam = 1.0 / (vec3::dot(g, g) + th2).sqrt();
        for a in 0..dim {
            out.comp_mut(a)[idx] = g[a] * lam;
        }
    }
    Ok(out)
}

/// Central-difference Jacobian `∂_a n_b` per cell, row-major `[a*3 + b]`.
fn normal_jacobian(n_field: &VectorField, grid: &Arc<Grid>) -> Vec<[f64; 9]> {
    let dim = grid.dim();
    let h = grid.spacings();
    let [nx, ny, _] = grid.cells();
    let n = grid.len();
    let mut out = vec![[0.0; 9]; n];
    for b in 0..dim {
        let comp = n_field.comp(b);
        for idx in 0..n {
            let [i, j, k] = grid.coords(idx);
            for a in 0..dim {
                let mut d = [0isize; 3];
                d[a] = 1;
                let at = |di: isize, dj: isize, dk: isize| -> f64 {
                    // Clamped neighbours: the tube never touches the walls.
                    let ii = (i as isize + di).clamp(0, nx as isize - 1) as usize;
                    let jj = (j as isize + dj).clamp(0, ny as isize - 1) as usize;
                    let kk = (k as isize + dk).clamp(0, grid.cells()[2] as isize - 1) as usize;
                    comp[grid.idx(ii, jj, kk)]
                };
                out[idx][a * 3 + b] =
                    (at(d[0], d[1], d[2]) - at(-d[0], -d[1], -d[2])) / (2.0 * h[a]);
            }
        }
    }
    out
}
