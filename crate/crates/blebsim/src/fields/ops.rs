//! Second-order finite-difference operators and cell-sum quadrature.
//!
//! `gradient` and `divergence` use central differences and are exact negative
//! adjoints of each other on periodic grids, so the discrete product rule
//! `∫ f div v + ∫ ∇f·v = 0` holds to round-off there. `laplacian` is the
//! compact 3-point stencil per axis.

use std::sync::Arc;

use super::field::{Padded, ScalarField, VectorField};
use super::grid::{BoundaryCondition, Grid};
use super::FieldError;

fn cell_loop(grid: &Arc<Grid>, mut body: impl FnMut(usize, usize, usize, usize)) {
    let [nx, ny, nz] = grid.cells();
    let mut idx = 0;
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                body(i, j, k, idx);
                idx += 1;
            }
        }
    }
}

/// Central-difference gradient, `(∇f)_a = (f_{+a} - f_{-a}) / (2 h_a)`.
pub fn gradient(f: &ScalarField, bc: BoundaryCondition) -> Result<VectorField, FieldError> {
    f.check_finite("gradient input")?;
    let grid = f.grid().clone();
    let p = f.padded(bc)?;
    let h = grid.spacings();
    let mut out = VectorField::zeros(&grid);
    for a in 0..grid.dim() {
        let inv = 1.0 / (2.0 * h[a]);
        let mut d = [0isize; 3];
        let comp = out.comp_mut(a);
        cell_loop(&grid, |i, j, k, idx| {
            d = [0; 3];
            d[a] = 1;
            let hi = p.get(i, j, k, d[0], d[1], d[2]);
            let lo = p.get(i, j, k, -d[0], -d[1], -d[2]);
            comp[idx] = (hi - lo) * inv;
        });
    }
    Ok(out)
}

/// Central-difference divergence, the negative adjoint of [`gradient`] on
/// periodic grids.
pub fn divergence(v: &VectorField, bc: BoundaryCondition) -> Result<ScalarField, FieldError> {
    v.check_finite("divergence input")?;
    let grid = v.grid().clone();
    let h = grid.spacings();
    let mut out = ScalarField::zeros(&grid);
    for a in 0..grid.dim() {
        let p = v.comp_field(a).padded(bc)?;
        let inv = 1.0 / (2.0 * h[a]);
        let vals = out.values_mut();
        cell_loop(&grid, |i, j, k, idx| {
            let mut d = [0isize; 3];
            d[a] = 1;
            let hi = p.get(i, j, k, d[0], d[1], d[2]);
            let lo = p.get(i, j, k, -d[0], -d[1], -d[2]);
            vals[idx] += (hi - lo) * inv;
        });
    }
    Ok(out)
}

/// Compact 3-point Laplacian per axis.
pub fn laplacian(f: &ScalarField, bc: BoundaryCondition) -> Result<ScalarField, FieldError> {
    f.check_finite("laplacian input")?;
    let grid = f.grid().clone();
    let p = f.padded(bc)?;
    let mut out = ScalarField::zeros(&grid);
    laplacian_of_padded(&p, &mut out);
    Ok(out)
}

/// Laplacian from an already padded field into `out` (no allocation).
pub fn laplacian_of_padded(p: &Padded, out: &mut ScalarField) {
    let grid = p.grid().clone();
    let h = grid.spacings();
    let vals = out.values_mut();
    cell_loop(&grid, |i, j, k, idx| {
        let c = p.get(i, j, k, 0, 0, 0);
        let mut acc = 0.0;
        for a in 0..grid.dim() {
            let mut d = [0isize; 3];
            d[a] = 1;
            let hi = p.get(i, j, k, d[0], d[1], d[2]);
            let lo = p.get(i, j, k, -d[0], -d[1], -d[2]);
            acc += (hi - 2.0 * c + lo) / (h[a] * h[a]);
        }
        vals[idx] = acc;
    });
}

/// Midpoint cell-sum quadrature `∫_Ω f dx ≈ Σ f_c · vol(cell)`.
pub fn integrate(f: &ScalarField) -> f64 {
    let vol = f.grid().cell_volume();
    crate::util::chunk_sum(f.values()) * vol
}

/// `∫ f g dx` as a cell sum.
pub fn inner_product(f: &ScalarField, g: &ScalarField) -> Result<f64, FieldError> {
    if !f.grid().same_layout(g.grid()) {
        return Err(FieldError::GridMismatch);
    }
    let vol = f.grid().cell_volume();
    let s = crate::util::chunk_sum_with(f.values().len(), |i| f.values()[i] * g.values()[i]);
    Ok(s * vol)
}

/// `∫ v·w dx` for vector fields.
pub fn inner_product_vec(v: &VectorField, w: &VectorField) -> Result<f64, FieldError> {
    if !v.grid().same_layout(w.grid()) {
        return Err(FieldError::GridMismatch);
    }
    let n = v.grid().len();
    let dim = v.grid().dim();
    let vol = v.grid().cell_volume();
    let mut total = 0.0;
    for c in 0..dim {
        let (a, b) = (v.comp(c), w.comp(c));
        total += crate::util::chunk_sum_with(n, |i| a[i] * b[i]);
    }
    Ok(total * vol)
}
