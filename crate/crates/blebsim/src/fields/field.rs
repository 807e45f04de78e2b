//! Scalar and vector fields on a [`Grid`], plus ghost-padded views.

use std::sync::Arc;

use super::grid::{BoundaryCondition, BoundaryKind, Grid, GHOST};
use super::FieldError;

/// Cell-centered scalar field. Values are stored x-fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.len()] }
    }

    pub fn constant(grid: &Arc<Grid>, value: f64) -> Self {
        Self { grid: grid.clone(), values: vec![value; grid.len()] }
    }

    pub fn from_values(grid: &Arc<Grid>, values: Vec<f64>) -> Result<Self, FieldError> {
        if values.len() != grid.len() {
            return Err(FieldError::GridMismatch);
        }
        Ok(Self { grid: grid.clone(), values })
    }

    /// Sample `f` at every cell center.
    pub fn from_fn(grid: &Arc<Grid>, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        let [nx, ny, nz] = grid.cells();
        let mut values = Vec::with_capacity(grid.len());
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    values.push(f(grid.cell_center(i, j, k)));
                }
            }
        }
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.values[self.grid.idx(i, j, k)]
    }

    pub fn check_finite(&self, what: &str) -> Result<(), FieldError> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite(what.to_string()));
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Pad with [`GHOST`] layers per the boundary condition.
    pub fn padded(&self, bc: BoundaryCondition) -> Result<Padded, FieldError> {
        Padded::from_scalar(self, bc)
    }
}

/// Cell-centered vector field, one `dim`-component vector per cell.
/// Components are stored as separate contiguous planes.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Arc<Grid>,
    data: Vec<f64>,
}

impl VectorField {
    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self { grid: grid.clone(), data: vec![0.0; grid.len() * grid.dim()] }
    }

    pub fn from_components(grid: &Arc<Grid>, comps: Vec<Vec<f64>>) -> Result<Self, FieldError> {
        if comps.len() != grid.dim() || comps.iter().any(|c| c.len() != grid.len()) {
            return Err(FieldError::GridMismatch);
        }
        let mut data = Vec::with_capacity(grid.len() * grid.dim());
        for c in comps {
            data.extend_from_slice(&c);
        }
        Ok(Self { grid: grid.clone(), data })
    }

    pub fn from_fn(grid: &Arc<Grid>, mut f: impl FnMut([f64; 3]) -> [f64; 3]) -> Self {
        let [nx, ny, nz] = grid.cells();
        let n = grid.len();
        let mut data = vec![0.0; n * grid.dim()];
        for k in 0..nz {
            for j in 0..ny {
                for i in 0..nx {
                    let v = f(grid.cell_center(i, j, k));
                    let idx = grid.idx(i, j, k);
                    for c in 0..grid.dim() {
                        data[c * n + idx] = v[c];
                    }
                }
            }
        }
        Self { grid: grid.clone(), data }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn comp(&self, c: usize) -> &[f64] {
        let n = self.grid.len();
        &self.data[c * n..(c + 1) * n]
    }

    pub fn comp_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.len();
        &mut self.data[c * n..(c + 1) * n]
    }

    /// Component `c` as a standalone scalar field (copies).
    pub fn comp_field(&self, c: usize) -> ScalarField {
        ScalarField { grid: self.grid.clone(), values: self.comp(c).to_vec() }
    }

    #[inline]
    pub fn at(&self, c: usize, idx: usize) -> f64 {
        self.data[c * self.grid.len() + idx]
    }

    pub fn check_finite(&self, what: &str) -> Result<(), FieldError> {
        if self.data.iter().any(|v| !v.is_finite()) {
            return Err(FieldError::NonFinite(what.to_string()));
        }
        Ok(())
    }
}

/// Ghost-padded copy of a scalar field. Indices run over
/// `-GHOST..n+GHOST` on active axes; this is what stencils read from.
#[derive(Debug, Clone)]
pub struct Padded {
    grid: Arc<Grid>,
    ext: [usize; 3],
    data: Vec<f64>,
}

impl Padded {
    fn from_scalar(field: &ScalarField, bc: BoundaryCondition) -> Result<Self, FieldError> {
        let grid = field.grid().clone();
        match (grid.boundary(), bc) {
            (BoundaryKind::Periodic, BoundaryCondition::Periodic) => {}
            (BoundaryKind::Physical, BoundaryCondition::Periodic) => {
                return Err(FieldError::BoundaryMismatch);
            }
            (BoundaryKind::Periodic, _) => return Err(FieldError::BoundaryMismatch),
            (BoundaryKind::Physical, _) => {}
        }
        let dim = grid.dim();
        let n = grid.cells();
        let mut ext = [1usize; 3];
        for a in 0..dim {
            ext[a] = n[a] + 2 * GHOST;
        }
        let mut data = vec![0.0; ext[0] * ext[1] * ext[2]];

        let pidx = |i: usize, j: usize, k: usize| (k * ext[1] + j) * ext[0] + i;
        let off = |a: usize| if a < dim { GHOST } else { 0 };

        // Interior copy.
        for k in 0..n[2] {
            for j in 0..n[1] {
                for i in 0..n[0] {
                    data[pidx(i + off(0), j + off(1), k + off(2))] = field.values[grid.idx(i, j, k)];
                }
            }
        }

        // Fill ghosts axis by axis so corners end up consistent.
        for axis in 0..dim {
            let na = n[axis];
            // Ranges of the other padded axes to sweep (already-filled ghosts included).
            let sweep = |a: usize| if a < dim { 0..ext[a] } else { 0..1 };
            for g in 0..GHOST {
                // Ghost index (as padded offset) and its source interior index.
                let (lo_dst, hi_dst) = (GHOST - 1 - g, GHOST + na + g);
                let (lo_src, hi_src, sign) = match bc {
                    BoundaryCondition::Periodic => (GHOST + na - 1 - g, GHOST + g, 1.0),
                    BoundaryCondition::NeumannZero | BoundaryCondition::FluxZero => {
                        (GHOST + g, GHOST + na - 1 - g, 1.0)
                    }
                    BoundaryCondition::DirichletZero => (GHOST + g, GHOST + na - 1 - g, -1.0),
                };
                let mut fill = |dst: usize, src: usize| {
                    for k in sweep(2) {
                        for j in sweep(1) {
                            for i in sweep(0) {
                                let (mut d, mut s) = ([i, j, k], [i, j, k]);
                                d[axis] = dst;
                                s[axis] = src;
                                data[pidx(d[0], d[1], d[2])] = sign * data[pidx(s[0], s[1], s[2])];
                            }
                        }
                    }
                };
                fill(lo_dst, lo_src);
                fill(hi_dst, hi_src);
            }
        }

        Ok(Self { grid, ext, data })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Value at interior cell `(i, j, k)` shifted by `(di, dj, dk)` which may
    /// reach up to [`GHOST`] cells outside.
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, di: isize, dj: isize, dk: isize) -> f64 {
        let dim = self.grid.dim();
        let o = |a: usize| if a < dim { GHOST as isize } else { 0 };
        let ii = (i as isize + di + o(0)) as usize;
        let jj = (j as isize + dj + o(1)) as usize;
        let kk = (k as isize + dk + o(2)) as usize;
        self.data[(kk * self.ext[1] + jj) * self.ext[0] + ii]
    }
}
