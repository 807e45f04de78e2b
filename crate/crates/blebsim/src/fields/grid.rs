//! Uniform Cartesian grids in 1, 2 or 3 dimensions.
//!
//! A grid stores cell counts, physical extents and an origin; field values
//! live at cell centers `origin + (i + 1/2) h`. All axes of one grid share
//! a boundary kind (periodic or physical walls).

use serde::{Deserialize, Serialize};

use super::FieldError;

/// Boundary treatment shared by all axes of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryKind {
    /// The domain wraps around in every axis.
    Periodic,
    /// Physical walls; ghost values come from a per-field [`BoundaryCondition`].
    Physical,
}

/// Per-field boundary condition on physical grids.
///
/// `FluxZero` keeps mirror ghost values (so tangential derivatives are
/// sensible) and is realized exactly by zeroing normal face fluxes in
/// flux-form assemblies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryCondition {
    Periodic,
    /// Mirror ghosts, `∂_ν f = 0` across the boundary face.
    NeumannZero,
    /// Odd reflection, `f = 0` interpolated at the boundary face.
    DirichletZero,
    /// Mirror ghosts plus exactly zero normal flux in flux-form operators.
    FluxZero,
}

impl BoundaryCondition {
    /// Ghost values are a mirrored copy of the interior.
    pub(crate) fn mirrors(self) -> bool {
        matches!(self, BoundaryCondition::NeumannZero | BoundaryCondition::FluxZero)
    }
}

/// Number of ghost layers kept on each side. Three layers cover the reach of
/// the composite sixth-order operator `ΔΔΔ`.
pub const GHOST: usize = 3;

/// Uniform Cartesian grid. Unused axes have one cell and unit extent so the
/// same index arithmetic serves every dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    dim: usize,
    cells: [usize; 3],
    origin: [f64; 3],
    extent: [f64; 3],
    boundary: BoundaryKind,
}

impl Grid {
    pub fn new(
        dim: usize,
        cells: &[usize],
        origin: &[f64],
        extent: &[f64],
        boundary: BoundaryKind,
    ) -> Result<Self, FieldError> {
        if !(1..=3).contains(&dim) {
            return Err(FieldError::InvalidGrid(format!("dim must be 1..=3, got {dim}")));
        }
        if cells.len() != dim || origin.len() != dim || extent.len() != dim {
            return Err(FieldError::InvalidGrid(
                "cells/origin/extent length must equal dim".into(),
            ));
        }
        let mut c = [1usize; 3];
        let mut o = [0.0f64; 3];
        let mut e = [1.0f64; 3];
        for a in 0..dim {
            if cells[a] == 0 {
                return Err(FieldError::InvalidGrid(format!("axis {a} has zero cells")));
            }
            if !(extent[a] > 0.0) || !extent[a].is_finite() || !origin[a].is_finite() {
                return Err(FieldError::InvalidGrid(format!("axis {a} has invalid extent/origin")));
            }
            c[a] = cells[a];
            o[a] = origin[a];
            e[a] = extent[a];
        }
        Ok(Self { dim, cells: c, origin: o, extent: e, boundary })
    }

    pub fn new_1d(cells: usize, origin: f64, extent: f64, boundary: BoundaryKind) -> Result<Self, FieldError> {
        Self::new(1, &[cells], &[origin], &[extent], boundary)
    }

    pub fn new_2d(cells: [usize; 2], origin: [f64; 2], extent: [f64; 2], boundary: BoundaryKind) -> Result<Self, FieldError> {
        Self::new(2, &cells, &origin, &extent, boundary)
    }

    pub fn new_3d(cells: [usize; 3], origin: [f64; 3], extent: [f64; 3], boundary: BoundaryKind) -> Result<Self, FieldError> {
        Self::new(3, &cells, &origin, &extent, boundary)
    }

    /// Cube `[-side/2, side/2]^dim` with `n` cells per axis.
    pub fn centered(dim: usize, side: f64, n: usize, boundary: BoundaryKind) -> Result<Self, FieldError> {
        let cells = [n, n, n];
        let origin = [-side / 2.0; 3];
        let extent = [side; 3];
        Self::new(dim, &cells[..dim], &origin[..dim], &extent[..dim], boundary)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn cells(&self) -> [usize; 3] {
        self.cells
    }

    pub fn origin(&self) -> [f64; 3] {
        self.origin
    }

    pub fn extent(&self) -> [f64; 3] {
        self.extent
    }

    pub fn boundary(&self) -> BoundaryKind {
        self.boundary
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.extent[axis] / self.cells[axis] as f64
    }

    pub fn spacings(&self) -> [f64; 3] {
        [self.spacing(0), self.spacing(1), self.spacing(2)]
    }

    /// Smallest spacing over active axes.
    pub fn min_spacing(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).fold(f64::INFINITY, f64::min)
    }

    /// Total number of cells.
    pub fn len(&self) -> usize {
        self.cells[0] * self.cells[1] * self.cells[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell volume (area in 2D, length in 1D).
    pub fn cell_volume(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    /// Flat index of cell `(i, j, k)`; `j`, `k` must be zero on inactive axes.
    #[inline]
    pub fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        (k * self.cells[1] + j) * self.cells[0] + i
    }

    /// Inverse of [`Grid::idx`].
    #[inline]
    pub fn coords(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.cells[0];
        let j = (idx / self.cells[0]) % self.cells[1];
        let k = idx / (self.cells[0] * self.cells[1]);
        [i, j, k]
    }

    /// Physical position of the center of cell `(i, j, k)`; inactive axes
    /// report zero.
    #[inline]
    pub fn cell_center(&self, i: usize, j: usize, k: usize) -> [f64; 3] {
        let h = self.spacings();
        let mut x = [0.0; 3];
        let ijk = [i, j, k];
        for a in 0..self.dim {
            x[a] = self.origin[a] + (ijk[a] as f64 + 0.5) * h[a];
        }
        x
    }

    pub fn same_layout(&self, other: &Grid) -> bool {
        self == other
    }
}
