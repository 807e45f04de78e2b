//! Uniform Cartesian grids, discrete fields and finite-difference operators.

mod field;
mod grid;
pub mod io;
mod ops;

pub use field::{Padded, ScalarField, VectorField};
pub use grid::{BoundaryCondition, BoundaryKind, Grid, GHOST};
pub use ops::{
    divergence, gradient, inner_product, inner_product_vec, integrate, laplacian,
    laplacian_of_padded,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FieldError {
    #[error("field contains non-finite values: {0}")]
    NonFinite(String),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("boundary condition incompatible with grid boundary kind")]
    BoundaryMismatch,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
